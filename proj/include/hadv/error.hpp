#ifndef HADV_ERROR_HPP
#define HADV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hadv {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input problems: unreadable files, malformed rows, schema violations.
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Semantic problems: undefined rates, violated preconditions, bad arguments.
struct SemanticError : Error {
  explicit SemanticError(const std::string& msg) : Error(msg) {}
};

// A curation target that cannot be met with the requested sizes.
struct InfeasibleError : Error {
  explicit InfeasibleError(const std::string& msg) : Error(msg) {}
};

// Violated internal consistency check. Reaching this is a bug.
struct InternalError : Error {
  explicit InternalError(const std::string& msg) : Error(msg) {}
};

}  // namespace hadv

#endif  // HADV_ERROR_HPP
