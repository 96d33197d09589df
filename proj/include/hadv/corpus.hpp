#ifndef HADV_CORPUS_HPP
#define HADV_CORPUS_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hadv/error.hpp"

namespace hadv {

// How a sample was produced from its source, if it was derived at all.
enum class Transform { kNone, kAdversarial, kAffable, kMarkerPair };

std::string_view transform_name(Transform t);
Transform transform_from_name(std::string_view name);

// One labelled text instance with provenance.
struct Sample {
  std::string id;
  std::string text;
  std::string label;
  std::optional<std::string> source_id;
  Transform transform = Transform::kNone;
  // Unknown JSONL keys, preserved in input order across round-trips.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  bool operator==(const Sample& other) const {
    return id == other.id && text == other.text && label == other.label &&
           source_id == other.source_id && transform == other.transform &&
           extra == other.extra;
  }
};

// A tokenized text: words split on whitespace runs, punctuation attached.
struct WordSequence {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  bool operator==(const WordSequence&) const = default;
};

// Splits on runs of Unicode whitespace; punctuation stays attached to its
// word. Empty or whitespace-only input yields an empty sequence.
WordSequence tokenize(std::string_view text);

// Joins tokens with single spaces.
std::string join_words(const std::vector<std::string>& words);

// Ordered, immutable collection of samples with a label alphabet and a
// designated positive label. Sample order is stable across load/store
// round-trips; same-label neighbor counting depends on it.
class Dataset {
 public:
  // Validates: non-empty unique ids, labels covering every sample,
  // provenance present whenever transform != none. The alphabet is the set
  // of observed labels plus the positive label.
  static Dataset from_samples(std::vector<Sample> samples,
                              std::string positive_label);

  std::span<const Sample> samples() const { return samples_; }
  const Sample& at(std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  const std::set<std::string>& labels() const { return labels_; }
  const std::string& positive_label() const { return positive_label_; }

  bool operator==(const Dataset& other) const {
    return samples_ == other.samples_ && labels_ == other.labels_ &&
           positive_label_ == other.positive_label_;
  }

 private:
  Dataset() = default;

  std::vector<Sample> samples_;
  std::set<std::string> labels_;
  std::string positive_label_;
};

enum class Format { kJsonl, kTsv };

// JSONL record: {"id","text","label","source_id","transform", ...extras}.
// TSV rows are id<TAB>label<TAB>text, ingestion only.
Dataset load_dataset(const std::filesystem::path& path, Format format,
                     const std::string& positive_label);

// Canonical JSONL writer; load(write(d)) reproduces d exactly, including
// order, provenance, and unknown keys.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

struct DatasetStats {
  std::size_t size = 0;
  std::map<std::string, std::size_t> label_counts;
  // Absent when the dataset is empty.
  std::optional<double> positive_rate;
};

DatasetStats dataset_stats(const Dataset& dataset);

nlohmann::ordered_json stats_to_json(const DatasetStats& stats);

}  // namespace hadv

#endif  // HADV_CORPUS_HPP
