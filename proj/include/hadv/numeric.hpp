#ifndef HADV_NUMERIC_HPP
#define HADV_NUMERIC_HPP

#include <cmath>

namespace hadv {

// Round half to even, independent of the floating-point environment.
inline long long round_half_to_even(double x) {
  const double f = std::floor(x);
  const double diff = x - f;
  const long long low = static_cast<long long>(f);
  if (diff > 0.5) return low + 1;
  if (diff < 0.5) return low;
  return low % 2 == 0 ? low : low + 1;
}

}  // namespace hadv

#endif  // HADV_NUMERIC_HPP
