#ifndef HADV_CURATION_HPP
#define HADV_CURATION_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hadv/corpus.hpp"
#include "hadv/rates.hpp"
#include "hadv/rng.hpp"

namespace hadv {

enum class CurationMode {
  kAdversarial,       // fixed size, target cross-class near rate
  kAffablePositive,   // fixed size, target same-class near rate (positives)
  kAffableNegative,   // fixed size, target same-class near rate (negatives)
  kCurveRandom,       // growing sizes, every rate zero
  kCurveAffable,      // growing sizes, growth is same-class near copies
  kCurveAdversarialMix  // growing sizes, cross-class rate held constant
};

std::string_view curation_mode_name(CurationMode mode);
CurationMode curation_mode_from_name(std::string_view name);

struct CurationSpec {
  std::size_t target_size = 0;  // T
  double positive_rate = 0.0;   // rho, in (0, 1)
  double target_rate = 0.0;
  CurationMode mode = CurationMode::kAdversarial;
  double epsilon = 0.25;
  std::uint64_t seed = 0;
  // Randomly chosen fill samples are rejection-sampled to sit farther than
  // epsilon from everything already kept, so they cannot perturb the rates.
  bool far_check = true;
  std::size_t max_rejects_per_slot = 100;
  int threads = 0;
};

// Produces a derived sample from a source. The output must carry the label
// the build expects (flipped for adversarial generation, preserved for
// affable copies); the builder re-ids outputs where needed for uniqueness
// and verifies the output stays within epsilon of its source.
using TransformFn = std::function<Sample(const Sample&, Rng&)>;

struct BuildResult {
  Dataset dataset;
  nlohmann::ordered_json plan;
  RateReport verification;
  double target_rate = 0.0;
  double achieved_rate = 0.0;
};

// Fixed-size dataset with an exact cross-class near count: round(T*rho)
// positives, m = round(target * positives) of which source generated
// near-negatives; remaining slots are pool negatives far from everything
// kept. The same-class rates stay zero. The result is re-measured and must
// hit the plan exactly.
BuildResult build_adversarial_mix(const Dataset& pool,
                                  const CurationSpec& spec,
                                  const TransformFn& to_negative);

// Fixed-size dataset with an exact same-class near count in one class. The
// class is organized into groups: each group is one pool source followed by
// near copies; a group of size s contributes s-1 to the count, so C slots in
// C-m groups yield exactly m. Targets up to 1/2 use pair groups only;
// higher targets need larger groups. The other class and the cross-class
// rates stay clean.
BuildResult build_affable_mix(const Dataset& pool, const CurationSpec& spec,
                              const TransformFn& make_affable);

struct CurveTransforms {
  TransformFn to_negative;    // used by kCurveAdversarialMix
  TransformFn make_affable;   // used by kCurveAffable
};

// Nested datasets, one per size: each extends the previous one in place, the
// positive rate holds at every size, and the mode's rate contract is
// verified at every size.
std::vector<BuildResult> build_learning_curve(const Dataset& pool,
                                              std::span<const std::size_t>
                                                  sizes,
                                              const CurationSpec& spec,
                                              const CurveTransforms&
                                                  transforms);

// Bucket counts the build would materialize, without materializing.
nlohmann::ordered_json plan_build(const Dataset& pool,
                                  const CurationSpec& spec);

// Standard error of the mean: sample standard deviation over sqrt(n).
double standard_error(std::span<const double> values);

}  // namespace hadv

#endif  // HADV_CURATION_HPP
