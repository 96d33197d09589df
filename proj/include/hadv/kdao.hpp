#ifndef HADV_KDAO_HPP
#define HADV_KDAO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "hadv/corpus.hpp"
#include "hadv/rng.hpp"

namespace hadv {

// The keyword task is binary; samples carry these labels.
inline constexpr const char* kPositiveLabel = "P";
inline constexpr const char* kNegativeLabel = "N";

// Which keyword set must contribute a pair of distinct matches. The
// executable rule requires one trigger plus two distinct entities; the
// alternate rule swaps the pair requirement onto the triggers.
enum class KdaoRule { kPairOnEntities, kPairOnTriggers };

struct KdaoConfig {
  std::vector<std::string> trigger_keywords = {"activation", "trigger",
                                               "interact",   "inhibit",
                                               "regulate",   "suppress"};
  std::vector<std::string> entity_keywords = {"gene", "protein", "chemical"};
  std::size_t min_words = 100;
  std::size_t max_words = 250;
  KdaoRule rule = KdaoRule::kPairOnEntities;

  // Throws unless the sets are non-empty, disjoint, and no keyword is a
  // substring of another within or across sets.
  void validate() const;
};

// Labels a text: lowercase it, then require at least one keyword from one
// set and at least two distinct keywords from the other (per config.rule),
// all matched as substrings. Returns kPositiveLabel or kNegativeLabel.
std::string kdao_label(std::string_view text, const KdaoConfig& config);

// Replaces every word containing a keyword from one rng-chosen set (trigger
// or entity side, fair coin) with words drawn uniformly from the sample's
// non-keyword words; the result labels Negative by construction.
// Requires a Positive sample and a non-empty replacement pool.
Sample make_adversarial_negative(const Sample& sample, Rng& rng,
                                 const KdaoConfig& config);

// Inserts one rng-chosen trigger keyword and two distinct rng-chosen entity
// keywords at rng-chosen positions (drawn against the current length after
// each insertion); the result labels Positive by construction. Requires a
// Negative sample with at least one word.
Sample make_adversarial_positive(const Sample& sample, Rng& rng,
                                 const KdaoConfig& config);

// Duplicates three rng-chosen existing words at rng-chosen positions; the
// label is preserved. Requires at least two words.
Sample make_affable(const Sample& sample, Rng& rng, const KdaoConfig& config);

struct RawDoc {
  std::string id;
  std::string text;
};

enum class RawFormat { kJsonl, kText };

// JSONL rows {"id","text"} or one document per line (ids generated).
std::vector<RawDoc> load_raw_corpus(const std::filesystem::path& path,
                                    RawFormat format);

// Filters the corpus to [min_words, max_words], labels it, then samples
// uniformly without replacement so that exactly round(n * pos_rate) samples
// are Positive. Deterministic given the seed; output order is a seeded
// shuffle.
Dataset build_kdao_dataset(const std::vector<RawDoc>& corpus, std::size_t n,
                           double pos_rate, const KdaoConfig& config,
                           Rng& rng);

}  // namespace hadv

#endif  // HADV_KDAO_HPP
