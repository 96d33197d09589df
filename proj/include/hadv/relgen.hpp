#ifndef HADV_RELGEN_HPP
#define HADV_RELGEN_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hadv/corpus.hpp"
#include "hadv/rng.hpp"

namespace hadv {

// An unordered entity-name pair, stored in a canonical order.
struct EntityPair {
  std::string a;
  std::string b;

  static EntityPair make(std::string x, std::string y) {
    if (y < x) std::swap(x, y);
    return EntityPair{std::move(x), std::move(y)};
  }
  bool operator==(const EntityPair&) const = default;
};

// A source text annotated with the entities it mentions and which unordered
// entity pairs carry the target relation.
struct AnnotatedText {
  std::string id;
  std::string text;
  std::vector<std::string> entities;
  std::vector<EntityPair> positive_pairs;

  // Throws unless entities are distinct, none is a substring of another,
  // each occurs in the text as a whole token, occurrences never overlap,
  // and every positive pair names two distinct known entities.
  void validate() const;

  bool is_positive(const EntityPair& pair) const;
};

// Replaces every occurrence of the pair's entities with MARKER-A/MARKER-B:
// the entity whose first mention comes earlier in the text becomes MARKER-A.
// Occurrences match whole tokens (adjacent punctuation is fine).
std::string insert_markers(const AnnotatedText& annotated,
                           const std::string& a, const std::string& b);

// One sample per unordered entity pair: C(n,2) samples, labelled by pair
// membership in positive_pairs, ids "<source id>#p<index>". Fewer than two
// entities yields an empty list with a warning.
std::vector<Sample> enumerate_pair_samples(const AnnotatedText& annotated);

// Marker-shuffle counterpart of a positive pair: the marker text of an
// rng-chosen non-relation pair, labelled Negative. Requires at least one
// entity outside the positive pair and at least one non-relation pair.
Sample shuffle_marker_adversarial(const AnnotatedText& annotated,
                                  const EntityPair& positive_pair, Rng& rng);

// JSONL rows:
// {"id","text","entities":[...],"positive_pairs":[["A","B"],...]}.
std::vector<AnnotatedText> load_annotated(const std::filesystem::path& path);

}  // namespace hadv

#endif  // HADV_RELGEN_HPP
