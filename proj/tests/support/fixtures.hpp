// The worked four-entity relation example used across the rate and marker
// tests: one source sentence, four entities, two relation-carrying pairs.
#ifndef HADV_TESTS_FIXTURES_HPP
#define HADV_TESTS_FIXTURES_HPP

#include "hadv/corpus.hpp"
#include "hadv/relgen.hpp"

namespace hadv::fixtures {

inline const char* kRel1 =
    "Gene MARKER-A inhibits MARKER-B and EFGR, but has no effect on MAPK.";
inline const char* kRel2 =
    "Gene MARKER-A inhibits KLK3 and EFGR, but has no effect on MARKER-B.";
inline const char* kRel3 =
    "Gene NLCR inhibits MARKER-A and EFGR, but has no effect on MARKER-B.";
inline const char* kRel4 =
    "Gene MARKER-A inhibits KLK3 and MARKER-B, but has no effect on MAPK.";

inline AnnotatedText gene_sentence() {
  AnnotatedText a;
  a.id = "rel";
  a.text = "Gene NLCR inhibits KLK3 and EFGR, but has no effect on MAPK.";
  a.entities = {"NLCR", "KLK3", "EFGR", "MAPK"};
  a.positive_pairs = {EntityPair::make("NLCR", "KLK3"),
                      EntityPair::make("NLCR", "EFGR")};
  return a;
}

// REL-1 (P), REL-4 (P), REL-2 (N), REL-3 (N), in that order.
inline Dataset marker_mini_dataset() {
  std::vector<Sample> samples = {
      Sample{"REL-1", kRel1, "P"},
      Sample{"REL-4", kRel4, "P"},
      Sample{"REL-2", kRel2, "N"},
      Sample{"REL-3", kRel3, "N"},
  };
  return Dataset::from_samples(std::move(samples), "P");
}

}  // namespace hadv::fixtures

#endif  // HADV_TESTS_FIXTURES_HPP
