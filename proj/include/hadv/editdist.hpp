#ifndef HADV_EDITDIST_HPP
#define HADV_EDITDIST_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hadv/corpus.hpp"

namespace hadv {

// Word-level unit-cost Levenshtein distance (insertions + deletions +
// substitutions). Symmetric in its arguments.
std::size_t levenshtein(const WordSequence& a, const WordSequence& b);

// Word error rate: levenshtein(ref, hyp) / |ref|. Asymmetric: the reference
// length normalizes. Both-empty yields 0; an empty reference against a
// non-empty hypothesis is undefined and throws.
double wer(const WordSequence& ref, const WordSequence& hyp);

// Edit budget implied by a threshold: k_max is the largest whole number of
// edits d with d/ref_len < epsilon, i.e. the strict-inequality budget. When
// epsilon * ref_len is an exact integer m, k_max = m - 1.
struct EditBudget {
  double epsilon = 0.0;
  std::size_t ref_len = 0;
  long k_max = -1;

  static EditBudget make(double epsilon, std::size_t ref_len);
};

// True iff wer(ref, hyp) < epsilon. Internally a banded computation limited
// to the k_max diagonals with early abandonment; the decision always equals
// the full dynamic program's.
bool within_threshold(const WordSequence& ref, const WordSequence& hyp,
                      double epsilon);

struct NeighborPair {
  std::string query_id;
  std::string ref_id;
  double delta = 0.0;
};

// Result of a threshold neighbor search: one flag per query, true when the
// query has a near sample in the reference set; optionally the qualifying
// (query, ref, delta) pairs sorted by (query_id, ref_id).
struct NeighborSet {
  std::vector<bool> flags;
  std::vector<NeighborPair> pairs;

  std::size_t flagged_count() const;
};

struct SearchOptions {
  // Collect every qualifying pair instead of stopping at the first per query.
  bool collect_pairs = false;
  // Normally the reference-set sample normalizes the distance; flipping makes
  // the query the reference, for sensitivity runs.
  bool flip_reference = false;
  // Lowercase tokens before comparison.
  bool fold_case = false;
  // Worker count; <= 0 means all hardware threads. The result is identical
  // for any worker count.
  int threads = 0;
};

// flags[q] = true iff some ref with ref.id != query.id satisfies
// within_threshold(ref, query, epsilon). Candidate pairs whose length gap
// exceeds the edit budget are skipped without running the dynamic program.
// Refs that tokenize to nothing are skipped with a warning on stderr.
NeighborSet find_neighbors(std::span<const Sample> queries,
                           std::span<const Sample> refs, double epsilon,
                           const SearchOptions& options = {});

// ---------------------------------------------------------------------------
// Interned-corpus machinery shared by find_neighbors and the rates module.
// Tokens are interned to integers once per corpus; the DP inner loop then
// compares integers. Each document also carries a sorted token array and a
// 256-bit occupancy signature. Both drive exact lower bounds on the edit
// distance (a pair is only skipped when the bound already exceeds the
// budget), so filtering never changes a decision.
// ---------------------------------------------------------------------------

class TokenIndex {
 public:
  explicit TokenIndex(bool fold_case = false) : fold_case_(fold_case) {}

  // Tokenizes, interns, and stores a document; returns its index.
  std::uint32_t add(std::string_view text);

  std::size_t doc_count() const { return docs_.size(); }
  std::size_t len(std::uint32_t doc) const { return docs_[doc].size(); }
  std::span<const std::uint32_t> tokens(std::uint32_t doc) const {
    return docs_[doc];
  }
  std::span<const std::uint32_t> sorted_tokens(std::uint32_t doc) const {
    return sorted_[doc];
  }
  const std::array<std::uint64_t, 4>& signature(std::uint32_t doc) const {
    return sigs_[doc];
  }

 private:
  bool fold_case_;
  std::unordered_map<std::string, std::uint32_t> vocab_;
  std::vector<std::vector<std::uint32_t>> docs_;
  std::vector<std::vector<std::uint32_t>> sorted_;
  std::vector<std::array<std::uint64_t, 4>> sigs_;
};

// Banded distance decision on interned documents: the exact distance when it
// is <= limit, otherwise any value > limit.
long bounded_distance(std::span<const std::uint32_t> ref,
                      std::span<const std::uint32_t> hyp, long limit);

// Exact lower bound from set signatures: edits needed at least to cover the
// token kinds present on one side only.
long signature_lower_bound(const std::array<std::uint64_t, 4>& a,
                           const std::array<std::uint64_t, 4>& b);

// Exact lower bound from sorted token multisets.
long bag_lower_bound(std::span<const std::uint32_t> sorted_a,
                     std::span<const std::uint32_t> sorted_b);

namespace search {

struct Hit {
  std::uint32_t query_pos = 0;
  std::uint32_t ref_pos = 0;
  long dist = 0;
  double delta = 0.0;
};

struct Result {
  std::vector<bool> flags;
  std::vector<Hit> hits;
};

// Existential cross-set search: flags[q] = some ref (not excluded) is within
// epsilon of query q, with the reference side normalizing. Documents that
// tokenize to nothing never match in either role. Deterministic for any
// worker count.
Result cross(const TokenIndex& index,
             std::span<const std::uint32_t> query_docs,
             std::span<const std::uint32_t> ref_docs, double epsilon,
             const SearchOptions& options,
             const std::function<bool(std::uint32_t, std::uint32_t)>&
                 exclude = nullptr);

// Same-class search over an ordered sequence: flags[i] = some later j has
// wer(doc_i, doc_j) < epsilon, the earlier document normalizing (the later
// one when flipped).
Result later_within(const TokenIndex& index,
                    std::span<const std::uint32_t> docs, double epsilon,
                    const SearchOptions& options);

}  // namespace search

}  // namespace hadv

#endif  // HADV_EDITDIST_HPP
