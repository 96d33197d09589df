#include "hadv/editdist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <map>
#include <tuple>

#include "hadv/parallel.hpp"

namespace hadv {

namespace {

constexpr int kBig = std::numeric_limits<int>::max() / 2;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void ascii_lower(std::string& s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
}

}  // namespace

std::size_t levenshtein(const WordSequence& a, const WordSequence& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    const std::string& ai = a.tokens[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t subst = prev[j - 1] + (ai == b.tokens[j - 1] ? 0 : 1);
      const std::size_t step = std::min(prev[j], cur[j - 1]) + 1;
      cur[j] = std::min(subst, step);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double wer(const WordSequence& ref, const WordSequence& hyp) {
  if (ref.empty()) {
    if (hyp.empty()) return 0.0;
    throw SemanticError(
        "word error rate is undefined for an empty reference");
  }
  return static_cast<double>(levenshtein(ref, hyp)) /
         static_cast<double>(ref.size());
}

EditBudget EditBudget::make(double epsilon, std::size_t ref_len) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw SemanticError("epsilon must be in (0, 1]");
  }
  EditBudget b;
  b.epsilon = epsilon;
  b.ref_len = ref_len;
  if (ref_len == 0) {
    b.k_max = -1;
    return b;
  }
  // Largest k with k/ref_len < epsilon under the same floating-point
  // comparison the unbanded wer check uses, so both routes always agree.
  const double n = static_cast<double>(ref_len);
  long k = static_cast<long>(std::floor(epsilon * n));
  while (k > 0 && static_cast<double>(k) / n >= epsilon) --k;
  while (static_cast<double>(k + 1) / n < epsilon) ++k;
  b.k_max = k;
  return b;
}

long bounded_distance(std::span<const std::uint32_t> ref,
                      std::span<const std::uint32_t> hyp, long limit) {
  const long n = static_cast<long>(ref.size());
  const long m = static_cast<long>(hyp.size());
  if (limit < 0) return limit + 1;
  if (std::labs(n - m) > limit) return limit + 1;
  if (limit == 0) {
    // Band of one diagonal: plain equality.
    for (long i = 0; i < n; ++i) {
      if (ref[i] != hyp[i]) return 1;
    }
    return 0;
  }
  thread_local std::vector<int> prev_row, cur_row;
  prev_row.assign(static_cast<std::size_t>(m) + 2, kBig);
  cur_row.assign(static_cast<std::size_t>(m) + 2, kBig);
  for (long j = 0; j <= std::min(m, limit); ++j) {
    prev_row[static_cast<std::size_t>(j)] = static_cast<int>(j);
  }
  const std::uint32_t* rw = ref.data();
  const std::uint32_t* hw = hyp.data();
  for (long i = 1; i <= n; ++i) {
    const long lo = std::max<long>(1, i - limit);
    const long hi = std::min(m, i + limit);
    cur_row[static_cast<std::size_t>(lo - 1)] =
        (lo == 1 && i <= limit) ? static_cast<int>(i) : kBig;
    int row_min = cur_row[static_cast<std::size_t>(lo - 1)];
    const std::uint32_t ri = rw[i - 1];
    for (long j = lo; j <= hi; ++j) {
      int best = prev_row[static_cast<std::size_t>(j - 1)] +
                 (ri != hw[j - 1] ? 1 : 0);
      const int up = prev_row[static_cast<std::size_t>(j)];
      const int left = cur_row[static_cast<std::size_t>(j - 1)];
      const int step = (up < left ? up : left) + 1;
      if (step < best) best = step;
      cur_row[static_cast<std::size_t>(j)] = best;
      if (best < row_min) row_min = best;
    }
    if (row_min > limit) return limit + 1;
    cur_row[static_cast<std::size_t>(hi + 1)] = kBig;
    std::swap(prev_row, cur_row);
  }
  const int d = prev_row[static_cast<std::size_t>(m)];
  return d <= limit ? d : limit + 1;
}

bool within_threshold(const WordSequence& ref, const WordSequence& hyp,
                      double epsilon) {
  const EditBudget budget = EditBudget::make(epsilon, ref.size());
  if (ref.empty()) {
    if (hyp.empty()) return true;  // wer = 0 < epsilon
    throw SemanticError(
        "word error rate is undefined for an empty reference");
  }
  // Local interning so the band compares integers.
  std::unordered_map<std::string_view, std::uint32_t> vocab;
  std::vector<std::uint32_t> a, b;
  a.reserve(ref.size());
  b.reserve(hyp.size());
  const auto intern = [&vocab](const std::string& tok) {
    const auto [it, _] = vocab.try_emplace(
        tok, static_cast<std::uint32_t>(vocab.size()));
    return it->second;
  };
  for (const std::string& t : ref.tokens) a.push_back(intern(t));
  for (const std::string& t : hyp.tokens) b.push_back(intern(t));
  return bounded_distance(a, b, budget.k_max) <= budget.k_max;
}

std::uint32_t TokenIndex::add(std::string_view text) {
  WordSequence words = tokenize(text);
  std::vector<std::uint32_t> ids;
  ids.reserve(words.size());
  std::array<std::uint64_t, 4> sig{0, 0, 0, 0};
  for (std::string& tok : words.tokens) {
    if (fold_case_) ascii_lower(tok);
    const auto [it, _] = vocab_.try_emplace(
        std::move(tok), static_cast<std::uint32_t>(vocab_.size()));
    const std::uint32_t id = it->second;
    ids.push_back(id);
    const unsigned bit = static_cast<unsigned>(splitmix64(id) & 255u);
    sig[bit >> 6] |= 1ULL << (bit & 63u);
  }
  std::vector<std::uint32_t> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  docs_.push_back(std::move(ids));
  sorted_.push_back(std::move(sorted));
  sigs_.push_back(sig);
  return static_cast<std::uint32_t>(docs_.size() - 1);
}

long signature_lower_bound(const std::array<std::uint64_t, 4>& a,
                           const std::array<std::uint64_t, 4>& b) {
  // Every bit set on exactly one side witnesses a token kind missing from
  // the other side; each such kind costs at least one edit.
  int a_only = 0;
  int b_only = 0;
  for (int w = 0; w < 4; ++w) {
    a_only += std::popcount(a[w] & ~b[w]);
    b_only += std::popcount(b[w] & ~a[w]);
  }
  return std::max(a_only, b_only);
}

long bag_lower_bound(std::span<const std::uint32_t> sorted_a,
                     std::span<const std::uint32_t> sorted_b) {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t common = 0;
  while (i < sorted_a.size() && j < sorted_b.size()) {
    if (sorted_a[i] == sorted_b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (sorted_a[i] < sorted_b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<long>(
      std::max(sorted_a.size() - common, sorted_b.size() - common));
}

std::size_t NeighborSet::flagged_count() const {
  std::size_t n = 0;
  for (const bool f : flags) n += f ? 1 : 0;
  return n;
}

namespace search {
namespace {

// Reference positions grouped by document length, each group in ascending
// position order. Grouping lets a query skip whole length classes that the
// edit budget already excludes.
struct LengthBuckets {
  // (length, positions) sorted by length.
  std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>> groups;

  static LengthBuckets build(const TokenIndex& index,
                             std::span<const std::uint32_t> docs) {
    std::map<std::size_t, std::vector<std::uint32_t>> by_len;
    for (std::uint32_t pos = 0; pos < docs.size(); ++pos) {
      const std::size_t len = index.len(docs[pos]);
      if (len == 0) continue;  // never a valid reference or match
      by_len[len].push_back(pos);
    }
    LengthBuckets b;
    b.groups.assign(by_len.begin(), by_len.end());
    return b;
  }
};

struct Candidate {
  long limit;         // edit budget for this pair
  std::size_t norm;   // reference-side length for delta
};

// Decides one candidate pair through the filter chain. Returns the distance
// if the pair is within budget, -1 otherwise.
inline long decide_pair(const TokenIndex& index, std::uint32_t query_doc,
                        std::uint32_t ref_doc, long limit) {
  if (signature_lower_bound(index.signature(query_doc),
                            index.signature(ref_doc)) > limit) {
    return -1;
  }
  if (bag_lower_bound(index.sorted_tokens(query_doc),
                      index.sorted_tokens(ref_doc)) > limit) {
    return -1;
  }
  const long d =
      bounded_distance(index.tokens(ref_doc), index.tokens(query_doc), limit);
  return d <= limit ? d : -1;
}

}  // namespace

Result cross(const TokenIndex& index,
             std::span<const std::uint32_t> query_docs,
             std::span<const std::uint32_t> ref_docs, double epsilon,
             const SearchOptions& options,
             const std::function<bool(std::uint32_t, std::uint32_t)>&
                 exclude) {
  // Validate epsilon before any work.
  EditBudget::make(epsilon, 1);

  const LengthBuckets buckets = LengthBuckets::build(index, ref_docs);
  // One budget per reference length when the reference set normalizes.
  std::map<std::size_t, long> ref_budgets;
  if (!options.flip_reference) {
    for (const auto& [len, _] : buckets.groups) {
      ref_budgets[len] = EditBudget::make(epsilon, len).k_max;
    }
  }

  Result result;
  result.flags.assign(query_docs.size(), false);
  std::vector<std::vector<Hit>> chunk_hits;
  chunk_hits.resize(std::min<std::size_t>(
      static_cast<std::size_t>(resolve_threads(options.threads)),
      std::max<std::size_t>(query_docs.size(), 1)));

  run_chunks(query_docs.size(), options.threads,
             [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    std::vector<Hit>& hits = chunk_hits[chunk];
    for (std::size_t qi = begin; qi < end; ++qi) {
      const std::uint32_t qdoc = query_docs[qi];
      const std::size_t qlen = index.len(qdoc);
      // An empty query can never be within epsilon <= 1 of a non-empty
      // reference, and is undefined as a flipped reference.
      if (qlen == 0) continue;
      const long flipped_limit =
          options.flip_reference ? EditBudget::make(epsilon, qlen).k_max : 0;
      bool done = false;
      for (const auto& [rlen, positions] : buckets.groups) {
        if (done) break;
        const long limit = options.flip_reference
                               ? flipped_limit
                               : ref_budgets.find(rlen)->second;
        const long gap = static_cast<long>(rlen > qlen ? rlen - qlen
                                                       : qlen - rlen);
        if (gap > limit) continue;
        const std::size_t norm = options.flip_reference ? qlen : rlen;
        for (const std::uint32_t ri : positions) {
          const long d = decide_pair(index, qdoc, ref_docs[ri], limit);
          if (d < 0) continue;
          if (exclude && exclude(static_cast<std::uint32_t>(qi), ri)) {
            continue;
          }
          result.flags[qi] = true;
          if (!options.collect_pairs) {
            done = true;
            break;
          }
          hits.push_back(Hit{static_cast<std::uint32_t>(qi), ri, d,
                             static_cast<double>(d) /
                                 static_cast<double>(norm)});
        }
      }
    }
  });

  for (auto& hits : chunk_hits) {
    result.hits.insert(result.hits.end(), hits.begin(), hits.end());
  }
  return result;
}

Result later_within(const TokenIndex& index,
                    std::span<const std::uint32_t> docs, double epsilon,
                    const SearchOptions& options) {
  EditBudget::make(epsilon, 1);

  const LengthBuckets buckets = LengthBuckets::build(index, docs);
  std::map<std::size_t, long> budgets;
  for (const auto& [len, _] : buckets.groups) {
    budgets[len] = EditBudget::make(epsilon, len).k_max;
  }

  Result result;
  result.flags.assign(docs.size(), false);
  std::vector<std::vector<Hit>> chunk_hits;
  chunk_hits.resize(std::min<std::size_t>(
      static_cast<std::size_t>(resolve_threads(options.threads)),
      std::max<std::size_t>(docs.size(), 1)));

  run_chunks(docs.size(), options.threads,
             [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    std::vector<Hit>& hits = chunk_hits[chunk];
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t idoc = docs[i];
      const std::size_t ilen = index.len(idoc);
      if (ilen == 0) continue;  // wer undefined with i as reference
      const auto own_it = budgets.find(ilen);
      const long own_limit = own_it == budgets.end() ? -1 : own_it->second;
      bool done = false;
      for (const auto& [jlen, positions] : buckets.groups) {
        if (done) break;
        // Reference side: the earlier sample i, or the later j when flipped.
        const long limit =
            options.flip_reference ? budgets.find(jlen)->second : own_limit;
        const long gap = static_cast<long>(jlen > ilen ? jlen - ilen
                                                       : ilen - jlen);
        if (gap > limit) continue;
        const std::size_t norm = options.flip_reference ? jlen : ilen;
        // Only positions strictly after i qualify.
        auto it = std::upper_bound(positions.begin(), positions.end(),
                                   static_cast<std::uint32_t>(i));
        for (; it != positions.end(); ++it) {
          const long d = decide_pair(index, docs[*it], idoc, limit);
          if (d < 0) continue;
          result.flags[i] = true;
          if (!options.collect_pairs) {
            done = true;
            break;
          }
          hits.push_back(Hit{*it, static_cast<std::uint32_t>(i), d,
                             static_cast<double>(d) /
                                 static_cast<double>(norm)});
        }
      }
    }
  });

  for (auto& hits : chunk_hits) {
    result.hits.insert(result.hits.end(), hits.begin(), hits.end());
  }
  return result;
}

}  // namespace search

NeighborSet find_neighbors(std::span<const Sample> queries,
                           std::span<const Sample> refs, double epsilon,
                           const SearchOptions& options) {
  TokenIndex index(options.fold_case);
  std::vector<std::uint32_t> ref_docs;
  std::vector<std::uint32_t> kept_refs;  // positions into `refs`
  ref_docs.reserve(refs.size());
  for (std::uint32_t i = 0; i < refs.size(); ++i) {
    const std::uint32_t doc = index.add(refs[i].text);
    if (index.len(doc) == 0) {
      std::cerr << "warning: reference sample '" << refs[i].id
                << "' tokenizes to nothing; skipped\n";
      continue;
    }
    ref_docs.push_back(doc);
    kept_refs.push_back(i);
  }
  std::vector<std::uint32_t> query_docs;
  query_docs.reserve(queries.size());
  for (const Sample& q : queries) {
    query_docs.push_back(index.add(q.text));
  }

  const auto exclude = [&](std::uint32_t qi, std::uint32_t ri) {
    return queries[qi].id == refs[kept_refs[ri]].id;
  };
  search::Result raw =
      search::cross(index, query_docs, ref_docs, epsilon, options, exclude);

  NeighborSet out;
  out.flags = std::move(raw.flags);
  if (options.collect_pairs) {
    out.pairs.reserve(raw.hits.size());
    for (const search::Hit& h : raw.hits) {
      out.pairs.push_back(NeighborPair{queries[h.query_pos].id,
                                       refs[kept_refs[h.ref_pos]].id,
                                       h.delta});
    }
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const NeighborPair& a, const NeighborPair& b) {
                return std::tie(a.query_id, a.ref_id) <
                       std::tie(b.query_id, b.ref_id);
              });
  }
  return out;
}

}  // namespace hadv
