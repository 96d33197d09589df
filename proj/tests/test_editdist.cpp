#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "hadv/editdist.hpp"
#include "hadv/rng.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace hadv;

namespace {

WordSequence seq(std::vector<std::string> tokens) {
  return WordSequence{std::move(tokens)};
}

// Every token sequence over {a, b, c} up to the given length.
std::vector<std::vector<std::string>> all_sequences(std::size_t max_len) {
  static const std::vector<std::string> alphabet = {"a", "b", "c"};
  std::vector<std::vector<std::string>> out = {{}};
  std::vector<std::vector<std::string>> frontier = {{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto& base : frontier) {
      for (const auto& sym : alphabet) {
        auto grown = base;
        grown.push_back(sym);
        out.push_back(grown);
        next.push_back(std::move(grown));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("levenshtein basics") {
  CHECK(levenshtein(seq({"a", "b", "c"}), seq({"a", "b", "c"})) == 0);
  CHECK(levenshtein(seq({"a", "b", "c"}), seq({"a", "x", "c", "d"})) == 2);
  CHECK(levenshtein(seq({}), seq({"a", "b"})) == 2);
  CHECK(levenshtein(seq({"a", "b"}), seq({})) == 2);
}

TEST_CASE("levenshtein equals the full-matrix oracle and is a metric") {
  Rng rng(7);
  const auto random_seq = [&](std::size_t max_len) {
    return synth::random_tokens(rng, rng.below(max_len + 1), 3);
  };
  for (int trial = 0; trial < 400; ++trial) {
    const auto a = random_seq(8);
    const auto b = random_seq(8);
    const auto c = random_seq(8);
    const std::size_t ab = levenshtein(seq(a), seq(b));
    CHECK(ab == oracle::levenshtein(a, b));
    CHECK(ab == levenshtein(seq(b), seq(a)));
    CHECK((ab == 0) == (a == b));
    CHECK(levenshtein(seq(a), seq(c)) <= ab + levenshtein(seq(b), seq(c)));
  }
}

TEST_CASE("wer of the eleven-word four-substitution example") {
  Rng rng(11);
  const auto ref = synth::random_tokens(rng, 11, 1000);
  const auto hyp = synth::substitute(rng, ref, 4, 1000);
  CHECK(wer(seq(ref), seq(hyp)) == doctest::Approx(4.0 / 11.0).epsilon(1e-9));
}

TEST_CASE("wer basics and errors") {
  CHECK(wer(seq({"a", "b", "c"}), seq({"a", "x", "c", "d"})) ==
        doctest::Approx(2.0 / 3.0));
  Rng rng(3);
  const auto fifty = synth::random_tokens(rng, 50, 100);
  CHECK(wer(seq(fifty), seq(fifty)) == 0.0);
  CHECK(wer(seq({}), seq({})) == 0.0);
  CHECK_THROWS_AS(wer(seq({}), seq({"a"})), SemanticError);
}

TEST_CASE("wer asymmetry law: both sides scale to the raw distance") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = synth::random_tokens(rng, 1 + rng.below(30), 20);
    const auto b = synth::random_tokens(rng, 1 + rng.below(30), 20);
    const double raw = static_cast<double>(levenshtein(seq(a), seq(b)));
    CHECK(wer(seq(a), seq(b)) * static_cast<double>(a.size()) ==
          doctest::Approx(raw).epsilon(1e-9));
    CHECK(wer(seq(b), seq(a)) * static_cast<double>(b.size()) ==
          doctest::Approx(raw).epsilon(1e-9));
    // Length lower bound, which justifies the length pre-filter.
    const double gap = std::abs(static_cast<double>(a.size()) -
                                static_cast<double>(b.size()));
    CHECK(wer(seq(a), seq(b)) >= gap / static_cast<double>(a.size()) - 1e-12);
  }
}

TEST_CASE("edit budget pins the strict threshold") {
  // 0.25 * 12 = 3 exactly, so at most 2 edits stay strictly under.
  CHECK(EditBudget::make(0.25, 12).k_max == 2);
  CHECK(EditBudget::make(0.25, 11).k_max == 2);  // 2.75 -> 2
  CHECK(EditBudget::make(1.0, 10).k_max == 9);
  CHECK(EditBudget::make(0.1, 5).k_max == 0);
  CHECK(EditBudget::make(0.5, 1).k_max == 0);
  CHECK(EditBudget::make(0.25, 0).k_max == -1);
  CHECK_THROWS_AS(EditBudget::make(0.0, 5), SemanticError);
  CHECK_THROWS_AS(EditBudget::make(1.5, 5), SemanticError);
  // Products that are integers in exact arithmetic but not in floating
  // point must still land on m - 1.
  for (std::size_t len = 1; len <= 400; ++len) {
    for (const double eps : {0.1, 0.2, 0.25, 0.3, 0.5, 0.75, 1.0}) {
      const long k = EditBudget::make(eps, len).k_max;
      CHECK(static_cast<double>(k) / static_cast<double>(len) < eps);
      CHECK(static_cast<double>(k + 1) / static_cast<double>(len) >= eps);
    }
  }
}

TEST_CASE("within_threshold boundary cases") {
  Rng rng(17);
  const auto ref = synth::random_tokens(rng, 12, 1000);
  CHECK(within_threshold(seq(ref), seq(synth::substitute(rng, ref, 2, 1000)),
                         0.25));
  // 3/12 = 0.25 is not < 0.25: strict.
  CHECK_FALSE(within_threshold(
      seq(ref), seq(synth::substitute(rng, ref, 3, 1000)), 0.25));
  CHECK(within_threshold(seq(ref), seq(ref), 0.05));
  CHECK(within_threshold(seq({}), seq({}), 0.25));
  CHECK_THROWS_AS(within_threshold(seq({}), seq({"a"}), 0.25), SemanticError);
}

TEST_CASE("banded decision equals the naive decision exhaustively") {
  const auto sequences = all_sequences(5);
  for (const double eps : {0.1, 0.25, 0.5}) {
    for (const auto& ref : sequences) {
      if (ref.empty()) continue;
      for (const auto& hyp : sequences) {
        const bool naive = oracle::wer(ref, hyp) < eps;
        CHECK(within_threshold(seq(ref), seq(hyp), eps) == naive);
      }
    }
  }
}

TEST_CASE("banded decision equals the naive decision on longer pairs") {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t len = 30 + rng.below(60);
    const auto ref = synth::random_tokens(rng, len, 40);
    // Half perturbations of the reference, half unrelated.
    const auto hyp = trial % 2 == 0
                         ? synth::substitute(rng, ref, rng.below(len / 2),
                                             40)
                         : synth::random_tokens(rng, 30 + rng.below(60), 40);
    for (const double eps : {0.1, 0.25, 0.5}) {
      const bool naive = oracle::wer(ref, hyp) < eps;
      CHECK(within_threshold(seq(ref), seq(hyp), eps) == naive);
    }
  }
}

TEST_CASE("exact lower bounds never exceed the true distance") {
  Rng rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    TokenIndex index;
    const auto a = synth::random_tokens(rng, rng.below(40), 15);
    const auto b = trial % 2 == 0
                       ? synth::substitute(rng, a, rng.below(5), 15)
                       : synth::random_tokens(rng, rng.below(40), 15);
    const auto da = index.add(join_words(a));
    const auto db = index.add(join_words(b));
    const long truth = static_cast<long>(oracle::levenshtein(a, b));
    CHECK(signature_lower_bound(index.signature(da), index.signature(db)) <=
          truth);
    CHECK(bag_lower_bound(index.sorted_tokens(da), index.sorted_tokens(db)) <=
          truth);
  }
}

TEST_CASE("find_neighbors flags near queries only") {
  Rng rng(31);
  const auto p1 = synth::random_tokens(rng, 10, 1000);
  const Sample ref{"p1", join_words(p1), "P"};
  const Sample n1{"n1", join_words(synth::substitute(rng, p1, 2, 1000)), "N"};
  const Sample n2{"n2", join_words(synth::random_tokens(rng, 10, 1000)), "N"};
  const std::vector<Sample> queries = {n1, n2};
  const std::vector<Sample> refs = {ref};
  const NeighborSet result = find_neighbors(queries, refs, 0.25);
  REQUIRE(result.flags.size() == 2);
  CHECK(result.flags[0]);
  CHECK_FALSE(result.flags[1]);
}

TEST_CASE("find_neighbors with no refs flags nothing") {
  Rng rng(37);
  std::vector<Sample> queries;
  for (int i = 0; i < 5; ++i) {
    queries.push_back(Sample{"q" + std::to_string(i),
                             synth::negative_text(rng, 20, 1000), "N"});
  }
  const NeighborSet result = find_neighbors(queries, {}, 0.25);
  CHECK(result.flagged_count() == 0);
}

TEST_CASE("identical corpora under distinct ids flag every query") {
  Rng rng(41);
  std::vector<Sample> queries;
  std::vector<Sample> refs;
  for (int i = 0; i < 8; ++i) {
    const std::string text = synth::negative_text(rng, 15, 1000);
    queries.push_back(Sample{"q" + std::to_string(i), text, "P"});
    refs.push_back(Sample{"r" + std::to_string(i), text, "P"});
  }
  const NeighborSet result = find_neighbors(queries, refs, 0.25);
  CHECK(result.flagged_count() == queries.size());
  // With shared ids, each query's own twin is excluded and nothing matches.
  const NeighborSet self = find_neighbors(refs, refs, 0.25);
  CHECK(self.flagged_count() == 0);
}

TEST_CASE("find_neighbors matches the brute-force oracle on a random corpus") {
  Rng rng(43);
  const Dataset corpus = synth::rate_corpus(rng, 500, 12, 36, 300);
  std::vector<Sample> queries;
  std::vector<Sample> refs;
  for (const Sample& s : corpus.samples()) {
    (s.label == "P" ? refs : queries).push_back(s);
  }
  const double eps = 0.25;
  const NeighborSet got = find_neighbors(queries, refs, eps);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    bool expected = false;
    const auto qtok = tokenize(queries[q].text).tokens;
    for (const Sample& r : refs) {
      const auto rtok = tokenize(r.text).tokens;
      if (!rtok.empty() && oracle::within(rtok, qtok, eps)) {
        expected = true;
        break;
      }
    }
    CHECK(got.flags[q] == expected);
  }
}

TEST_CASE("find_neighbors is deterministic for any worker count") {
  Rng rng(47);
  const Dataset corpus = synth::rate_corpus(rng, 200, 12, 30, 200);
  std::vector<Sample> queries;
  std::vector<Sample> refs;
  for (const Sample& s : corpus.samples()) {
    (s.label == "P" ? refs : queries).push_back(s);
  }
  SearchOptions one;
  one.collect_pairs = true;
  one.threads = 1;
  SearchOptions many = one;
  many.threads = 8;
  const NeighborSet a = find_neighbors(queries, refs, 0.25, one);
  const NeighborSet b = find_neighbors(queries, refs, 0.25, many);
  CHECK(a.flags == b.flags);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].query_id == b.pairs[i].query_id);
    CHECK(a.pairs[i].ref_id == b.pairs[i].ref_id);
    CHECK(a.pairs[i].delta == b.pairs[i].delta);
  }
}

TEST_CASE("collected pairs are sorted and satisfy the threshold") {
  Rng rng(53);
  const Dataset corpus = synth::rate_corpus(rng, 120, 12, 24, 100);
  std::vector<Sample> queries;
  std::vector<Sample> refs;
  for (const Sample& s : corpus.samples()) {
    (s.label == "P" ? refs : queries).push_back(s);
  }
  SearchOptions options;
  options.collect_pairs = true;
  const NeighborSet result = find_neighbors(queries, refs, 0.25, options);
  for (std::size_t i = 1; i < result.pairs.size(); ++i) {
    const auto& a = result.pairs[i - 1];
    const auto& b = result.pairs[i];
    CHECK(std::tie(a.query_id, a.ref_id) < std::tie(b.query_id, b.ref_id));
  }
  for (const NeighborPair& p : result.pairs) {
    CHECK(p.delta < 0.25);
  }
}

TEST_CASE("case folding joins tokens that differ only in case") {
  const Sample query{"q", "Alpha Beta GAMMA delta", "N"};
  const Sample ref{"r", "alpha beta gamma delta", "P"};
  SearchOptions options;
  const NeighborSet plain =
      find_neighbors(std::vector{query}, std::vector{ref}, 0.25, options);
  CHECK_FALSE(plain.flags[0]);
  options.fold_case = true;
  const NeighborSet folded =
      find_neighbors(std::vector{query}, std::vector{ref}, 0.25, options);
  CHECK(folded.flags[0]);
}

TEST_CASE("flipped reference changes the normalizing side") {
  // 8-token reference vs 10-token query, distance 2: 2/10 < 0.25 but
  // 2/8 = 0.25 is not.
  Rng rng(59);
  auto long_tokens = synth::random_tokens(rng, 10, 1000);
  auto short_tokens = long_tokens;
  short_tokens.resize(8);
  const Sample query{"q", join_words(long_tokens), "N"};
  const Sample ref{"r", join_words(short_tokens), "P"};
  SearchOptions options;
  const NeighborSet plain =
      find_neighbors(std::vector{query}, std::vector{ref}, 0.25, options);
  CHECK_FALSE(plain.flags[0]);
  options.flip_reference = true;
  const NeighborSet flipped =
      find_neighbors(std::vector{query}, std::vector{ref}, 0.25, options);
  CHECK(flipped.flags[0]);
}
