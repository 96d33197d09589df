// Synthetic corpora for tests: random texts over a numbered vocabulary
// (which never collides with the keyword task's keywords), keyword-planted
// positives, and controlled near-duplicate planting.
#ifndef HADV_TESTS_SYNTH_HPP
#define HADV_TESTS_SYNTH_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "hadv/corpus.hpp"
#include "hadv/rng.hpp"

namespace hadv::synth {

std::string random_word(Rng& rng, std::size_t vocab);

std::vector<std::string> random_tokens(Rng& rng, std::size_t len,
                                       std::size_t vocab);

// Random text that labels Negative under the default keyword config.
std::string negative_text(Rng& rng, std::size_t len, std::size_t vocab);

// Random text with one trigger and two distinct entity keywords planted at
// random positions; labels Positive under the default keyword config.
std::string positive_text(Rng& rng, std::size_t len, std::size_t vocab);

// Replaces `count` distinct random positions with fresh random words.
std::vector<std::string> substitute(Rng& rng,
                                    const std::vector<std::string>& tokens,
                                    std::size_t count, std::size_t vocab);

// Labelled pool of far-apart positives and negatives, texts of
// [min_len, max_len] words, ids "p<N>"/"n<N>".
Dataset kdao_pool(Rng& rng, std::size_t n_pos, std::size_t n_neg,
                  std::size_t min_len, std::size_t max_len,
                  std::size_t vocab = 200000);

// Random two-class corpus with planted same-class cliques, stepwise chains,
// and cross-class near pairs, for oracle-equivalence runs.
Dataset rate_corpus(Rng& rng, std::size_t n, std::size_t min_len,
                    std::size_t max_len, std::size_t vocab);

}  // namespace hadv::synth

#endif  // HADV_TESTS_SYNTH_HPP
