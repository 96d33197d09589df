#ifndef HADV_RATES_HPP
#define HADV_RATES_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hadv/corpus.hpp"
#include "hadv/editdist.hpp"

namespace hadv {

struct RateOptions {
  bool flip_reference = false;
  bool fold_case = false;
  int threads = 0;
  // Also collect the qualifying pairs (for the pair dump).
  bool collect_pairs = false;
};

struct PairRate {
  std::string from;   // l: the class holding the near source sample
  std::string to;     // l': the class whose members are counted
  std::size_t n_tilde = 0;
  double rate = 0.0;  // n_tilde / |S_l|
};

struct LabelRate {
  std::string label;
  std::size_t n_tilde = 0;
  double rate = 0.0;  // n_tilde / |S_l|
};

// Rates for every ordered label pair and every label, plus the raw counts so
// downstream exactness checks never re-derive them from floats.
struct RateReport {
  double epsilon = 0.0;
  std::vector<PairRate> adversarial;  // ordered pairs, label-sorted
  std::vector<LabelRate> affable;     // label-sorted
  std::size_t dataset_size = 0;
  std::map<std::string, std::size_t> label_counts;
  // Filled when collect_pairs was set: all qualifying pairs, sorted.
  std::vector<NeighborPair> pairs;

  const PairRate* find_pair(const std::string& from,
                            const std::string& to) const;
  const LabelRate* find_label(const std::string& label) const;
};

// Count of class-l' samples with a near sample in class l, over |S_l|.
// Directional: the class-l sample normalizes the distance.
PairRate h_adversarial_rate(const Dataset& dataset, const std::string& l,
                            const std::string& l_prime, double epsilon,
                            const RateOptions& options = {});

// Count of class-l samples with a later same-label near sample, in dataset
// order, over |S_l|. The earlier sample normalizes.
LabelRate h_affable_rate(const Dataset& dataset, const std::string& l,
                         double epsilon, const RateOptions& options = {});

// All ordered label pairs plus all labels, sharing one interned corpus and
// one neighbor-search pass per direction. Every label class must be
// non-empty.
RateReport full_report(const Dataset& dataset, double epsilon,
                       const RateOptions& options = {});

// Report JSON with rates rendered to six decimal places.
std::string report_to_json(const RateReport& report);

// Pair dump rows: query_id<TAB>ref_id<TAB>delta, sorted by (query_id,
// ref_id), deltas to six decimal places.
std::string pairs_to_tsv(const std::vector<NeighborPair>& pairs);

}  // namespace hadv

#endif  // HADV_RATES_HPP
