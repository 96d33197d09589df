#include "hadv/rates.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <tuple>

namespace hadv {

namespace {

// Interned view of a dataset: one document per sample plus per-label sample
// positions in dataset order.
struct CorpusView {
  TokenIndex index;
  std::vector<std::uint32_t> docs;                      // by sample position
  std::map<std::string, std::vector<std::uint32_t>> by_label;  // positions

  CorpusView(const Dataset& dataset, bool fold_case) : index(fold_case) {
    docs.reserve(dataset.size());
    for (std::uint32_t pos = 0; pos < dataset.size(); ++pos) {
      docs.push_back(index.add(dataset.at(pos).text));
      by_label[dataset.at(pos).label].push_back(pos);
    }
  }
};

PairRate adversarial_from_view(const Dataset& dataset, const CorpusView& view,
                               const std::string& l,
                               const std::string& l_prime, double epsilon,
                               const RateOptions& options,
                               std::vector<NeighborPair>* pair_sink) {
  if (l == l_prime) {
    throw SemanticError("h-adversarial rate needs two distinct labels");
  }
  const auto src = view.by_label.find(l);
  const auto dst = view.by_label.find(l_prime);
  const std::size_t src_size = src == view.by_label.end()
                                   ? 0
                                   : src->second.size();
  if (src_size == 0) {
    throw SemanticError("h-adversarial rate undefined: class '" + l +
                        "' is empty");
  }
  std::vector<std::uint32_t> ref_docs;
  ref_docs.reserve(src_size);
  for (const std::uint32_t pos : src->second) {
    ref_docs.push_back(view.docs[pos]);
  }
  std::vector<std::uint32_t> query_docs;
  const std::vector<std::uint32_t>* query_positions = nullptr;
  if (dst != view.by_label.end()) {
    query_positions = &dst->second;
    query_docs.reserve(query_positions->size());
    for (const std::uint32_t pos : *query_positions) {
      query_docs.push_back(view.docs[pos]);
    }
  }

  SearchOptions search_options;
  search_options.collect_pairs = options.collect_pairs;
  search_options.flip_reference = options.flip_reference;
  search_options.threads = options.threads;
  // Distinct classes within one dataset cannot share an id.
  const search::Result res = search::cross(view.index, query_docs, ref_docs,
                                           epsilon, search_options);

  PairRate out;
  out.from = l;
  out.to = l_prime;
  for (const bool f : res.flags) out.n_tilde += f ? 1 : 0;
  out.rate = static_cast<double>(out.n_tilde) / static_cast<double>(src_size);
  if (pair_sink && options.collect_pairs) {
    for (const search::Hit& h : res.hits) {
      pair_sink->push_back(NeighborPair{
          dataset.at((*query_positions)[h.query_pos]).id,
          dataset.at(src->second[h.ref_pos]).id, h.delta});
    }
  }
  // Tight bound: every counted sample lives in S_l'.
  assert(out.n_tilde <= (query_positions ? query_positions->size() : 0));
  return out;
}

LabelRate affable_from_view(const Dataset& dataset, const CorpusView& view,
                            const std::string& l, double epsilon,
                            const RateOptions& options,
                            std::vector<NeighborPair>* pair_sink) {
  const auto it = view.by_label.find(l);
  if (it == view.by_label.end() || it->second.empty()) {
    throw SemanticError("h-affable rate undefined: class '" + l +
                        "' is empty");
  }
  std::vector<std::uint32_t> class_docs;
  class_docs.reserve(it->second.size());
  for (const std::uint32_t pos : it->second) {
    class_docs.push_back(view.docs[pos]);
  }

  SearchOptions search_options;
  search_options.collect_pairs = options.collect_pairs;
  search_options.flip_reference = options.flip_reference;
  search_options.threads = options.threads;
  const search::Result res =
      search::later_within(view.index, class_docs, epsilon, search_options);

  LabelRate out;
  out.label = l;
  for (const bool f : res.flags) out.n_tilde += f ? 1 : 0;
  out.rate = static_cast<double>(out.n_tilde) /
             static_cast<double>(it->second.size());
  if (pair_sink && options.collect_pairs) {
    for (const search::Hit& h : res.hits) {
      pair_sink->push_back(NeighborPair{dataset.at(it->second[h.query_pos]).id,
                                        dataset.at(it->second[h.ref_pos]).id,
                                        h.delta});
    }
  }
  // A sample is never its own later neighbor.
  assert(out.n_tilde < it->second.size() || it->second.empty());
  return out;
}

void sort_pairs(std::vector<NeighborPair>& pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const NeighborPair& a, const NeighborPair& b) {
              return std::tie(a.query_id, a.ref_id) <
                     std::tie(b.query_id, b.ref_id);
            });
}

std::string format_rate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", rate);
  return buf;
}

}  // namespace

const PairRate* RateReport::find_pair(const std::string& from,
                                      const std::string& to) const {
  for (const PairRate& p : adversarial) {
    if (p.from == from && p.to == to) return &p;
  }
  return nullptr;
}

const LabelRate* RateReport::find_label(const std::string& label) const {
  for (const LabelRate& a : affable) {
    if (a.label == label) return &a;
  }
  return nullptr;
}

PairRate h_adversarial_rate(const Dataset& dataset, const std::string& l,
                            const std::string& l_prime, double epsilon,
                            const RateOptions& options) {
  EditBudget::make(epsilon, 1);
  const CorpusView view(dataset, options.fold_case);
  return adversarial_from_view(dataset, view, l, l_prime, epsilon, options,
                               nullptr);
}

LabelRate h_affable_rate(const Dataset& dataset, const std::string& l,
                         double epsilon, const RateOptions& options) {
  EditBudget::make(epsilon, 1);
  const CorpusView view(dataset, options.fold_case);
  return affable_from_view(dataset, view, l, epsilon, options, nullptr);
}

RateReport full_report(const Dataset& dataset, double epsilon,
                       const RateOptions& options) {
  EditBudget::make(epsilon, 1);
  const CorpusView view(dataset, options.fold_case);
  for (const std::string& label : dataset.labels()) {
    const auto it = view.by_label.find(label);
    if (it == view.by_label.end() || it->second.empty()) {
      throw SemanticError("rates undefined: class '" + label + "' is empty");
    }
  }

  RateReport report;
  report.epsilon = epsilon;
  report.dataset_size = dataset.size();
  for (const auto& [label, positions] : view.by_label) {
    report.label_counts[label] = positions.size();
  }
  std::vector<NeighborPair>* sink =
      options.collect_pairs ? &report.pairs : nullptr;
  for (const std::string& l : dataset.labels()) {
    for (const std::string& l_prime : dataset.labels()) {
      if (l == l_prime) continue;
      report.adversarial.push_back(adversarial_from_view(
          dataset, view, l, l_prime, epsilon, options, sink));
    }
  }
  for (const std::string& l : dataset.labels()) {
    report.affable.push_back(
        affable_from_view(dataset, view, l, epsilon, options, sink));
  }
  sort_pairs(report.pairs);
  return report;
}

std::string report_to_json(const RateReport& report) {
  // Hand-assembled so rates print with exactly six decimal places.
  const auto quote = [](const std::string& s) {
    return nlohmann::json(s).dump();
  };
  std::string out = "{\n";
  out += "  \"epsilon\": " + format_rate(report.epsilon) + ",\n";
  out += "  \"h_adversarial\": {";
  for (std::size_t i = 0; i < report.adversarial.size(); ++i) {
    const PairRate& p = report.adversarial[i];
    out += i ? ",\n    " : "\n    ";
    out += quote(p.from + "->" + p.to) + ": {\"n\": " +
           std::to_string(p.n_tilde) + ", \"rate\": " + format_rate(p.rate) +
           "}";
  }
  out += report.adversarial.empty() ? "},\n" : "\n  },\n";
  out += "  \"h_affable\": {";
  for (std::size_t i = 0; i < report.affable.size(); ++i) {
    const LabelRate& a = report.affable[i];
    out += i ? ",\n    " : "\n    ";
    out += quote(a.label) + ": {\"n\": " + std::to_string(a.n_tilde) +
           ", \"rate\": " + format_rate(a.rate) + "}";
  }
  out += report.affable.empty() ? "},\n" : "\n  },\n";
  out += "  \"dataset\": {\"size\": " + std::to_string(report.dataset_size) +
         ", \"labels\": {";
  std::size_t i = 0;
  for (const auto& [label, count] : report.label_counts) {
    if (i++) out += ", ";
    out += quote(label) + ": " + std::to_string(count);
  }
  out += "}}\n}\n";
  return out;
}

std::string pairs_to_tsv(const std::vector<NeighborPair>& pairs) {
  std::string out;
  for (const NeighborPair& p : pairs) {
    out += p.query_id;
    out += '\t';
    out += p.ref_id;
    out += '\t';
    out += format_rate(p.delta);
    out += '\n';
  }
  return out;
}

}  // namespace hadv
