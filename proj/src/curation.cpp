#include "hadv/curation.hpp"

#include <algorithm>
#include <cmath>

#include "hadv/editdist.hpp"
#include "hadv/numeric.hpp"

namespace hadv {

namespace {

struct PoolView {
  const Dataset* pool = nullptr;
  std::string positive_label;
  std::string negative_label;
  std::vector<std::uint32_t> positives;  // pool positions
  std::vector<std::uint32_t> negatives;

  static PoolView make(const Dataset& pool) {
    PoolView v;
    v.pool = &pool;
    v.positive_label = pool.positive_label();
    std::vector<std::string> rest;
    for (const std::string& label : pool.labels()) {
      if (label != v.positive_label) rest.push_back(label);
    }
    if (rest.size() != 1) {
      throw SemanticError(
          "curation needs a binary pool (one positive and one negative "
          "class); got " +
          std::to_string(pool.labels().size()) + " labels");
    }
    v.negative_label = rest.front();
    for (std::uint32_t pos = 0; pos < pool.size(); ++pos) {
      if (pool.at(pos).label == v.positive_label) {
        v.positives.push_back(pos);
      } else {
        v.negatives.push_back(pos);
      }
    }
    return v;
  }
};

// Accumulates the dataset under construction and answers "is this candidate
// within epsilon of anything kept, in either normalization direction".
class Keeper {
 public:
  Keeper(double epsilon, int threads) : epsilon_(epsilon), threads_(threads) {}

  void keep(Sample sample) {
    docs_.push_back(index_.add(sample.text));
    samples_.push_back(std::move(sample));
  }

  bool near_any_kept(const std::string& text) {
    const std::uint32_t cand = index_.add(text);
    const std::size_t clen = index_.len(cand);
    const long cand_budget = EditBudget::make(epsilon_, clen).k_max;
    for (const std::uint32_t kept : docs_) {
      const std::size_t klen = index_.len(kept);
      const long kept_budget = EditBudget::make(epsilon_, klen).k_max;
      // Near in either direction iff the distance fits the larger budget.
      const long limit = std::max(cand_budget, kept_budget);
      const long gap =
          static_cast<long>(klen > clen ? klen - clen : clen - klen);
      if (gap > limit) continue;
      if (signature_lower_bound(index_.signature(cand),
                                index_.signature(kept)) > limit) {
        continue;
      }
      if (bag_lower_bound(index_.sorted_tokens(cand),
                          index_.sorted_tokens(kept)) > limit) {
        continue;
      }
      if (bounded_distance(index_.tokens(kept), index_.tokens(cand), limit) <=
          limit) {
        return true;
      }
    }
    return false;
  }

  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

  Dataset snapshot(const std::string& positive_label) const {
    return Dataset::from_samples(samples_, positive_label);
  }

  int threads() const { return threads_; }

 private:
  double epsilon_;
  int threads_;
  TokenIndex index_;
  std::vector<std::uint32_t> docs_;
  std::vector<Sample> samples_;
};

// Walks a shuffled pool; per slot, skips candidates near the kept set until
// one fits, within the rejection budget.
class PoolWalker {
 public:
  PoolWalker(const Dataset& pool, std::vector<std::uint32_t> positions,
             Rng& rng, const CurationSpec& spec)
      : pool_(pool), positions_(std::move(positions)), spec_(spec) {
    rng.shuffle(positions_);
  }

  // Draws one sample far from everything kept.
  const Sample& draw_far(Keeper& keeper, const char* bucket) {
    std::size_t rejects = 0;
    while (cursor_ < positions_.size()) {
      const Sample& candidate = pool_.at(positions_[cursor_++]);
      if (!spec_.far_check || !keeper.near_any_kept(candidate.text)) {
        return candidate;
      }
      if (++rejects > spec_.max_rejects_per_slot) {
        throw InfeasibleError(
            std::string("gave up filling a ") + bucket + " slot after " +
            std::to_string(rejects) +
            " near-duplicate rejections; pool is too dense for epsilon " +
            std::to_string(spec_.epsilon));
      }
    }
    throw InfeasibleError(std::string("pool exhausted while filling ") +
                          bucket + " slots (have " +
                          std::to_string(positions_.size()) + ")");
  }

  std::size_t remaining() const { return positions_.size() - cursor_; }

 private:
  const Dataset& pool_;
  std::vector<std::uint32_t> positions_;
  const CurationSpec& spec_;
  std::size_t cursor_ = 0;
};

struct SizePlan {
  std::size_t positives = 0;       // class size P
  std::size_t negatives = 0;       // class size N
  std::size_t generated = 0;       // m: near samples to generate
  std::size_t class_size = 0;      // class the target applies to
  double achieved = 0.0;
};

SizePlan plan_counts(const CurationSpec& spec, std::size_t size) {
  if (!(spec.positive_rate > 0.0) || !(spec.positive_rate < 1.0)) {
    throw SemanticError("positive rate must be strictly between 0 and 1");
  }
  if (spec.target_rate < 0.0) {
    throw SemanticError("target rate must be non-negative");
  }
  EditBudget::make(spec.epsilon, 1);
  SizePlan p;
  p.positives = static_cast<std::size_t>(
      round_half_to_even(static_cast<double>(size) * spec.positive_rate));
  if (p.positives == 0 || p.positives >= size) {
    throw InfeasibleError("size " + std::to_string(size) +
                          " and positive rate leave a class empty");
  }
  p.negatives = size - p.positives;
  switch (spec.mode) {
    case CurationMode::kAdversarial:
    case CurationMode::kCurveAdversarialMix:
      p.class_size = p.positives;
      p.generated = static_cast<std::size_t>(round_half_to_even(
          spec.target_rate * static_cast<double>(p.positives)));
      if (p.generated > p.positives) {
        throw InfeasibleError(
            "target rate needs " + std::to_string(p.generated) +
            " generated negatives but only " + std::to_string(p.positives) +
            " positives can source one each");
      }
      if (p.generated > p.negatives) {
        throw InfeasibleError("target rate needs " +
                              std::to_string(p.generated) +
                              " generated negatives but only " +
                              std::to_string(p.negatives) +
                              " negative slots exist");
      }
      break;
    case CurationMode::kAffablePositive:
    case CurationMode::kAffableNegative:
      p.class_size = spec.mode == CurationMode::kAffablePositive
                         ? p.positives
                         : p.negatives;
      p.generated = static_cast<std::size_t>(round_half_to_even(
          spec.target_rate * static_cast<double>(p.class_size)));
      // A class of C samples holds at most C-1 later-neighbor counts.
      if (p.generated >= p.class_size) {
        throw InfeasibleError(
            "target rate needs " + std::to_string(p.generated) +
            " near samples in a class of " + std::to_string(p.class_size) +
            "; at most " + std::to_string(p.class_size - 1) + " fit");
      }
      break;
    case CurationMode::kCurveRandom:
    case CurationMode::kCurveAffable:
      p.class_size = p.positives;
      p.generated = 0;
      break;
  }
  p.achieved = p.class_size == 0
                   ? 0.0
                   : static_cast<double>(p.generated) /
                         static_cast<double>(p.class_size);
  return p;
}

// Group sizes for a class of C slots carrying exactly m later-neighbor
// counts: C-m groups, each one source plus near copies. For m <= C/2 this
// degenerates to m pair groups and C-2m singletons.
std::vector<std::size_t> group_sizes(std::size_t class_size, std::size_t m) {
  const std::size_t groups = class_size - m;
  std::vector<std::size_t> sizes(groups, class_size / groups);
  const std::size_t rem = class_size % groups;
  for (std::size_t i = 0; i < rem; ++i) ++sizes[i];
  return sizes;
}

Sample run_transform(const TransformFn& fn, const Sample& source, Rng& rng,
                     const std::string& expected_label, double epsilon,
                     Transform expected_kind) {
  Sample out = fn(source, rng);
  if (out.label != expected_label) {
    throw SemanticError("transform of '" + source.id + "' produced label '" +
                        out.label + "', expected '" + expected_label + "'");
  }
  out.source_id = source.id;
  out.transform = expected_kind;
  const WordSequence src_words = tokenize(source.text);
  const WordSequence out_words = tokenize(out.text);
  if (!within_threshold(src_words, out_words, epsilon)) {
    throw SemanticError("transform of '" + source.id +
                        "' drifted to delta >= epsilon; it would not count "
                        "toward the rate");
  }
  return out;
}

void append_unexpected_pairs(std::string& msg, const Dataset& dataset,
                             double epsilon, int threads) {
  RateOptions options;
  options.collect_pairs = true;
  options.threads = threads;
  const RateReport detail = full_report(dataset, epsilon, options);
  std::size_t shown = 0;
  for (const NeighborPair& p : detail.pairs) {
    if (shown++ == 8) {
      msg += " ...";
      break;
    }
    msg += " (" + p.query_id + ", " + p.ref_id + ")";
  }
}

struct Expectation {
  // Expected counts: pair rates keyed "from->to", label rates keyed by label.
  std::map<std::string, std::size_t> pair_counts;
  std::map<std::string, std::size_t> label_counts;
};

RateReport verify_build(const Dataset& dataset, const CurationSpec& spec,
                        const Expectation& expect, int threads) {
  RateOptions options;
  options.threads = threads;
  RateReport report = full_report(dataset, spec.epsilon, options);
  std::string mismatch;
  for (const PairRate& p : report.adversarial) {
    const auto it = expect.pair_counts.find(p.from + "->" + p.to);
    if (it != expect.pair_counts.end() && p.n_tilde != it->second) {
      mismatch += "expected " + std::to_string(it->second) + " near " +
                  p.from + "->" + p.to + " pairs, measured " +
                  std::to_string(p.n_tilde) + "; ";
    }
  }
  for (const LabelRate& a : report.affable) {
    const auto it = expect.label_counts.find(a.label);
    if (it != expect.label_counts.end() && a.n_tilde != it->second) {
      mismatch += "expected " + std::to_string(it->second) +
                  " same-class near samples in '" + a.label +
                  "', measured " + std::to_string(a.n_tilde) + "; ";
    }
  }
  if (!mismatch.empty()) {
    std::string msg = "built dataset failed verification: " + mismatch +
                      "unexpected near pairs:";
    append_unexpected_pairs(msg, dataset, spec.epsilon, threads);
    throw SemanticError(msg);
  }
  return report;
}

nlohmann::ordered_json spec_to_json(const CurationSpec& spec) {
  nlohmann::ordered_json j;
  j["mode"] = std::string(curation_mode_name(spec.mode));
  j["size"] = spec.target_size;
  j["positive_rate"] = spec.positive_rate;
  j["target_rate"] = spec.target_rate;
  j["epsilon"] = spec.epsilon;
  j["seed"] = spec.seed;
  j["far_check"] = spec.far_check;
  return j;
}

}  // namespace

std::string_view curation_mode_name(CurationMode mode) {
  switch (mode) {
    case CurationMode::kAdversarial:
      return "adversarial";
    case CurationMode::kAffablePositive:
      return "affable-positive";
    case CurationMode::kAffableNegative:
      return "affable-negative";
    case CurationMode::kCurveRandom:
      return "curve-random";
    case CurationMode::kCurveAffable:
      return "curve-affable";
    case CurationMode::kCurveAdversarialMix:
      return "curve-adversarial-mix";
  }
  return "unknown";
}

CurationMode curation_mode_from_name(std::string_view name) {
  if (name == "adversarial") return CurationMode::kAdversarial;
  if (name == "affable-positive") return CurationMode::kAffablePositive;
  if (name == "affable-negative") return CurationMode::kAffableNegative;
  if (name == "curve-random") return CurationMode::kCurveRandom;
  if (name == "curve-affable") return CurationMode::kCurveAffable;
  if (name == "curve-adversarial-mix") {
    return CurationMode::kCurveAdversarialMix;
  }
  throw SemanticError("unknown curation mode: '" + std::string(name) + "'");
}

nlohmann::ordered_json plan_build(const Dataset& pool,
                                  const CurationSpec& spec) {
  const PoolView view = PoolView::make(pool);
  const SizePlan p = plan_counts(spec, spec.target_size);
  nlohmann::ordered_json plan;
  plan["spec"] = spec_to_json(spec);
  plan["pool"] = {{"positives", view.positives.size()},
                  {"negatives", view.negatives.size()}};
  nlohmann::ordered_json buckets;
  switch (spec.mode) {
    case CurationMode::kAdversarial:
      buckets["positives"] = p.positives;
      buckets["generated_negatives"] = p.generated;
      buckets["fill_negatives"] = p.negatives - p.generated;
      break;
    case CurationMode::kAffablePositive:
    case CurationMode::kAffableNegative: {
      const auto sizes = group_sizes(p.class_size, p.generated);
      buckets["class"] = spec.mode == CurationMode::kAffablePositive
                             ? view.positive_label
                             : view.negative_label;
      buckets["groups"] = sizes.size();
      buckets["sources"] = sizes.size();
      buckets["generated_copies"] = p.generated;
      buckets["largest_group"] =
          sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
      buckets["other_class_fill"] =
          spec.mode == CurationMode::kAffablePositive ? p.negatives
                                                      : p.positives;
      break;
    }
    case CurationMode::kCurveRandom:
    case CurationMode::kCurveAffable:
    case CurationMode::kCurveAdversarialMix:
      buckets["positives"] = p.positives;
      buckets["generated"] = p.generated;
      buckets["fill_negatives"] = p.negatives - p.generated;
      break;
  }
  plan["buckets"] = buckets;
  plan["target_rate"] = spec.target_rate;
  plan["achieved_rate"] = p.achieved;
  return plan;
}

BuildResult build_adversarial_mix(const Dataset& pool,
                                  const CurationSpec& spec,
                                  const TransformFn& to_negative) {
  if (spec.mode != CurationMode::kAdversarial) {
    throw SemanticError("build_adversarial_mix needs mode=adversarial");
  }
  const PoolView view = PoolView::make(pool);
  const SizePlan p = plan_counts(spec, spec.target_size);
  nlohmann::ordered_json plan = plan_build(pool, spec);

  Rng rng(spec.seed);
  Keeper keeper(spec.epsilon, spec.threads);
  PoolWalker pos_walk(pool, view.positives, rng, spec);
  PoolWalker neg_walk(pool, view.negatives, rng, spec);

  for (std::size_t i = 0; i < p.positives; ++i) {
    keeper.keep(pos_walk.draw_far(keeper, "positive"));
  }
  // Which kept positives source a near negative.
  std::vector<std::size_t> source_order(p.positives);
  for (std::size_t i = 0; i < p.positives; ++i) source_order[i] = i;
  rng.shuffle(source_order);
  for (std::size_t i = 0; i < p.generated; ++i) {
    const Sample& source = keeper.samples()[source_order[i]];
    keeper.keep(run_transform(to_negative, source, rng, view.negative_label,
                              spec.epsilon, Transform::kAdversarial));
  }
  for (std::size_t i = 0; i < p.negatives - p.generated; ++i) {
    keeper.keep(neg_walk.draw_far(keeper, "negative"));
  }

  Dataset dataset = keeper.snapshot(view.positive_label);
  Expectation expect;
  expect.pair_counts[view.positive_label + "->" + view.negative_label] =
      p.generated;
  expect.label_counts[view.positive_label] = 0;
  expect.label_counts[view.negative_label] = 0;
  RateReport verification = verify_build(dataset, spec, expect, spec.threads);

  return BuildResult{std::move(dataset), std::move(plan),
                     std::move(verification), spec.target_rate, p.achieved};
}

BuildResult build_affable_mix(const Dataset& pool, const CurationSpec& spec,
                              const TransformFn& make_affable) {
  if (spec.mode != CurationMode::kAffablePositive &&
      spec.mode != CurationMode::kAffableNegative) {
    throw SemanticError("build_affable_mix needs an affable mode");
  }
  const bool on_positive = spec.mode == CurationMode::kAffablePositive;
  const PoolView view = PoolView::make(pool);
  const SizePlan p = plan_counts(spec, spec.target_size);
  nlohmann::ordered_json plan = plan_build(pool, spec);

  Rng rng(spec.seed);
  Keeper keeper(spec.epsilon, spec.threads);
  PoolWalker class_walk(pool, on_positive ? view.positives : view.negatives,
                        rng, spec);
  PoolWalker other_walk(pool, on_positive ? view.negatives : view.positives,
                        rng, spec);
  const std::string& class_label =
      on_positive ? view.positive_label : view.negative_label;

  // Class groups: source first, then its copies, so each non-final group
  // member has a later near neighbor and contributes one count.
  const std::vector<std::size_t> sizes = group_sizes(p.class_size,
                                                     p.generated);
  std::size_t copy_ordinal = 0;
  for (const std::size_t group : sizes) {
    const Sample source = class_walk.draw_far(keeper, "class source");
    keeper.keep(source);
    for (std::size_t c = 1; c < group; ++c) {
      Sample copy = run_transform(make_affable, source, rng, class_label,
                                  spec.epsilon, Transform::kAffable);
      copy.id = source.id + "@aff" + std::to_string(++copy_ordinal);
      keeper.keep(std::move(copy));
    }
  }
  const std::size_t other_count = on_positive ? p.negatives : p.positives;
  for (std::size_t i = 0; i < other_count; ++i) {
    keeper.keep(other_walk.draw_far(keeper, "other-class"));
  }

  Dataset dataset = keeper.snapshot(view.positive_label);
  Expectation expect;
  expect.pair_counts[view.positive_label + "->" + view.negative_label] = 0;
  expect.pair_counts[view.negative_label + "->" + view.positive_label] = 0;
  expect.label_counts[class_label] = p.generated;
  expect.label_counts[on_positive ? view.negative_label
                                  : view.positive_label] = 0;
  RateReport verification = verify_build(dataset, spec, expect, spec.threads);

  return BuildResult{std::move(dataset), std::move(plan),
                     std::move(verification), spec.target_rate, p.achieved};
}

std::vector<BuildResult> build_learning_curve(
    const Dataset& pool, std::span<const std::size_t> sizes,
    const CurationSpec& spec, const CurveTransforms& transforms) {
  if (spec.mode != CurationMode::kCurveRandom &&
      spec.mode != CurationMode::kCurveAffable &&
      spec.mode != CurationMode::kCurveAdversarialMix) {
    throw SemanticError("build_learning_curve needs a curve mode");
  }
  if (sizes.empty()) {
    throw SemanticError("no sizes given");
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) {
      throw SemanticError("sizes must be strictly increasing");
    }
  }
  const bool adv_mix = spec.mode == CurationMode::kCurveAdversarialMix;
  const bool affable_growth = spec.mode == CurationMode::kCurveAffable;
  if (adv_mix && !transforms.to_negative) {
    throw SemanticError("adversarial-mix curve needs a flip transform");
  }
  if (affable_growth && !transforms.make_affable) {
    throw SemanticError("affable curve needs a copy transform");
  }
  const PoolView view = PoolView::make(pool);

  Rng rng(spec.seed);
  Keeper keeper(spec.epsilon, spec.threads);
  PoolWalker pos_walk(pool, view.positives, rng, spec);
  PoolWalker neg_walk(pool, view.negatives, rng, spec);

  // Kept positions by class, and which positives already source a negative.
  std::vector<std::size_t> kept_positives;
  std::vector<std::size_t> kept_negatives;
  std::vector<std::size_t> unused_sources;  // indexes into kept samples
  std::size_t generated_so_far = 0;
  std::size_t copy_ordinal = 0;

  std::vector<BuildResult> results;
  std::size_t prev_size = 0;
  for (const std::size_t size : sizes) {
    const SizePlan p = plan_counts(spec, size);
    const std::size_t want_pos = p.positives;
    const std::size_t want_gen = adv_mix ? p.generated : 0;
    const std::size_t want_neg_fill = p.negatives - want_gen;
    const std::size_t have_pos = kept_positives.size();
    const std::size_t have_neg_fill = kept_negatives.size() -
                                      generated_so_far;
    if (want_pos < have_pos || want_gen < generated_so_far ||
        want_neg_fill < have_neg_fill) {
      throw InfeasibleError(
          "size step " + std::to_string(prev_size) + " -> " +
          std::to_string(size) +
          " would shrink a bucket; nested growth is impossible");
    }

    // Grow positives.
    for (std::size_t i = have_pos; i < want_pos; ++i) {
      if (affable_growth && !kept_positives.empty()) {
        const std::size_t src_at =
            kept_positives[rng.below(kept_positives.size())];
        const Sample& source = keeper.samples()[src_at];
        Sample copy =
            run_transform(transforms.make_affable, source, rng,
                          view.positive_label, spec.epsilon,
                          Transform::kAffable);
        copy.id = source.id + "@aff" + std::to_string(++copy_ordinal);
        kept_positives.push_back(keeper.size());
        keeper.keep(std::move(copy));
      } else {
        kept_positives.push_back(keeper.size());
        keeper.keep(pos_walk.draw_far(keeper, "positive"));
        unused_sources.push_back(kept_positives.back());
      }
    }
    // Grow generated near negatives (adversarial-mix only).
    for (std::size_t i = generated_so_far; i < want_gen; ++i) {
      if (unused_sources.empty()) {
        throw InfeasibleError("no positive left to source a near negative");
      }
      const std::size_t pick = rng.below(unused_sources.size());
      const std::size_t src_at = unused_sources[pick];
      unused_sources.erase(unused_sources.begin() +
                           static_cast<std::ptrdiff_t>(pick));
      const Sample& source = keeper.samples()[src_at];
      kept_negatives.push_back(keeper.size());
      keeper.keep(run_transform(transforms.to_negative, source, rng,
                                view.negative_label, spec.epsilon,
                                Transform::kAdversarial));
    }
    generated_so_far = want_gen;
    // Grow fill negatives.
    for (std::size_t i = have_neg_fill; i < want_neg_fill; ++i) {
      if (affable_growth && prev_size > 0) {
        const std::size_t src_at =
            kept_negatives[rng.below(kept_negatives.size())];
        const Sample& source = keeper.samples()[src_at];
        Sample copy =
            run_transform(transforms.make_affable, source, rng,
                          view.negative_label, spec.epsilon,
                          Transform::kAffable);
        copy.id = source.id + "@aff" + std::to_string(++copy_ordinal);
        kept_negatives.push_back(keeper.size());
        keeper.keep(std::move(copy));
      } else {
        kept_negatives.push_back(keeper.size());
        keeper.keep(neg_walk.draw_far(keeper, "negative"));
      }
    }

    Dataset dataset = keeper.snapshot(view.positive_label);
    Expectation expect;
    expect.pair_counts[view.positive_label + "->" + view.negative_label] =
        want_gen;
    if (!adv_mix) {
      // Random and affable growth never create cross-class near pairs.
      expect.pair_counts[view.negative_label + "->" + view.positive_label] =
          0;
    }
    if (!affable_growth) {
      expect.label_counts[view.positive_label] = 0;
      expect.label_counts[view.negative_label] = 0;
    }
    RateReport verification =
        verify_build(dataset, spec, expect, spec.threads);

    nlohmann::ordered_json plan;
    plan["spec"] = spec_to_json(spec);
    plan["size"] = size;
    plan["buckets"] = {{"positives", want_pos},
                       {"generated_negatives", want_gen},
                       {"fill_negatives", want_neg_fill}};
    plan["target_rate"] = adv_mix ? spec.target_rate : 0.0;
    plan["achieved_rate"] = p.achieved;
    results.push_back(BuildResult{std::move(dataset), std::move(plan),
                                  std::move(verification),
                                  adv_mix ? spec.target_rate : 0.0,
                                  p.achieved});
    prev_size = size;
  }
  return results;
}

double standard_error(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) {
    throw SemanticError("standard error needs at least two values");
  }
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double sample_sd = std::sqrt(ss / static_cast<double>(n - 1));
  return sample_sd / std::sqrt(static_cast<double>(n));
}

}  // namespace hadv
