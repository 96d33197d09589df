#include <doctest.h>

#include <algorithm>
#include <set>

#include "hadv/curation.hpp"
#include "hadv/kdao.hpp"
#include "hadv/numeric.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace hadv;

namespace {

TransformFn kdao_negative_transform() {
  return [](const Sample& s, Rng& rng) {
    return make_adversarial_negative(s, rng, KdaoConfig{});
  };
}

TransformFn kdao_affable_transform() {
  return [](const Sample& s, Rng& rng) {
    return make_affable(s, rng, KdaoConfig{});
  };
}

CurationSpec base_spec(CurationMode mode, std::size_t size, double target,
                       std::uint64_t seed = 11) {
  CurationSpec spec;
  spec.mode = mode;
  spec.target_size = size;
  spec.positive_rate = 0.25;
  spec.target_rate = target;
  spec.epsilon = 0.25;
  spec.seed = seed;
  return spec;
}

void check_provenance(const Dataset& d) {
  std::set<std::string> ids;
  for (const Sample& s : d.samples()) ids.insert(s.id);
  for (const Sample& s : d.samples()) {
    if (s.transform != Transform::kNone) {
      REQUIRE(s.source_id.has_value());
      CHECK(ids.count(*s.source_id) == 1);
    }
  }
}

}  // namespace

TEST_CASE("rounding is half-to-even") {
  CHECK(round_half_to_even(22.5) == 22);
  CHECK(round_half_to_even(23.5) == 24);
  CHECK(round_half_to_even(22.4) == 22);
  CHECK(round_half_to_even(22.6) == 23);
  CHECK(round_half_to_even(0.0) == 0);
  CHECK(round_half_to_even(0.5) == 0);
  CHECK(round_half_to_even(1.5) == 2);
}

TEST_CASE("standard error of the mean") {
  const std::vector<double> a = {1.0, 2.0, 3.0};
  CHECK(standard_error(a) == doctest::Approx(1.0 / std::sqrt(3.0)));
  const std::vector<double> b = {5.0, 5.0, 5.0, 5.0};
  CHECK(standard_error(b) == 0.0);
  const std::vector<double> c = {0.0, 2.0};
  CHECK(standard_error(c) == doctest::Approx(1.0));
  const std::vector<double> d = {1.0};
  CHECK_THROWS_AS(standard_error(d), SemanticError);
}

TEST_CASE("adversarial mix hits the target rate exactly") {
  Rng gen(211);
  const Dataset pool = synth::kdao_pool(gen, 100, 300, 40, 80);
  const CurationSpec spec = base_spec(CurationMode::kAdversarial, 100, 0.2);
  const BuildResult result =
      build_adversarial_mix(pool, spec, kdao_negative_transform());
  CHECK(result.dataset.size() == 100);
  const DatasetStats stats = dataset_stats(result.dataset);
  CHECK(stats.label_counts.at("P") == 25);
  CHECK(stats.label_counts.at("N") == 75);
  CHECK(result.achieved_rate == doctest::Approx(0.2));
  CHECK(result.verification.find_pair("P", "N")->n_tilde == 5);
  CHECK(result.verification.find_label("P")->n_tilde == 0);
  CHECK(result.verification.find_label("N")->n_tilde == 0);
  CHECK(result.plan["buckets"]["generated_negatives"] == 5);
  CHECK(result.plan["buckets"]["fill_negatives"] == 70);
  check_provenance(result.dataset);
  // Independent recount.
  CHECK(oracle::adversarial_count(result.dataset, "P", "N", 0.25) == 5);
  CHECK(oracle::affable_count(result.dataset, "P", 0.25) == 0);
  CHECK(oracle::affable_count(result.dataset, "N", 0.25) == 0);
}

TEST_CASE("adversarial mix with target zero is a pure random mix") {
  Rng gen(223);
  const Dataset pool = synth::kdao_pool(gen, 60, 200, 40, 80);
  const CurationSpec spec = base_spec(CurationMode::kAdversarial, 80, 0.0);
  const BuildResult result =
      build_adversarial_mix(pool, spec, kdao_negative_transform());
  CHECK(result.verification.find_pair("P", "N")->n_tilde == 0);
  CHECK(result.verification.find_pair("N", "P")->n_tilde == 0);
  for (const Sample& s : result.dataset.samples()) {
    CHECK(s.transform == Transform::kNone);
  }
}

TEST_CASE("a 0.9 target on 25 positives rounds half-even to 22") {
  Rng gen(227);
  const Dataset pool = synth::kdao_pool(gen, 80, 200, 40, 80);
  const CurationSpec spec = base_spec(CurationMode::kAdversarial, 100, 0.9);
  const BuildResult result =
      build_adversarial_mix(pool, spec, kdao_negative_transform());
  CHECK(result.verification.find_pair("P", "N")->n_tilde == 22);
  CHECK(result.achieved_rate == doctest::Approx(0.88));
  CHECK(result.target_rate == doctest::Approx(0.9));
}

TEST_CASE("affable mix pairs sources with copies") {
  Rng gen(229);
  const Dataset pool = synth::kdao_pool(gen, 150, 400, 40, 80);
  const CurationSpec spec =
      base_spec(CurationMode::kAffablePositive, 400, 0.3);
  const BuildResult result =
      build_affable_mix(pool, spec, kdao_affable_transform());
  CHECK(result.dataset.size() == 400);
  const DatasetStats stats = dataset_stats(result.dataset);
  CHECK(stats.label_counts.at("P") == 100);
  // 30 source+copy pairs and 40 singletons.
  CHECK(result.verification.find_label("P")->n_tilde == 30);
  CHECK(result.verification.find_label("N")->n_tilde == 0);
  CHECK(result.verification.find_pair("P", "N")->n_tilde == 0);
  CHECK(result.verification.find_pair("N", "P")->n_tilde == 0);
  CHECK(result.achieved_rate == doctest::Approx(0.3));
  check_provenance(result.dataset);
  CHECK(oracle::affable_count(result.dataset, "P", 0.25) == 30);
}

TEST_CASE("affable mix above one half uses larger groups") {
  Rng gen(233);
  const Dataset pool = synth::kdao_pool(gen, 60, 160, 40, 80);
  const CurationSpec spec =
      base_spec(CurationMode::kAffableNegative, 80, 0.9);
  const BuildResult result =
      build_affable_mix(pool, spec, kdao_affable_transform());
  const DatasetStats stats = dataset_stats(result.dataset);
  CHECK(stats.label_counts.at("N") == 60);
  CHECK(result.verification.find_label("N")->n_tilde == 54);
  CHECK(result.verification.find_label("P")->n_tilde == 0);
  CHECK(oracle::affable_count(result.dataset, "N", 0.25) == 54);
  check_provenance(result.dataset);
}

TEST_CASE("affable targets above the class ceiling are infeasible") {
  Rng gen(239);
  const Dataset pool = synth::kdao_pool(gen, 60, 160, 40, 80);
  CurationSpec spec = base_spec(CurationMode::kAffablePositive, 80, 1.0);
  CHECK_THROWS_AS(build_affable_mix(pool, spec, kdao_affable_transform()),
                  InfeasibleError);
}

TEST_CASE("curation requires a binary pool") {
  Rng gen(547);
  std::vector<Sample> samples;
  for (int i = 0; i < 10; ++i) {
    samples.push_back(Sample{"p" + std::to_string(i),
                             synth::positive_text(gen, 30, 1000), "P"});
  }
  const Dataset pool = Dataset::from_samples(std::move(samples), "P");
  const CurationSpec spec = base_spec(CurationMode::kAdversarial, 8, 0.1);
  CHECK_THROWS_WITH_AS(
      build_adversarial_mix(pool, spec, kdao_negative_transform()),
      doctest::Contains("binary"), SemanticError);
}

TEST_CASE("pool exhaustion is reported with counts") {
  Rng gen(241);
  const Dataset pool = synth::kdao_pool(gen, 10, 30, 40, 80);
  const CurationSpec spec = base_spec(CurationMode::kAdversarial, 100, 0.2);
  CHECK_THROWS_AS(build_adversarial_mix(pool, spec,
                                        kdao_negative_transform()),
                  InfeasibleError);
}

TEST_CASE("builds are deterministic per seed") {
  Rng gen(251);
  const Dataset pool = synth::kdao_pool(gen, 80, 250, 40, 80);
  const CurationSpec spec = base_spec(CurationMode::kAdversarial, 100, 0.3,
                                      77);
  const BuildResult a =
      build_adversarial_mix(pool, spec, kdao_negative_transform());
  const BuildResult b =
      build_adversarial_mix(pool, spec, kdao_negative_transform());
  CHECK(a.dataset == b.dataset);
  CurationSpec other = spec;
  other.seed = 78;
  const BuildResult c =
      build_adversarial_mix(pool, other, kdao_negative_transform());
  CHECK_FALSE(a.dataset == c.dataset);
}

TEST_CASE("plans match builds without materializing") {
  Rng gen(257);
  const Dataset pool = synth::kdao_pool(gen, 80, 250, 40, 80);
  const CurationSpec spec = base_spec(CurationMode::kAdversarial, 100, 0.2);
  const nlohmann::ordered_json plan = plan_build(pool, spec);
  CHECK(plan["buckets"]["positives"] == 25);
  CHECK(plan["buckets"]["generated_negatives"] == 5);
  CHECK(plan["buckets"]["fill_negatives"] == 70);
  CHECK(plan["achieved_rate"] == doctest::Approx(0.2));
  const CurationSpec aff = base_spec(CurationMode::kAffableNegative, 80, 0.9);
  const nlohmann::ordered_json aplan = plan_build(pool, aff);
  CHECK(aplan["buckets"]["groups"] == 6);
  CHECK(aplan["buckets"]["generated_copies"] == 54);
}

TEST_CASE("learning curves nest and hold their invariants") {
  Rng gen(263);
  const Dataset pool = synth::kdao_pool(gen, 300, 900, 40, 80);
  const std::vector<std::size_t> sizes = {80, 160, 240};

  CurveTransforms transforms;
  transforms.to_negative = kdao_negative_transform();
  transforms.make_affable = kdao_affable_transform();

  for (const CurationMode mode :
       {CurationMode::kCurveRandom, CurationMode::kCurveAffable,
        CurationMode::kCurveAdversarialMix}) {
    CurationSpec spec = base_spec(mode, 0, 0.1, 31);
    const std::vector<BuildResult> curve =
        build_learning_curve(pool, sizes, spec, transforms);
    REQUIRE(curve.size() == sizes.size());
    for (std::size_t k = 0; k < curve.size(); ++k) {
      const Dataset& d = curve[k].dataset;
      CHECK(d.size() == sizes[k]);
      const DatasetStats stats = dataset_stats(d);
      CHECK(stats.label_counts.at("P") ==
            static_cast<std::size_t>(round_half_to_even(0.25 * sizes[k])));
      if (k > 0) {
        // Prefix nesting: the previous dataset leads this one unchanged.
        const Dataset& prev = curve[k - 1].dataset;
        for (std::size_t i = 0; i < prev.size(); ++i) {
          CHECK(prev.at(i) == d.at(i));
        }
      }
      const RateReport& v = curve[k].verification;
      if (mode == CurationMode::kCurveAdversarialMix) {
        const std::size_t expect = static_cast<std::size_t>(
            round_half_to_even(0.1 * 0.25 * sizes[k]));
        CHECK(v.find_pair("P", "N")->n_tilde == expect);
        CHECK(v.find_label("P")->n_tilde == 0);
        CHECK(v.find_label("N")->n_tilde == 0);
      } else if (mode == CurationMode::kCurveRandom) {
        CHECK(v.find_pair("P", "N")->n_tilde == 0);
        CHECK(v.find_pair("N", "P")->n_tilde == 0);
        CHECK(v.find_label("P")->n_tilde == 0);
        CHECK(v.find_label("N")->n_tilde == 0);
      } else {
        CHECK(v.find_pair("P", "N")->n_tilde == 0);
        CHECK(v.find_pair("N", "P")->n_tilde == 0);
        if (k > 0) {
          // Growth is near copies, so the same-class counts must rise.
          CHECK(v.find_label("P")->n_tilde >
                curve[k - 1].verification.find_label("P")->n_tilde);
        }
      }
    }
  }
}

TEST_CASE("curve sizes must increase strictly") {
  Rng gen(269);
  const Dataset pool = synth::kdao_pool(gen, 60, 200, 40, 80);
  CurveTransforms transforms;
  transforms.to_negative = kdao_negative_transform();
  transforms.make_affable = kdao_affable_transform();
  const std::vector<std::size_t> bad = {80, 80};
  CurationSpec spec = base_spec(CurationMode::kCurveRandom, 0, 0.0);
  CHECK_THROWS_AS(build_learning_curve(pool, bad, spec, transforms),
                  SemanticError);
}
