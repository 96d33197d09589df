// hadv: measure training-data quality through near-duplicate rates, generate
// label-flipping and label-preserving variants, and build datasets that hit
// target rates exactly.
//
// Exit codes: 0 success, 2 input/parse problems, 3 semantic errors,
// 4 infeasible targets. Human-readable summaries go to stderr; machine
// artifacts go to files only.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hadv/corpus.hpp"
#include "hadv/curation.hpp"
#include "hadv/editdist.hpp"
#include "hadv/error.hpp"
#include "hadv/kdao.hpp"
#include "hadv/numeric.hpp"
#include "hadv/rates.hpp"
#include "hadv/relgen.hpp"
#include "hadv/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string input;
  std::string format = "jsonl";
  std::string positive_label = "P";
  double epsilon = 0.25;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct KdaoFlags {
  std::string triggers_csv;
  std::string entities_csv;
  std::size_t min_words = 100;
  std::size_t max_words = 250;
  bool body_variant = false;
};

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  for (const char c : csv) {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

hadv::KdaoConfig kdao_config_from(const KdaoFlags& flags) {
  hadv::KdaoConfig config;
  if (!flags.triggers_csv.empty()) {
    config.trigger_keywords = split_csv(flags.triggers_csv);
  }
  if (!flags.entities_csv.empty()) {
    config.entity_keywords = split_csv(flags.entities_csv);
  }
  config.min_words = flags.min_words;
  config.max_words = flags.max_words;
  config.rule = flags.body_variant ? hadv::KdaoRule::kPairOnTriggers
                                   : hadv::KdaoRule::kPairOnEntities;
  config.validate();
  return config;
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_format = true) {
  cmd->add_option("--config", opt.config_path,
                  "JSON file mirroring the flags; flags win on conflict");
  cmd->add_option("--input", opt.input, "input file")->required();
  if (with_format) {
    cmd->add_option("--format", opt.format, "input format: jsonl or tsv")
        ->check(CLI::IsMember({"jsonl", "tsv"}));
  }
  cmd->add_option("--positive-label", opt.positive_label,
                  "label treated as the positive class");
  cmd->add_option("--epsilon", opt.epsilon,
                  "word-error-rate threshold in (0, 1]");
  cmd->add_option("--seed", opt.seed, "random seed; pins all randomness");
  cmd->add_option("--threads", opt.threads,
                  "worker threads; 0 means all cores");
}

void add_kdao_flags(CLI::App* cmd, KdaoFlags& flags) {
  cmd->add_option("--trigger-keywords", flags.triggers_csv,
                  "comma-separated trigger keywords");
  cmd->add_option("--entity-keywords", flags.entities_csv,
                  "comma-separated entity keywords");
  cmd->add_option("--min-words", flags.min_words,
                  "shortest document kept when building");
  cmd->add_option("--max-words", flags.max_words,
                  "longest document kept when building");
  cmd->add_flag("--body-variant", flags.body_variant,
                "require two distinct triggers and one entity instead");
}

// Values for options the user did not pass are taken from the JSON config.
void apply_config(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path);
  if (!in) {
    throw hadv::IoError("cannot open config '" + config_path + "'");
  }
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw hadv::IoError("config '" + config_path + "': " + e.what());
  }
  for (CLI::App* scope = cmd; scope != nullptr; scope = scope->get_parent()) {
    for (CLI::Option* opt : scope->get_options()) {
      if (opt->count() > 0 || opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      if (name == "config" || !cfg.contains(name)) continue;
      const auto& value = cfg[name];
      if (value.is_boolean()) {
        if (value.get<bool>()) opt->add_result("true");
      } else if (value.is_string()) {
        opt->add_result(value.get<std::string>());
      } else {
        opt->add_result(value.dump());
      }
      if (opt->count() > 0) opt->run_callback();
    }
  }
}

hadv::Format parse_format(const std::string& name) {
  return name == "tsv" ? hadv::Format::kTsv : hadv::Format::kJsonl;
}

hadv::Dataset load_input(const CommonOptions& opt) {
  return hadv::load_dataset(opt.input, parse_format(opt.format),
                            opt.positive_label);
}

void write_file(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hadv::IoError("cannot write '" + path.string() + "'");
  out << body;
  if (!out) throw hadv::IoError("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const ordered_json& body) {
  write_file(path, body.dump(2) + "\n");
}

void write_samples(const std::vector<hadv::Sample>& samples,
                   const std::string& positive_label, const fs::path& path) {
  const hadv::Dataset d = hadv::Dataset::from_samples(samples,
                                                      positive_label);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  hadv::write_dataset(d, path);
}

ordered_json report_json(const hadv::RateReport& report) {
  return ordered_json::parse(hadv::report_to_json(report));
}

void print_report_summary(const hadv::RateReport& report) {
  for (const hadv::PairRate& p : report.adversarial) {
    std::fprintf(stderr, "%s->%s: n=%zu rate=%.6f\n", p.from.c_str(),
                 p.to.c_str(), p.n_tilde, p.rate);
  }
  for (const hadv::LabelRate& a : report.affable) {
    std::fprintf(stderr, "%s: n=%zu rate=%.6f\n", a.label.c_str(), a.n_tilde,
                 a.rate);
  }
}

// --- command bodies --------------------------------------------------------

int run_stats(const CommonOptions& opt, const std::string& output) {
  const hadv::Dataset d = load_input(opt);
  const hadv::DatasetStats stats = hadv::dataset_stats(d);
  if (!output.empty()) write_json(output, hadv::stats_to_json(stats));
  std::fprintf(stderr, "size=%zu positive_rate=%s\n", stats.size,
               stats.positive_rate
                   ? std::to_string(*stats.positive_rate).c_str()
                   : "undefined");
  return 0;
}

int run_rates(const CommonOptions& opt, const std::string& output,
              const std::string& pairs_out, bool flip, bool fold_case) {
  const hadv::Dataset d = load_input(opt);
  hadv::RateOptions options;
  options.flip_reference = flip;
  options.fold_case = fold_case;
  options.threads = opt.threads;
  options.collect_pairs = !pairs_out.empty();
  const hadv::RateReport report = hadv::full_report(d, opt.epsilon, options);
  write_file(output, hadv::report_to_json(report));
  if (!pairs_out.empty()) {
    write_file(pairs_out, hadv::pairs_to_tsv(report.pairs));
  }
  print_report_summary(report);
  return 0;
}

int run_pairs(const CommonOptions& opt, const std::string& output, bool flip,
              bool fold_case) {
  const hadv::Dataset d = load_input(opt);
  hadv::RateOptions options;
  options.flip_reference = flip;
  options.fold_case = fold_case;
  options.threads = opt.threads;
  options.collect_pairs = true;
  const hadv::RateReport report = hadv::full_report(d, opt.epsilon, options);
  write_file(output, hadv::pairs_to_tsv(report.pairs));
  std::fprintf(stderr, "%zu near pairs\n", report.pairs.size());
  return 0;
}

int run_kdao_label(const CommonOptions& opt, const KdaoFlags& flags,
                   const std::string& raw_format, const std::string& output) {
  const hadv::KdaoConfig config = kdao_config_from(flags);
  const auto docs = hadv::load_raw_corpus(
      opt.input, raw_format == "text" ? hadv::RawFormat::kText
                                      : hadv::RawFormat::kJsonl);
  std::vector<hadv::Sample> samples;
  samples.reserve(docs.size());
  std::size_t positives = 0;
  for (const hadv::RawDoc& doc : docs) {
    const std::string label = hadv::kdao_label(doc.text, config);
    positives += label == hadv::kPositiveLabel ? 1 : 0;
    samples.push_back(hadv::Sample{doc.id, doc.text, label});
  }
  write_samples(samples, hadv::kPositiveLabel, output);
  ordered_json sidecar;
  sidecar["spec"] = {{"command", "kdao-label"},
                     {"trigger-keywords", config.trigger_keywords},
                     {"entity-keywords", config.entity_keywords},
                     {"body-variant", flags.body_variant}};
  sidecar["verification"] = {{"documents", docs.size()},
                             {"positives", positives}};
  write_json(output + ".meta.json", sidecar);
  std::fprintf(stderr, "labelled %zu documents, %zu positive\n", docs.size(),
               positives);
  return 0;
}

int run_kdao_build(const CommonOptions& opt, const KdaoFlags& flags,
                   const std::string& raw_format, std::size_t size,
                   double pos_rate, const std::string& output) {
  const hadv::KdaoConfig config = kdao_config_from(flags);
  const auto docs = hadv::load_raw_corpus(
      opt.input, raw_format == "text" ? hadv::RawFormat::kText
                                      : hadv::RawFormat::kJsonl);
  hadv::Rng rng(opt.seed);
  const hadv::Dataset d =
      hadv::build_kdao_dataset(docs, size, pos_rate, config, rng);
  const fs::path out_path(output);
  if (out_path.has_parent_path()) fs::create_directories(
      out_path.parent_path());
  hadv::write_dataset(d, out_path);

  const hadv::DatasetStats stats = hadv::dataset_stats(d);
  ordered_json sidecar;
  sidecar["spec"] = {{"command", "kdao-build"},
                     {"size", size},
                     {"pos-rate", pos_rate},
                     {"seed", opt.seed},
                     {"min-words", config.min_words},
                     {"max-words", config.max_words}};
  sidecar["verification"] = hadv::stats_to_json(stats);
  sidecar["verification"]["positive_count_ok"] =
      stats.label_counts.at(hadv::kPositiveLabel) ==
      static_cast<std::size_t>(
          hadv::round_half_to_even(static_cast<double>(size) * pos_rate));
  write_json(output + ".meta.json", sidecar);
  std::fprintf(stderr, "built %zu samples (%zu positive) -> %s\n", d.size(),
               stats.label_counts.at(hadv::kPositiveLabel), output.c_str());
  return 0;
}

int run_kdao_transform(const CommonOptions& opt, const KdaoFlags& flags,
                       const std::string& kind, const std::string& output) {
  const hadv::KdaoConfig config = kdao_config_from(flags);
  const hadv::Dataset d = load_input(opt);
  hadv::Rng rng(opt.seed);
  std::vector<hadv::Sample> out;
  out.reserve(d.size());
  for (const hadv::Sample& s : d.samples()) {
    if (kind == "affable") {
      out.push_back(hadv::make_affable(s, rng, config));
    } else if (hadv::kdao_label(s.text, config) == hadv::kPositiveLabel) {
      out.push_back(hadv::make_adversarial_negative(s, rng, config));
    } else {
      out.push_back(hadv::make_adversarial_positive(s, rng, config));
    }
  }
  write_samples(out, opt.positive_label, output);
  ordered_json sidecar;
  sidecar["spec"] = {{"command", "kdao-transform"},
                     {"kind", kind},
                     {"seed", opt.seed}};
  sidecar["verification"] = {{"inputs", d.size()}, {"outputs", out.size()}};
  write_json(output + ".meta.json", sidecar);
  std::fprintf(stderr, "transformed %zu samples -> %s\n", out.size(),
               output.c_str());
  return 0;
}

int run_relgen(const CommonOptions& opt, const std::string& mode,
               const std::string& output) {
  const auto records = hadv::load_annotated(opt.input);
  hadv::Rng rng(opt.seed);
  std::vector<hadv::Sample> out;
  for (const hadv::AnnotatedText& rec : records) {
    if (mode == "shuffle") {
      for (const hadv::EntityPair& pair : rec.positive_pairs) {
        out.push_back(hadv::shuffle_marker_adversarial(rec, pair, rng));
      }
    } else {
      const auto samples = hadv::enumerate_pair_samples(rec);
      out.insert(out.end(), samples.begin(), samples.end());
    }
  }
  write_samples(out, hadv::kPositiveLabel, output);
  std::size_t positives = 0;
  for (const hadv::Sample& s : out) {
    positives += s.label == hadv::kPositiveLabel ? 1 : 0;
  }
  ordered_json sidecar;
  sidecar["spec"] = {{"command", "relgen"},
                     {"mode", mode},
                     {"seed", opt.seed}};
  sidecar["verification"] = {{"records", records.size()},
                             {"samples", out.size()},
                             {"positives", positives}};
  write_json(output + ".meta.json", sidecar);
  std::fprintf(stderr, "%s produced %zu samples from %zu records\n",
               mode.c_str(), out.size(), records.size());
  return 0;
}

hadv::TransformFn kdao_flip_transform(const hadv::KdaoConfig& config) {
  return [config](const hadv::Sample& s, hadv::Rng& rng) {
    return hadv::make_adversarial_negative(s, rng, config);
  };
}

hadv::TransformFn kdao_affable_transform(const hadv::KdaoConfig& config) {
  return [config](const hadv::Sample& s, hadv::Rng& rng) {
    return hadv::make_affable(s, rng, config);
  };
}

ordered_json build_sidecar(const hadv::BuildResult& result) {
  ordered_json sidecar;
  sidecar["plan"] = result.plan;
  sidecar["target_rate"] = result.target_rate;
  sidecar["achieved_rate"] = result.achieved_rate;
  sidecar["verification"] = report_json(result.verification);
  sidecar["verification"]["ok"] = true;  // a failed build never gets here
  return sidecar;
}

int run_curate(const CommonOptions& opt, const KdaoFlags& flags,
               bool affable, const std::string& affable_class,
               std::size_t size, double pos_rate, double target,
               bool no_far_check, std::size_t max_rejects, bool plan_only,
               const std::string& output) {
  const hadv::KdaoConfig config = kdao_config_from(flags);
  const hadv::Dataset pool = load_input(opt);
  hadv::CurationSpec spec;
  spec.target_size = size;
  spec.positive_rate = pos_rate;
  spec.target_rate = target;
  spec.epsilon = opt.epsilon;
  spec.seed = opt.seed;
  spec.far_check = !no_far_check;
  spec.max_rejects_per_slot = max_rejects;
  spec.threads = opt.threads;
  spec.mode = affable ? (affable_class == "negative"
                             ? hadv::CurationMode::kAffableNegative
                             : hadv::CurationMode::kAffablePositive)
                      : hadv::CurationMode::kAdversarial;

  if (plan_only) {
    write_json(output, hadv::plan_build(pool, spec));
    std::fprintf(stderr, "plan written to %s\n", output.c_str());
    return 0;
  }
  const hadv::BuildResult result =
      affable ? hadv::build_affable_mix(pool, spec,
                                        kdao_affable_transform(config))
              : hadv::build_adversarial_mix(pool, spec,
                                            kdao_flip_transform(config));
  const fs::path out_path(output);
  if (out_path.has_parent_path()) fs::create_directories(
      out_path.parent_path());
  hadv::write_dataset(result.dataset, out_path);
  write_json(output + ".meta.json", build_sidecar(result));
  std::fprintf(stderr, "built %zu samples, achieved rate %.6f -> %s\n",
               result.dataset.size(), result.achieved_rate, output.c_str());
  return 0;
}

int run_curve(const CommonOptions& opt, const KdaoFlags& flags,
              const std::string& mode, const std::string& sizes_csv,
              double pos_rate, double target, bool no_far_check,
              std::size_t max_rejects, const std::string& output_dir,
              const std::string& prefix) {
  const hadv::KdaoConfig config = kdao_config_from(flags);
  const hadv::Dataset pool = load_input(opt);
  std::vector<std::size_t> sizes;
  for (const std::string& item : split_csv(sizes_csv)) {
    try {
      sizes.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw hadv::SemanticError("bad size '" + item + "' in --sizes");
    }
  }
  hadv::CurationSpec spec;
  spec.positive_rate = pos_rate;
  spec.target_rate = target;
  spec.epsilon = opt.epsilon;
  spec.seed = opt.seed;
  spec.far_check = !no_far_check;
  spec.max_rejects_per_slot = max_rejects;
  spec.threads = opt.threads;
  spec.mode = hadv::curation_mode_from_name("curve-" + mode);

  hadv::CurveTransforms transforms;
  transforms.to_negative = kdao_flip_transform(config);
  transforms.make_affable = kdao_affable_transform(config);
  const std::vector<hadv::BuildResult> curve =
      hadv::build_learning_curve(pool, sizes, spec, transforms);

  fs::create_directories(output_dir);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const fs::path path = fs::path(output_dir) /
                          (prefix + "_" + std::to_string(sizes[k]) +
                           ".jsonl");
    hadv::write_dataset(curve[k].dataset, path);
    write_json(path.string() + ".meta.json", build_sidecar(curve[k]));
    std::fprintf(stderr, "size %zu -> %s\n", sizes[k], path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"training-data quality rates, variant generation, and exact-"
               "rate dataset curation"};
  app.require_subcommand(1);

  // stats
  CommonOptions stats_opt;
  std::string stats_output;
  CLI::App* stats_cmd = app.add_subcommand("stats", "dataset size and label "
                                                    "counts");
  add_common(stats_cmd, stats_opt);
  stats_cmd->add_option("--output", stats_output, "stats JSON path");

  // rates
  CommonOptions rates_opt;
  std::string rates_output = "rates.json";
  std::string rates_pairs_out;
  bool rates_flip = false;
  bool rates_fold = false;
  CLI::App* rates_cmd =
      app.add_subcommand("rates", "near-duplicate rate report");
  add_common(rates_cmd, rates_opt);
  rates_cmd->add_option("--output", rates_output, "report JSON path");
  rates_cmd->add_option("--pairs-out", rates_pairs_out,
                        "also dump qualifying pairs as TSV");
  rates_cmd->add_flag("--flip-reference", rates_flip,
                      "normalize by the query side instead");
  rates_cmd->add_flag("--fold-case", rates_fold,
                      "lowercase tokens before comparing");

  // pairs
  CommonOptions pairs_opt;
  std::string pairs_output;
  bool pairs_flip = false;
  bool pairs_fold = false;
  CLI::App* pairs_cmd =
      app.add_subcommand("pairs", "dump qualifying near pairs as TSV");
  add_common(pairs_cmd, pairs_opt);
  pairs_cmd->add_option("--output", pairs_output, "TSV path")->required();
  pairs_cmd->add_flag("--flip-reference", pairs_flip,
                      "normalize by the query side instead");
  pairs_cmd->add_flag("--fold-case", pairs_fold,
                      "lowercase tokens before comparing");

  // kdao-label
  CommonOptions klabel_opt;
  KdaoFlags klabel_flags;
  std::string klabel_raw_format = "jsonl";
  std::string klabel_output;
  CLI::App* klabel_cmd = app.add_subcommand(
      "kdao-label", "label a raw corpus with the keyword task");
  add_common(klabel_cmd, klabel_opt, /*with_format=*/false);
  add_kdao_flags(klabel_cmd, klabel_flags);
  klabel_cmd->add_option("--raw-format", klabel_raw_format,
                         "raw corpus format: jsonl or text")
      ->check(CLI::IsMember({"jsonl", "text"}));
  klabel_cmd->add_option("--output", klabel_output, "labelled JSONL path")
      ->required();

  // kdao-build
  CommonOptions kbuild_opt;
  KdaoFlags kbuild_flags;
  std::string kbuild_raw_format = "jsonl";
  std::string kbuild_output;
  std::size_t kbuild_size = 0;
  double kbuild_pos_rate = 0.25;
  CLI::App* kbuild_cmd = app.add_subcommand(
      "kdao-build", "sample a labelled dataset from a raw corpus");
  add_common(kbuild_cmd, kbuild_opt, /*with_format=*/false);
  add_kdao_flags(kbuild_cmd, kbuild_flags);
  kbuild_cmd->add_option("--raw-format", kbuild_raw_format,
                         "raw corpus format: jsonl or text")
      ->check(CLI::IsMember({"jsonl", "text"}));
  kbuild_cmd->add_option("--size", kbuild_size, "dataset size")->required();
  kbuild_cmd->add_option("--pos-rate", kbuild_pos_rate,
                         "positive sample rate");
  kbuild_cmd->add_option("--output", kbuild_output, "dataset path")
      ->required();

  // kdao-transform
  CommonOptions ktrans_opt;
  KdaoFlags ktrans_flags;
  std::string ktrans_kind = "adversarial";
  std::string ktrans_output;
  CLI::App* ktrans_cmd = app.add_subcommand(
      "kdao-transform", "generate label-flipping or label-preserving "
                        "variants of every sample");
  add_common(ktrans_cmd, ktrans_opt);
  add_kdao_flags(ktrans_cmd, ktrans_flags);
  ktrans_cmd->add_option("--kind", ktrans_kind,
                         "adversarial (flip) or affable (preserve)")
      ->check(CLI::IsMember({"adversarial", "affable"}));
  ktrans_cmd->add_option("--output", ktrans_output, "dataset path")
      ->required();

  // relgen
  CommonOptions relgen_opt;
  std::string relgen_mode = "enumerate";
  std::string relgen_output;
  CLI::App* relgen_cmd = app.add_subcommand(
      "relgen", "marker samples from entity-annotated text");
  add_common(relgen_cmd, relgen_opt, /*with_format=*/false);
  relgen_cmd->add_option("--mode", relgen_mode,
                         "enumerate all pairs or shuffle adversarials")
      ->check(CLI::IsMember({"enumerate", "shuffle"}));
  relgen_cmd->add_option("--output", relgen_output, "dataset path")
      ->required();

  // curate
  CLI::App* curate_cmd =
      app.add_subcommand("curate", "build a dataset with an exact rate");
  curate_cmd->require_subcommand(1);
  struct CurateArgs {
    CommonOptions opt;
    KdaoFlags flags;
    std::string affable_class = "positive";
    std::size_t size = 0;
    double pos_rate = 0.25;
    double target = 0.0;
    bool no_far_check = false;
    std::size_t max_rejects = 100;
    bool plan_only = false;
    std::string output;
  };
  CurateArgs adversarial_args;
  CurateArgs affable_args;
  const auto add_curate = [&](CLI::App* sub, CurateArgs& args) {
    add_common(sub, args.opt);
    add_kdao_flags(sub, args.flags);
    sub->add_option("--size", args.size, "dataset size")->required();
    sub->add_option("--pos-rate", args.pos_rate, "positive sample rate");
    sub->add_option("--target", args.target, "target rate")->required();
    sub->add_flag("--no-far-check", args.no_far_check,
                  "skip the rejection sampling that keeps random fills far");
    sub->add_option("--max-rejects", args.max_rejects,
                    "rejection cap per slot");
    sub->add_flag("--plan-only", args.plan_only,
                  "emit the bucket plan instead of materializing");
    sub->add_option("--output", args.output, "dataset (or plan) path")
        ->required();
  };
  CLI::App* curate_adv = curate_cmd->add_subcommand(
      "adversarial", "cross-class near rate from flipped positives");
  add_curate(curate_adv, adversarial_args);
  CLI::App* curate_aff = curate_cmd->add_subcommand(
      "affable", "same-class near rate from preserved copies");
  add_curate(curate_aff, affable_args);
  curate_aff->add_option("--class", affable_args.affable_class,
                         "which class carries the rate")
      ->check(CLI::IsMember({"positive", "negative"}));

  // curve
  CommonOptions curve_opt;
  KdaoFlags curve_flags;
  std::string curve_mode = "random";
  std::string curve_sizes;
  double curve_pos_rate = 0.25;
  double curve_target = 0.1;
  bool curve_no_far_check = false;
  std::size_t curve_max_rejects = 100;
  std::string curve_output_dir = ".";
  std::string curve_prefix = "curve";
  CLI::App* curve_cmd = app.add_subcommand(
      "curve", "nested growing datasets with held rates");
  add_common(curve_cmd, curve_opt);
  add_kdao_flags(curve_cmd, curve_flags);
  curve_cmd->add_option("--mode", curve_mode,
                        "random, affable, or adversarial-mix")
      ->check(CLI::IsMember({"random", "affable", "adversarial-mix"}));
  curve_cmd->add_option("--sizes", curve_sizes,
                        "comma-separated strictly increasing sizes")
      ->required();
  curve_cmd->add_option("--pos-rate", curve_pos_rate, "positive sample rate");
  curve_cmd->add_option("--target", curve_target,
                        "held cross-class rate for adversarial-mix");
  curve_cmd->add_flag("--no-far-check", curve_no_far_check,
                      "skip the rejection sampling for random fills");
  curve_cmd->add_option("--max-rejects", curve_max_rejects,
                        "rejection cap per slot");
  curve_cmd->add_option("--output-dir", curve_output_dir,
                        "directory for the per-size datasets");
  curve_cmd->add_option("--prefix", curve_prefix, "output filename prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (stats_cmd->parsed()) {
      apply_config(stats_cmd, stats_opt.config_path);
      return run_stats(stats_opt, stats_output);
    }
    if (rates_cmd->parsed()) {
      apply_config(rates_cmd, rates_opt.config_path);
      return run_rates(rates_opt, rates_output, rates_pairs_out, rates_flip,
                       rates_fold);
    }
    if (pairs_cmd->parsed()) {
      apply_config(pairs_cmd, pairs_opt.config_path);
      return run_pairs(pairs_opt, pairs_output, pairs_flip, pairs_fold);
    }
    if (klabel_cmd->parsed()) {
      apply_config(klabel_cmd, klabel_opt.config_path);
      return run_kdao_label(klabel_opt, klabel_flags, klabel_raw_format,
                            klabel_output);
    }
    if (kbuild_cmd->parsed()) {
      apply_config(kbuild_cmd, kbuild_opt.config_path);
      return run_kdao_build(kbuild_opt, kbuild_flags, kbuild_raw_format,
                            kbuild_size, kbuild_pos_rate, kbuild_output);
    }
    if (ktrans_cmd->parsed()) {
      apply_config(ktrans_cmd, ktrans_opt.config_path);
      return run_kdao_transform(ktrans_opt, ktrans_flags, ktrans_kind,
                                ktrans_output);
    }
    if (relgen_cmd->parsed()) {
      apply_config(relgen_cmd, relgen_opt.config_path);
      return run_relgen(relgen_opt, relgen_mode, relgen_output);
    }
    if (curate_cmd->parsed()) {
      const bool affable = curate_aff->parsed();
      CurateArgs& args = affable ? affable_args : adversarial_args;
      apply_config(affable ? curate_aff : curate_adv, args.opt.config_path);
      return run_curate(args.opt, args.flags, affable, args.affable_class,
                        args.size, args.pos_rate, args.target,
                        args.no_far_check, args.max_rejects, args.plan_only,
                        args.output);
    }
    if (curve_cmd->parsed()) {
      apply_config(curve_cmd, curve_opt.config_path);
      return run_curve(curve_opt, curve_flags, curve_mode, curve_sizes,
                       curve_pos_rate, curve_target, curve_no_far_check,
                       curve_max_rejects, curve_output_dir, curve_prefix);
    }
  } catch (const hadv::InfeasibleError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const hadv::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hadv::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
