#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "hadv/corpus.hpp"
#include "hadv/curation.hpp"
#include "hadv/editdist.hpp"
#include "hadv/kdao.hpp"
#include "hadv/rates.hpp"
#include "hadv/relgen.hpp"
#include "hadv/rng.hpp"

namespace py = pybind11;
using namespace hadv;

namespace {

WordSequence seq(std::vector<std::string> tokens) {
  return WordSequence{std::move(tokens)};
}

py::object json_to_py(const nlohmann::ordered_json& j) {
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      py::dict d;
      for (const auto& [key, value] : j.items()) {
        d[py::str(key)] = json_to_py(value);
      }
      return d;
    }
    case nlohmann::ordered_json::value_t::array: {
      py::list l;
      for (const auto& item : j) l.append(json_to_py(item));
      return l;
    }
    case nlohmann::ordered_json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::ordered_json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::ordered_json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case nlohmann::ordered_json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case nlohmann::ordered_json::value_t::number_float:
      return py::float_(j.get<double>());
    default:
      return py::none();
  }
}

py::dict report_to_dict(const RateReport& report) {
  return json_to_py(nlohmann::ordered_json::parse(report_to_json(report)));
}

RateOptions make_rate_options(bool flip_reference, bool fold_case,
                              int threads) {
  RateOptions options;
  options.flip_reference = flip_reference;
  options.fold_case = fold_case;
  options.threads = threads;
  return options;
}

CurationSpec make_spec(CurationMode mode, std::size_t size, double pos_rate,
                       double target, double epsilon, std::uint64_t seed,
                       bool far_check, int threads) {
  CurationSpec spec;
  spec.mode = mode;
  spec.target_size = size;
  spec.positive_rate = pos_rate;
  spec.target_rate = target;
  spec.epsilon = epsilon;
  spec.seed = seed;
  spec.far_check = far_check;
  spec.threads = threads;
  return spec;
}

TransformFn flip_fn(const KdaoConfig& config) {
  return [config](const Sample& s, Rng& rng) {
    return make_adversarial_negative(s, rng, config);
  };
}

TransformFn affable_fn(const KdaoConfig& config) {
  return [config](const Sample& s, Rng& rng) {
    return make_affable(s, rng, config);
  };
}

py::tuple build_to_tuple(BuildResult result) {
  py::dict meta;
  meta["plan"] = json_to_py(result.plan);
  meta["target_rate"] = result.target_rate;
  meta["achieved_rate"] = result.achieved_rate;
  meta["verification"] = report_to_dict(result.verification);
  return py::make_tuple(std::move(result.dataset), meta);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "training-data quality rates, variant generation, and curation";

  py::register_exception<IoError>(m, "IoError", PyExc_IOError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError",
                                          PyExc_ValueError);
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<Sample>(m, "Sample")
      .def(py::init([](std::string id, std::string text, std::string label,
                       std::optional<std::string> source_id,
                       const std::string& transform) {
             Sample s;
             s.id = std::move(id);
             s.text = std::move(text);
             s.label = std::move(label);
             s.source_id = std::move(source_id);
             s.transform = transform_from_name(transform);
             return s;
           }),
           py::arg("id"), py::arg("text"), py::arg("label"),
           py::arg("source_id") = py::none(), py::arg("transform") = "none")
      .def_readwrite("id", &Sample::id)
      .def_readwrite("text", &Sample::text)
      .def_readwrite("label", &Sample::label)
      .def_readwrite("source_id", &Sample::source_id)
      .def_property_readonly("transform",
                             [](const Sample& s) {
                               return std::string(transform_name(s.transform));
                             })
      .def("__eq__", [](const Sample& a, const Sample& b) { return a == b; })
      .def("__repr__", [](const Sample& s) {
        return "Sample(id='" + s.id + "', label='" + s.label + "')";
      });

  py::class_<Dataset>(m, "Dataset")
      .def_static(
          "from_samples",
          [](std::vector<Sample> samples, std::string positive_label) {
            return Dataset::from_samples(std::move(samples),
                                         std::move(positive_label));
          },
          py::arg("samples"), py::arg("positive_label") = "P")
      .def_property_readonly("samples",
                             [](const Dataset& d) {
                               return std::vector<Sample>(d.samples().begin(),
                                                          d.samples().end());
                             })
      .def_property_readonly("labels", &Dataset::labels)
      .def_property_readonly("positive_label", &Dataset::positive_label)
      .def("__len__", &Dataset::size)
      .def("__eq__",
           [](const Dataset& a, const Dataset& b) { return a == b; });

  m.def(
      "load_dataset",
      [](const std::filesystem::path& path, const std::string& format,
         const std::string& positive_label) {
        return load_dataset(
            path, format == "tsv" ? Format::kTsv : Format::kJsonl,
            positive_label);
      },
      py::arg("path"), py::arg("format") = "jsonl",
      py::arg("positive_label") = "P");
  m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("path"));
  m.def("dataset_stats", [](const Dataset& d) {
    return json_to_py(stats_to_json(dataset_stats(d)));
  });

  m.def("tokenize",
        [](const std::string& text) { return tokenize(text).tokens; });
  m.def(
      "levenshtein",
      [](std::vector<std::string> a, std::vector<std::string> b) {
        return levenshtein(seq(std::move(a)), seq(std::move(b)));
      },
      py::arg("ref"), py::arg("hyp"));
  m.def(
      "wer",
      [](std::vector<std::string> ref, std::vector<std::string> hyp) {
        return wer(seq(std::move(ref)), seq(std::move(hyp)));
      },
      py::arg("ref"), py::arg("hyp"));
  m.def(
      "within_threshold",
      [](std::vector<std::string> ref, std::vector<std::string> hyp,
         double epsilon) {
        return within_threshold(seq(std::move(ref)), seq(std::move(hyp)),
                                epsilon);
      },
      py::arg("ref"), py::arg("hyp"), py::arg("epsilon"));

  m.def(
      "h_adversarial_rate",
      [](const Dataset& d, const std::string& l, const std::string& l_prime,
         double epsilon) {
        const PairRate r = h_adversarial_rate(d, l, l_prime, epsilon);
        return py::make_tuple(r.n_tilde, r.rate);
      },
      py::arg("dataset"), py::arg("label"), py::arg("other"),
      py::arg("epsilon") = 0.25);
  m.def(
      "h_affable_rate",
      [](const Dataset& d, const std::string& l, double epsilon) {
        const LabelRate r = h_affable_rate(d, l, epsilon);
        return py::make_tuple(r.n_tilde, r.rate);
      },
      py::arg("dataset"), py::arg("label"), py::arg("epsilon") = 0.25);
  m.def(
      "full_report",
      [](const Dataset& d, double epsilon, bool flip_reference,
         bool fold_case, int threads) {
        return report_to_dict(full_report(
            d, epsilon,
            make_rate_options(flip_reference, fold_case, threads)));
      },
      py::arg("dataset"), py::arg("epsilon") = 0.25,
      py::arg("flip_reference") = false, py::arg("fold_case") = false,
      py::arg("threads") = 0);

  py::class_<KdaoConfig>(m, "KdaoConfig")
      .def(py::init<>())
      .def_readwrite("trigger_keywords", &KdaoConfig::trigger_keywords)
      .def_readwrite("entity_keywords", &KdaoConfig::entity_keywords)
      .def_readwrite("min_words", &KdaoConfig::min_words)
      .def_readwrite("max_words", &KdaoConfig::max_words)
      .def_property(
          "pair_on_triggers",
          [](const KdaoConfig& c) {
            return c.rule == KdaoRule::kPairOnTriggers;
          },
          [](KdaoConfig& c, bool body) {
            c.rule = body ? KdaoRule::kPairOnTriggers
                          : KdaoRule::kPairOnEntities;
          })
      .def("validate", &KdaoConfig::validate);

  m.def("kdao_label", &kdao_label, py::arg("text"),
        py::arg("config") = KdaoConfig{});
  m.def(
      "make_adversarial_negative",
      [](const Sample& s, std::uint64_t seed, const KdaoConfig& config) {
        Rng rng(seed);
        return make_adversarial_negative(s, rng, config);
      },
      py::arg("sample"), py::arg("seed") = 0,
      py::arg("config") = KdaoConfig{});
  m.def(
      "make_adversarial_positive",
      [](const Sample& s, std::uint64_t seed, const KdaoConfig& config) {
        Rng rng(seed);
        return make_adversarial_positive(s, rng, config);
      },
      py::arg("sample"), py::arg("seed") = 0,
      py::arg("config") = KdaoConfig{});
  m.def(
      "make_affable",
      [](const Sample& s, std::uint64_t seed, const KdaoConfig& config) {
        Rng rng(seed);
        return make_affable(s, rng, config);
      },
      py::arg("sample"), py::arg("seed") = 0,
      py::arg("config") = KdaoConfig{});
  m.def(
      "build_kdao_dataset",
      [](const std::vector<std::pair<std::string, std::string>>& corpus,
         std::size_t size, double pos_rate, std::uint64_t seed,
         const KdaoConfig& config) {
        std::vector<RawDoc> docs;
        docs.reserve(corpus.size());
        for (const auto& [id, text] : corpus) docs.push_back(RawDoc{id, text});
        Rng rng(seed);
        return build_kdao_dataset(docs, size, pos_rate, config, rng);
      },
      py::arg("corpus"), py::arg("size"), py::arg("pos_rate") = 0.25,
      py::arg("seed") = 0, py::arg("config") = KdaoConfig{});

  py::class_<AnnotatedText>(m, "AnnotatedText")
      .def(py::init([](std::string id, std::string text,
                       std::vector<std::string> entities,
                       const std::vector<std::pair<std::string, std::string>>&
                           positive_pairs) {
             AnnotatedText a;
             a.id = std::move(id);
             a.text = std::move(text);
             a.entities = std::move(entities);
             for (const auto& [x, y] : positive_pairs) {
               a.positive_pairs.push_back(EntityPair::make(x, y));
             }
             a.validate();
             return a;
           }),
           py::arg("id"), py::arg("text"), py::arg("entities"),
           py::arg("positive_pairs") =
               std::vector<std::pair<std::string, std::string>>{})
      .def_readonly("id", &AnnotatedText::id)
      .def_readonly("text", &AnnotatedText::text)
      .def_readonly("entities", &AnnotatedText::entities);

  m.def("insert_markers", &insert_markers, py::arg("annotated"), py::arg("a"),
        py::arg("b"));
  m.def("enumerate_pair_samples", &enumerate_pair_samples,
        py::arg("annotated"));
  m.def(
      "shuffle_marker_adversarial",
      [](const AnnotatedText& a, const std::pair<std::string, std::string>&
                                     positive_pair,
         std::uint64_t seed) {
        Rng rng(seed);
        return shuffle_marker_adversarial(
            a, EntityPair::make(positive_pair.first, positive_pair.second),
            rng);
      },
      py::arg("annotated"), py::arg("positive_pair"), py::arg("seed") = 0);

  m.def(
      "curate_adversarial",
      [](const Dataset& pool, std::size_t size, double pos_rate,
         double target, double epsilon, std::uint64_t seed, bool far_check,
         int threads, const KdaoConfig& config) {
        return build_to_tuple(build_adversarial_mix(
            pool,
            make_spec(CurationMode::kAdversarial, size, pos_rate, target,
                      epsilon, seed, far_check, threads),
            flip_fn(config)));
      },
      py::arg("pool"), py::arg("size"), py::arg("pos_rate") = 0.25,
      py::arg("target") = 0.0, py::arg("epsilon") = 0.25, py::arg("seed") = 0,
      py::arg("far_check") = true, py::arg("threads") = 0,
      py::arg("config") = KdaoConfig{});
  m.def(
      "curate_affable",
      [](const Dataset& pool, std::size_t size, double pos_rate,
         double target, bool on_positive, double epsilon, std::uint64_t seed,
         bool far_check, int threads, const KdaoConfig& config) {
        return build_to_tuple(build_affable_mix(
            pool,
            make_spec(on_positive ? CurationMode::kAffablePositive
                                  : CurationMode::kAffableNegative,
                      size, pos_rate, target, epsilon, seed, far_check,
                      threads),
            affable_fn(config)));
      },
      py::arg("pool"), py::arg("size"), py::arg("pos_rate") = 0.25,
      py::arg("target") = 0.0, py::arg("on_positive") = true,
      py::arg("epsilon") = 0.25, py::arg("seed") = 0,
      py::arg("far_check") = true, py::arg("threads") = 0,
      py::arg("config") = KdaoConfig{});
  m.def(
      "build_learning_curve",
      [](const Dataset& pool, const std::vector<std::size_t>& sizes,
         const std::string& mode, double pos_rate, double target,
         double epsilon, std::uint64_t seed, bool far_check, int threads,
         const KdaoConfig& config) {
        CurveTransforms transforms;
        transforms.to_negative = flip_fn(config);
        transforms.make_affable = affable_fn(config);
        std::vector<BuildResult> curve = build_learning_curve(
            pool, sizes,
            make_spec(curation_mode_from_name("curve-" + mode), 0, pos_rate,
                      target, epsilon, seed, far_check, threads),
            transforms);
        py::list out;
        for (BuildResult& r : curve) out.append(build_to_tuple(std::move(r)));
        return out;
      },
      py::arg("pool"), py::arg("sizes"), py::arg("mode") = "random",
      py::arg("pos_rate") = 0.25, py::arg("target") = 0.1,
      py::arg("epsilon") = 0.25, py::arg("seed") = 0,
      py::arg("far_check") = true, py::arg("threads") = 0,
      py::arg("config") = KdaoConfig{});

  m.def("standard_error", [](const std::vector<double>& values) {
    return standard_error(values);
  });

#ifdef HADV_VERSION
  m.attr("__version__") = HADV_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
