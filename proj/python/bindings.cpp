#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "answerability/classifier.hpp"
#include "answerability/corpus.hpp"
#include "answerability/error.hpp"
#include "answerability/evaluation.hpp"
#include "answerability/experiment.hpp"
#include "answerability/features.hpp"
#include "answerability/synthetic.hpp"
#include "answerability/text_features.hpp"
#include "answerability/topic_model.hpp"

namespace py = pybind11;
namespace aq = answerability;

namespace {

std::vector<aq::Answer> to_labels(const std::vector<int>& labels) {
  std::vector<aq::Answer> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(l ? aq::Answer::kAnswered : aq::Answer::kOpen);
  return out;
}

std::vector<int> from_labels(const std::vector<aq::Answer>& labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (auto l : labels) out.push_back(l == aq::Answer::kAnswered ? 1 : 0);
  return out;
}

py::dict metrics_dict(const aq::Metrics& m) {
  py::dict d;
  d["n"] = m.n;
  d["accuracy"] = m.accuracy;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f_score"] = m.f_score;
  d["roc_area"] = m.roc_area ? py::object(py::float_(*m.roc_area)) : py::object(py::none());
  d["confusion"] = py::dict(py::arg("tp") = m.confusion.tp, py::arg("fp") = m.confusion.fp,
                            py::arg("fn") = m.confusion.fn, py::arg("tn") = m.confusion.tn);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Question answerability features, topic model and evaluation";

  static py::exception<aq::Error> error(m, "Error");
  static py::exception<aq::ValidationError> validation_error(m, "ValidationError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const aq::ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const aq::Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("tokenize", [](std::string_view text) { return aq::tokenize(text).tokens; }, py::arg("text"));
  m.def("case_fold", &aq::case_fold, py::arg("text"));
  m.def("pos_diversity", [](const std::vector<std::string>& tags) { return aq::pos_diversity(tags); },
        py::arg("tags"));
  m.def("lcs_length",
        [](const std::vector<std::string>& a, const std::vector<std::string>& b) { return aq::lcs_length(a, b); },
        py::arg("a"), py::arg("b"));
  m.def("rouge_lcs_recall",
        [](std::string_view reference, std::string_view candidate) {
          return aq::rouge_lcs_recall(aq::tokenize(reference), aq::tokenize(candidate));
        },
        py::arg("reference"), py::arg("candidate"));
  m.def("topic_diversity", [](const std::vector<double>& theta) { return aq::topic_diversity(theta); },
        py::arg("theta"));

  m.def("roc_area",
        [](const std::vector<int>& labels, const std::vector<double>& scores) -> std::optional<double> {
          return aq::roc_area(to_labels(labels), scores);
        },
        py::arg("labels"), py::arg("scores"), "labels: 1 = answered, 0 = open");
  m.def("metrics",
        [](const std::vector<int>& labels, const std::vector<double>& scores) {
          return metrics_dict(aq::compute_metrics(to_labels(labels), scores));
        },
        py::arg("labels"), py::arg("scores"));
  m.def("stratified_folds",
        [](const std::vector<int>& labels, int k, std::uint64_t seed) {
          std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out;
          for (auto& f : aq::stratified_folds(to_labels(labels), k, seed)) out.emplace_back(f.train, f.test);
          return out;
        },
        py::arg("labels"), py::arg("k"), py::arg("seed") = 1);
  m.def("chi_square_2x2", &aq::chi_square_2x2, py::arg("table"));
  m.def("information_gain_2x2", &aq::information_gain_2x2, py::arg("table"));

  m.def("fit_lda",
        [](const std::vector<std::vector<std::string>>& docs, int num_topics, int iterations, int burn_in,
           std::uint64_t seed) {
          std::vector<aq::TokenSequence> seqs;
          for (const auto& d : docs) seqs.push_back({d, 0});
          aq::LdaConfig c = aq::LdaConfig::for_topics(num_topics);
          c.iterations = iterations;
          c.burn_in = burn_in;
          c.seed = seed;
          return aq::fit_lda(seqs, c).doc_topic;
        },
        py::arg("documents"), py::arg("num_topics"), py::arg("iterations") = 1000, py::arg("burn_in") = 500,
        py::arg("seed") = 1, "Returns the per-document topic distributions.");

  m.def("generate_synthetic",
        [](const std::filesystem::path& dir, std::size_t records, std::uint64_t seed, double noise) {
          aq::SyntheticConfig c;
          c.num_records = records;
          c.seed = seed;
          c.label_noise = noise;
          const aq::SyntheticCorpus corpus = aq::generate_synthetic(c);
          aq::write_synthetic(corpus, dir);
          return from_labels(corpus.hidden_class);
        },
        py::arg("directory"), py::arg("records") = 2000, py::arg("seed") = 1, py::arg("noise") = 0.1,
        "Writes corpus.jsonl, hierarchy.tsv and reference_corpus.txt; returns the hidden classes.");
  m.def("planted_feature_names", &aq::planted_feature_names);

  m.def("load_features",
        [](const std::filesystem::path& path) {
          const aq::Dataset d = aq::load_feature_csv(path);
          py::dict out;
          out["names"] = d.names;
          out["ids"] = d.ids;
          out["rows"] = d.rows;
          out["labels"] = from_labels(d.labels);
          return out;
        },
        py::arg("path"));
  m.def("rank_features",
        [](const std::filesystem::path& features_csv) {
          std::vector<std::tuple<std::string, double, double>> out;
          for (const auto& r : aq::rank_features(aq::load_feature_csv(features_csv)))
            out.emplace_back(r.name, r.chi_square, r.info_gain);
          return out;
        },
        py::arg("features_csv"));

  m.def("run_experiment",
        [](const std::filesystem::path& config_path, const std::map<std::string, std::string>& overrides) {
          aq::RunConfig c = aq::load_run_config(config_path);
          for (const auto& [k, v] : overrides) aq::apply_setting(c, k, v);
          aq::ExperimentResult r;
          {
            py::gil_scoped_release release;
            r = aq::run_experiment(c);
          }
          py::dict out;
          py::dict reports;
          for (const auto& rep : r.reports) reports[py::str(rep.classifier)] = metrics_dict(rep.aggregate);
          out["reports"] = reports;
          std::vector<std::tuple<std::string, double, double>> ranks;
          for (const auto& fr : r.rankings) ranks.emplace_back(fr.name, fr.chi_square, fr.info_gain);
          out["rankings"] = ranks;
          out["records"] = r.features.size();
          out["rejected"] = r.corpus.rejects.size();
          out["leakage_requests"] = r.leakage_requests;
          out["leakage_violations"] = r.leakage_violations;
          return out;
        },
        py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{},
        "Runs the full experiment from a key = value config file; overrides win.");
}
