// answerability: command-line entry point.
//
// Exit status: 0 success, 1 validation error, 2 runtime error.

#include <fstream>
#include <iostream>
#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "answerability/classifier.hpp"
#include "answerability/corpus.hpp"
#include "answerability/error.hpp"
#include "answerability/evaluation.hpp"
#include "answerability/experiment.hpp"
#include "answerability/features.hpp"
#include "answerability/meta_features.hpp"
#include "answerability/synthetic.hpp"
#include "answerability/text_features.hpp"
#include "answerability/topic_model.hpp"

namespace fs = std::filesystem;
using namespace answerability;

namespace {

// Experiment settings shared by several subcommands: an optional config file
// plus one flag per config key. Flags override the file.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::vector<std::string> sets;

  void attach(CLI::App* app, bool with_output) {
    app->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"corpus", "question records (JSON lines)"},
        {"hierarchy", "topic hierarchy, parent<TAB>child"},
        {"lexicon", "category lexicon (.dic layout)"},
        {"dictionary", "standard word list"},
        {"function-words", "function word list"},
        {"ngrams", "reference corpus or compiled n-gram index"},
        {"tagger", "builtin | pretagged"},
        {"tag-lexicon", "word<TAB>tag lexicon for the builtin tagger"},
        {"pretagged", "token<TAB>tag file for the pretagged tagger"},
        {"horizon", "30d | 90d"},
        {"topics", "number of LDA topics"},
        {"classifier", "svm | logistic | both"},
        {"folds", "cross-validation folds"},
        {"seed", "random seed"},
        {"lda-iterations", "Gibbs sweeps"},
        {"lda-burn-in", "sweeps before theta is averaged"},
        {"lambda", "L2 regularization"},
        {"epochs", "training epochs"},
        {"frequent-top-n", "size of the frequent-word list"},
        {"workers", "worker threads (0 = all cores)"},
        {"drop-anonymous", "true | false"},
    };
    for (const auto& [flag, help] : keys) app->add_option("--" + flag, values[flag], help);
    if (with_output) app->add_option("--output", values["output"], "output directory");
    app->add_option("--set", sets, "extra key=value setting (repeatable)");
  }

  RunConfig resolve() const {
    RunConfig c = config_file.empty() ? RunConfig{} : load_run_config(config_file);
    for (const auto& [flag, value] : values) {
      if (value.empty()) continue;
      std::string key = flag;
      std::replace(key.begin(), key.end(), '-', '_');
      apply_setting(c, key, value);
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("cli", "--set expects key=value, got '" + kv + "'");
      apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return c;
  }
};

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cli", "cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predict whether community questions get answered within a horizon"};
  app.require_subcommand(1);

  // corpus validate
  auto* corpus_cmd = app.add_subcommand("corpus", "corpus utilities")->require_subcommand(1);
  auto* corpus_validate = corpus_cmd->add_subcommand("validate", "check records and print a rejects report");
  std::string cv_path;
  bool cv_keep_anonymous = false;
  corpus_validate->add_option("corpus", cv_path, "question records")->required();
  corpus_validate->add_flag("--keep-anonymous", cv_keep_anonymous, "do not drop anonymous askers");

  // build-ngrams
  auto* ngrams_cmd = app.add_subcommand("build-ngrams", "compile a reference corpus into an n-gram index");
  std::string ng_input, ng_output;
  ngrams_cmd->add_option("input", ng_input, "reference corpus, one sentence per line")->required()->check(CLI::ExistingFile);
  ngrams_cmd->add_option("-o,--output", ng_output, "index file")->required();

  // hierarchy validate
  auto* hier_cmd = app.add_subcommand("hierarchy", "topic hierarchy utilities")->require_subcommand(1);
  auto* hier_validate = hier_cmd->add_subcommand("validate", "report cycles, self-loops and dangling edges");
  std::string hv_path;
  hier_validate->add_option("hierarchy", hv_path, "parent<TAB>child file")->required();

  // lda train / infer
  auto* lda_cmd = app.add_subcommand("lda", "topic model")->require_subcommand(1);
  auto* lda_train = lda_cmd->add_subcommand("train", "fit LDA on the corpus texts at the horizon");
  ConfigFlags lda_flags;
  std::string lda_model_out;
  lda_flags.attach(lda_train, false);
  lda_train->add_option("-o,--model", lda_model_out, "model file")->required();
  auto* lda_infer = lda_cmd->add_subcommand("infer", "topic distributions for records");
  std::string li_model, li_corpus, li_horizon = "30d", li_output;
  lda_infer->add_option("--model", li_model, "model file")->required()->check(CLI::ExistingFile);
  lda_infer->add_option("--corpus", li_corpus, "question records")->required()->check(CLI::ExistingFile);
  lda_infer->add_option("--horizon", li_horizon, "30d | 90d");
  lda_infer->add_option("-o,--output", li_output, "output TSV (default stdout)");

  // featurize
  auto* feat_cmd = app.add_subcommand("featurize", "write the feature matrix of a corpus");
  ConfigFlags feat_flags;
  std::string feat_csv, feat_lda, feat_frequent;
  feat_flags.attach(feat_cmd, false);
  feat_cmd->add_option("-o,--features", feat_csv, "output CSV")->required();
  feat_cmd->add_option("--lda-model", feat_lda, "LDA model (default: fit on the corpus)");
  feat_cmd->add_option("--frequent-words", feat_frequent, "frequent-word list (default: fit on the corpus)");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a classifier on a feature matrix");
  std::string tr_features, tr_model, tr_classifier = "svm";
  double tr_lambda = 1e-4;
  int tr_epochs = 100;
  std::uint64_t tr_seed = 1;
  train_cmd->add_option("--features", tr_features, "feature CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("-o,--model", tr_model, "model JSON")->required();
  train_cmd->add_option("--classifier", tr_classifier, "svm | logistic");
  train_cmd->add_option("--lambda", tr_lambda, "L2 regularization");
  train_cmd->add_option("--epochs", tr_epochs, "epochs");
  train_cmd->add_option("--seed", tr_seed, "seed");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "stratified cross-validation on a feature matrix");
  std::string ev_features, ev_classifier = "svm", ev_output, ev_kv;
  int ev_folds = 10;
  double ev_lambda = 1e-4;
  int ev_epochs = 100, ev_workers = 1;
  std::uint64_t ev_seed = 1;
  eval_cmd->add_option("--features", ev_features, "feature CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--classifier", ev_classifier, "svm | logistic");
  eval_cmd->add_option("--folds", ev_folds, "folds");
  eval_cmd->add_option("--lambda", ev_lambda, "L2 regularization");
  eval_cmd->add_option("--epochs", ev_epochs, "epochs");
  eval_cmd->add_option("--seed", ev_seed, "seed");
  eval_cmd->add_option("--workers", ev_workers, "worker threads");
  eval_cmd->add_option("-o,--output", ev_output, "report file (default stdout)");
  eval_cmd->add_option("--kv", ev_kv, "machine-readable report file");

  // rank-features
  auto* rank_cmd = app.add_subcommand("rank-features", "chi-square and information-gain ranking");
  std::string rk_features, rk_output;
  rank_cmd->add_option("--features", rk_features, "feature CSV")->required()->check(CLI::ExistingFile);
  rank_cmd->add_option("-o,--output", rk_output, "ranking TSV (default stdout)");

  // score
  auto* score_cmd = app.add_subcommand("score", "score new questions with a run's artifacts");
  ConfigFlags score_flags;
  std::string sc_run_dir, sc_input, sc_output, sc_classifier;
  score_flags.attach(score_cmd, false);
  score_cmd->add_option("--run-dir", sc_run_dir, "output directory of a run")->required()->check(CLI::ExistingDirectory);
  score_cmd->add_option("--input", sc_input, "question records to score")->required();
  score_cmd->add_option("--model-classifier", sc_classifier, "svm | logistic (default: first configured)");
  score_cmd->add_option("-o,--scores", sc_output, "output TSV (default stdout)");

  // run
  auto* run_cmd = app.add_subcommand("run", "full experiment: cross-validate, rank and write all artifacts");
  ConfigFlags run_flags;
  run_flags.attach(run_cmd, true);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write the planted-signal synthetic corpus");
  std::string sy_output;
  SyntheticConfig sy;
  std::string sy_horizon = "30d";
  synth_cmd->add_option("-o,--output", sy_output, "output directory")->required();
  synth_cmd->add_option("--records", sy.num_records, "number of questions");
  synth_cmd->add_option("--noise", sy.label_noise, "label flip probability");
  synth_cmd->add_option("--anonymous-rate", sy.anonymous_rate, "share of anonymous askers");
  synth_cmd->add_option("--horizon", sy_horizon, "horizon the labels refer to");
  synth_cmd->add_option("--seed", sy.seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*corpus_validate) {
      const LoadedCorpus c = load_corpus(cv_path, !cv_keep_anonymous);
      std::cout << format_rejects_report(c);
      return c.rejects.empty() ? 0 : 1;
    }
    if (*ngrams_cmd) {
      const NgramIndex index = NgramIndex::build_from_file(ng_input);
      index.save(ng_output);
      std::cout << "bigrams " << index.count(2) << "\ntrigrams " << index.count(3) << "\n4grams "
                << index.count(4) << '\n';
      return 0;
    }
    if (*hier_validate) {
      const HierarchyDiagnostics d = diagnose_hierarchy(hv_path);
      std::cout << "nodes " << d.nodes << "\nedges " << d.edges << "\nproblems " << d.problems.size() << '\n';
      for (const auto& p : d.problems) std::cout << p << '\n';
      return d.ok() ? 0 : 1;
    }
    if (*lda_train) {
      const RunConfig config = lda_flags.resolve();
      if (config.corpus.empty()) throw ValidationError("cli", "--corpus is required");
      const LoadedCorpus c = load_corpus(config.corpus, config.drop_anonymous);
      LdaModel model = fit_lda(window_tokens(c.records, config.horizon), lda_config(config));
      std::vector<std::string> ids;
      for (const auto& r : c.records) ids.push_back(r.id);
      model.set_doc_ids(std::move(ids));
      save_lda(model, lda_model_out);
      std::cout << "documents " << c.records.size() << "\nvocabulary " << model.vocab_size() << "\ntopics "
                << model.num_topics() << '\n';
      return 0;
    }
    if (*lda_infer) {
      const LdaModel model = load_lda(li_model);
      const LoadedCorpus c = load_corpus(li_corpus, false);
      const Duration horizon = parse_duration(li_horizon);
      std::ostringstream os;
      os << "id";
      for (int k = 0; k < model.num_topics(); ++k) os << "\ttopic_" << k;
      os << "\ttopic_diversity\n";
      const std::vector<TokenSequence> docs = window_tokens(c.records, horizon);
      for (std::size_t i = 0; i < docs.size(); ++i) {
        const std::vector<double> theta = doc_topic_distribution(model, docs[i]);
        os << c.records[i].id;
        for (double t : theta) os << '\t' << format_double(t);
        os << '\t' << format_double(topic_diversity(theta)) << '\n';
      }
      for (const auto& r : c.rejects) std::cerr << "rejected line " << r.line_number << ": " << r.reason << '\n';
      write_or_print(li_output, os.str());
      return 0;
    }
    if (*feat_cmd) {
      const RunConfig config = feat_flags.resolve();
      if (config.corpus.empty()) throw ValidationError("cli", "--corpus is required");
      const StaticResources fixed = load_static_resources(config);
      const LoadedCorpus c = load_corpus(config.corpus, config.drop_anonymous);
      LeakageAudit audit;
      const FeatureExtractor extractor(
          resources_for(fixed, config, c.records, feat_lda, feat_frequent, &audit), &audit);
      save_feature_csv(feat_csv, featurize(c.records, config.horizon, extractor, config.workers));
      std::cout << "records " << c.records.size() << "\nrejected " << c.rejects.size() << "\nfeatures "
                << extractor.names().size() << "\nwindow_requests " << audit.requests()
                << "\nleakage_violations " << audit.violation_count() << '\n';
      return audit.violation_count() == 0 ? 0 : 2;
    }
    if (*train_cmd) {
      TrainOptions o;
      o.lambda = tr_lambda;
      o.epochs = tr_epochs;
      o.seed = tr_seed;
      const Dataset data = load_feature_csv(tr_features);
      save_model(train(data, parse_loss(tr_classifier), o), tr_model);
      return 0;
    }
    if (*eval_cmd) {
      TrainOptions o;
      o.lambda = ev_lambda;
      o.epochs = ev_epochs;
      o.seed = ev_seed;
      const Dataset data = load_feature_csv(ev_features);
      EvalReport report = cross_validate(data, ev_folds, parse_loss(ev_classifier), o, ev_seed, ev_workers);
      report.feature_rankings = rank_features(data);
      write_or_print(ev_output, format_report(report));
      if (!ev_kv.empty()) write_or_print(ev_kv, format_report_kv(report));
      return 0;
    }
    if (*rank_cmd) {
      const Dataset data = load_feature_csv(rk_features);
      write_or_print(rk_output, format_rankings(rank_features(data)));
      return 0;
    }
    if (*score_cmd) {
      const RunConfig config = score_flags.resolve();
      const Loss loss = sc_classifier.empty() ? config.classifiers.front() : parse_loss(sc_classifier);
      const ScoreResult result = score_questions(config, sc_run_dir, loss, sc_input);
      for (const auto& r : result.rejects)
        std::cerr << "rejected line " << r.line_number << (r.id.empty() ? "" : " (" + r.id + ")") << ": "
                  << r.reason << '\n';
      write_or_print(sc_output, format_scores(result));
      return 0;
    }
    if (*run_cmd) {
      const RunConfig config = run_flags.resolve();
      const ExperimentResult result = run_experiment(config);
      for (const auto& report : result.reports) {
        const Metrics& m = report.aggregate;
        std::cout << report.classifier << "\taccuracy " << format_double(m.accuracy) << "\tf_score "
                  << format_double(m.f_score) << "\troc_area "
                  << (m.roc_area ? format_double(*m.roc_area) : "absent") << '\n';
      }
      std::cout << "records " << result.features.size() << "\nrejected " << result.corpus.rejects.size()
                << "\nleakage_violations " << result.leakage_violations << "\noutput "
                << config.output.string() << '\n';
      return result.leakage_violations == 0 ? 0 : 2;
    }
    if (*synth_cmd) {
      sy.horizon = parse_duration(sy_horizon);
      const SyntheticCorpus corpus = generate_synthetic(sy);
      write_synthetic(corpus, sy_output);
      std::cout << "records " << corpus.records.size() << "\ntopics " << sy.num_topics << "\noutput " << sy_output
                << '\n';
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
