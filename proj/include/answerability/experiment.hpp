#pragma once

// Experiment configuration and the composable pipeline stages behind the CLI.
//
// Artifacts written by run_experiment into the output directory:
//   features.csv            feature matrix of the whole corpus
//   frequent_words.txt      frequent-word list fitted on the whole corpus
//   lda.bin                 LDA model fitted on the whole corpus
//   model_<classifier>.json final model per classifier, trained on everything
//   report_<classifier>.txt cross-validation report (tabular)
//   report_<classifier>.kv  the same, `key value` lines
//   rankings.tsv            chi-square / information-gain ranking
//   rejects.txt             corpus lines that failed validation
//   leakage.txt             observation-window audit summary
//   fit_log.tsv             which records every fold resource was fitted on
//   run.conf                the effective configuration (absolute paths)
//   manifest.txt            run.conf plus SHA-256 of every input file

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "answerability/classifier.hpp"
#include "answerability/corpus.hpp"
#include "answerability/evaluation.hpp"
#include "answerability/features.hpp"

namespace answerability {

enum class TaggerMode { kBuiltin, kPretagged };

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path hierarchy;
  std::filesystem::path lexicon;
  std::filesystem::path dictionary;
  std::filesystem::path function_words;
  std::filesystem::path ngrams;       // reference corpus or a compiled index
  TaggerMode tagger = TaggerMode::kBuiltin;
  std::filesystem::path tag_lexicon;  // builtin tagger lexicon (also the pretagged fallback)
  std::filesystem::path pretagged;    // required for TaggerMode::kPretagged
  Duration horizon = kOneMonth;
  int topics = 20;
  std::vector<Loss> classifiers{Loss::kHinge};
  int folds = 10;
  std::uint64_t seed = 1;
  std::filesystem::path output;
  int lda_iterations = 1000;
  int lda_burn_in = 500;
  double lambda = 1e-4;
  int epochs = 100;
  std::size_t frequent_top_n = 5000;
  int workers = 1;
  bool drop_anonymous = true;
};

// Sets one `key = value` setting. Throws ValidationError for an unknown key or
// a malformed value.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
// `key = value` lines; blank lines and '#' comments skipped. Relative paths are
// resolved against `base_dir`.
RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir,
                           std::string_view source_name = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);
// Canonical `key = value` form; parse_run_config reads it back unchanged.
std::string format_run_config(const RunConfig& config);

// Throws ValidationError: folds >= 2, horizon 30d or 90d, K >= 1, at least one
// classifier, every referenced input path exists, output set.
void validate(const RunConfig& config);
// Only the checks needed by the featurizing stages (no output or corpus).
void validate_resources(const RunConfig& config);

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// Resources that do not depend on the training portion.
struct StaticResources {
  std::shared_ptr<const WordList> dictionary;
  std::shared_ptr<const WordList> function_words;
  std::shared_ptr<const NgramIndex> ngrams;
  std::shared_ptr<const Tagger> tagger;
  std::shared_ptr<const CategoryLexicon> lexicon;
  std::shared_ptr<const TopicHierarchy> hierarchy;
};

StaticResources load_static_resources(const RunConfig& config);

// Who a training-dependent resource was fitted on.
struct FitRecord {
  std::string fold;      // "0".."k-1" or "final"
  std::string resource;  // frequent_words, lda, standardizer
  std::vector<std::string> record_ids;
};

class FitLog {
 public:
  void add(FitRecord record);
  const std::vector<FitRecord>& entries() const { return entries_; }
  std::string format() const;

 private:
  std::vector<FitRecord> entries_;
};

LdaConfig lda_config(const RunConfig& config);

// Fits the frequent-word list and the LDA model on `training` only, windowed
// at the horizon.
FeatureResources fit_resources(const StaticResources& fixed, std::span<const QuestionRecord> training,
                               const RunConfig& config, LeakageAudit* audit);

// As fit_resources, but loads the LDA model and/or frequent-word list from
// the given paths when they are non-empty.
FeatureResources resources_for(const StaticResources& fixed, const RunConfig& config,
                               std::span<const QuestionRecord> records, const std::filesystem::path& lda_path,
                               const std::filesystem::path& frequent_path, LeakageAudit* audit);

TrainOptions train_options(const RunConfig& config);

struct ExperimentResult {
  std::vector<EvalReport> reports;  // one per configured classifier
  std::vector<FeatureRank> rankings;
  Dataset features;
  LoadedCorpus corpus;
  std::size_t leakage_requests = 0;
  std::size_t leakage_violations = 0;
  FitLog fit_log;
  // Feature-row ids of every fold's test portion, for leakage checks.
  std::vector<std::vector<std::string>> fold_test_ids;
};

// Validates the config, runs stratified cross-validation for every configured
// classifier and writes all artifacts. Errors carry the module name and, for
// per-record failures, the record id.
ExperimentResult run_experiment(const RunConfig& config);

struct ScoredQuestion {
  std::string id;
  double score = 0.0;
  Answer label = Answer::kOpen;
};

struct ScoreResult {
  std::vector<ScoredQuestion> scored;
  std::vector<RejectedLine> rejects;
};

// Scores every valid record of `records_path` with artifacts from a run
// directory; invalid lines are reported and skipped. Throws ValidationError
// when the model's feature names differ from those produced by `config`.
ScoreResult score_questions(const RunConfig& config, const std::filesystem::path& run_dir,
                            Loss classifier, const std::filesystem::path& records_path);

std::string format_scores(const ScoreResult& result);

}  // namespace answerability
