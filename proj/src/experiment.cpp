#include "answerability/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <mutex>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "answerability/error.hpp"
#include "answerability/lexicon.hpp"
#include "answerability/meta_features.hpp"
#include "answerability/tagger.hpp"
#include "answerability/text_features.hpp"
#include "answerability/topic_model.hpp"

namespace answerability {
namespace fs = std::filesystem;

namespace {

ValidationError config_error(const std::string& message) { return ValidationError("cli", message); }

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw config_error("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw config_error("bad value for " + std::string(key) + ": '" + std::string(value) + "' (true|false)");
}

std::vector<Loss> parse_classifiers(std::string_view value) {
  if (value == "both") return {Loss::kHinge, Loss::kLogistic};
  std::vector<Loss> out;
  std::stringstream ss{std::string(value)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const Loss loss = parse_loss(trim(item));
    if (std::find(out.begin(), out.end(), loss) == out.end()) out.push_back(loss);
  }
  if (out.empty()) throw config_error("classifier list is empty");
  return out;
}

std::string classifier_list(const std::vector<Loss>& losses) {
  std::string out;
  for (Loss l : losses) {
    if (!out.empty()) out += ',';
    out += classifier_name(l);
  }
  return out;
}

// Path-valued settings, in canonical output order.
constexpr std::array<std::string_view, 9> kPathKeys = {
    "corpus", "hierarchy", "lexicon", "dictionary", "function_words",
    "ngrams", "tag_lexicon", "pretagged", "output"};

fs::path* path_field(RunConfig& c, std::string_view key) {
  if (key == "corpus") return &c.corpus;
  if (key == "hierarchy") return &c.hierarchy;
  if (key == "lexicon") return &c.lexicon;
  if (key == "dictionary") return &c.dictionary;
  if (key == "function_words") return &c.function_words;
  if (key == "ngrams") return &c.ngrams;
  if (key == "tag_lexicon") return &c.tag_lexicon;
  if (key == "pretagged") return &c.pretagged;
  if (key == "output") return &c.output;
  return nullptr;
}

const fs::path& path_field(const RunConfig& c, std::string_view key) {
  return *path_field(const_cast<RunConfig&>(c), key);
}

void require_file(const fs::path& p, std::string_view what) {
  if (p.empty()) throw config_error(std::string(what) + " path is not set");
  std::error_code ec;
  if (!fs::is_regular_file(p, ec))
    throw config_error(std::string(what) + " does not exist: " + p.string());
}

bool is_compiled_ngram_index(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  char magic[8] = {};
  in.read(magic, sizeof magic);
  return in.gcount() == 8 && std::string_view(magic, 8) == "QANGRAMS";
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ',';
    out += id;
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cli", "cannot write " + path.string());
  out << text;
  if (!out) throw IoError("cli", "failed writing " + path.string());
}

std::vector<std::string> ids_of(std::span<const QuestionRecord> records) {
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.id);
  return ids;
}

std::vector<QuestionRecord> pick(const std::vector<QuestionRecord>& records,
                                 std::span<const std::size_t> indices) {
  std::vector<QuestionRecord> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(records[i]);
  return out;
}

std::string format_leakage(const LeakageAudit& audit) {
  std::ostringstream os;
  os << "requests " << audit.requests() << '\n';
  os << "violations " << audit.violation_count() << '\n';
  for (const auto& v : audit.violations())
    os << v.question_id << '\t' << v.what << '\t' << v.as_of << '\t' << v.limit << '\n';
  return os.str();
}

}  // namespace

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (fs::path* p = path_field(c, key)) {
    *p = value;
  } else if (key == "tagger") {
    if (value == "builtin") c.tagger = TaggerMode::kBuiltin;
    else if (value == "pretagged") c.tagger = TaggerMode::kPretagged;
    else throw config_error("tagger must be builtin or pretagged, got '" + value + "'");
  } else if (key == "horizon") {
    try {
      c.horizon = parse_duration(value);
    } catch (const Error& e) {
      throw config_error("bad horizon: " + e.detail());
    }
  } else if (key == "topics") {
    c.topics = parse_number<int>(key, value);
  } else if (key == "classifier") {
    c.classifiers = parse_classifiers(value);
  } else if (key == "folds") {
    c.folds = parse_number<int>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "lda_iterations") {
    c.lda_iterations = parse_number<int>(key, value);
  } else if (key == "lda_burn_in") {
    c.lda_burn_in = parse_number<int>(key, value);
  } else if (key == "lambda") {
    c.lambda = parse_number<double>(key, value);
  } else if (key == "epochs") {
    c.epochs = parse_number<int>(key, value);
  } else if (key == "frequent_top_n") {
    c.frequent_top_n = parse_number<std::size_t>(key, value);
  } else if (key == "workers") {
    c.workers = parse_number<int>(key, value);
  } else if (key == "drop_anonymous") {
    c.drop_anonymous = parse_bool(key, value);
  } else {
    throw config_error("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig parse_run_config(std::istream& in, const fs::path& base_dir, std::string_view source_name) {
  RunConfig c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error(std::string(source_name) + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    try {
      apply_setting(c, key, std::string_view(t).substr(eq + 1));
    } catch (const Error& e) {
      throw config_error(std::string(source_name) + ":" + std::to_string(line_no) + ": " + e.detail());
    }
  }
  for (auto key : kPathKeys) {
    fs::path& p = *path_field(c, key);
    if (!p.empty() && p.is_relative()) p = base_dir / p;
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cli", "cannot open config: " + path.string());
  return parse_run_config(in, path.parent_path(), path.string());
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream os;
  for (auto key : kPathKeys) {
    const fs::path& p = path_field(c, key);
    if (!p.empty()) os << key << " = " << p.lexically_normal().string() << '\n';
  }
  os << "tagger = " << (c.tagger == TaggerMode::kBuiltin ? "builtin" : "pretagged") << '\n';
  os << "horizon = " << format_duration(c.horizon) << '\n';
  os << "topics = " << c.topics << '\n';
  os << "classifier = " << classifier_list(c.classifiers) << '\n';
  os << "folds = " << c.folds << '\n';
  os << "seed = " << c.seed << '\n';
  os << "lda_iterations = " << c.lda_iterations << '\n';
  os << "lda_burn_in = " << c.lda_burn_in << '\n';
  os << "lambda = " << format_double(c.lambda) << '\n';
  os << "epochs = " << c.epochs << '\n';
  os << "frequent_top_n = " << c.frequent_top_n << '\n';
  os << "workers = " << c.workers << '\n';
  os << "drop_anonymous = " << (c.drop_anonymous ? "true" : "false") << '\n';
  return os.str();
}

void validate_resources(const RunConfig& c) {
  if (c.horizon != kOneMonth && c.horizon != kThreeMonths)
    throw config_error("horizon must be 30d or 90d, got " + format_duration(c.horizon));
  if (c.topics < 1) throw config_error("topics must be >= 1");
  if (c.lda_iterations <= c.lda_burn_in || c.lda_burn_in < 0)
    throw config_error("need lda_iterations > lda_burn_in >= 0");
  if (!(c.lambda > 0)) throw config_error("lambda must be positive");
  if (c.epochs < 1) throw config_error("epochs must be >= 1");
  if (c.frequent_top_n < 1) throw config_error("frequent_top_n must be >= 1");
  require_file(c.hierarchy, "hierarchy");
  require_file(c.lexicon, "lexicon");
  require_file(c.dictionary, "dictionary");
  require_file(c.function_words, "function_words");
  require_file(c.ngrams, "ngrams");
  if (!c.tag_lexicon.empty()) require_file(c.tag_lexicon, "tag_lexicon");
  if (c.tagger == TaggerMode::kPretagged) require_file(c.pretagged, "pretagged");
}

void validate(const RunConfig& c) {
  if (c.folds < 2) throw config_error("folds must be >= 2, got " + std::to_string(c.folds));
  if (c.classifiers.empty()) throw config_error("no classifier configured");
  if (c.output.empty()) throw config_error("output directory is not set");
  require_file(c.corpus, "corpus");
  validate_resources(c);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cli", "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw IoError("cli", "SHA-256 unavailable");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char two[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

StaticResources load_static_resources(const RunConfig& c) {
  validate_resources(c);
  StaticResources r;
  r.dictionary = std::make_shared<WordList>(WordList::load(c.dictionary, WordListKind::kDictionary));
  r.function_words = std::make_shared<WordList>(WordList::load(c.function_words, WordListKind::kFunctionWords));
  r.ngrams = std::make_shared<NgramIndex>(is_compiled_ngram_index(c.ngrams) ? NgramIndex::load(c.ngrams)
                                                                            : NgramIndex::build_from_file(c.ngrams));
  std::shared_ptr<const Tagger> builtin = std::make_shared<LexiconTagger>(
      c.tag_lexicon.empty() ? LexiconTagger() : LexiconTagger::load(c.tag_lexicon));
  r.tagger = c.tagger == TaggerMode::kPretagged
                 ? std::make_shared<PretaggedTagger>(PretaggedTagger::load(c.pretagged, builtin))
                 : builtin;
  r.lexicon = std::make_shared<CategoryLexicon>(CategoryLexicon::load(c.lexicon));
  r.hierarchy = std::make_shared<TopicHierarchy>(TopicHierarchy::load(c.hierarchy));
  return r;
}

void FitLog::add(FitRecord record) { entries_.push_back(std::move(record)); }

std::string FitLog::format() const {
  std::ostringstream os;
  os << "fold\tresource\tn\trecord_ids\n";
  for (const auto& e : entries_)
    os << e.fold << '\t' << e.resource << '\t' << e.record_ids.size() << '\t' << join_ids(e.record_ids) << '\n';
  return os.str();
}

LdaConfig lda_config(const RunConfig& c) {
  LdaConfig lc = LdaConfig::for_topics(c.topics);
  lc.iterations = c.lda_iterations;
  lc.burn_in = c.lda_burn_in;
  lc.seed = c.seed;
  return lc;
}

FeatureResources fit_resources(const StaticResources& fixed, std::span<const QuestionRecord> training,
                               const RunConfig& c, LeakageAudit* audit) {
  const std::vector<TokenSequence> docs = window_tokens(training, c.horizon, audit);
  FeatureResources r;
  r.dictionary = fixed.dictionary;
  r.function_words = fixed.function_words;
  r.ngrams = fixed.ngrams;
  r.tagger = fixed.tagger;
  r.lexicon = fixed.lexicon;
  r.hierarchy = fixed.hierarchy;
  r.frequent_words = std::make_shared<WordList>(WordList::most_frequent(docs, c.frequent_top_n));
  auto lda = std::make_shared<LdaModel>(fit_lda(docs, lda_config(c)));
  lda->set_doc_ids(ids_of(training));
  r.lda = std::move(lda);
  return r;
}

FeatureResources resources_for(const StaticResources& fixed, const RunConfig& c,
                               std::span<const QuestionRecord> records, const fs::path& lda_path,
                               const fs::path& frequent_path, LeakageAudit* audit) {
  FeatureResources r;
  if (lda_path.empty() || frequent_path.empty()) {
    r = fit_resources(fixed, records, c, audit);
  } else {
    r.dictionary = fixed.dictionary;
    r.function_words = fixed.function_words;
    r.ngrams = fixed.ngrams;
    r.tagger = fixed.tagger;
    r.lexicon = fixed.lexicon;
    r.hierarchy = fixed.hierarchy;
  }
  if (!lda_path.empty()) r.lda = std::make_shared<LdaModel>(load_lda(lda_path));
  if (!frequent_path.empty())
    r.frequent_words = std::make_shared<WordList>(WordList::load(frequent_path, WordListKind::kFrequentWords));
  return r;
}

TrainOptions train_options(const RunConfig& c) {
  TrainOptions o;
  o.lambda = c.lambda;
  o.epochs = c.epochs;
  o.seed = c.seed;
  return o;
}

ExperimentResult run_experiment(const RunConfig& config) {
  validate(config);
  ExperimentResult result;
  result.corpus = load_corpus(config.corpus, config.drop_anonymous);
  const std::vector<QuestionRecord>& records = result.corpus.records;
  if (records.empty()) throw ValidationError("corpus", "no valid records in " + config.corpus.string());

  std::error_code ec;
  fs::create_directories(config.output, ec);
  if (ec) throw IoError("cli", "cannot create output directory " + config.output.string() + ": " + ec.message());

  const StaticResources fixed = load_static_resources(config);
  LeakageAudit audit;

  std::vector<Answer> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(label_at(r, config.horizon).value);

  const std::vector<FoldSplit> folds = stratified_folds(labels, config.folds, config.seed);
  const std::size_t k = folds.size();

  // Fold resources and datasets depend only on the training portion; they are
  // shared by every classifier.
  std::vector<Dataset> fold_train(k), fold_test(k);
  std::vector<std::vector<std::string>> fold_train_ids(k);
  parallel_for(k, config.workers, [&](std::size_t f) {
    const std::vector<QuestionRecord> train_records = pick(records, folds[f].train);
    const std::vector<QuestionRecord> test_records = pick(records, folds[f].test);
    const FeatureExtractor extractor(fit_resources(fixed, train_records, config, &audit), &audit);
    fold_train[f] = featurize(train_records, config.horizon, extractor, 1);
    fold_test[f] = featurize(test_records, config.horizon, extractor, 1);
    fold_train_ids[f] = ids_of(train_records);
  });
  for (std::size_t f = 0; f < k; ++f) {
    result.fit_log.add({std::to_string(f), "frequent_words", fold_train_ids[f]});
    result.fit_log.add({std::to_string(f), "lda", fold_train_ids[f]});
    result.fold_test_ids.push_back(fold_test[f].ids);
  }

  const TrainOptions options = train_options(config);
  for (Loss loss : config.classifiers) {
    std::vector<std::vector<std::string>> standardizer_ids(k);
    EvalReport report = cross_validate(
        labels, config.folds, config.seed,
        [&](std::size_t f, const FoldSplit& split) {
          if (split.test != folds[f].test)
            throw PreconditionError("model_eval", "fold split changed between stages");
          const LinearModel model = train(fold_train[f], loss, options);
          standardizer_ids[f] = fold_train[f].ids;
          std::vector<double> scores;
          scores.reserve(fold_test[f].size());
          for (const auto& row : fold_test[f].rows) scores.push_back(predict(model, std::span<const double>(row)).score);
          return scores;
        },
        config.workers);
    report.classifier = std::string(classifier_name(loss));
    for (std::size_t f = 0; f < k; ++f)
      result.fit_log.add({std::to_string(f), "standardizer:" + report.classifier, standardizer_ids[f]});
    result.reports.push_back(std::move(report));
  }

  // Final resources and models use every record.
  const FeatureResources full = fit_resources(fixed, records, config, &audit);
  const FeatureExtractor extractor(full, &audit);
  result.features = featurize(records, config.horizon, extractor, config.workers);
  result.rankings = rank_features(result.features);
  result.fit_log.add({"final", "frequent_words", result.features.ids});
  result.fit_log.add({"final", "lda", result.features.ids});
  for (EvalReport& report : result.reports) report.feature_rankings = result.rankings;

  const fs::path& out = config.output;
  save_feature_csv(out / "features.csv", result.features);
  full.frequent_words->save(out / "frequent_words.txt");
  save_lda(*full.lda, out / "lda.bin");
  for (std::size_t i = 0; i < config.classifiers.size(); ++i) {
    const Loss loss = config.classifiers[i];
    const std::string name(classifier_name(loss));
    save_model(train(result.features, loss, options), out / ("model_" + name + ".json"));
    result.fit_log.add({"final", "standardizer:" + name, result.features.ids});
    write_text(out / ("report_" + name + ".txt"), format_report(result.reports[i]));
    write_text(out / ("report_" + name + ".kv"), format_report_kv(result.reports[i]));
  }
  write_text(out / "rankings.tsv", format_rankings(result.rankings));
  write_text(out / "rejects.txt", format_rejects_report(result.corpus));
  write_text(out / "leakage.txt", format_leakage(audit));
  write_text(out / "fit_log.tsv", result.fit_log.format());

  RunConfig effective = config;
  for (auto key : kPathKeys) {
    fs::path& p = *path_field(effective, key);
    if (!p.empty()) p = fs::absolute(p);
  }
  const std::string conf = format_run_config(effective);
  write_text(out / "run.conf", conf);

  std::ostringstream manifest;
  manifest << "# reproduce with: answerability run --config run.conf\n" << conf << "\n[inputs]\n";
  for (auto key : kPathKeys) {
    if (key == "output") continue;
    const fs::path& p = *path_field(effective, key);
    if (!p.empty()) manifest << key << '\t' << sha256_file(p) << '\t' << p.string() << '\n';
  }
  manifest << "\n[outputs]\n";
  std::vector<std::string> produced = {"features.csv", "frequent_words.txt", "lda.bin", "rankings.tsv",
                                       "rejects.txt", "leakage.txt", "fit_log.tsv", "run.conf"};
  for (Loss loss : config.classifiers) {
    const std::string name(classifier_name(loss));
    produced.push_back("model_" + name + ".json");
    produced.push_back("report_" + name + ".txt");
    produced.push_back("report_" + name + ".kv");
  }
  std::sort(produced.begin(), produced.end());
  for (const auto& f : produced) manifest << f << '\t' << sha256_file(out / f) << '\n';
  manifest << "\n[leakage]\nrequests\t" << audit.requests() << "\nviolations\t" << audit.violation_count() << '\n';
  write_text(out / "manifest.txt", manifest.str());

  result.leakage_requests = audit.requests();
  result.leakage_violations = audit.violation_count();
  return result;
}

ScoreResult score_questions(const RunConfig& config, const fs::path& run_dir, Loss classifier,
                            const fs::path& records_path) {
  const StaticResources fixed = load_static_resources(config);
  const FeatureResources res =
      resources_for(fixed, config, {}, run_dir / "lda.bin", run_dir / "frequent_words.txt", nullptr);
  const LinearModel model =
      load_model(run_dir / ("model_" + std::string(classifier_name(classifier)) + ".json"));

  LeakageAudit audit;
  const FeatureExtractor extractor(res, &audit);
  if (extractor.names() != model.names) {
    throw ValidationError("model_eval", "model has " + std::to_string(model.names.size()) +
                                            " features but the current configuration produces " +
                                            std::to_string(extractor.names().size()) +
                                            " (or names differ); rebuild the model with this configuration");
  }

  const LoadedCorpus corpus = load_corpus(records_path, false);
  ScoreResult result;
  result.rejects = corpus.rejects;
  const Dataset data = featurize(corpus.records, config.horizon, extractor, config.workers);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Prediction p = predict(model, FeatureVector{data.names, data.rows[i]});
    result.scored.push_back({data.ids[i], p.score, p.label});
  }
  return result;
}

std::string format_scores(const ScoreResult& result) {
  std::ostringstream os;
  for (const auto& s : result.scored)
    os << s.id << '\t' << format_double(s.score) << '\t' << to_string(s.label) << '\n';
  return os.str();
}

}  // namespace answerability
