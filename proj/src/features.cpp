#include "answerability/features.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "answerability/error.hpp"

namespace answerability {
namespace {

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<std::string> feature_names(const CategoryLexicon& lexicon, int num_topics) {
  std::vector<std::string> names = {
      "char_length", "word_count",  "frac_nonfrequent", "function_word_count", "inv_fraction",
      "has_bigram",  "has_trigram", "has_4gram",        "posdiv_difference",   "rouge_lcs_recall",
  };
  for (const auto& c : lexicon.categories()) names.push_back("liwc_" + c);
  for (int k = 0; k < num_topics; ++k) names.push_back("topic_" + std::to_string(k));
  names.push_back("topic_diversity");
  for (int k = 0; k < kNumCountedEditKinds; ++k)
    names.push_back("edits_" + std::string(to_string(static_cast<EditKind>(k))));
  for (const char* n : {"promotion_count", "promotion_audience", "mean_edit_interval", "hier_num_topics",
                        "hier_avg_depth", "hier_max_depth", "hier_var_depth", "hier_max_same_level",
                        "hier_num_components", "topic_set_difference"})
    names.emplace_back(n);
  return names;
}

FeatureExtractor::FeatureExtractor(FeatureResources resources, LeakageAudit* audit)
    : res_(std::move(resources)), audit_(audit) {
  auto require = [](const void* p, const char* what) {
    if (!p) throw ValidationError("model_eval", std::string("missing extractor resource: ") + what);
  };
  require(res_.dictionary.get(), "dictionary");
  require(res_.function_words.get(), "function words");
  require(res_.frequent_words.get(), "frequent words");
  require(res_.ngrams.get(), "n-gram index");
  require(res_.tagger.get(), "tagger");
  require(res_.lexicon.get(), "lexicon");
  require(res_.lda.get(), "LDA model");
  require(res_.hierarchy.get(), "topic hierarchy");
  names_ = feature_names(*res_.lexicon, res_.lda->num_topics());
}

FeatureVector FeatureExtractor::extract(const QuestionRecord& record, Duration horizon) const {
  return FeatureVector{names_, extract_values(record, horizon)};
}

std::vector<double> FeatureExtractor::extract_values(const QuestionRecord& record, Duration horizon) const {
  const ObservationWindow w = observe(record, horizon, audit_);
  const TokenSequence initial = tokenize(w.initial.text);
  const TokenSequence current = tokenize(w.current.text);

  std::vector<double> v;
  v.reserve(names_.size());

  const BasicCounts counts = basic_counts(current, *res_.function_words, *res_.frequent_words);
  v.push_back(static_cast<double>(counts.char_length));
  v.push_back(static_cast<double>(counts.word_count));
  v.push_back(counts.frac_nonfrequent);
  v.push_back(static_cast<double>(counts.function_word_count));
  v.push_back(inv_fraction(current, *res_.dictionary));
  const NgramPresence ngrams = ngram_presence(current, *res_.ngrams);
  v.push_back(ngrams.has_bigram ? 1.0 : 0.0);
  v.push_back(ngrams.has_trigram ? 1.0 : 0.0);
  v.push_back(ngrams.has_4gram ? 1.0 : 0.0);
  const double posdiv_now = pos_diversity(res_.tagger->tag(current).tags);
  const double posdiv_initial = pos_diversity(res_.tagger->tag(initial).tags);
  v.push_back(posdiv_now - posdiv_initial);
  // Records are validated to have a non-empty initial token sequence.
  v.push_back(rouge_lcs_recall(initial, current));

  const CategoryScores liwc = category_scores(current, *res_.lexicon);
  v.insert(v.end(), liwc.scores.begin(), liwc.scores.end());

  const LdaModel& lda = *res_.lda;
  const std::vector<double> theta = [&] {
    if (auto idx = lda.training_index(record.id)) return doc_topic_distribution(lda, *idx);
    return doc_topic_distribution(lda, current);
  }();
  v.insert(v.end(), theta.begin(), theta.end());
  v.push_back(topic_diversity(theta));

  const EditSummary edits = edit_summary(w.edit_events, w.promotions);
  for (auto c : edits.counts) v.push_back(static_cast<double>(c));
  v.push_back(static_cast<double>(edits.promotion_count));
  v.push_back(static_cast<double>(edits.promotion_audience));
  v.push_back(edits.mean_edit_interval.value_or(0.0));
  const HierarchyFeatures h = hierarchy_features(w.current.topics, *res_.hierarchy);
  for (double x : {h.num_topics, h.avg_depth, h.max_depth, h.var_depth, h.max_same_level, h.num_components})
    v.push_back(x);
  v.push_back(static_cast<double>(topic_set_difference(w.initial.topics, w.current.topics)));
  return v;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.names = names;
  out.ids.reserve(indices.size());
  out.rows.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    out.ids.push_back(ids.at(i));
    out.rows.push_back(rows.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Dataset featurize(std::span<const QuestionRecord> records, Duration horizon,
                  const FeatureExtractor& extractor, int workers) {
  Dataset data;
  data.names = extractor.names();
  data.rows.resize(records.size());
  data.ids.reserve(records.size());
  data.labels.reserve(records.size());
  for (const auto& r : records) {
    data.ids.push_back(r.id);
    data.labels.push_back(label_at(r, horizon).value);
  }
  parallel_for(records.size(), workers, [&](std::size_t i) {
    try {
      data.rows[i] = extractor.extract_values(records[i], horizon);
    } catch (const Error& e) {
      throw ValidationError(e.module(), std::string("record ") + records[i].id + ": " + e.detail());
    }
  });
  return data;
}

std::vector<TokenSequence> window_tokens(std::span<const QuestionRecord> records, Duration horizon,
                                         LeakageAudit* audit) {
  std::vector<TokenSequence> docs;
  docs.reserve(records.size());
  for (const auto& r : records) {
    const Timestamp end = r.created_at + horizon.seconds;
    if (audit) audit->record(r.id, end, end);
    docs.push_back(tokenize(snapshot_at(r, end).text));
  }
  return docs;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_feature_csv(std::ostream& out, const Dataset& data) {
  out << "id,label";
  for (const auto& n : data.names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.ids[i] << ',' << to_string(data.labels[i]);
    for (double x : data.rows[i]) out << ',' << format_double(x);
    out << '\n';
  }
}

void save_feature_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("model_eval", "cannot write feature matrix: " + path.string());
  write_feature_csv(out, data);
  if (!out) throw IoError("model_eval", "write failed: " + path.string());
}

Dataset read_feature_csv(std::istream& in, std::string_view source_name) {
  auto fail = [&](std::size_t line, const std::string& m) {
    return ValidationError("model_eval", std::string(source_name) + ":" + std::to_string(line) + ": " + m);
  };
  Dataset data;
  std::string line;
  if (!std::getline(in, line)) throw fail(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv(line);
  if (header.size() < 2 || header[0] != "id" || header[1] != "label")
    throw fail(1, "header must start with id,label");
  data.names.assign(header.begin() + 2, header.end());
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size()) throw fail(line_number, "wrong number of columns");
    data.ids.push_back(cells[0]);
    if (cells[1] == "answered") {
      data.labels.push_back(Answer::kAnswered);
    } else if (cells[1] == "open") {
      data.labels.push_back(Answer::kOpen);
    } else {
      throw fail(line_number, "label must be 'answered' or 'open'");
    }
    std::vector<double> row(data.names.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      const std::string& cell = cells[j + 2];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), row[j]);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw fail(line_number, "bad number '" + cell + "' in column " + data.names[j]);
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

Dataset load_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("model_eval", "cannot open feature matrix: " + path.string());
  return read_feature_csv(in, path.string());
}

}  // namespace answerability
