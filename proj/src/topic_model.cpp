#include "answerability/topic_model.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <numeric>

#include "answerability/binary_io.hpp"
#include "answerability/error.hpp"
#include "answerability/random.hpp"

namespace answerability {
namespace {

constexpr std::string_view kLdaMagic = "QALDAMDL";
constexpr std::uint32_t kLdaVersion = 1;

bool is_sample_sweep(const LdaConfig& c, int sweep) {
  if (sweep <= c.burn_in) return false;
  return (sweep - c.burn_in) % c.sample_lag == 0 || sweep == c.iterations;
}

// Draws from an unnormalized cumulative distribution.
int sample_cumulative(std::span<const double> cumulative, Rng& rng) {
  const double u = uniform01(rng) * cumulative.back();
  int k = 0;
  const int last = static_cast<int>(cumulative.size()) - 1;
  while (k < last && cumulative[k] <= u) ++k;
  return k;
}

std::vector<std::size_t> in_vocab_ids(const LdaModel& model, const TokenSequence& doc) {
  std::vector<std::size_t> ids;
  ids.reserve(doc.size());
  for (const auto& t : doc.tokens)
    if (auto id = model.word_id(case_fold(t))) ids.push_back(*id);
  return ids;
}

void normalize(std::vector<double>& theta) {
  const double sum = std::accumulate(theta.begin(), theta.end(), 0.0);
  for (double& x : theta) x /= sum;
}

}  // namespace

LdaConfig LdaConfig::for_topics(int num_topics) {
  LdaConfig c;
  c.num_topics = num_topics;
  c.alpha = num_topics > 0 ? 50.0 / num_topics : 1.0;
  return c;
}

void LdaConfig::validate() const {
  auto fail = [](const std::string& m) { return ValidationError("topic_model", m); };
  if (num_topics < 1) throw fail("number of topics must be >= 1");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw fail("alpha and beta must be positive");
  if (burn_in < 0 || iterations <= burn_in) throw fail("need iterations > burn_in >= 0");
  if (sample_lag < 1) throw fail("sample_lag must be >= 1");
  if (min_word_count < 1) throw fail("min_word_count must be >= 1");
}

std::optional<std::size_t> LdaModel::word_id(std::string_view folded_word) const {
  auto it = word_index_.find(std::string(folded_word));
  if (it == word_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> LdaModel::training_index(std::string_view id) const {
  auto it = doc_index_.find(std::string(id));
  if (it == doc_index_.end()) return std::nullopt;
  return it->second;
}

void LdaModel::rebuild_index() {
  word_index_.clear();
  for (std::size_t i = 0; i < vocab.size(); ++i) word_index_.emplace(vocab[i], i);
  doc_index_.clear();
  for (std::size_t i = 0; i < doc_ids.size(); ++i) doc_index_.emplace(doc_ids[i], i);
}

LdaModel fit_lda(std::span<const TokenSequence> documents, const LdaConfig& config,
                 const SweepObserver& observer) {
  config.validate();
  const int K = config.num_topics;

  // Vocabulary: case-folded types with count >= min_word_count, sorted.
  std::map<std::string, std::int64_t> type_counts;
  for (const auto& doc : documents)
    for (const auto& t : doc.tokens) ++type_counts[case_fold(t)];

  LdaModel model;
  model.config = config;
  for (const auto& [word, count] : type_counts)
    if (count >= config.min_word_count) model.vocab.push_back(word);
  model.rebuild_index();
  const std::size_t V = model.vocab.size();

  std::vector<std::vector<std::size_t>> words(documents.size());
  std::int64_t total_tokens = 0;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    words[d] = in_vocab_ids(model, documents[d]);
    total_tokens += static_cast<std::int64_t>(words[d].size());
  }
  if (total_tokens == 0)
    throw ValidationError("topic_model", "no in-vocabulary tokens in the training documents");
  if (K > total_tokens)
    std::clog << "topic_model: warning: " << K << " topics for only " << total_tokens << " tokens\n";

  Rng rng(config.seed);
  model.word_topic.assign(V * K, 0);
  model.topic_totals.assign(K, 0);
  std::vector<std::vector<std::int32_t>> doc_counts(documents.size(), std::vector<std::int32_t>(K, 0));
  std::vector<std::vector<int>> assignment(documents.size());

  for (std::size_t d = 0; d < documents.size(); ++d) {
    assignment[d].resize(words[d].size());
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      const int k = static_cast<int>(uniform_index(rng, K));
      assignment[d][i] = k;
      ++doc_counts[d][k];
      ++model.word_topic[words[d][i] * K + k];
      ++model.topic_totals[k];
    }
  }

  const double alpha = config.alpha;
  const double beta = config.beta;
  const double v_beta = static_cast<double>(V) * beta;
  std::vector<double> cumulative(K);
  std::vector<std::vector<double>> theta_sum(documents.size(), std::vector<double>(K, 0.0));
  int samples = 0;

  for (int sweep = 1; sweep <= config.iterations; ++sweep) {
    for (std::size_t d = 0; d < documents.size(); ++d) {
      auto& nd = doc_counts[d];
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const std::size_t w = words[d][i];
        std::int32_t* nw = &model.word_topic[w * K];
        int k = assignment[d][i];
        --nd[k];
        --nw[k];
        --model.topic_totals[k];
        double acc = 0.0;
        for (int t = 0; t < K; ++t) {
          acc += (nd[t] + alpha) * (nw[t] + beta) / (static_cast<double>(model.topic_totals[t]) + v_beta);
          cumulative[t] = acc;
        }
        k = sample_cumulative(cumulative, rng);
        assignment[d][i] = k;
        ++nd[k];
        ++nw[k];
        ++model.topic_totals[k];
      }
    }

    if (is_sample_sweep(config, sweep)) {
      ++samples;
      for (std::size_t d = 0; d < documents.size(); ++d) {
        const double denom = static_cast<double>(words[d].size()) + K * alpha;
        for (int t = 0; t < K; ++t) theta_sum[d][t] += (doc_counts[d][t] + alpha) / denom;
      }
    }

    if (observer) {
      observer(SweepState{sweep, K, total_tokens, model.topic_totals, model.word_topic});
    }
  }

  model.doc_topic.resize(documents.size());
  for (std::size_t d = 0; d < documents.size(); ++d) {
    auto& theta = model.doc_topic[d];
    theta.resize(K);
    for (int t = 0; t < K; ++t) theta[t] = theta_sum[d][t] / samples;
    if (K > 1) normalize(theta);
  }
  return model;
}

std::vector<double> doc_topic_distribution(const LdaModel& model, std::size_t index) {
  if (index >= model.doc_topic.size())
    throw PreconditionError("topic_model", "training document index out of range");
  return model.doc_topic[index];
}

std::vector<double> doc_topic_distribution(const LdaModel& model, const TokenSequence& document) {
  const LdaConfig& config = model.config;
  const int K = config.num_topics;
  const std::vector<std::size_t> ids = in_vocab_ids(model, document);
  if (ids.empty()) return std::vector<double>(K, 1.0 / K);

  std::string key;
  for (std::size_t id : ids) key += model.vocab[id] + ' ';
  Rng rng(mix_seed(config.seed, hash_string(key)));

  const double alpha = config.alpha;
  const double beta = config.beta;
  const double v_beta = static_cast<double>(model.vocab_size()) * beta;
  std::vector<std::int32_t> nd(K, 0);
  std::vector<int> z(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    z[i] = static_cast<int>(uniform_index(rng, K));
    ++nd[z[i]];
  }
  // Frozen topic-word factor per token.
  std::vector<double> word_factor(ids.size() * K);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (int t = 0; t < K; ++t)
      word_factor[i * K + t] = (model.topic_word_count(t, ids[i]) + beta) /
                               (static_cast<double>(model.topic_totals[t]) + v_beta);

  std::vector<double> cumulative(K);
  std::vector<double> theta(K, 0.0);
  int samples = 0;
  const double denom = static_cast<double>(ids.size()) + K * alpha;
  for (int sweep = 1; sweep <= config.iterations; ++sweep) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      --nd[z[i]];
      double acc = 0.0;
      for (int t = 0; t < K; ++t) {
        acc += (nd[t] + alpha) * word_factor[i * K + t];
        cumulative[t] = acc;
      }
      z[i] = sample_cumulative(cumulative, rng);
      ++nd[z[i]];
    }
    if (is_sample_sweep(config, sweep)) {
      ++samples;
      for (int t = 0; t < K; ++t) theta[t] += (nd[t] + alpha) / denom;
    }
  }
  for (double& x : theta) x /= samples;
  if (K > 1) normalize(theta);
  return theta;
}

double topic_diversity(std::span<const double> theta) {
  double sum = 0.0;
  for (double p : theta) {
    if (!(p >= 0.0)) throw PreconditionError("topic_model", "negative or NaN probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw PreconditionError("topic_model", "topic distribution does not sum to 1");
  double h = 0.0;
  for (double p : theta)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

void save_lda(const LdaModel& model, const std::filesystem::path& path) {
  const LdaConfig& c = model.config;
  BinaryWriter w(path, kLdaMagic, kLdaVersion);
  w.put_u32(static_cast<std::uint32_t>(c.num_topics));
  w.put_f64(c.alpha);
  w.put_f64(c.beta);
  w.put_u32(static_cast<std::uint32_t>(c.iterations));
  w.put_u32(static_cast<std::uint32_t>(c.burn_in));
  w.put_u32(static_cast<std::uint32_t>(c.sample_lag));
  w.put_u32(static_cast<std::uint32_t>(c.min_word_count));
  w.put_u64(c.seed);
  w.put_u64(model.vocab.size());
  for (const auto& word : model.vocab) w.put_string(word);
  for (std::int32_t n : model.word_topic) w.put_u32(static_cast<std::uint32_t>(n));
  for (std::int64_t n : model.topic_totals) w.put_i64(n);
  w.put_u64(model.doc_topic.size());
  for (const auto& theta : model.doc_topic)
    for (double x : theta) w.put_f64(x);
  w.put_u64(model.doc_ids.size());
  for (const auto& id : model.doc_ids) w.put_string(id);
  w.finish();
}

LdaModel load_lda(const std::filesystem::path& path) {
  BinaryReader r(path, kLdaMagic, kLdaVersion);
  LdaModel model;
  LdaConfig& c = model.config;
  c.num_topics = static_cast<int>(r.get_u32());
  c.alpha = r.get_f64();
  c.beta = r.get_f64();
  c.iterations = static_cast<int>(r.get_u32());
  c.burn_in = static_cast<int>(r.get_u32());
  c.sample_lag = static_cast<int>(r.get_u32());
  c.min_word_count = static_cast<int>(r.get_u32());
  c.seed = r.get_u64();
  c.validate();
  const std::size_t K = static_cast<std::size_t>(c.num_topics);
  const std::uint64_t V = r.get_u64();
  model.vocab.reserve(V);
  for (std::uint64_t i = 0; i < V; ++i) model.vocab.push_back(r.get_string());
  model.word_topic.resize(V * K);
  for (auto& n : model.word_topic) n = static_cast<std::int32_t>(r.get_u32());
  model.topic_totals.resize(K);
  for (auto& n : model.topic_totals) n = r.get_i64();
  const std::uint64_t D = r.get_u64();
  model.doc_topic.assign(D, std::vector<double>(K));
  for (auto& theta : model.doc_topic)
    for (double& x : theta) x = r.get_f64();
  const std::uint64_t ids = r.get_u64();
  for (std::uint64_t i = 0; i < ids; ++i) model.doc_ids.push_back(r.get_string());
  model.rebuild_index();
  return model;
}

}  // namespace answerability
