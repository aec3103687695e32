#pragma once

// Latent Dirichlet allocation by collapsed Gibbs sampling, with fold-in
// inference for held-out questions and topical diversity.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "answerability/text_features.hpp"

namespace answerability {

struct LdaConfig {
  int num_topics = 20;
  double alpha = 2.5;  // symmetric document-topic prior; default 50 / num_topics
  double beta = 0.01;
  int iterations = 1000;
  int burn_in = 500;
  int sample_lag = 10;      // theta is averaged over every sample_lag-th post-burn-in sweep
  int min_word_count = 2;   // vocabulary keeps case-folded types seen at least this often
  std::uint64_t seed = 1;

  // Defaults for K topics (alpha = 50 / K).
  static LdaConfig for_topics(int num_topics);
  // Throws ValidationError on K < 1, non-positive priors or burn_in >= iterations.
  void validate() const;
};

class LdaModel {
 public:
  LdaConfig config;
  std::vector<std::string> vocab;
  // Word-major counts: word_topic[v * K + k].
  std::vector<std::int32_t> word_topic;
  std::vector<std::int64_t> topic_totals;
  std::vector<std::vector<double>> doc_topic;  // theta per training document
  // Optional external ids of the training documents (same order as doc_topic).
  std::vector<std::string> doc_ids;

  int num_topics() const { return config.num_topics; }
  std::size_t vocab_size() const { return vocab.size(); }
  std::int64_t topic_word_count(int topic, std::size_t word) const {
    return word_topic[word * static_cast<std::size_t>(config.num_topics) + topic];
  }
  std::optional<std::size_t> word_id(std::string_view folded_word) const;
  // Index of a training document by external id.
  std::optional<std::size_t> training_index(std::string_view id) const;

  void set_doc_ids(std::vector<std::string> ids) {
    doc_ids = std::move(ids);
    rebuild_index();
  }
  // Must be called after vocab or doc_ids are modified directly.
  void rebuild_index();

 private:
  std::unordered_map<std::string, std::size_t> word_index_;
  std::unordered_map<std::string, std::size_t> doc_index_;
};

// Count state handed to a SweepObserver after every Gibbs sweep.
struct SweepState {
  int sweep = 0;  // 1-based
  int num_topics = 0;
  std::int64_t total_tokens = 0;
  std::span<const std::int64_t> topic_totals;
  std::span<const std::int32_t> word_topic;  // word-major, as in LdaModel
};
using SweepObserver = std::function<void(const SweepState&)>;

// Throws ValidationError when no document has an in-vocabulary token.
// Deterministic for fixed (documents, config).
LdaModel fit_lda(std::span<const TokenSequence> documents, const LdaConfig& config,
                 const SweepObserver& observer = {});

// Stored theta of training document `index`.
std::vector<double> doc_topic_distribution(const LdaModel& model, std::size_t index);

// Fold-in Gibbs with frozen word-topic counts, seeded from the config seed and
// the document's tokens. Out-of-vocabulary tokens are skipped; a document with
// none left gets the uniform distribution.
std::vector<double> doc_topic_distribution(const LdaModel& model, const TokenSequence& document);

// -sum theta_k ln theta_k with 0 ln 0 = 0. Throws PreconditionError unless
// theta sums to 1 within 1e-9.
double topic_diversity(std::span<const double> theta);

void save_lda(const LdaModel& model, const std::filesystem::path& path);
LdaModel load_lda(const std::filesystem::path& path);

}  // namespace answerability
