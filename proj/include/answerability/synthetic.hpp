#pragma once

// Planted-signal corpus for end-to-end checks when no real crawl is available.
//
// Each question has a hidden class. Its label is that class flipped with
// probability `label_noise`. The class drives four features: the POS-tag
// diversity change of the in-window revision, text length, the number of
// detail edits and the share of words in the lexicon's `cause` category.
// Everything else (topics, promotions, other edits, vocabulary) is drawn
// independently of the class. Open questions also receive edits after the
// horizon, so any leakage past the observation window shows up in the results.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "answerability/corpus.hpp"

namespace answerability {

struct SyntheticConfig {
  std::size_t num_records = 2000;
  double label_noise = 0.10;
  double anonymous_rate = 0.05;
  Duration horizon = kOneMonth;
  std::uint64_t seed = 1;
  int num_topics = 60;               // hierarchy nodes
  std::size_t reference_sentences = 400;
};

struct SyntheticCorpus {
  std::vector<QuestionRecord> records;
  std::vector<Answer> hidden_class;  // aligned with records
  std::vector<std::pair<std::string, std::string>> hierarchy_edges;  // parent, child
  std::vector<std::string> reference_corpus;                         // one sentence each
};

SyntheticCorpus generate_synthetic(const SyntheticConfig& config);

// Writes corpus.jsonl, hierarchy.tsv and reference_corpus.txt into `dir`.
void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

// Names of the feature columns the generator plants signal in.
std::vector<std::string> planted_feature_names();

}  // namespace answerability
