#pragma once

// Per-question feature vectors at a horizon and the dataset/CSV plumbing
// around them.
//
// Vector layout (fixed):
//   text     char_length word_count frac_nonfrequent function_word_count
//            inv_fraction has_bigram has_trigram has_4gram posdiv_difference
//            rouge_lcs_recall
//   lexicon  liwc_<category> for every lexicon category, in file order
//   topic    topic_0 .. topic_{K-1} topic_diversity
//   meta     edits_<kind> x 8, promotion_count, promotion_audience,
//            mean_edit_interval (0 when fewer than two edits),
//            hier_num_topics hier_avg_depth hier_max_depth hier_var_depth
//            hier_max_same_level hier_num_components, topic_set_difference

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "answerability/corpus.hpp"
#include "answerability/lexicon.hpp"
#include "answerability/meta_features.hpp"
#include "answerability/tagger.hpp"
#include "answerability/text_features.hpp"
#include "answerability/topic_model.hpp"

namespace answerability {

inline constexpr std::size_t kTextBlockSize = 10;
inline constexpr std::size_t kMetaBlockSize = 18;

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;
};

struct FeatureResources {
  std::shared_ptr<const WordList> dictionary;
  std::shared_ptr<const WordList> function_words;
  std::shared_ptr<const WordList> frequent_words;
  std::shared_ptr<const NgramIndex> ngrams;
  std::shared_ptr<const Tagger> tagger;
  std::shared_ptr<const CategoryLexicon> lexicon;
  std::shared_ptr<const LdaModel> lda;
  std::shared_ptr<const TopicHierarchy> hierarchy;
};

std::vector<std::string> feature_names(const CategoryLexicon& lexicon, int num_topics);

class FeatureExtractor {
 public:
  // Throws ValidationError naming the first missing resource.
  explicit FeatureExtractor(FeatureResources resources, LeakageAudit* audit = nullptr);

  const std::vector<std::string>& names() const { return names_; }

  FeatureVector extract(const QuestionRecord& record, Duration horizon) const;
  std::vector<double> extract_values(const QuestionRecord& record, Duration horizon) const;

 private:
  FeatureResources res_;
  LeakageAudit* audit_;
  std::vector<std::string> names_;
};

// Rows aligned with ids and labels; names shared by every row.
struct Dataset {
  std::vector<std::string> names;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::vector<Answer> labels;

  std::size_t size() const { return rows.size(); }
  Dataset subset(std::span<const std::size_t> indices) const;
};

// Featurizes records in parallel (workers <= 0: hardware concurrency). Output
// order follows `records` regardless of worker count.
Dataset featurize(std::span<const QuestionRecord> records, Duration horizon,
                  const FeatureExtractor& extractor, int workers = 1);

// Same for the time-sliced token sequences used to fit fold resources.
std::vector<TokenSequence> window_tokens(std::span<const QuestionRecord> records, Duration horizon,
                                         LeakageAudit* audit = nullptr);

// CSV: header `id,label,<names...>`, one row per question. Numbers use the
// shortest round-trip representation.
void write_feature_csv(std::ostream& out, const Dataset& data);
void save_feature_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_feature_csv(std::istream& in, std::string_view source_name = "<features>");
Dataset load_feature_csv(const std::filesystem::path& path);

// Shortest representation that parses back to the same double.
std::string format_double(double x);

// Runs `fn(i)` for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace answerability
