#pragma once

// LIWC-style category lexicon and per-category token percentages.
//
// File layout (the usual .dic layout, so licensed dictionaries load as-is):
//
//   %
//   1<TAB>funct
//   2<TAB>pronoun
//   %
//   it<TAB>1<TAB>2        (ids separated by tabs, spaces or commas)
//   hungr*<TAB>7          (trailing '*' = prefix pattern)
//
// The leading '%' is optional.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "answerability/text_features.hpp"

namespace answerability {

class CategoryLexicon {
 public:
  CategoryLexicon() = default;

  static CategoryLexicon load(const std::filesystem::path& path);
  static CategoryLexicon parse(std::istream& in, std::string_view source_name = "<lexicon>");

  const std::vector<std::string>& categories() const { return categories_; }
  std::size_t pattern_count() const { return literal_.size() + prefix_.size(); }

  // Category indices of the entry that applies to `token`: the literal entry
  // if one exists, otherwise the longest matching prefix entry. Empty when
  // nothing matches.
  const std::vector<std::size_t>& match(std::string_view token) const;

 private:
  std::vector<std::string> categories_;
  std::unordered_map<std::string, std::vector<std::size_t>> literal_;
  std::unordered_map<std::string, std::vector<std::size_t>> prefix_;
  std::size_t longest_prefix_ = 0;
};

struct CategoryScores {
  std::vector<std::string> categories;
  std::vector<double> scores;  // aligned with categories, each in [0, 100]

  // Throws std::out_of_range for an unknown category.
  double at(std::string_view category) const;
};

// score(c) = 100 * (#tokens whose entry includes c) / |tokens|; all zero for
// an empty sequence. Matching is case-insensitive.
CategoryScores category_scores(const TokenSequence& tokens, const CategoryLexicon& lexicon);

}  // namespace answerability
