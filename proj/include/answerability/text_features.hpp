#pragma once

// Surface linguistic features of question text.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace answerability {

struct TokenSequence {
  std::vector<std::string> tokens;
  std::size_t source_char_length = 0;  // Unicode code points in the raw text

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Splits on Unicode whitespace, strips leading/trailing punctuation from each
// piece and drops pieces that were all punctuation. Word-internal characters
// (apostrophes, hyphens, anything else) are kept. Case is preserved.
TokenSequence tokenize(std::string_view text);

// Lowercases ASCII and Latin-1 letters; other bytes pass through unchanged.
std::string case_fold(std::string_view s);

// Number of UTF-8 code points (invalid bytes count as one each).
std::size_t utf8_length(std::string_view s);

enum class WordListKind { kDictionary, kFunctionWords, kFrequentWords };

class WordList {
 public:
  // Throws ValidationError if `entries` is empty.
  WordList(WordListKind kind, std::span<const std::string> entries);

  // One entry per line; blank lines skipped.
  static WordList load(const std::filesystem::path& path, WordListKind kind);

  // The `top_n` most frequent case-folded types of `documents`; ties broken
  // lexicographically so the list is deterministic.
  static WordList most_frequent(std::span<const TokenSequence> documents, std::size_t top_n);

  WordListKind kind() const { return kind_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(std::string_view word) const;
  // Entries in sorted order.
  std::vector<std::string> sorted_entries() const;
  void save(const std::filesystem::path& path) const;

 private:
  WordListKind kind_;
  std::unordered_set<std::string> entries_;
};

// Fraction of tokens found in the dictionary; 0 for an empty sequence.
double inv_fraction(const TokenSequence& tokens, const WordList& dictionary);

struct BasicCounts {
  std::size_t char_length = 0;
  std::size_t word_count = 0;
  std::size_t function_word_count = 0;
  double frac_nonfrequent = 0.0;
};

BasicCounts basic_counts(const TokenSequence& tokens, const WordList& function_words,
                         const WordList& frequent);

// Case-folded 2-, 3- and 4-grams of a reference corpus. N-grams are stored
// with their tokens joined by a single space.
class NgramIndex {
 public:
  static constexpr int kMinOrder = 2;
  static constexpr int kMaxOrder = 4;

  NgramIndex() = default;

  // One sentence per line; each line is tokenized independently.
  static NgramIndex build(std::istream& sentences);
  static NgramIndex build_from_file(const std::filesystem::path& path);

  void save(const std::filesystem::path& path) const;
  static NgramIndex load(const std::filesystem::path& path);

  void add(std::span<const std::string> folded_tokens);
  bool contains(int order, std::span<const std::string> folded_tokens) const;
  std::size_t count(int order) const { return grams_[order - kMinOrder].size(); }

  friend bool operator==(const NgramIndex&, const NgramIndex&) = default;

 private:
  std::array<std::unordered_set<std::string>, kMaxOrder - kMinOrder + 1> grams_;
};

struct NgramPresence {
  bool has_bigram = false;
  bool has_trigram = false;
  bool has_4gram = false;
};

NgramPresence ngram_presence(const TokenSequence& tokens, const NgramIndex& index);

// Shannon entropy (natural log) of the tag-token distribution; 0 when empty.
double pos_diversity(std::span<const std::string> tags);

// Longest common subsequence of two token lists, compared case-folded.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// LCS(reference, candidate) / |reference|. Throws PreconditionError for an
// empty reference.
double rouge_lcs_recall(const TokenSequence& reference, const TokenSequence& candidate);

}  // namespace answerability
