#pragma once

// Pluggable part-of-speech tagging.

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "answerability/text_features.hpp"

namespace answerability {

struct TagSequence {
  std::vector<std::string> tags;
};

// The 25-symbol Twitter POS tagset (Gimpel et al. / CMU ARK).
std::span<const std::string_view> twitter_tagset();
bool is_twitter_tag(std::string_view tag);

class Tagger {
 public:
  virtual ~Tagger() = default;
  // One tag per token, deterministic.
  virtual TagSequence tag(const TokenSequence& tokens) const = 0;
};

// Closed-class lexicon lookup with suffix rules for unknown words:
// -ly -> R, -ing/-ed -> V, everything else -> N.
class LexiconTagger final : public Tagger {
 public:
  LexiconTagger() = default;
  explicit LexiconTagger(std::unordered_map<std::string, std::string> lexicon);

  // Lines of `word<TAB>tag`; blank lines and lines starting with '#' skipped.
  // Throws ValidationError on a tag outside the tagset (with line number).
  static LexiconTagger load(const std::filesystem::path& path);

  TagSequence tag(const TokenSequence& tokens) const override;
  std::string tag_word(std::string_view token) const;
  std::size_t lexicon_size() const { return lexicon_.size(); }

 private:
  std::unordered_map<std::string, std::string> lexicon_;  // keys case-folded
};

// Replays tags produced by an external tagger. File format: `token<TAB>tag`
// per line, blank line between questions. A token sequence is looked up by
// its exact tokens; unknown sequences go to the fallback tagger if one was
// given, otherwise tag() throws ValidationError.
class PretaggedTagger final : public Tagger {
 public:
  static PretaggedTagger load(const std::filesystem::path& path,
                              std::shared_ptr<const Tagger> fallback = nullptr);

  TagSequence tag(const TokenSequence& tokens) const override;
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> table_;
  std::shared_ptr<const Tagger> fallback_;
};

}  // namespace answerability
