#include "answerability/tagger.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "answerability/error.hpp"

namespace answerability {
namespace {

constexpr std::array<std::string_view, 25> kTwitterTags = {
    "N", "O", "^", "S", "Z", "V", "L", "M", "A", "R", "!", "D", "P",
    "&", "T", "X", "Y", "#", "@", "~", "U", "E", "$", ",", "G",
};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Key for a token sequence; tokens never contain '\n'.
std::string sequence_key(std::span<const std::string> tokens) {
  std::string key;
  for (const auto& t : tokens) {
    key += t;
    key.push_back('\n');
  }
  return key;
}

}  // namespace

std::span<const std::string_view> twitter_tagset() { return kTwitterTags; }

bool is_twitter_tag(std::string_view tag) {
  return std::find(kTwitterTags.begin(), kTwitterTags.end(), tag) != kTwitterTags.end();
}

LexiconTagger::LexiconTagger(std::unordered_map<std::string, std::string> lexicon) {
  for (auto& [word, tag] : lexicon) {
    if (!is_twitter_tag(tag)) throw ValidationError("text_features", "tag '" + tag + "' not in tagset");
    lexicon_.emplace(case_fold(word), std::move(tag));
  }
}

LexiconTagger LexiconTagger::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("text_features", "cannot open tag lexicon: " + path.string());
  std::unordered_map<std::string, std::string> lexicon;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ValidationError("text_features", path.string() + ":" + std::to_string(line_number) +
                                                 ": expected word<TAB>tag");
    std::string word = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    if (!is_twitter_tag(tag))
      throw ValidationError("text_features", path.string() + ":" + std::to_string(line_number) +
                                                 ": unknown tag '" + tag + "'");
    lexicon.emplace(case_fold(word), std::move(tag));  // first entry wins
  }
  LexiconTagger tagger;
  tagger.lexicon_ = std::move(lexicon);
  return tagger;
}

std::string LexiconTagger::tag_word(std::string_view token) const {
  const std::string folded = case_fold(token);
  if (auto it = lexicon_.find(folded); it != lexicon_.end()) return it->second;
  if (ends_with(folded, "ly")) return "R";
  if (ends_with(folded, "ing") || ends_with(folded, "ed")) return "V";
  return "N";
}

TagSequence LexiconTagger::tag(const TokenSequence& tokens) const {
  TagSequence out;
  out.tags.reserve(tokens.size());
  for (const auto& t : tokens.tokens) out.tags.push_back(tag_word(t));
  return out;
}

PretaggedTagger PretaggedTagger::load(const std::filesystem::path& path,
                                      std::shared_ptr<const Tagger> fallback) {
  std::ifstream in(path);
  if (!in) throw IoError("text_features", "cannot open pre-tagged file: " + path.string());
  PretaggedTagger tagger;
  tagger.fallback_ = std::move(fallback);
  std::vector<std::string> tokens, tags;
  auto flush = [&] {
    if (tokens.empty()) return;
    tagger.table_.emplace(sequence_key(tokens), tags);
    tokens.clear();
    tags.clear();
  };
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ValidationError("text_features", path.string() + ":" + std::to_string(line_number) +
                                                 ": expected token<TAB>tag");
    std::string tag = line.substr(tab + 1);
    if (!is_twitter_tag(tag))
      throw ValidationError("text_features", path.string() + ":" + std::to_string(line_number) +
                                                 ": unknown tag '" + tag + "'");
    tokens.push_back(line.substr(0, tab));
    tags.push_back(std::move(tag));
  }
  flush();
  return tagger;
}

TagSequence PretaggedTagger::tag(const TokenSequence& tokens) const {
  if (tokens.empty()) return {};
  if (auto it = table_.find(sequence_key(tokens.tokens)); it != table_.end()) return {it->second};
  if (fallback_) return fallback_->tag(tokens);
  std::string preview;
  for (std::size_t i = 0; i < std::min<std::size_t>(tokens.size(), 6); ++i)
    preview += (i ? " " : "") + tokens.tokens[i];
  throw ValidationError("text_features", "no pre-tagged entry for \"" + preview + "...\"");
}

}  // namespace answerability
