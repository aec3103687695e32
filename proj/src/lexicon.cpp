#include "answerability/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "answerability/error.hpp"

namespace answerability {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '\t' || c == ' ' || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void merge_into(std::vector<std::size_t>& dst, const std::vector<std::size_t>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
  std::sort(dst.begin(), dst.end());
  dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
}

}  // namespace

CategoryLexicon CategoryLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("lexicon_features", "cannot open lexicon: " + path.string());
  return parse(in, path.string());
}

CategoryLexicon CategoryLexicon::parse(std::istream& in, std::string_view source_name) {
  auto fail = [&](std::size_t line_number, const std::string& message) {
    return ValidationError("lexicon_features",
                           std::string(source_name) + ":" + std::to_string(line_number) + ": " + message);
  };

  CategoryLexicon lex;
  std::unordered_map<std::string, std::size_t> id_to_index;
  enum class Section { kStart, kCategories, kPatterns } section = Section::kStart;

  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line == "%") {
      if (section == Section::kStart) {
        section = Section::kCategories;
      } else if (section == Section::kCategories) {
        section = Section::kPatterns;
      } else {
        throw fail(line_number, "unexpected '%' separator");
      }
      continue;
    }
    if (section == Section::kStart) section = Section::kCategories;

    const std::vector<std::string> fields = split_fields(line);
    if (section == Section::kCategories) {
      if (fields.size() != 2) throw fail(line_number, "expected category_id<TAB>category_name");
      const std::string& id = fields[0];
      const std::string& name = fields[1];
      if (id_to_index.count(id)) throw fail(line_number, "duplicate category id '" + id + "'");
      if (std::find(lex.categories_.begin(), lex.categories_.end(), name) != lex.categories_.end())
        throw fail(line_number, "duplicate category name '" + name + "'");
      id_to_index.emplace(id, lex.categories_.size());
      lex.categories_.push_back(name);
      continue;
    }

    if (fields.size() < 2) throw fail(line_number, "pattern without categories");
    std::vector<std::size_t> cats;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto it = id_to_index.find(fields[i]);
      if (it == id_to_index.end()) throw fail(line_number, "unknown category id '" + fields[i] + "'");
      cats.push_back(it->second);
    }
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());

    std::string pattern = case_fold(fields[0]);
    if (pattern.size() > 1 && pattern.back() == '*') {
      pattern.pop_back();
      lex.longest_prefix_ = std::max(lex.longest_prefix_, pattern.size());
      merge_into(lex.prefix_[pattern], cats);
    } else {
      merge_into(lex.literal_[pattern], cats);
    }
  }
  if (lex.categories_.empty())
    throw ValidationError("lexicon_features", std::string(source_name) + ": no categories declared");
  return lex;
}

const std::vector<std::size_t>& CategoryLexicon::match(std::string_view token) const {
  static const std::vector<std::size_t> kNone;
  const std::string folded = case_fold(token);
  if (auto it = literal_.find(folded); it != literal_.end()) return it->second;
  // Longest prefix first. Prefixes are matched on bytes; a prefix that splits
  // a UTF-8 sequence can only match if the pattern itself was written that way.
  for (std::size_t len = std::min(folded.size(), longest_prefix_); len > 0; --len) {
    if (auto it = prefix_.find(folded.substr(0, len)); it != prefix_.end()) return it->second;
  }
  return kNone;
}

double CategoryScores::at(std::string_view category) const {
  for (std::size_t i = 0; i < categories.size(); ++i)
    if (categories[i] == category) return scores[i];
  throw std::out_of_range("unknown category '" + std::string(category) + "'");
}

CategoryScores category_scores(const TokenSequence& tokens, const CategoryLexicon& lexicon) {
  CategoryScores out;
  out.categories = lexicon.categories();
  out.scores.assign(out.categories.size(), 0.0);
  if (tokens.empty()) return out;
  std::vector<std::size_t> hits(out.categories.size(), 0);
  for (const auto& t : tokens.tokens)
    for (std::size_t c : lexicon.match(t)) ++hits[c];
  const double n = static_cast<double>(tokens.size());
  for (std::size_t c = 0; c < hits.size(); ++c) out.scores[c] = 100.0 * static_cast<double>(hits[c]) / n;
  return out;
}

}  // namespace answerability
