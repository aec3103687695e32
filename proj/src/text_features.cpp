#include "answerability/text_features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include "answerability/binary_io.hpp"
#include "answerability/error.hpp"

namespace answerability {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t bytes;
};

// Decodes one UTF-8 sequence at s[pos]; malformed input yields the raw byte.
CodePoint decode(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) {
    return pos + i < s.size() && (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
  };
  auto byte = [&](std::size_t i) { return static_cast<char32_t>(static_cast<unsigned char>(s[pos + i]) & 0x3F); };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0 && cont(1)) return {(char32_t(b0 & 0x1F) << 6) | byte(1), 2};
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2))
    return {(char32_t(b0 & 0x0F) << 12) | (byte(1) << 6) | byte(2), 3};
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3))
    return {(char32_t(b0 & 0x07) << 18) | (byte(1) << 12) | (byte(2) << 6) | byte(3), 4};
  return {b0, 1};
}

bool is_unicode_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_punctuation(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  return c == 0xA1 || c == 0xA7 || c == 0xAB || c == 0xB6 || c == 0xB7 || c == 0xBB ||
         c == 0xBF || (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) ||
         (c >= 0xFF01 && c <= 0xFF0F);
}

// Strips leading/trailing punctuation code points from one whitespace-free piece.
std::string_view strip_punctuation(std::string_view piece) {
  std::vector<std::size_t> starts;
  std::vector<bool> punct;
  for (std::size_t pos = 0; pos < piece.size();) {
    CodePoint cp = decode(piece, pos);
    starts.push_back(pos);
    punct.push_back(is_punctuation(cp.value));
    pos += cp.bytes;
  }
  std::size_t first = 0;
  while (first < punct.size() && punct[first]) ++first;
  if (first == punct.size()) return {};
  std::size_t last = punct.size();
  while (last > first && punct[last - 1]) --last;
  const std::size_t begin = starts[first];
  const std::size_t end = last < starts.size() ? starts[last] : piece.size();
  return piece.substr(begin, end - begin);
}

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> fold_all(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(case_fold(t));
  return out;
}

constexpr std::string_view kNgramMagic = "QANGRAMS";
constexpr std::uint32_t kNgramVersion = 1;

}  // namespace

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < s.size(); ++n) pos += decode(s, pos).bytes;
  return n;
}

std::string case_fold(std::string_view s) {
  std::string out(s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + 32);
    } else if (c == 0xC3 && i + 1 < out.size()) {
      // Latin-1 capitals U+00C0..U+00DE (except U+00D7) encode as C3 80..9E.
      auto d = static_cast<unsigned char>(out[i + 1]);
      if (d >= 0x80 && d <= 0x9E && d != 0x97) out[i + 1] = static_cast<char>(d + 0x20);
      ++i;
    }
  }
  return out;
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  std::size_t piece_begin = 0;
  bool in_piece = false;
  auto flush = [&](std::size_t end) {
    if (!in_piece) return;
    std::string_view stripped = strip_punctuation(text.substr(piece_begin, end - piece_begin));
    if (!stripped.empty()) seq.tokens.emplace_back(stripped);
    in_piece = false;
  };
  for (std::size_t pos = 0; pos < text.size();) {
    CodePoint cp = decode(text, pos);
    ++seq.source_char_length;
    if (is_unicode_space(cp.value)) {
      flush(pos);
    } else if (!in_piece) {
      in_piece = true;
      piece_begin = pos;
    }
    pos += cp.bytes;
  }
  flush(text.size());
  return seq;
}

WordList::WordList(WordListKind kind, std::span<const std::string> entries) : kind_(kind) {
  for (const auto& e : entries) entries_.insert(case_fold(e));
  if (entries_.empty()) throw ValidationError("text_features", "word list has no entries");
}

WordList WordList::load(const std::filesystem::path& path, WordListKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("text_features", "cannot open word list: " + path.string());
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    entries.push_back(line.substr(first, last - first + 1));
  }
  if (entries.empty()) throw ValidationError("text_features", "word list is empty: " + path.string());
  return WordList(kind, entries);
}

WordList WordList::most_frequent(std::span<const TokenSequence> documents, std::size_t top_n) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& doc : documents)
    for (const auto& t : doc.tokens) ++counts[case_fold(t)];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > top_n) ranked.resize(top_n);
  std::vector<std::string> entries;
  entries.reserve(ranked.size());
  for (auto& [word, count] : ranked) entries.push_back(std::move(word));
  return WordList(WordListKind::kFrequentWords, entries);
}

bool WordList::contains(std::string_view word) const {
  return entries_.count(case_fold(word)) > 0;
}

std::vector<std::string> WordList::sorted_entries() const {
  std::vector<std::string> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end());
  return out;
}

void WordList::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("text_features", "cannot write word list: " + path.string());
  for (const auto& e : sorted_entries()) out << e << '\n';
}

double inv_fraction(const TokenSequence& tokens, const WordList& dictionary) {
  if (tokens.empty()) return 0.0;
  const auto hits = std::count_if(tokens.tokens.begin(), tokens.tokens.end(),
                                  [&](const std::string& t) { return dictionary.contains(t); });
  return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

BasicCounts basic_counts(const TokenSequence& tokens, const WordList& function_words,
                         const WordList& frequent) {
  BasicCounts c;
  c.char_length = tokens.source_char_length;
  c.word_count = tokens.size();
  std::size_t nonfrequent = 0;
  for (const auto& t : tokens.tokens) {
    if (function_words.contains(t)) ++c.function_word_count;
    if (!frequent.contains(t)) ++nonfrequent;
  }
  if (!tokens.empty())
    c.frac_nonfrequent = static_cast<double>(nonfrequent) / static_cast<double>(tokens.size());
  return c;
}

void NgramIndex::add(std::span<const std::string> folded) {
  for (int n = kMinOrder; n <= kMaxOrder; ++n) {
    if (folded.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= folded.size(); ++i)
      grams_[n - kMinOrder].insert(join(folded.subspan(i, n)));
  }
}

bool NgramIndex::contains(int order, std::span<const std::string> folded) const {
  if (order < kMinOrder || order > kMaxOrder || folded.size() != static_cast<std::size_t>(order))
    return false;
  return grams_[order - kMinOrder].count(join(folded)) > 0;
}

NgramIndex NgramIndex::build(std::istream& sentences) {
  NgramIndex index;
  std::string line;
  while (std::getline(sentences, line)) {
    TokenSequence seq = tokenize(line);
    index.add(fold_all(seq.tokens));
  }
  return index;
}

NgramIndex NgramIndex::build_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("text_features", "cannot open n-gram corpus: " + path.string());
  return build(in);
}

void NgramIndex::save(const std::filesystem::path& path) const {
  BinaryWriter w(path, kNgramMagic, kNgramVersion);
  for (int n = kMinOrder; n <= kMaxOrder; ++n) {
    const auto& set = grams_[n - kMinOrder];
    std::vector<std::string> sorted(set.begin(), set.end());
    std::sort(sorted.begin(), sorted.end());
    w.put_u32(static_cast<std::uint32_t>(n));
    w.put_u64(sorted.size());
    for (const auto& g : sorted) w.put_string(g);
  }
  w.finish();
}

NgramIndex NgramIndex::load(const std::filesystem::path& path) {
  BinaryReader r(path, kNgramMagic, kNgramVersion);
  NgramIndex index;
  for (int n = kMinOrder; n <= kMaxOrder; ++n) {
    if (r.get_u32() != static_cast<std::uint32_t>(n))
      throw ValidationError("text_features", path.string() + ": n-gram orders out of sequence");
    const std::uint64_t count = r.get_u64();
    auto& set = index.grams_[n - kMinOrder];
    set.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      std::string g = r.get_string();
      if (static_cast<int>(std::count(g.begin(), g.end(), ' ')) != n - 1)
        throw ValidationError("text_features", path.string() + ": malformed " + std::to_string(n) + "-gram");
      set.insert(std::move(g));
    }
  }
  return index;
}

NgramPresence ngram_presence(const TokenSequence& tokens, const NgramIndex& index) {
  const std::vector<std::string> folded = fold_all(tokens.tokens);
  const std::span<const std::string> all(folded);
  auto any_of_order = [&](int n) {
    if (folded.size() < static_cast<std::size_t>(n)) return false;
    for (std::size_t i = 0; i + n <= folded.size(); ++i)
      if (index.contains(n, all.subspan(i, n))) return true;
    return false;
  };
  return {any_of_order(2), any_of_order(3), any_of_order(4)};
}

double pos_diversity(std::span<const std::string> tags) {
  if (tags.empty()) return 0.0;
  std::map<std::string_view, std::size_t> counts;
  for (const auto& t : tags) ++counts[t];
  const double n = static_cast<double>(tags.size());
  double h = 0.0;
  for (const auto& [tag, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log(p);
  }
  return h;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  const std::vector<std::string> fa = fold_all(a);
  const std::vector<std::string> fb = fold_all(b);
  std::vector<std::size_t> prev(fb.size() + 1, 0), cur(fb.size() + 1, 0);
  for (std::size_t i = 1; i <= fa.size(); ++i) {
    for (std::size_t j = 1; j <= fb.size(); ++j) {
      cur[j] = fa[i - 1] == fb[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[fb.size()];
}

double rouge_lcs_recall(const TokenSequence& reference, const TokenSequence& candidate) {
  if (reference.empty())
    throw PreconditionError("text_features", "ROUGE-LCS recall needs a non-empty reference");
  return static_cast<double>(lcs_length(reference.tokens, candidate.tokens)) /
         static_cast<double>(reference.size());
}

}  // namespace answerability
