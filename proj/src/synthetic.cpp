#include "answerability/synthetic.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <span>
#include <string_view>

#include "answerability/error.hpp"
#include "answerability/random.hpp"

namespace answerability {
namespace {

// Every word below is in data/dictionary.txt. Nouns carry no tag-lexicon
// entry and no tagger suffix, so they tag as N.
constexpr std::array<std::string_view, 64> kNouns = {
    "garden",  "engine",   "recipe",  "battery", "laptop",  "river",   "mountain", "market",
    "ticket",  "salary",   "coffee",  "piano",   "bridge",  "window",  "doctor",   "teacher",
    "museum",  "planet",   "rocket",  "camera",  "guitar",  "kitchen", "journey",  "blanket",
    "island",  "village",  "harbor",  "engineer", "bicycle", "library", "language", "mirror",
    "castle",  "orchard",  "lantern", "meadow",  "compass", "passport", "wallet",  "pillow",
    "hammer",  "ladder",   "carpet",  "balcony", "tunnel",  "canyon",  "volcano",  "glacier",
    "desert",  "forest",   "jungle",  "theater", "stadium", "factory", "airport",  "station",
    "highway", "printer",  "keyboard", "tablet",  "phone",   "visa",    "mortgage", "startup"};

// Non-noun content words, grouped by the tag the builtin tagger gives them.
constexpr std::array<std::string_view, 8> kVerbs = {"running", "cooking", "swimming", "painting",
                                                    "jumped",  "cooked",  "traveled", "learning"};
constexpr std::array<std::string_view, 8> kAdverbs = {"quickly", "slowly", "gently", "rapidly",
                                                      "badly",   "happily", "quietly", "loudly"};
constexpr std::array<std::string_view, 8> kAdjectives = {"big", "small", "green", "heavy",
                                                         "cheap", "old", "bright", "soft"};
constexpr std::array<std::string_view, 4> kInterjections = {"wow", "oh", "hey", "ouch"};
constexpr std::array<std::string_view, 4> kNumerals = {"three", "seven", "twelve", "forty"};

constexpr std::array<std::string_view, 10> kCauseWords = {
    "cause", "causes", "effect", "effects", "reason", "reasons", "result", "results", "consequence", "origin"};
// cogmech but not cause.
constexpr std::array<std::string_view, 6> kInsightWords = {"think", "know", "consider",
                                                           "understand", "believe", "wonder"};

// Subset of data/function_words.txt.
constexpr std::array<std::string_view, 24> kFunctionWords = {
    "the", "a", "an", "of", "in", "on", "for", "to", "with", "and", "or", "but",
    "i", "you", "it", "we", "they", "my", "your", "is", "are", "can", "do", "should"};

constexpr std::array<EditKind, 6> kBackgroundEdits = {
    EditKind::kContextTopicEdit,    EditKind::kTopicAdded,          EditKind::kTopicRemoved,
    EditKind::kTopicAddedByOther,   EditKind::kTopicEditByReviewTeam, EditKind::kOtherReviewTeamEdit};

constexpr Timestamp kEpoch = 1'420'070'400;  // 2015-01-01

template <std::size_t N>
std::string pick(const std::array<std::string_view, N>& words, Rng& rng) {
  return std::string(words[uniform_index(rng, N)]);
}

int uniform_int(Rng& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

Timestamp uniform_time(Rng& rng, Timestamp lo, Timestamp hi) {  // inclusive
  return lo + static_cast<Timestamp>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

std::string oov_word(Rng& rng) {
  static constexpr std::string_view consonants = "bcdfghjkmnpqrstvwxz";
  std::string w;
  const int len = uniform_int(rng, 5, 8);
  for (int i = 0; i < len; ++i) w += consonants[uniform_index(rng, consonants.size())];
  return w;
}

std::string diverse_word(Rng& rng) {
  switch (uniform_index(rng, 5)) {
    case 0: return pick(kVerbs, rng);
    case 1: return pick(kAdverbs, rng);
    case 2: return pick(kAdjectives, rng);
    case 3: return pick(kInterjections, rng);
    default: return pick(kNumerals, rng);
  }
}

std::vector<std::string> tail(Rng& rng, std::size_t n, bool nouns) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(nouns ? pick(kNouns, rng) : diverse_word(rng));
  return out;
}

std::string join_text(const std::vector<std::string>& body, const std::vector<std::string>& tail_words) {
  std::string text;
  for (const auto* part : {&body, &tail_words}) {
    for (const auto& w : *part) {
      if (!text.empty()) text += ' ';
      text += w;
    }
  }
  if (!text.empty()) text[0] = static_cast<char>(text[0] - 'a' + 'A');
  return text + "?";
}

std::string topic_id(int i) {
  std::string s = std::to_string(i);
  return "topic_" + std::string(s.size() < 2 ? 2 - s.size() : 0, '0') + s;
}

TopicSet random_topics(Rng& rng, int num_topics) {
  TopicSet t;
  const int n = uniform_int(rng, 1, 4);
  while (static_cast<int>(t.size()) < n) {
    if (uniform01(rng) < 0.05) t.insert("topic_unlisted_" + std::to_string(uniform_index(rng, 5)));
    else t.insert(topic_id(static_cast<int>(uniform_index(rng, num_topics))));
  }
  return t;
}

}  // namespace

std::vector<std::string> planted_feature_names() {
  return {"posdiv_difference", "word_count", "edits_detail_edit", "liwc_cause"};
}

SyntheticCorpus generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.num_records == 0) throw ValidationError("corpus", "synthetic corpus needs at least one record");
  if (cfg.num_topics < 4) throw ValidationError("corpus", "synthetic hierarchy needs at least 4 topics");
  Rng rng(mix_seed(cfg.seed, hash_string("synthetic")));
  SyntheticCorpus out;
  const Timestamp horizon = cfg.horizon.seconds;

  // Hierarchy: one large DAG plus a small separate tree.
  const int big = cfg.num_topics * 5 / 6;
  for (int i = 1; i < cfg.num_topics; ++i) {
    const int base = i < big ? 0 : big;
    if (i == big) continue;  // root of the second component
    const int parent = base + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(i - base)));
    out.hierarchy_edges.emplace_back(topic_id(parent), topic_id(i));
    if (i - base > 2 && uniform01(rng) < 0.1) {
      const int second = base + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(i - base)));
      if (second != parent) out.hierarchy_edges.emplace_back(topic_id(second), topic_id(i));
    }
  }

  // Balanced hidden classes.
  std::vector<Answer> hidden(cfg.num_records);
  for (std::size_t i = 0; i < hidden.size(); ++i) hidden[i] = i % 2 == 0 ? Answer::kAnswered : Answer::kOpen;
  shuffle(std::span<Answer>(hidden), rng);

  for (std::size_t i = 0; i < cfg.num_records; ++i) {
    const bool answered = hidden[i] == Answer::kAnswered;
    QuestionRecord r;
    r.id = "q" + std::to_string(100000 + i);
    r.asker_anonymous = uniform01(rng) < cfg.anonymous_rate;
    r.created_at = kEpoch + static_cast<Timestamp>(i) * 3600 + uniform_time(rng, 0, 3599);
    const Timestamp end = r.created_at + horizon;

    // Text body; the class sets the length and the cause words.
    std::vector<std::string> body;
    const int content = answered ? uniform_int(rng, 3, 8) : uniform_int(rng, 11, 19);
    for (int w = 0; w < content; ++w) body.push_back(uniform01(rng) < 0.08 ? oov_word(rng) : pick(kNouns, rng));
    const int cause = answered ? uniform_int(rng, 1, 3) : (uniform01(rng) < 0.03 ? 1 : 0);
    for (int w = 0; w < cause; ++w) body.push_back(pick(kCauseWords, rng));
    const int insight = uniform_int(rng, 0, 2);
    for (int w = 0; w < insight; ++w) body.push_back(pick(kInsightWords, rng));
    const int function = std::max(1, static_cast<int>(0.3 * static_cast<double>(body.size()) + uniform01(rng)));
    for (int w = 0; w < function; ++w) body.push_back(pick(kFunctionWords, rng));
    shuffle(std::span<std::string>(body), rng);

    // The in-window revision rewrites a tail whose length is proportional to
    // the body, so ROUGE recall does not track length. Answered questions
    // mostly go from mixed tags to nouns, open ones the other way.
    const std::size_t tail_len =
        std::max<std::size_t>(2, static_cast<std::size_t>((0.25 + 0.2 * uniform01(rng)) * static_cast<double>(body.size())));
    const bool to_nouns = (uniform01(rng) < 0.95) == answered;
    const std::vector<std::string> tail_initial = tail(rng, tail_len, !to_nouns);
    const std::vector<std::string> tail_current = tail(rng, tail_len, to_nouns);
    r.text_initial = join_text(body, tail_initial);
    const Timestamp revised = uniform_time(rng, r.created_at + 60, r.created_at + horizon / 2);
    r.text_revisions.push_back({revised, join_text(body, tail_current)});
    r.edit_events.push_back({revised, EditKind::kTextEdit, Actor::kAsker});
    // After the horizon the tail flips back, which only a leaky pipeline sees.
    const Timestamp late = uniform_time(rng, end + 1, end + days(60).seconds);
    r.text_revisions.push_back({late, join_text(body, tail(rng, tail_len, !to_nouns))});
    r.edit_events.push_back({late, EditKind::kTextEdit, Actor::kOtherUser});

    // Topics, class independent.
    r.topic_revisions.push_back({r.created_at, random_topics(rng, cfg.num_topics)});
    if (uniform01(rng) < 0.5) {
      const Timestamp t = uniform_time(rng, r.created_at + 60, end - 1);
      r.topic_revisions.push_back({t, random_topics(rng, cfg.num_topics)});
      r.edit_events.push_back({t, EditKind::kTopicAdded, Actor::kOtherUser});
    }
    r.topic_revisions.push_back({uniform_time(rng, end + 1, end + days(90).seconds),
                                 random_topics(rng, cfg.num_topics)});

    // Detail edits carry class signal; other edits do not.
    const int detail = answered ? uniform_int(rng, 2, 4) : (uniform01(rng) < 0.2 ? 1 : 0);
    for (int e = 0; e < detail; ++e)
      r.edit_events.push_back({uniform_time(rng, r.created_at + 1, end), EditKind::kDetailEdit, Actor::kAsker});
    const int background = uniform_int(rng, 1, 4);
    for (int e = 0; e < background; ++e) {
      r.edit_events.push_back({uniform_time(rng, r.created_at + 1, end),
                               kBackgroundEdits[uniform_index(rng, kBackgroundEdits.size())],
                               uniform01(rng) < 0.3 ? Actor::kReviewTeam : Actor::kOtherUser});
    }
    if (!answered) {
      const int leaked = uniform_int(rng, 2, 4);
      for (int e = 0; e < leaked; ++e)
        r.edit_events.push_back({uniform_time(rng, end + 1, end + days(60).seconds), EditKind::kDetailEdit,
                                 Actor::kAsker});
    }
    const int promotions = uniform_int(rng, 0, 2);
    for (int p = 0; p < promotions; ++p) {
      const Timestamp t = uniform_time(rng, r.created_at + 1, end);
      r.promotions.push_back({t, static_cast<std::uint64_t>(uniform_int(rng, 10, 5000))});
      r.edit_events.push_back({t, EditKind::kPromotion, Actor::kSystem});
    }
    r.promotions.push_back({uniform_time(rng, end + 1, end + days(30).seconds),
                            static_cast<std::uint64_t>(uniform_int(rng, 10, 5000))});
    std::stable_sort(r.edit_events.begin(), r.edit_events.end(),
                     [](const EditEvent& a, const EditEvent& b) { return a.timestamp < b.timestamp; });
    std::stable_sort(r.promotions.begin(), r.promotions.end(),
                     [](const Promotion& a, const Promotion& b) { return a.timestamp < b.timestamp; });

    // Observed label: the hidden class with noise.
    const bool label_answered = (uniform01(rng) < cfg.label_noise) != answered;
    if (label_answered) {
      r.first_answer_at = uniform01(rng) < 0.02 ? end : uniform_time(rng, r.created_at + 60, end);
    } else if (uniform01(rng) < 0.4) {
      r.first_answer_at = uniform_time(rng, end + 1, end + days(120).seconds);
    }
    validate(r);
    out.records.push_back(std::move(r));
    out.hidden_class.push_back(hidden[i]);
  }

  for (std::size_t s = 0; s < cfg.reference_sentences; ++s) {
    std::vector<std::string> words;
    const int n = uniform_int(rng, 6, 12);
    for (int w = 0; w < n; ++w) {
      const double u = uniform01(rng);
      words.push_back(u < 0.3 ? pick(kFunctionWords, rng) : u < 0.8 ? pick(kNouns, rng) : diverse_word(rng));
    }
    std::string line = join_text(words, {});
    line.back() = '.';
    out.reference_corpus.push_back(std::move(line));
  }
  return out;
}

void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("corpus", "cannot create " + dir.string() + ": " + ec.message());
  write_corpus(dir / "corpus.jsonl", corpus.records);
  std::ofstream h(dir / "hierarchy.tsv", std::ios::binary | std::ios::trunc);
  std::ofstream ref(dir / "reference_corpus.txt", std::ios::binary | std::ios::trunc);
  if (!h || !ref) throw IoError("corpus", "cannot write synthetic files in " + dir.string());
  for (const auto& [parent, child] : corpus.hierarchy_edges) h << parent << '\t' << child << '\n';
  for (const auto& s : corpus.reference_corpus) ref << s << '\n';
}

}  // namespace answerability
