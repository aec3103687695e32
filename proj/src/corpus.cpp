#include "answerability/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "answerability/error.hpp"
#include "answerability/text_features.hpp"

namespace answerability {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kNumEditKinds> kEditKindNames = {
    "context_topic_edit", "text_edit",    "detail_edit",
    "topic_added",        "topic_removed", "topic_added_by_other",
    "topic_edit_by_review_team", "other_review_team_edit", "promotion",
};

constexpr std::array<std::string_view, 4> kActorNames = {"asker", "other_user", "review_team",
                                                         "system"};

ValidationError invalid(const std::string& message) { return ValidationError("corpus", message); }

Timestamp get_timestamp(const json& obj, const char* field) {
  if (!obj.contains(field)) throw invalid(std::string("missing field '") + field + "'");
  const json& v = obj.at(field);
  if (!v.is_number_integer()) throw invalid(std::string("field '") + field + "' must be an integer");
  return v.get<Timestamp>();
}

const json& get_array(const json& obj, const char* field) {
  static const json kEmpty = json::array();
  if (!obj.contains(field) || obj.at(field).is_null()) return kEmpty;
  const json& v = obj.at(field);
  if (!v.is_array()) throw invalid(std::string("field '") + field + "' must be an array");
  return v;
}

std::string get_string(const json& obj, const char* field) {
  if (!obj.contains(field)) throw invalid(std::string("missing field '") + field + "'");
  const json& v = obj.at(field);
  if (!v.is_string()) throw invalid(std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

template <typename T, typename Key>
void require_sorted(const std::vector<T>& items, Key key, const char* what) {
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (key(items[i]) < key(items[i - 1]))
      throw invalid(std::string(what) + " not sorted by timestamp");
  }
}

template <typename T, typename Key>
void require_not_before(const std::vector<T>& items, Key key, Timestamp created, const char* what) {
  for (const T& item : items) {
    if (key(item) < created)
      throw invalid(std::string(what) + " timestamp " + std::to_string(key(item)) +
                    " precedes created_at " + std::to_string(created));
  }
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  });
}

// Latest element with timestamp <= as_of, or nullptr.
template <typename T>
const T* latest_at(const std::vector<T>& items, Timestamp as_of) {
  auto it = std::upper_bound(items.begin(), items.end(), as_of,
                             [](Timestamp t, const T& item) { return t < item.timestamp; });
  if (it == items.begin()) return nullptr;
  return &*std::prev(it);
}

}  // namespace

std::string_view to_string(EditKind kind) { return kEditKindNames[static_cast<int>(kind)]; }
std::string_view to_string(Actor actor) { return kActorNames[static_cast<int>(actor)]; }

std::optional<EditKind> parse_edit_kind(std::string_view s) {
  for (int i = 0; i < kNumEditKinds; ++i)
    if (kEditKindNames[i] == s) return static_cast<EditKind>(i);
  return std::nullopt;
}

std::optional<Actor> parse_actor(std::string_view s) {
  for (int i = 0; i < static_cast<int>(kActorNames.size()); ++i)
    if (kActorNames[i] == s) return static_cast<Actor>(i);
  return std::nullopt;
}

std::string_view to_string(Answer answer) {
  return answer == Answer::kAnswered ? "answered" : "open";
}

Duration parse_duration(std::string_view text) {
  if (text.empty()) throw ValidationError("corpus", "empty duration");
  std::int64_t unit = 1;
  std::string_view digits = text;
  switch (text.back()) {
    case 'd': unit = kSecondsPerDay; digits.remove_suffix(1); break;
    case 'm': unit = 30 * kSecondsPerDay; digits.remove_suffix(1); break;
    case 's': digits.remove_suffix(1); break;
    default: break;
  }
  std::int64_t n = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty())
    throw ValidationError("corpus", "bad duration '" + std::string(text) + "'");
  return Duration{n * unit};
}

std::string format_duration(Duration d) {
  if (d.seconds % kSecondsPerDay == 0) return std::to_string(d.seconds / kSecondsPerDay) + "d";
  return std::to_string(d.seconds) + "s";
}

void validate(const QuestionRecord& r) {
  if (r.id.empty()) throw invalid("empty id");
  if (tokenize(r.text_initial).empty()) throw invalid("empty text_initial (no tokens)");
  if (r.first_answer_at && *r.first_answer_at < r.created_at)
    throw invalid("first_answer_at precedes created_at");
  auto ts = [](const auto& item) { return item.timestamp; };
  require_not_before(r.text_revisions, ts, r.created_at, "text revision");
  require_not_before(r.topic_revisions, ts, r.created_at, "topic revision");
  require_not_before(r.edit_events, ts, r.created_at, "edit event");
  require_not_before(r.promotions, ts, r.created_at, "promotion");
  require_sorted(r.text_revisions, ts, "text_revisions");
  require_sorted(r.topic_revisions, ts, "topic_revisions");
  require_sorted(r.edit_events, ts, "edit_events");
  require_sorted(r.promotions, ts, "promotions");
}

QuestionRecord parse_record(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw invalid(std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw invalid("record is not a JSON object");

  QuestionRecord r;
  r.id = get_string(obj, "id");
  if (obj.contains("asker_anonymous")) {
    if (!obj.at("asker_anonymous").is_boolean()) throw invalid("asker_anonymous must be a boolean");
    r.asker_anonymous = obj.at("asker_anonymous").get<bool>();
  }
  r.created_at = get_timestamp(obj, "created_at");
  if (obj.contains("first_answer_at") && !obj.at("first_answer_at").is_null())
    r.first_answer_at = get_timestamp(obj, "first_answer_at");
  r.text_initial = get_string(obj, "text_initial");

  for (const json& rev : get_array(obj, "text_revisions"))
    r.text_revisions.push_back({get_timestamp(rev, "timestamp"), get_string(rev, "text")});

  for (const json& rev : get_array(obj, "topic_revisions")) {
    TopicRevision tr{get_timestamp(rev, "timestamp"), {}};
    for (const json& t : get_array(rev, "topics")) {
      if (!t.is_string()) throw invalid("topic ids must be strings");
      tr.topics.insert(t.get<std::string>());
    }
    r.topic_revisions.push_back(std::move(tr));
  }

  for (const json& ev : get_array(obj, "edit_events")) {
    const std::string kind = get_string(ev, "kind");
    const std::string actor = get_string(ev, "actor");
    auto k = parse_edit_kind(kind);
    if (!k) throw invalid("unknown edit kind '" + kind + "'");
    auto a = parse_actor(actor);
    if (!a) throw invalid("unknown actor '" + actor + "'");
    r.edit_events.push_back({get_timestamp(ev, "timestamp"), *k, *a});
  }

  for (const json& p : get_array(obj, "promotions")) {
    if (!p.contains("audience_size") || !p.at("audience_size").is_number_integer())
      throw invalid("promotion audience_size must be an integer");
    const auto audience = p.at("audience_size").get<std::int64_t>();
    if (audience < 0) throw invalid("negative promotion audience_size");
    r.promotions.push_back({get_timestamp(p, "timestamp"), static_cast<std::uint64_t>(audience)});
  }

  validate(r);
  return r;
}

std::string to_json_line(const QuestionRecord& r) {
  json obj;
  obj["id"] = r.id;
  obj["asker_anonymous"] = r.asker_anonymous;
  obj["created_at"] = r.created_at;
  obj["first_answer_at"] = r.first_answer_at ? json(*r.first_answer_at) : json(nullptr);
  obj["text_initial"] = r.text_initial;
  json texts = json::array();
  for (const auto& rev : r.text_revisions) texts.push_back({{"timestamp", rev.timestamp}, {"text", rev.text}});
  obj["text_revisions"] = std::move(texts);
  json topics = json::array();
  for (const auto& rev : r.topic_revisions)
    topics.push_back({{"timestamp", rev.timestamp}, {"topics", rev.topics}});
  obj["topic_revisions"] = std::move(topics);
  json events = json::array();
  for (const auto& ev : r.edit_events)
    events.push_back({{"timestamp", ev.timestamp},
                      {"kind", std::string(to_string(ev.kind))},
                      {"actor", std::string(to_string(ev.actor))}});
  obj["edit_events"] = std::move(events);
  json promos = json::array();
  for (const auto& p : r.promotions)
    promos.push_back({{"timestamp", p.timestamp}, {"audience_size", p.audience_size}});
  obj["promotions"] = std::move(promos);
  return obj.dump();
}

LoadedCorpus read_corpus(std::istream& in, bool drop_anonymous) {
  LoadedCorpus out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    try {
      QuestionRecord r = parse_record(line);
      if (drop_anonymous && r.asker_anonymous) {
        ++out.dropped_anonymous;
        continue;
      }
      out.records.push_back(std::move(r));
    } catch (const ValidationError& e) {
      RejectedLine reject{line_number, {}, e.what()};
      // Best effort: recover the id for the diagnostic.
      try {
        json obj = json::parse(line);
        if (obj.is_object() && obj.contains("id") && obj["id"].is_string())
          reject.id = obj["id"].get<std::string>();
      } catch (const json::exception&) {
      }
      out.rejects.push_back(std::move(reject));
    }
  }
  return out;
}

LoadedCorpus load_corpus(const std::filesystem::path& path, bool drop_anonymous) {
  std::ifstream in(path);
  if (!in) throw IoError("corpus", "cannot open corpus file: " + path.string());
  return read_corpus(in, drop_anonymous);
}

void write_corpus(const std::filesystem::path& path, const std::vector<QuestionRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("corpus", "cannot write corpus file: " + path.string());
  for (const auto& r : records) out << to_json_line(r) << '\n';
  if (!out) throw IoError("corpus", "write failed: " + path.string());
}

std::string format_rejects_report(const LoadedCorpus& corpus) {
  std::ostringstream os;
  os << "accepted\t" << corpus.records.size() << '\n';
  os << "dropped_anonymous\t" << corpus.dropped_anonymous << '\n';
  os << "rejected\t" << corpus.rejects.size() << '\n';
  for (const auto& r : corpus.rejects)
    os << "line " << r.line_number << '\t' << (r.id.empty() ? "-" : r.id) << '\t' << r.reason << '\n';
  return os.str();
}

Label label_at(const QuestionRecord& record, Duration horizon) {
  const bool answered =
      record.first_answer_at && *record.first_answer_at <= record.created_at + horizon.seconds;
  return Label{answered ? Answer::kAnswered : Answer::kOpen, horizon};
}

QuestionSnapshot snapshot_at(const QuestionRecord& record, Timestamp as_of) {
  if (as_of < record.created_at)
    throw PreconditionError("corpus", "snapshot of " + record.id + " requested before created_at");
  QuestionSnapshot s;
  s.question_id = record.id;
  s.as_of = as_of;
  const TextRevision* text = latest_at(record.text_revisions, as_of);
  s.text = text ? text->text : record.text_initial;
  if (const TopicRevision* topics = latest_at(record.topic_revisions, as_of)) s.topics = topics->topics;
  return s;
}

void LeakageAudit::record(std::string_view question_id, Timestamp as_of, Timestamp limit) {
  std::lock_guard lock(mu_);
  ++requests_;
  if (as_of > limit)
    violations_.push_back({std::string(question_id), as_of, limit, "snapshot"});
}

void LeakageAudit::record_item(std::string_view question_id, Timestamp item_time, Timestamp limit,
                               std::string_view what) {
  if (item_time <= limit) return;
  std::lock_guard lock(mu_);
  violations_.push_back({std::string(question_id), item_time, limit, std::string(what)});
}

std::size_t LeakageAudit::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t LeakageAudit::violation_count() const {
  std::lock_guard lock(mu_);
  return violations_.size();
}

std::vector<LeakageAudit::Violation> LeakageAudit::violations() const {
  std::lock_guard lock(mu_);
  return violations_;
}

ObservationWindow observe(const QuestionRecord& record, Duration horizon, LeakageAudit* audit) {
  ObservationWindow w;
  w.end = record.created_at + horizon.seconds;
  if (audit) {
    audit->record(record.id, record.created_at, w.end);
    audit->record(record.id, w.end, w.end);
  }
  w.initial = snapshot_at(record, record.created_at);
  w.current = snapshot_at(record, w.end);

  auto within = [&](const auto& item) { return item.timestamp <= w.end; };
  std::copy_if(record.edit_events.begin(), record.edit_events.end(),
               std::back_inserter(w.edit_events), within);
  std::copy_if(record.promotions.begin(), record.promotions.end(),
               std::back_inserter(w.promotions), within);

  if (audit) {
    for (const auto& ev : w.edit_events) audit->record_item(record.id, ev.timestamp, w.end, "edit_event");
    for (const auto& p : w.promotions) audit->record_item(record.id, p.timestamp, w.end, "promotion");
  }
  return w;
}

}  // namespace answerability
