#pragma once

// Question records: loading, validation, labeling and time slicing.
//
// Everything downstream of this header sees a record only through an
// ObservationWindow, which contains nothing timestamped after
// created_at + horizon.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace answerability {

using Timestamp = std::int64_t;  // UTC seconds

struct Duration {
  std::int64_t seconds = 0;
  friend auto operator<=>(const Duration&, const Duration&) = default;
};

inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr Duration days(std::int64_t n) { return Duration{n * kSecondsPerDay}; }
inline constexpr Duration kOneMonth = days(30);
inline constexpr Duration kThreeMonths = days(90);

// Parses "30d", "90d", "1m"/"3m" (30-day months) or a bare number of seconds.
Duration parse_duration(std::string_view text);
std::string format_duration(Duration d);

using TopicSet = std::set<std::string>;

enum class EditKind {
  kContextTopicEdit,
  kTextEdit,
  kDetailEdit,
  kTopicAdded,
  kTopicRemoved,
  kTopicAddedByOther,
  kTopicEditByReviewTeam,
  kOtherReviewTeamEdit,
  kPromotion,
};
inline constexpr int kNumEditKinds = 9;
// The kinds that are counted as edit features (everything but kPromotion).
inline constexpr int kNumCountedEditKinds = 8;

enum class Actor { kAsker, kOtherUser, kReviewTeam, kSystem };

std::string_view to_string(EditKind kind);
std::string_view to_string(Actor actor);
std::optional<EditKind> parse_edit_kind(std::string_view s);
std::optional<Actor> parse_actor(std::string_view s);

struct EditEvent {
  Timestamp timestamp = 0;
  EditKind kind = EditKind::kTextEdit;
  Actor actor = Actor::kAsker;
};

struct TextRevision {
  Timestamp timestamp = 0;
  std::string text;
};

struct TopicRevision {
  Timestamp timestamp = 0;
  TopicSet topics;
};

struct Promotion {
  Timestamp timestamp = 0;
  std::uint64_t audience_size = 0;
};

struct QuestionRecord {
  std::string id;
  bool asker_anonymous = false;
  Timestamp created_at = 0;
  std::optional<Timestamp> first_answer_at;
  std::string text_initial;
  std::vector<TextRevision> text_revisions;
  std::vector<TopicRevision> topic_revisions;
  std::vector<EditEvent> edit_events;
  std::vector<Promotion> promotions;
};

// Throws ValidationError describing the first violated invariant.
void validate(const QuestionRecord& record);

// One JSON object per line; field names as in QuestionRecord.
QuestionRecord parse_record(std::string_view json_line);
std::string to_json_line(const QuestionRecord& record);

struct RejectedLine {
  std::size_t line_number = 0;  // 1-based
  std::string id;               // empty when the id itself could not be read
  std::string reason;
};

struct LoadedCorpus {
  std::vector<QuestionRecord> records;
  std::vector<RejectedLine> rejects;
  std::size_t dropped_anonymous = 0;
};

// Malformed or invalid lines go to `rejects`; blank lines are skipped.
LoadedCorpus read_corpus(std::istream& in, bool drop_anonymous);
// Throws IoError when the file cannot be opened.
LoadedCorpus load_corpus(const std::filesystem::path& path, bool drop_anonymous);

void write_corpus(const std::filesystem::path& path, const std::vector<QuestionRecord>& records);
std::string format_rejects_report(const LoadedCorpus& corpus);

enum class Answer { kOpen, kAnswered };
std::string_view to_string(Answer answer);

struct Label {
  Answer value = Answer::kOpen;
  Duration horizon;
};

// answered iff first_answer_at <= created_at + horizon (inclusive boundary).
Label label_at(const QuestionRecord& record, Duration horizon);

struct QuestionSnapshot {
  std::string question_id;
  Timestamp as_of = 0;
  std::string text;
  TopicSet topics;
};

// Latest text/topic revision with timestamp <= as_of. With no topic revision
// at or before as_of the topic set is empty. Throws PreconditionError if
// as_of < created_at.
QuestionSnapshot snapshot_at(const QuestionRecord& record, Timestamp as_of);

// Records every observation-window request so a run can prove it never looked
// past created_at + horizon. Thread-safe.
class LeakageAudit {
 public:
  struct Violation {
    std::string question_id;
    Timestamp as_of = 0;
    Timestamp limit = 0;
    std::string what;
  };

  void record(std::string_view question_id, Timestamp as_of, Timestamp limit);
  // Registers an item (revision, event, promotion) that was handed to a
  // feature computation for a window ending at `limit`.
  void record_item(std::string_view question_id, Timestamp item_time, Timestamp limit,
                   std::string_view what);

  std::size_t requests() const;
  std::size_t violation_count() const;
  std::vector<Violation> violations() const;

 private:
  mutable std::mutex mu_;
  std::size_t requests_ = 0;
  std::vector<Violation> violations_;
};

// Everything a feature extractor may see about one question at one horizon.
struct ObservationWindow {
  Timestamp end = 0;  // created_at + horizon
  QuestionSnapshot initial;  // as of created_at
  QuestionSnapshot current;  // as of end
  std::vector<EditEvent> edit_events;
  std::vector<Promotion> promotions;
};

ObservationWindow observe(const QuestionRecord& record, Duration horizon,
                          LeakageAudit* audit = nullptr);

}  // namespace answerability
