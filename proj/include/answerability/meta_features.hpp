#pragma once

// Edit-activity, promotion and topic-hierarchy features.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "answerability/corpus.hpp"

namespace answerability {

struct EditSummary {
  // Indexed by EditKind for the eight counted kinds.
  std::array<std::uint64_t, kNumCountedEditKinds> counts{};
  std::uint64_t promotion_count = 0;
  std::uint64_t promotion_audience = 0;
  // Mean gap between consecutive edits; absent with fewer than two edits.
  std::optional<double> mean_edit_interval;

  std::uint64_t count(EditKind kind) const;
};

// Events of kind kPromotion are ignored here: promotions are counted from the
// promotion list.
EditSummary edit_summary(std::span<const EditEvent> events, std::span<const Promotion> promotions);

// Parent/child topic graph. Multiple parents are allowed; cycles are not.
class TopicHierarchy {
 public:
  TopicHierarchy() = default;

  // Throws ValidationError on a self-loop or a cycle (naming one member).
  static TopicHierarchy from_edges(std::span<const std::pair<std::string, std::string>> parent_child);

  // Lines `parent_id<TAB>child_id`; blank lines and '#' comments skipped.
  // A line without two non-empty ids is a dangling edge and is fatal.
  static TopicHierarchy load(const std::filesystem::path& path);
  static TopicHierarchy parse(std::istream& in, std::string_view source_name = "<hierarchy>");

  std::size_t size() const { return depth_.size(); }
  bool contains(const std::string& topic) const { return depth_.count(topic) > 0; }
  const std::vector<std::string>& roots() const { return roots_; }
  const std::map<std::string, std::vector<std::string>>& parents() const { return parents_; }

  // Shortest root-to-topic distance; std::nullopt for an unknown topic.
  std::optional<int> depth(const std::string& topic) const;
  // Undirected component id; std::nullopt for an unknown topic.
  std::optional<std::size_t> component(const std::string& topic) const;
  std::size_t component_count() const { return num_components_; }

 private:
  std::map<std::string, std::vector<std::string>> parents_;  // child -> parents (every node has an entry)
  std::vector<std::string> roots_;
  std::map<std::string, int> depth_;
  std::map<std::string, std::size_t> component_;
  std::size_t num_components_ = 0;
};

// Collects every problem in a hierarchy file instead of stopping at the first.
struct HierarchyDiagnostics {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};
HierarchyDiagnostics diagnose_hierarchy(const std::filesystem::path& path);

struct HierarchyFeatures {
  double num_topics = 0;
  double avg_depth = 0;
  double max_depth = 0;
  double var_depth = 0;  // population variance
  double max_same_level = 0;
  double num_components = 0;
};

// Topics unknown to the hierarchy get depth 0 and count as their own component.
HierarchyFeatures hierarchy_features(const TopicSet& topics, const TopicHierarchy& hierarchy);

// |initial symmetric-difference at_t|
std::size_t topic_set_difference(const TopicSet& initial, const TopicSet& at_t);

}  // namespace answerability
