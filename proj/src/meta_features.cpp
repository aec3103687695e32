#include "answerability/meta_features.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "answerability/error.hpp"

namespace answerability {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct ParsedEdges {
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> problems;
};

ParsedEdges parse_edges(std::istream& in, std::string_view source_name) {
  ParsedEdges out;
  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto tab = raw.find('\t');
    std::string parent = tab == std::string::npos ? trim(raw) : trim(raw.substr(0, tab));
    std::string child = tab == std::string::npos ? std::string() : trim(raw.substr(tab + 1));
    if (parent.empty() || child.empty() || child.find('\t') != std::string::npos) {
      out.problems.push_back(std::string(source_name) + ":" + std::to_string(line_number) +
                             ": dangling edge (expected parent_id<TAB>child_id)");
      continue;
    }
    out.edges.emplace_back(std::move(parent), std::move(child));
  }
  return out;
}

// Returns nodes left over by Kahn's algorithm (those on or behind a cycle).
std::vector<std::string> cyclic_nodes(const std::map<std::string, std::vector<std::string>>& parents,
                                      const std::map<std::string, std::vector<std::string>>& children) {
  std::map<std::string, std::size_t> indegree;
  for (const auto& [node, ps] : parents) indegree[node] = ps.size();
  std::deque<std::string> queue;
  for (const auto& [node, deg] : indegree)
    if (deg == 0) queue.push_back(node);
  std::size_t visited = 0;
  while (!queue.empty()) {
    const std::string node = queue.front();
    queue.pop_front();
    ++visited;
    if (auto it = children.find(node); it != children.end())
      for (const auto& c : it->second)
        if (--indegree[c] == 0) queue.push_back(c);
  }
  std::vector<std::string> rest;
  if (visited == indegree.size()) return rest;
  for (const auto& [node, deg] : indegree)
    if (deg > 0) rest.push_back(node);
  return rest;
}

// Walks parent links among `remaining` until a node repeats; that node is on a cycle.
std::string find_cycle_member(const std::map<std::string, std::vector<std::string>>& parents,
                              const std::vector<std::string>& remaining) {
  const std::set<std::string> rest(remaining.begin(), remaining.end());
  std::set<std::string> seen;
  std::string node = remaining.front();
  while (seen.insert(node).second) {
    for (const auto& p : parents.at(node)) {
      if (rest.count(p)) {
        node = p;
        break;
      }
    }
  }
  return node;
}

}  // namespace

std::uint64_t EditSummary::count(EditKind kind) const {
  const int i = static_cast<int>(kind);
  return i < kNumCountedEditKinds ? counts[i] : promotion_count;
}

EditSummary edit_summary(std::span<const EditEvent> events, std::span<const Promotion> promotions) {
  EditSummary s;
  std::vector<Timestamp> times;
  for (const auto& ev : events) {
    if (ev.kind == EditKind::kPromotion) continue;
    ++s.counts[static_cast<int>(ev.kind)];
    times.push_back(ev.timestamp);
  }
  if (times.size() >= 2) {
    // Mean of consecutive gaps telescopes to (last - first) / (n - 1).
    std::sort(times.begin(), times.end());
    s.mean_edit_interval =
        static_cast<double>(times.back() - times.front()) / static_cast<double>(times.size() - 1);
  }
  s.promotion_count = promotions.size();
  for (const auto& p : promotions) s.promotion_audience += p.audience_size;
  return s;
}

TopicHierarchy TopicHierarchy::from_edges(
    std::span<const std::pair<std::string, std::string>> parent_child) {
  TopicHierarchy h;
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& [parent, child] : parent_child) {
    if (parent == child) throw ValidationError("meta_features", "self-loop on topic '" + parent + "'");
    h.parents_[parent];
    auto& ps = h.parents_[child];
    if (std::find(ps.begin(), ps.end(), parent) == ps.end()) {
      ps.push_back(parent);
      children[parent].push_back(child);
    }
  }
  if (auto rest = cyclic_nodes(h.parents_, children); !rest.empty()) {
    throw ValidationError("meta_features",
                          "cycle in topic hierarchy through '" + find_cycle_member(h.parents_, rest) + "'");
  }

  std::deque<std::string> queue;
  for (const auto& [node, ps] : h.parents_) {
    if (ps.empty()) {
      h.roots_.push_back(node);
      h.depth_[node] = 0;
      queue.push_back(node);
    }
  }
  while (!queue.empty()) {
    const std::string node = queue.front();
    queue.pop_front();
    if (auto it = children.find(node); it != children.end()) {
      for (const auto& c : it->second) {
        if (!h.depth_.count(c)) {
          h.depth_[c] = h.depth_[node] + 1;
          queue.push_back(c);
        }
      }
    }
  }

  // Union-find over undirected edges.
  std::map<std::string, std::size_t> index;
  for (const auto& [node, ps] : h.parents_) index.emplace(node, index.size());
  std::vector<std::size_t> parent(index.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [node, ps] : h.parents_)
    for (const auto& p : ps) parent[find(index[node])] = find(index[p]);
  std::map<std::size_t, std::size_t> compact;
  for (const auto& [node, i] : index) {
    const std::size_t root = find(i);
    auto [it, inserted] = compact.emplace(root, compact.size());
    h.component_[node] = it->second;
  }
  h.num_components_ = compact.size();
  return h;
}

TopicHierarchy TopicHierarchy::parse(std::istream& in, std::string_view source_name) {
  ParsedEdges parsed = parse_edges(in, source_name);
  if (!parsed.problems.empty()) throw ValidationError("meta_features", parsed.problems.front());
  return from_edges(parsed.edges);
}

TopicHierarchy TopicHierarchy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("meta_features", "cannot open hierarchy: " + path.string());
  return parse(in, path.string());
}

HierarchyDiagnostics diagnose_hierarchy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("meta_features", "cannot open hierarchy: " + path.string());
  ParsedEdges parsed = parse_edges(in, path.string());
  HierarchyDiagnostics d;
  d.problems = std::move(parsed.problems);
  std::vector<std::pair<std::string, std::string>> usable;
  for (auto& e : parsed.edges) {
    if (e.first == e.second) {
      d.problems.push_back("self-loop on topic '" + e.first + "'");
    } else {
      usable.push_back(std::move(e));
    }
  }
  d.edges = usable.size();
  try {
    TopicHierarchy h = TopicHierarchy::from_edges(usable);
    d.nodes = h.size();
  } catch (const ValidationError& e) {
    d.problems.push_back(e.what());
  }
  return d;
}

std::optional<int> TopicHierarchy::depth(const std::string& topic) const {
  auto it = depth_.find(topic);
  if (it == depth_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TopicHierarchy::component(const std::string& topic) const {
  auto it = component_.find(topic);
  if (it == component_.end()) return std::nullopt;
  return it->second;
}

HierarchyFeatures hierarchy_features(const TopicSet& topics, const TopicHierarchy& hierarchy) {
  HierarchyFeatures f;
  if (topics.empty()) return f;
  std::vector<int> depths;
  std::set<std::size_t> components;
  std::size_t absent = 0;
  for (const auto& t : topics) {
    if (auto d = hierarchy.depth(t)) {
      depths.push_back(*d);
      components.insert(*hierarchy.component(t));
    } else {
      depths.push_back(0);
      ++absent;
    }
  }
  const double n = static_cast<double>(depths.size());
  f.num_topics = n;
  f.avg_depth = std::accumulate(depths.begin(), depths.end(), 0.0) / n;
  f.max_depth = *std::max_element(depths.begin(), depths.end());
  double ss = 0.0;
  for (int d : depths) ss += (d - f.avg_depth) * (d - f.avg_depth);
  f.var_depth = ss / n;
  std::map<int, int> per_level;
  for (int d : depths) ++per_level[d];
  for (const auto& [level, count] : per_level) f.max_same_level = std::max<double>(f.max_same_level, count);
  f.num_components = static_cast<double>(components.size() + absent);
  return f;
}

std::size_t topic_set_difference(const TopicSet& initial, const TopicSet& at_t) {
  std::vector<std::string> diff;
  std::set_symmetric_difference(initial.begin(), initial.end(), at_t.begin(), at_t.end(),
                                std::back_inserter(diff));
  return diff.size();
}

}  // namespace answerability
