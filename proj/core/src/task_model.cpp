#include "mrplan/task_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_set>

#include "mrplan/errors.hpp"

namespace mrplan {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool Outcome::valid() const {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  return ok(quality) && ok(duration) && ok(cost);
}

Node Node::action(NodeId id) { return Node{std::move(id), NodeKind::kAction, Qaf::kAnd, {}}; }

Node Node::task(NodeId id, Qaf qaf, std::vector<NodeId> children) {
  return Node{std::move(id), NodeKind::kTask, qaf, std::move(children)};
}

MissionTree::MissionTree(std::vector<Node> nodes, NodeId root, std::vector<Precedence> precedence)
    : nodes_(std::move(nodes)), root_(std::move(root)), precedence_(std::move(precedence)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    index_.try_emplace(nodes_[i].id, i);
  }
}

const Node* MissionTree::find(const NodeId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

const Node& MissionTree::node(const NodeId& id) const {
  const Node* n = find(id);
  if (n == nullptr) {
    throw ValidationError("unknown node '" + id + "'");
  }
  return *n;
}

bool MissionTree::is_action(const NodeId& id) const {
  const Node* n = find(id);
  return n != nullptr && n->is_action();
}

std::vector<NodeId> MissionTree::actions_under(const NodeId& id) const {
  std::vector<NodeId> out;
  std::unordered_set<NodeId> seen;
  std::function<void(const NodeId&)> walk = [&](const NodeId& cur) {
    const Node* n = find(cur);
    if (n == nullptr || !seen.insert(cur).second) {
      return;
    }
    if (n->is_action()) {
      out.push_back(cur);
      return;
    }
    for (const auto& child : n->children) {
      walk(child);
    }
  };
  walk(id);
  return out;
}

std::vector<NodeId> MissionTree::actions() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.is_action()) {
      out.push_back(n.id);
    }
  }
  return out;
}

std::unordered_map<NodeId, NodeId> MissionTree::parents() const {
  std::unordered_map<NodeId, NodeId> out;
  for (const auto& n : nodes_) {
    if (n.is_action()) {
      continue;
    }
    for (const auto& child : n.children) {
      out.try_emplace(child, n.id);
    }
  }
  return out;
}

const Outcome& RobotProfile::outcome(const NodeId& action) const {
  auto it = outcomes.find(action);
  if (it == outcomes.end()) {
    throw ValidationError("robot '" + id + "' cannot perform '" + action + "'");
  }
  return it->second;
}

std::vector<NodeId> RobotProfile::capable_actions() const {
  std::vector<NodeId> out;
  out.reserve(outcomes.size());
  for (const auto& [action, _] : outcomes) {
    out.push_back(action);
  }
  return out;
}

ActionSite Mission::site(const NodeId& action) const {
  auto it = sites.find(action);
  return it == sites.end() ? ActionSite{} : it->second;
}

std::string_view describe(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kDuplicateId: return "duplicate id";
    case ViolationKind::kMissingRoot: return "missing root";
    case ViolationKind::kDanglingChild: return "dangling child";
    case ViolationKind::kMultipleParents: return "multiple parents";
    case ViolationKind::kUnreachable: return "unreachable node";
    case ViolationKind::kTaskWithoutChildren: return "task without children";
    case ViolationKind::kActionWithChildren: return "action with children";
    case ViolationKind::kDanglingPrecedence: return "dangling precedence";
    case ViolationKind::kCyclicPrecedence: return "cyclic precedence";
    case ViolationKind::kInvalidRobot: return "invalid robot";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const { return count(kind) > 0; }

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [kind](const Violation& v) { return v.kind == kind; }));
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << describe(v.kind);
    if (!v.nodes.empty()) {
      os << " [";
      for (std::size_t i = 0; i < v.nodes.size(); ++i) {
        os << (i ? ", " : "") << v.nodes[i];
      }
      os << "]";
    }
    if (!v.detail.empty()) {
      os << ": " << v.detail;
    }
    os << '\n';
  }
  return os.str();
}

namespace {

// Ancestor chains used to decide whether two actions can be selected
// together: they cannot when their lowest common ancestor is an XOR task.
class BranchOracle {
 public:
  explicit BranchOracle(const MissionTree& tree) : tree_(tree), parents_(tree.parents()) {}

  [[nodiscard]] bool compatible(const NodeId& a, const NodeId& b) const {
    auto path_a = chain(a);
    std::unordered_set<NodeId> on_a(path_a.begin(), path_a.end());
    for (const auto& n : chain(b)) {
      if (on_a.contains(n)) {
        const Node& lca = tree_.node(n);
        return lca.is_action() || lca.qaf == Qaf::kAnd;
      }
    }
    return true;
  }

 private:
  [[nodiscard]] std::vector<NodeId> chain(const NodeId& id) const {
    std::vector<NodeId> out{id};
    auto it = parents_.find(id);
    while (it != parents_.end()) {
      out.push_back(it->second);
      it = parents_.find(it->second);
    }
    return out;
  }

  const MissionTree& tree_;
  std::unordered_map<NodeId, NodeId> parents_;
};

void check_structure(const MissionTree& tree, ValidationReport& report) {
  std::unordered_map<NodeId, int> occurrences;
  for (const auto& n : tree.nodes()) {
    if (++occurrences[n.id] == 2) {
      report.violations.push_back({ViolationKind::kDuplicateId, {n.id}, {}});
    }
  }

  for (const auto& n : tree.nodes()) {
    if (n.is_action() && !n.children.empty()) {
      report.violations.push_back({ViolationKind::kActionWithChildren, {n.id}, {}});
    }
    if (!n.is_action() && n.children.empty()) {
      report.violations.push_back({ViolationKind::kTaskWithoutChildren, {n.id}, {}});
    }
  }

  if (!tree.contains(tree.root())) {
    report.violations.push_back({ViolationKind::kMissingRoot, {tree.root()}, {}});
    return;
  }

  std::unordered_map<NodeId, int> parent_count;
  for (const auto& n : tree.nodes()) {
    for (const auto& child : n.children) {
      if (!tree.contains(child)) {
        report.violations.push_back({ViolationKind::kDanglingChild, {n.id, child}, {}});
        continue;
      }
      if (++parent_count[child] == 2) {
        report.violations.push_back({ViolationKind::kMultipleParents, {child}, {}});
      }
    }
  }
  if (parent_count.contains(tree.root())) {
    report.violations.push_back(
        {ViolationKind::kMultipleParents, {tree.root()}, "root has a parent"});
  }

  std::unordered_set<NodeId> reached;
  std::vector<NodeId> stack{tree.root()};
  while (!stack.empty()) {
    NodeId cur = std::move(stack.back());
    stack.pop_back();
    if (!reached.insert(cur).second) {
      continue;
    }
    if (const Node* n = tree.find(cur)) {
      for (const auto& child : n->children) {
        if (tree.contains(child)) {
          stack.push_back(child);
        }
      }
    }
  }
  std::unordered_set<NodeId> reported;
  for (const auto& n : tree.nodes()) {
    if (!reached.contains(n.id) && reported.insert(n.id).second) {
      report.violations.push_back({ViolationKind::kUnreachable, {n.id}, {}});
    }
  }
}

// Searches an action-level graph for a cycle whose members can all be
// selected together in one decomposition.
class CycleSearch {
 public:
  CycleSearch(const std::map<NodeId, std::set<NodeId>>& edges, const BranchOracle& branches)
      : edges_(edges), branches_(branches) {}

  std::optional<std::vector<NodeId>> find() {
    for (const auto& [start, _] : edges_) {
      path_ = {start};
      if (extend(start, start)) {
        return path_;
      }
    }
    return std::nullopt;
  }

 private:
  bool extend(const NodeId& start, const NodeId& cur) {
    if (++steps_ > kStepBudget) {
      return false;
    }
    auto it = edges_.find(cur);
    if (it == edges_.end()) {
      return false;
    }
    for (const auto& next : it->second) {
      if (next == start) {
        return true;
      }
      // Canonical start is the smallest id on the cycle.
      if (next < start || std::find(path_.begin(), path_.end(), next) != path_.end()) {
        continue;
      }
      bool fits = std::all_of(path_.begin(), path_.end(),
                              [&](const NodeId& p) { return branches_.compatible(p, next); });
      if (!fits) {
        continue;
      }
      path_.push_back(next);
      if (extend(start, next)) {
        return true;
      }
      path_.pop_back();
    }
    return false;
  }

  static constexpr std::size_t kStepBudget = 1'000'000;
  const std::map<NodeId, std::set<NodeId>>& edges_;
  const BranchOracle& branches_;
  std::vector<NodeId> path_;
  std::size_t steps_ = 0;
};

void check_precedence(const MissionTree& tree, ValidationReport& report) {
  bool endpoints_ok = true;
  for (const auto& p : tree.precedence()) {
    for (const auto* end : {&p.before, &p.after}) {
      if (!tree.contains(*end)) {
        report.violations.push_back({ViolationKind::kDanglingPrecedence, {p.before, p.after},
                                     "unknown node '" + *end + "'"});
        endpoints_ok = false;
      }
    }
  }
  if (!endpoints_ok) {
    return;
  }

  BranchOracle branches(tree);
  std::map<NodeId, std::set<NodeId>> edges;
  for (const auto& p : tree.precedence()) {
    auto before = tree.actions_under(p.before);
    auto after = tree.actions_under(p.after);
    for (const auto& x : before) {
      for (const auto& y : after) {
        if (x == y) {
          report.violations.push_back({ViolationKind::kCyclicPrecedence, {p.before, p.after},
                                       "action '" + x + "' must precede itself"});
          return;
        }
        if (branches.compatible(x, y)) {
          edges[x].insert(y);
        }
      }
    }
  }

  if (auto cycle = CycleSearch(edges, branches).find()) {
    report.violations.push_back({ViolationKind::kCyclicPrecedence, std::move(*cycle), {}});
  }
}

}  // namespace

ValidationReport validate_tree(const MissionTree& tree) {
  ValidationReport report;
  check_structure(tree, report);
  // Precedence expansion needs a well-formed tree.
  if (report.ok()) {
    check_precedence(tree, report);
  }
  return report;
}

ValidationReport validate_mission(const Mission& mission) {
  ValidationReport report = validate_tree(mission.tree);
  std::unordered_set<RobotId> ids;
  for (const auto& robot : mission.robots) {
    auto bad = [&](std::string detail) {
      report.violations.push_back({ViolationKind::kInvalidRobot, {robot.id}, std::move(detail)});
    };
    if (!ids.insert(robot.id).second) {
      bad("duplicate robot id");
    }
    if (!(robot.speed > 0.0) || !std::isfinite(robot.speed)) {
      bad("speed must be positive");
    }
    if (!(robot.drive_power >= 0.0) || !std::isfinite(robot.drive_power)) {
      bad("drive power must be nonnegative");
    }
    for (const auto& [action, outcome] : robot.outcomes) {
      if (!mission.tree.is_action(action)) {
        bad("outcome for non-action '" + action + "'");
      }
      if (!outcome.valid()) {
        bad("invalid outcome for '" + action + "'");
      }
    }
  }
  for (const auto& [action, _] : mission.sites) {
    if (!mission.tree.is_action(action)) {
      report.violations.push_back(
          {ViolationKind::kDanglingChild, {action}, "site for unknown action"});
    }
  }
  return report;
}

std::vector<RobotId> robots_for_action(const MissionTree& tree, const NodeId& action,
                                       std::span<const RobotProfile> robots) {
  if (!tree.node(action).is_action()) {
    throw ValidationError("'" + action + "' is a task, not an action");
  }
  std::vector<RobotId> out;
  for (const auto& robot : robots) {
    if (robot.can_perform(action)) {
      out.push_back(robot.id);
    }
  }
  return out;
}

Outcome accumulate_outcome(const MissionTree& tree, const NodeId& task,
                           const std::map<NodeId, Outcome>& child_outcomes,
                           const std::set<NodeId>& chosen) {
  const Node& n = tree.node(task);
  if (n.is_action()) {
    throw ValidationError("cannot accumulate outcome of action '" + task + "'");
  }
  auto lookup = [&](const NodeId& child) -> const Outcome& {
    auto it = child_outcomes.find(child);
    if (it == child_outcomes.end()) {
      throw ValidationError("missing outcome for child '" + child + "' of '" + task + "'");
    }
    return it->second;
  };

  if (n.qaf == Qaf::kXor) {
    if (chosen.size() != 1) {
      throw ValidationError("XOR task '" + task + "' needs exactly one chosen child");
    }
    const NodeId& pick = *chosen.begin();
    if (std::find(n.children.begin(), n.children.end(), pick) == n.children.end()) {
      throw ValidationError("'" + pick + "' is not a child of '" + task + "'");
    }
    return lookup(pick);
  }

  std::set<NodeId> all(n.children.begin(), n.children.end());
  if (chosen != all) {
    throw ValidationError("AND task '" + task + "' requires all children to be chosen");
  }
  Outcome total;
  for (const auto& child : n.children) {
    total += lookup(child);
  }
  return total;
}

std::set<Precedence> induced_action_precedence(const MissionTree& tree,
                                               const std::set<NodeId>& actions) {
  std::set<Precedence> out;
  for (const auto& p : tree.precedence()) {
    if (!tree.contains(p.before) || !tree.contains(p.after)) {
      continue;
    }
    auto after = tree.actions_under(p.after);
    std::erase_if(after, [&](const NodeId& a) { return !actions.contains(a); });
    if (after.empty()) {
      continue;
    }
    for (const auto& x : tree.actions_under(p.before)) {
      if (!actions.contains(x)) {
        continue;
      }
      for (const auto& y : after) {
        if (x != y) {
          out.insert({x, y});
        }
      }
    }
  }
  return out;
}

}  // namespace mrplan
