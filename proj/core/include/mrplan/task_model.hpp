#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mrplan {

using NodeId = std::string;
using RobotId = std::string;

enum class NodeKind { kAction, kTask };

// Quality accumulation function of a task node.
enum class Qaf { kAnd, kXor };

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

// (quality, duration, cost) triple. Used for both action outcomes and
// accumulated task outcomes. Duration is in seconds; cost is in the
// scenario's cost unit (kJ when power is given in watts).
struct Outcome {
  double quality = 0.0;
  double duration = 0.0;
  double cost = 0.0;

  Outcome& operator+=(const Outcome& other) {
    quality += other.quality;
    duration += other.duration;
    cost += other.cost;
    return *this;
  }
  friend Outcome operator+(Outcome a, const Outcome& b) { return a += b; }
  friend bool operator==(const Outcome&, const Outcome&) = default;

  // Finite and nonnegative in every component.
  [[nodiscard]] bool valid() const;
};

// A task counts as accomplished only with strictly positive quality.
inline bool accomplished(const Outcome& outcome) { return outcome.quality > 0.0; }

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::kAction;
  Qaf qaf = Qaf::kAnd;              // ignored for actions
  std::vector<NodeId> children;     // empty for actions

  static Node action(NodeId id);
  static Node task(NodeId id, Qaf qaf, std::vector<NodeId> children);

  [[nodiscard]] bool is_action() const { return kind == NodeKind::kAction; }
};

// `before` must finish before `after` starts. Endpoints may be tasks or actions.
struct Precedence {
  NodeId before;
  NodeId after;

  friend auto operator<=>(const Precedence&, const Precedence&) = default;
};

// Rooted task tree with precedence edges. Construction never throws on
// structural problems so that validate_tree can report them; lookups on
// malformed trees resolve to the first node carrying an id.
class MissionTree {
 public:
  MissionTree() = default;
  MissionTree(std::vector<Node> nodes, NodeId root, std::vector<Precedence> precedence = {});

  [[nodiscard]] const NodeId& root() const { return root_; }
  [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<Precedence>& precedence() const { return precedence_; }

  [[nodiscard]] const Node* find(const NodeId& id) const;
  // Throws ValidationError for unknown ids.
  [[nodiscard]] const Node& node(const NodeId& id) const;
  [[nodiscard]] bool contains(const NodeId& id) const { return find(id) != nullptr; }
  [[nodiscard]] bool is_action(const NodeId& id) const;

  // Leaf descendants of `id` (itself when it is an action), depth-first in
  // child order.
  [[nodiscard]] std::vector<NodeId> actions_under(const NodeId& id) const;
  // All action nodes in declaration order.
  [[nodiscard]] std::vector<NodeId> actions() const;
  // Parent of each reachable non-root node.
  [[nodiscard]] std::unordered_map<NodeId, NodeId> parents() const;

 private:
  std::vector<Node> nodes_;
  NodeId root_;
  std::vector<Precedence> precedence_;
  std::unordered_map<NodeId, std::size_t> index_;
};

struct RobotProfile {
  RobotId id;
  // Defined exactly on the robot's capable actions.
  std::map<NodeId, Outcome> outcomes;
  Point start;              // depot, meters
  double speed = 1.0;       // m/s
  double drive_power = 0.0; // W

  [[nodiscard]] bool can_perform(const NodeId& action) const { return outcomes.contains(action); }
  [[nodiscard]] const Outcome& outcome(const NodeId& action) const;
  [[nodiscard]] std::vector<NodeId> capable_actions() const;
};

// Where an action happens. A robot travels to `location` before starting and
// is at `exit()` after finishing (transport actions end elsewhere).
struct ActionSite {
  Point location;
  std::optional<Point> end_location;

  [[nodiscard]] Point exit() const { return end_location.value_or(location); }
  friend bool operator==(const ActionSite&, const ActionSite&) = default;
};

// Everything a mission file carries.
struct Mission {
  MissionTree tree;
  std::vector<RobotProfile> robots;
  std::map<NodeId, ActionSite> sites;

  // Actions without an explicit site sit at the origin.
  [[nodiscard]] ActionSite site(const NodeId& action) const;
};

enum class ViolationKind {
  kDuplicateId,
  kMissingRoot,
  kDanglingChild,
  kMultipleParents,
  kUnreachable,
  kTaskWithoutChildren,
  kActionWithChildren,
  kDanglingPrecedence,
  kCyclicPrecedence,
  kInvalidRobot,
};

std::string_view describe(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<NodeId> nodes;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] bool has(ViolationKind kind) const;
  [[nodiscard]] std::size_t count(ViolationKind kind) const;
  [[nodiscard]] std::string to_string() const;
};

ValidationReport validate_tree(const MissionTree& tree);

// validate_tree plus robot-profile checks (unique ids, positive speed,
// valid outcomes, outcomes only on action nodes).
ValidationReport validate_mission(const Mission& mission);

// Ids of robots able to perform `action`, in input order. Throws
// ValidationError if `action` is not an action node.
std::vector<RobotId> robots_for_action(const MissionTree& tree, const NodeId& action,
                                       std::span<const RobotProfile> robots);

// Applies the task's QAF. AND requires `chosen` to be every child and sums
// all three components; XOR requires exactly one chosen child and returns
// its outcome unchanged.
Outcome accumulate_outcome(const MissionTree& tree, const NodeId& task,
                           const std::map<NodeId, Outcome>& child_outcomes,
                           const std::set<NodeId>& chosen);

// Lowers task-level precedence to action-level pairs among `actions`.
// Pairs with an unselected endpoint vanish; self-pairs are dropped.
std::set<Precedence> induced_action_precedence(const MissionTree& tree,
                                               const std::set<NodeId>& actions);

}  // namespace mrplan
