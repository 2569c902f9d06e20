#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mrplan/task_model.hpp"

namespace mrplan {

using ActionIndex = std::size_t;
using RobotIndex = std::size_t;

// Marks "no previous action": the leg starts at the robot's depot.
inline constexpr ActionIndex kDepot = std::numeric_limits<ActionIndex>::max();

// Euclidean distance over speed.
double travel_time(const RobotProfile& robot, const Point& from, const Point& to);

// Energy in kJ for running at `power_w` watts for `seconds`.
inline double energy_kj(double seconds, double power_w) { return seconds * power_w / 1000.0; }

// Allocation/scheduling instance over a fixed action set. Actions and robots
// are addressed by dense indices; ids are kept for export.
class SchedulingProblem {
 public:
  // Throws InfeasibleError if an action has no capable robot, and
  // ValidationError for unknown or cyclic precedence endpoints.
  SchedulingProblem(std::vector<RobotProfile> robots, std::vector<NodeId> actions,
                    const std::set<Precedence>& precedence,
                    const std::map<NodeId, ActionSite>& sites = {});

  // Actions of `selected`, action-level precedence induced from the tree.
  static SchedulingProblem from_mission(const Mission& mission,
                                        const std::vector<NodeId>& selected);

  [[nodiscard]] std::size_t action_count() const { return actions_.size(); }
  [[nodiscard]] std::size_t robot_count() const { return robots_.size(); }

  [[nodiscard]] const NodeId& action_id(ActionIndex a) const { return actions_[a]; }
  [[nodiscard]] ActionIndex action_index(const NodeId& id) const;
  [[nodiscard]] const RobotProfile& robot(RobotIndex r) const { return robots_[r]; }
  [[nodiscard]] const std::vector<RobotProfile>& robots() const { return robots_; }
  [[nodiscard]] RobotIndex robot_index(const RobotId& id) const;

  [[nodiscard]] bool capable(RobotIndex r, ActionIndex a) const { return at(service_, r, a).has_value(); }
  [[nodiscard]] const std::vector<RobotIndex>& capable_robots(ActionIndex a) const { return capable_[a]; }
  [[nodiscard]] double service_duration(RobotIndex r, ActionIndex a) const { return at(service_, r, a)->duration; }
  [[nodiscard]] double service_cost(RobotIndex r, ActionIndex a) const { return at(service_, r, a)->cost; }
  [[nodiscard]] const ActionSite& site(ActionIndex a) const { return sites_[a]; }

  // Travel seconds for robot r from the exit of `from` (or its depot) to
  // the location of `to`.
  [[nodiscard]] double leg_time(RobotIndex r, ActionIndex from, ActionIndex to) const;

  // Direct action-level precedence.
  [[nodiscard]] const std::vector<ActionIndex>& predecessors(ActionIndex a) const { return preds_[a]; }
  [[nodiscard]] const std::vector<ActionIndex>& successors(ActionIndex a) const { return succs_[a]; }
  // Transitive closure of the precedence relation.
  [[nodiscard]] const std::vector<ActionIndex>& all_predecessors(ActionIndex a) const { return closure_preds_[a]; }
  [[nodiscard]] const std::vector<ActionIndex>& all_successors(ActionIndex a) const { return closure_succs_[a]; }
  [[nodiscard]] const std::set<Precedence>& precedence() const { return precedence_; }

 private:
  template <typename T>
  const T& at(const std::vector<T>& v, RobotIndex r, ActionIndex a) const {
    return v[r * actions_.size() + a];
  }

  std::vector<RobotProfile> robots_;
  std::vector<NodeId> actions_;
  std::unordered_map<NodeId, ActionIndex> action_index_;
  std::set<Precedence> precedence_;
  std::vector<ActionSite> sites_;
  std::vector<std::optional<Outcome>> service_;  // robot-major
  std::vector<std::vector<RobotIndex>> capable_;
  std::vector<std::vector<ActionIndex>> preds_, succs_;
  std::vector<std::vector<ActionIndex>> closure_preds_, closure_succs_;
};

// Ordered action route per robot (index = robot index).
struct Genotype {
  std::vector<std::vector<ActionIndex>> routes;

  friend bool operator==(const Genotype&, const Genotype&) = default;
};

struct ScheduledAction {
  ActionIndex action = 0;
  double start = 0.0;
  double finish = 0.0;

  friend bool operator==(const ScheduledAction&, const ScheduledAction&) = default;
};

struct Objectives {
  double makespan = 0.0;
  double cost = 0.0;

  friend bool operator==(const Objectives&, const Objectives&) = default;
};

// Timed schedule per robot, in route order.
struct Phenotype {
  std::vector<std::vector<ScheduledAction>> schedules;
  double makespan = 0.0;
  double total_cost = 0.0;
  double service_cost = 0.0;
  double travel_cost = 0.0;

  friend bool operator==(const Phenotype&, const Phenotype&) = default;
};

inline Objectives objectives(const Phenotype& phenotype) {
  return {phenotype.makespan, phenotype.total_cost};
}

// Semi-active schedule of the genotype: every action starts at the later of
// (previous finish on its robot + travel) and the latest finish of its
// precedence predecessors. Returns nullopt on a cross-schedule deadlock.
// Throws ValidationError when the genotype is not a valid assignment.
std::optional<Phenotype> try_render(const SchedulingProblem& problem, const Genotype& genotype);

// As try_render, but a deadlock throws InfeasibleError.
Phenotype render_phenotype(const SchedulingProblem& problem, const Genotype& genotype);

enum class ScheduleViolation {
  kAssignment,    // missing, duplicated or unknown action
  kCapability,
  kRouteOrder,    // same-route precedence pair out of order
  kDeadlock,
  kDuration,
  kTravel,
  kPrecedence,
  kNotSemiActive,
  kObjective,     // stored makespan/cost disagree with the schedule
};

std::string_view describe(ScheduleViolation kind);

struct FeasibilityReport {
  struct Issue {
    ScheduleViolation kind;
    std::string detail;
  };
  std::vector<Issue> issues;

  [[nodiscard]] bool ok() const { return issues.empty(); }
  [[nodiscard]] bool has(ScheduleViolation kind) const;
  [[nodiscard]] std::string to_string() const;
};

// Genotype invariants: complete single assignment to capable robots,
// same-route precedence order, no cross-schedule deadlock.
FeasibilityReport check_genotype(const SchedulingProblem& problem, const Genotype& genotype);

// Re-derives every phenotype invariant from the problem data alone.
// Precedence is satisfied when start(after) >= finish(before). Times are
// compared with a relative `tolerance` (loosen it for schedules read back
// from fixed-precision files).
FeasibilityReport check_feasible(const SchedulingProblem& problem, const Phenotype& phenotype,
                                 double tolerance = 1e-9);

// Route order read back from a phenotype.
Genotype genotype_of(const Phenotype& phenotype);

}  // namespace mrplan
