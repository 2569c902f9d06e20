#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mrplan/task_model.hpp"

namespace mrplan {

// Weights of the alternative score  alpha*q - beta*d - gamma*c.
// Nonnegative and summing to one. Quality, duration and cost enter the
// score raw, so weights must be chosen with the scenario's units in mind.
struct Criteria {
  double alpha = 0.0;
  double beta = 0.5;
  double gamma = 0.5;

  // Throws ValidationError.
  void validate() const;

  // Maps a makespan/cost importance pair in percent (summing to 100) onto
  // (alpha = 0, beta = makespan/100, gamma = cost/100).
  static Criteria from_importance(double makespan_percent, double cost_percent);
};

double score(const Outcome& aggregate, const Criteria& criteria);

// Mean (q, d, c) over every robot able to perform the action. Throws
// InfeasibleError when no robot can.
Outcome estimate_action(const NodeId& action, std::span<const RobotProfile> robots);

struct Alternative {
  std::vector<NodeId> actions;          // sorted, unique
  std::map<NodeId, NodeId> branches;    // XOR task -> selected child
  Outcome aggregate;
  double score = 0.0;

  friend bool operator==(const Alternative&, const Alternative&) = default;
};

// Total order used for pruning and output: score descending, then the
// lexicographically smaller sorted action list first.
bool ranks_before(const Alternative& a, const Alternative& b);

struct PruneRecord {
  NodeId task;
  std::size_t candidates = 0;  // before pruning
  std::size_t kept = 0;
};

// One line per task node: "node=<id> candidates=<n> kept=<m>".
std::string format_prune_record(const PruneRecord& record);

struct DecompositionOptions {
  Criteria criteria;
  std::size_t mu = 32;
  // Abort when a single combination step would materialize more candidates.
  std::size_t hard_cap = 1'000'000;
  // Called once per task node after its alternatives are final.
  std::function<void(const PruneRecord&)> on_task;
};

// Bottom-up alternative generation with top-mu pruning at every task.
//
// Actions yield the singleton alternative. XOR tasks concatenate their
// children's lists (recording the chosen branch). AND tasks fold the
// cartesian product child by child, pruning to the best mu after each fold;
// because the score is additive over AND children this keeps the same
// top-mu set as pruning the full product, while bounding intermediate sizes.
// Alternatives that contain an action no robot can perform are dropped;
// if the task ends up with none, InfeasibleError names the unservable
// actions. Exceeding `hard_cap` throws ResourceCapError.
std::vector<Alternative> generate_alternatives(const MissionTree& tree, const NodeId& task,
                                               std::span<const RobotProfile> robots,
                                               const DecompositionOptions& options);

// First min(k, size) entries of an already ordered list.
std::vector<Alternative> select_top_k(std::span<const Alternative> ordered, std::size_t k);

}  // namespace mrplan
