#pragma once

// Independent reference implementations and random instance generators
// shared by the unit tests and the acceptance suite. Nothing here calls the
// library routine it is meant to check.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "mrplan/decomposition.hpp"
#include "mrplan/schedule.hpp"
#include "mrplan/task_model.hpp"

namespace oracle {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
std::size_t pick(Rng& rng, std::size_t n);  // uniform in [0, n)

// ---- task trees -----------------------------------------------------------

struct RandomTreeOptions {
  std::size_t max_leaves = 12;
  double unservable_probability = 0.0;  // per action
  std::size_t max_robots = 3;
};

struct TreeInstance {
  mrplan::MissionTree tree;
  std::vector<mrplan::RobotProfile> robots;
};

TreeInstance random_tree(Rng& rng, const RandomTreeOptions& options);

// Number of root alternatives before any pruning or capability filtering.
std::size_t count_alternatives(const mrplan::MissionTree& tree, const mrplan::NodeId& node);

// Every action set that completes `node`.
std::vector<std::set<mrplan::NodeId>> enumerate_alternatives(const mrplan::MissionTree& tree,
                                                             const mrplan::NodeId& node);

// Mean outcome over capable robots, or nullopt if none.
std::optional<mrplan::Outcome> mean_outcome(const mrplan::NodeId& action,
                                            const std::vector<mrplan::RobotProfile>& robots);

double weighted_score(const mrplan::Outcome& o, double alpha, double beta, double gamma);

struct ScoredSet {
  std::set<mrplan::NodeId> actions;
  double score = 0.0;
};

// Brute-force stage one: all servable alternatives with their scores.
std::vector<ScoredSet> brute_force_alternatives(const TreeInstance& instance,
                                                const mrplan::Criteria& criteria);

mrplan::Criteria random_criteria(Rng& rng);

// ---- scheduling -----------------------------------------------------------

struct RandomProblemOptions {
  std::size_t actions = 10;
  std::size_t robots = 3;
  double edge_probability = 0.15;
  double capability_probability = 0.6;
  double transport_probability = 0.2;  // share of actions ending elsewhere
  double extent = 20.0;                // side of the square holding all sites
};

mrplan::SchedulingProblem random_problem(Rng& rng, const RandomProblemOptions& options);

// Random assignment and route order; may deadlock unless `topological`.
mrplan::Genotype random_assignment(Rng& rng, const mrplan::SchedulingProblem& problem, bool topological);

// True when route order plus precedence contains a cycle.
bool has_deadlock(const mrplan::SchedulingProblem& problem, const mrplan::Genotype& genotype);

struct Timing {
  std::vector<double> start;
  std::vector<double> finish;
  double makespan = 0.0;
  double cost = 0.0;
};

// Earliest starts by repeated relaxation until nothing changes. Requires a
// deadlock-free genotype.
Timing fixpoint_schedule(const mrplan::SchedulingProblem& problem, const mrplan::Genotype& genotype);

// Empty when no action of the phenotype can be moved earlier on its own
// without breaking a travel or precedence constraint; otherwise the ids of
// the shiftable actions.
std::vector<mrplan::NodeId> left_shiftable(const mrplan::SchedulingProblem& problem,
                                           const mrplan::Genotype& genotype,
                                           const mrplan::Phenotype& phenotype);

// Assignment, capability, same-route order and deadlock checks written
// without the library's checker.
bool genotype_invariants(const mrplan::SchedulingProblem& problem, const mrplan::Genotype& genotype);

// ---- Pareto ---------------------------------------------------------------

// Rank by peeling: the non-dominated layer of what remains gets the next rank.
std::vector<int> peel_ranks(const std::vector<mrplan::Objectives>& points);

std::vector<mrplan::Objectives> random_points(Rng& rng, std::size_t n, bool with_ties);

}  // namespace oracle
