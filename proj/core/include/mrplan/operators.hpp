#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mrplan/decomposition.hpp"
#include "mrplan/schedule.hpp"

namespace mrplan {

using Rng = std::mt19937_64;

enum class OperatorId { kBcrc = 0, kIntraSwap = 1, kInterSwap = 2, kReroute = 3 };

inline constexpr std::array<OperatorId, 4> kAllOperators = {
    OperatorId::kBcrc, OperatorId::kIntraSwap, OperatorId::kInterSwap, OperatorId::kReroute};

std::string_view name(OperatorId op);

// Weights of the insertion-cost scalarization. Quality is identical at every
// insertion point, so only the makespan and cost weights matter.
struct InsertionWeights {
  double makespan = 0.5;
  double cost = 0.5;

  // Uses (beta, gamma), renormalized; falls back to equal weights when both
  // are zero.
  static InsertionWeights from(const Criteria& criteria);
};

struct InsertionPoint {
  RobotIndex robot = 0;
  std::size_t position = 0;
  double cost = 0.0;        // scalarized proxy increment
  double route_delta = 0.0; // increase of the route's idle-free completion time
};

// Proxy increment for inserting `action` (absent from `genotype`) at
// `position` of `robot`'s route: w_makespan * growth of the largest
// idle-free route completion time + w_cost * (service cost + extra travel
// energy). Ignores idle time propagated across routes.
InsertionPoint insertion_cost(const SchedulingProblem& problem, const Genotype& genotype,
                              ActionIndex action, RobotIndex robot, std::size_t position,
                              const InsertionWeights& weights);

// Inclusive range [first, last] of positions on `robot`'s route where
// `action` can be inserted without creating a precedence cycle, given the
// transitive precedence closure. nullopt when the robot is incapable.
std::optional<std::pair<std::size_t, std::size_t>> insertion_window(
    const SchedulingProblem& problem, const Genotype& genotype, ActionIndex action,
    RobotIndex robot);

// Cheapest feasible insertion point; ties go to the smaller route delta,
// then the lower robot index and position. nullopt if none exists.
std::optional<InsertionPoint> best_insertion(const SchedulingProblem& problem,
                                             const Genotype& genotype, ActionIndex action,
                                             const InsertionWeights& weights);

void insert_at(Genotype& genotype, ActionIndex action, RobotIndex robot, std::size_t position);

// Removes every listed action, keeping the relative order of the rest.
void remove_actions(Genotype& genotype, std::span<const ActionIndex> actions);

// Deadlock-free genotype: actions in a random topological order, each
// appended to a random capable robot.
Genotype random_genotype(const SchedulingProblem& problem, Rng& rng);

// Actions in a random topological order, each placed by best_insertion.
Genotype greedy_genotype(const SchedulingProblem& problem, Rng& rng,
                         const InsertionWeights& weights);

struct MutationResult {
  Genotype child;
  bool ok = false;  // false: parent returned unchanged
};

struct CrossoverResult {
  Genotype first;
  Genotype second;
  bool ok = false;
};

// Best-cost route crossover. A random non-empty route of each parent is
// removed from the other parent and its actions re-inserted one by one (in
// random order) at their best feasible insertion points.
CrossoverResult bcrc_crossover(const Genotype& first, const Genotype& second,
                               const SchedulingProblem& problem, Rng& rng,
                               const InsertionWeights& weights);

// Exchanges two actions within one robot's route.
MutationResult intra_depot_swap(const Genotype& parent, const SchedulingProblem& problem, Rng& rng);

// Exchanges one action each between two robots' routes, or moves an action
// onto an empty route.
MutationResult inter_depot_swap(const Genotype& parent, const SchedulingProblem& problem, Rng& rng);

// Removes a random action and re-inserts it at the best feasible point.
MutationResult single_action_reroute(const Genotype& parent, const SchedulingProblem& problem,
                                     Rng& rng, const InsertionWeights& weights);

// Number of resamples a swap attempts before giving up.
inline constexpr int kSwapAttempts = 16;

}  // namespace mrplan
