#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "mrplan/schedule.hpp"

namespace mrplan {

// Both objectives minimized: a dominates b iff a <= b componentwise and
// a < b in at least one component.
bool dominates(const Objectives& a, const Objectives& b);

// Non-dominated sorting; rank 1 is the non-dominated layer.
std::vector<int> pareto_rank(std::span<const Objectives> points);

// Isolation of rank boundary points (and of a lone point).
inline constexpr double kBoundaryDensity = std::numeric_limits<double>::infinity();

// Isolation of every point among peers of the same rank. For each
// objective, peers are sorted by value and the point contributes the gap to
// its nearest neighbor divided by the rank's value range on that objective.
// Points holding the rank's minimum or maximum on any objective (and ranks
// of size one) get kBoundaryDensity. Duplicates therefore score zero
// unless they sit on the boundary. Larger means more isolated.
std::vector<double> density(std::span<const Objectives> points, std::span<const int> ranks);

// density() for a single index, ranks computed internally.
double density(std::span<const Objectives> points, std::size_t index);

// 1 / (rank + 0.5 / (1 + density)). Any rank-r value exceeds every rank-(r+1)
// value; within a rank, larger density gives larger fitness.
double fitness(int rank, double density_value);

struct ParetoScore {
  int rank = 1;
  double density = 0.0;
  double fitness = 0.0;

  friend bool operator==(const ParetoScore&, const ParetoScore&) = default;
};

std::vector<ParetoScore> score_population(std::span<const Objectives> points);

// Non-dominated subset, duplicates collapsed, sorted by makespan.
std::vector<Objectives> nondominated(std::span<const Objectives> points);

// Every point of `earlier` is weakly dominated by some point of `later`.
bool weakly_covers(std::span<const Objectives> later, std::span<const Objectives> earlier);

}  // namespace mrplan
