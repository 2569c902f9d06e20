#include "mrplan/pareto.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>

#include "mrplan/errors.hpp"

namespace mrplan {

bool dominates(const Objectives& a, const Objectives& b) {
  return a.makespan <= b.makespan && a.cost <= b.cost &&
         (a.makespan < b.makespan || a.cost < b.cost);
}

std::vector<int> pareto_rank(std::span<const Objectives> points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> dominators(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(points[i], points[j])) {
        dominated[i].push_back(j);
        ++dominators[j];
      } else if (dominates(points[j], points[i])) {
        dominated[j].push_back(i);
        ++dominators[i];
      }
    }
  }

  std::vector<int> rank(n, 0);
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < n; ++i) {
    if (dominators[i] == 0) {
      front.push_back(i);
    }
  }
  for (int r = 1; !front.empty(); ++r) {
    std::vector<std::size_t> next;
    for (std::size_t i : front) {
      rank[i] = r;
      for (std::size_t j : dominated[i]) {
        if (--dominators[j] == 0) {
          next.push_back(j);
        }
      }
    }
    front = std::move(next);
  }
  return rank;
}

std::vector<double> density(std::span<const Objectives> points, std::span<const int> ranks) {
  if (points.size() != ranks.size()) {
    throw ValidationError("density: points and ranks differ in length");
  }
  std::map<int, std::vector<std::size_t>> layers;
  for (std::size_t i = 0; i < points.size(); ++i) {
    layers[ranks[i]].push_back(i);
  }

  std::vector<double> out(points.size(), 0.0);
  for (const auto& [_, members] : layers) {
    if (members.size() == 1) {
      out[members.front()] = kBoundaryDensity;
      continue;
    }
    for (auto value_of : {+[](const Objectives& o) { return o.makespan; },
                          +[](const Objectives& o) { return o.cost; }}) {
      std::vector<std::size_t> order = members;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return value_of(points[a]) < value_of(points[b]);
      });
      const double lo = value_of(points[order.front()]);
      const double hi = value_of(points[order.back()]);
      const double range = hi - lo;
      for (std::size_t k = 0; k < order.size(); ++k) {
        const double v = value_of(points[order[k]]);
        if (v == lo || v == hi) {
          out[order[k]] = kBoundaryDensity;
          continue;
        }
        const double gap = std::min(v - value_of(points[order[k - 1]]),
                                    value_of(points[order[k + 1]]) - v);
        out[order[k]] += gap / range;
      }
    }
  }
  return out;
}

double density(std::span<const Objectives> points, std::size_t index) {
  auto ranks = pareto_rank(points);
  return density(points, ranks).at(index);
}

double fitness(int rank, double density_value) {
  if (rank < 1) {
    throw ValidationError("fitness: rank must be at least 1");
  }
  const double crowd = 0.5 / (1.0 + std::max(0.0, density_value));
  return 1.0 / (static_cast<double>(rank) + crowd);
}

std::vector<ParetoScore> score_population(std::span<const Objectives> points) {
  auto ranks = pareto_rank(points);
  auto dens = density(points, ranks);
  std::vector<ParetoScore> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = {ranks[i], dens[i], fitness(ranks[i], dens[i])};
  }
  return out;
}

std::vector<Objectives> nondominated(std::span<const Objectives> points) {
  std::vector<Objectives> out;
  for (const auto& p : points) {
    bool beaten = std::any_of(points.begin(), points.end(),
                              [&](const Objectives& q) { return dominates(q, p); });
    if (!beaten && std::find(out.begin(), out.end(), p) == out.end()) {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end(), [](const Objectives& a, const Objectives& b) {
    return a.makespan != b.makespan ? a.makespan < b.makespan : a.cost < b.cost;
  });
  return out;
}

bool weakly_covers(std::span<const Objectives> later, std::span<const Objectives> earlier) {
  return std::all_of(earlier.begin(), earlier.end(), [&](const Objectives& e) {
    return std::any_of(later.begin(), later.end(), [&](const Objectives& l) {
      return l.makespan <= e.makespan && l.cost <= e.cost;
    });
  });
}

}  // namespace mrplan
