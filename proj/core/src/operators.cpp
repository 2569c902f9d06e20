#include "mrplan/operators.hpp"

#include <algorithm>
#include <cmath>

#include "mrplan/errors.hpp"

namespace mrplan {

std::string_view name(OperatorId op) {
  switch (op) {
    case OperatorId::kBcrc: return "bcrc";
    case OperatorId::kIntraSwap: return "intra_swap";
    case OperatorId::kInterSwap: return "inter_swap";
    case OperatorId::kReroute: return "reroute";
  }
  return "unknown";
}

InsertionWeights InsertionWeights::from(const Criteria& criteria) {
  const double total = criteria.beta + criteria.gamma;
  if (!(total > 0.0)) {
    return {};
  }
  return {criteria.beta / total, criteria.gamma / total};
}

namespace {

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Idle-free completion time of every route.
struct RouteClock {
  std::vector<double> end;
  double max_end = 0.0;
};

RouteClock route_clock(const SchedulingProblem& problem, const Genotype& genotype) {
  RouteClock clock;
  clock.end.assign(genotype.routes.size(), 0.0);
  for (RobotIndex r = 0; r < genotype.routes.size(); ++r) {
    ActionIndex prev = kDepot;
    double t = 0.0;
    for (ActionIndex a : genotype.routes[r]) {
      t += problem.leg_time(r, prev, a) + problem.service_duration(r, a);
      prev = a;
    }
    clock.end[r] = t;
    clock.max_end = std::max(clock.max_end, t);
  }
  return clock;
}

InsertionPoint proxy(const SchedulingProblem& problem, const Genotype& genotype,
                     const RouteClock& clock, ActionIndex action, RobotIndex robot,
                     std::size_t position, const InsertionWeights& weights) {
  const auto& route = genotype.routes[robot];
  const ActionIndex prev = position > 0 ? route[position - 1] : kDepot;
  double extra_travel = problem.leg_time(robot, prev, action);
  if (position < route.size()) {
    const ActionIndex next = route[position];
    extra_travel += problem.leg_time(robot, action, next) - problem.leg_time(robot, prev, next);
  }
  const double delta = extra_travel + problem.service_duration(robot, action);
  const double grown = std::max(clock.end[robot] + delta, clock.max_end) - clock.max_end;
  const double cost = problem.service_cost(robot, action) +
                      energy_kj(extra_travel, problem.robot(robot).drive_power);
  return {robot, position, weights.makespan * grown + weights.cost * cost, delta};
}

bool cheaper(const InsertionPoint& a, const InsertionPoint& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.route_delta != b.route_delta) return a.route_delta < b.route_delta;
  if (a.robot != b.robot) return a.robot < b.robot;
  return a.position < b.position;
}

// Happens-before marks relative to an absent action: `before` holds present
// actions that must precede it, `after` those that must follow it, both
// closed under route order and transitive precedence.
struct Reach {
  std::vector<char> before;
  std::vector<char> after;
};

Reach reach(const SchedulingProblem& problem, const Genotype& genotype, ActionIndex action) {
  const std::size_t n = problem.action_count();
  std::vector<RobotIndex> robot_of(n, kDepot);
  std::vector<std::size_t> pos_of(n, 0);
  for (RobotIndex r = 0; r < genotype.routes.size(); ++r) {
    for (std::size_t k = 0; k < genotype.routes[r].size(); ++k) {
      robot_of[genotype.routes[r][k]] = r;
      pos_of[genotype.routes[r][k]] = k;
    }
  }

  Reach out{std::vector<char>(n, 0), std::vector<char>(n, 0)};
  std::vector<ActionIndex> stack;
  auto flood = [&](std::vector<char>& mark, const std::vector<ActionIndex>& seeds, bool backward) {
    for (ActionIndex s : seeds) {
      if (robot_of[s] != kDepot && !mark[s]) {
        mark[s] = 1;
        stack.push_back(s);
      }
    }
    while (!stack.empty()) {
      const ActionIndex a = stack.back();
      stack.pop_back();
      auto visit = [&](ActionIndex b) {
        if (robot_of[b] != kDepot && !mark[b]) {
          mark[b] = 1;
          stack.push_back(b);
        }
      };
      const auto& route = genotype.routes[robot_of[a]];
      if (backward) {
        if (pos_of[a] > 0) visit(route[pos_of[a] - 1]);
        for (ActionIndex b : problem.all_predecessors(a)) visit(b);
      } else {
        if (pos_of[a] + 1 < route.size()) visit(route[pos_of[a] + 1]);
        for (ActionIndex b : problem.all_successors(a)) visit(b);
      }
    }
  };
  flood(out.before, problem.all_predecessors(action), true);
  flood(out.after, problem.all_successors(action), false);
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> window_from(const Reach& marks,
                                                               const std::vector<ActionIndex>& route) {
  std::size_t first = 0;
  std::size_t last = route.size();
  for (std::size_t k = 0; k < route.size(); ++k) {
    if (marks.before[route[k]]) {
      first = k + 1;
    }
  }
  for (std::size_t k = 0; k < route.size(); ++k) {
    if (marks.after[route[k]]) {
      last = k;
      break;
    }
  }
  if (first > last) {
    return std::nullopt;
  }
  return std::pair{first, last};
}

}  // namespace

InsertionPoint insertion_cost(const SchedulingProblem& problem, const Genotype& genotype,
                              ActionIndex action, RobotIndex robot, std::size_t position,
                              const InsertionWeights& weights) {
  return proxy(problem, genotype, route_clock(problem, genotype), action, robot, position, weights);
}

std::optional<std::pair<std::size_t, std::size_t>> insertion_window(
    const SchedulingProblem& problem, const Genotype& genotype, ActionIndex action,
    RobotIndex robot) {
  if (!problem.capable(robot, action)) {
    return std::nullopt;
  }
  return window_from(reach(problem, genotype, action), genotype.routes[robot]);
}

std::optional<InsertionPoint> best_insertion(const SchedulingProblem& problem,
                                             const Genotype& genotype, ActionIndex action,
                                             const InsertionWeights& weights) {
  const Reach marks = reach(problem, genotype, action);
  const RouteClock clock = route_clock(problem, genotype);
  std::optional<InsertionPoint> best;
  for (RobotIndex r : problem.capable_robots(action)) {
    auto window = window_from(marks, genotype.routes[r]);
    if (!window) {
      continue;
    }
    for (std::size_t k = window->first; k <= window->second; ++k) {
      auto candidate = proxy(problem, genotype, clock, action, r, k, weights);
      if (!best || cheaper(candidate, *best)) {
        best = candidate;
      }
    }
  }
  return best;
}

void insert_at(Genotype& genotype, ActionIndex action, RobotIndex robot, std::size_t position) {
  auto& route = genotype.routes.at(robot);
  route.insert(route.begin() + static_cast<std::ptrdiff_t>(position), action);
}

void remove_actions(Genotype& genotype, std::span<const ActionIndex> actions) {
  for (auto& route : genotype.routes) {
    std::erase_if(route, [&](ActionIndex a) {
      return std::find(actions.begin(), actions.end(), a) != actions.end();
    });
  }
}

namespace {

std::vector<ActionIndex> random_topological_order(const SchedulingProblem& problem, Rng& rng) {
  const std::size_t n = problem.action_count();
  std::vector<std::size_t> indeg(n);
  std::vector<ActionIndex> ready;
  for (ActionIndex a = 0; a < n; ++a) {
    indeg[a] = problem.predecessors(a).size();
    if (indeg[a] == 0) {
      ready.push_back(a);
    }
  }
  std::vector<ActionIndex> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t i = pick(rng, ready.size());
    const ActionIndex a = ready[i];
    ready[i] = ready.back();
    ready.pop_back();
    order.push_back(a);
    for (ActionIndex s : problem.successors(a)) {
      if (--indeg[s] == 0) {
        ready.push_back(s);
      }
    }
  }
  return order;
}

}  // namespace

Genotype random_genotype(const SchedulingProblem& problem, Rng& rng) {
  Genotype g;
  g.routes.resize(problem.robot_count());
  for (ActionIndex a : random_topological_order(problem, rng)) {
    const auto& robots = problem.capable_robots(a);
    g.routes[robots[pick(rng, robots.size())]].push_back(a);
  }
  return g;
}

Genotype greedy_genotype(const SchedulingProblem& problem, Rng& rng,
                         const InsertionWeights& weights) {
  Genotype g;
  g.routes.resize(problem.robot_count());
  for (ActionIndex a : random_topological_order(problem, rng)) {
    auto at = best_insertion(problem, g, a, weights);
    if (!at) {
      throw InfeasibleError("no feasible insertion for '" + problem.action_id(a) + "'");
    }
    insert_at(g, a, at->robot, at->position);
  }
  return g;
}

namespace {

std::optional<RobotIndex> random_nonempty_route(const Genotype& g, Rng& rng) {
  std::vector<RobotIndex> candidates;
  for (RobotIndex r = 0; r < g.routes.size(); ++r) {
    if (!g.routes[r].empty()) {
      candidates.push_back(r);
    }
  }
  if (candidates.empty()) {
    return std::nullopt;
  }
  return candidates[pick(rng, candidates.size())];
}

// Re-inserts `removed` into `base` (which must not contain them).
std::optional<Genotype> reinsert(Genotype base, std::vector<ActionIndex> removed,
                                 const SchedulingProblem& problem, Rng& rng,
                                 const InsertionWeights& weights) {
  remove_actions(base, removed);
  std::shuffle(removed.begin(), removed.end(), rng);
  for (ActionIndex a : removed) {
    auto at = best_insertion(problem, base, a, weights);
    if (!at) {
      return std::nullopt;
    }
    insert_at(base, a, at->robot, at->position);
  }
  return base;
}

}  // namespace

CrossoverResult bcrc_crossover(const Genotype& first, const Genotype& second,
                               const SchedulingProblem& problem, Rng& rng,
                               const InsertionWeights& weights) {
  auto r1 = random_nonempty_route(first, rng);
  auto r2 = random_nonempty_route(second, rng);
  if (!r1 || !r2) {
    return {first, second, false};
  }
  auto child_a = reinsert(second, first.routes[*r1], problem, rng, weights);
  auto child_b = reinsert(first, second.routes[*r2], problem, rng, weights);
  if (!child_a || !child_b) {
    return {first, second, false};
  }
  return {std::move(*child_a), std::move(*child_b), true};
}

MutationResult intra_depot_swap(const Genotype& parent, const SchedulingProblem& problem, Rng& rng) {
  std::vector<RobotIndex> candidates;
  for (RobotIndex r = 0; r < parent.routes.size(); ++r) {
    if (parent.routes[r].size() >= 2) {
      candidates.push_back(r);
    }
  }
  if (candidates.empty()) {
    return {parent, false};
  }
  for (int attempt = 0; attempt < kSwapAttempts; ++attempt) {
    const RobotIndex r = candidates[pick(rng, candidates.size())];
    const std::size_t size = parent.routes[r].size();
    const std::size_t i = pick(rng, size);
    std::size_t j = pick(rng, size - 1);
    if (j >= i) {
      ++j;
    }
    Genotype child = parent;
    std::swap(child.routes[r][i], child.routes[r][j]);
    if (try_render(problem, child)) {
      return {std::move(child), true};
    }
  }
  return {parent, false};
}

MutationResult inter_depot_swap(const Genotype& parent, const SchedulingProblem& problem, Rng& rng) {
  const std::size_t m = parent.routes.size();
  if (m < 2) {
    return {parent, false};
  }
  for (int attempt = 0; attempt < kSwapAttempts; ++attempt) {
    auto from = random_nonempty_route(parent, rng);
    if (!from) {
      break;
    }
    RobotIndex to = pick(rng, m - 1);
    if (to >= *from) {
      ++to;
    }
    const auto& src = parent.routes[*from];
    const auto& dst = parent.routes[to];
    const std::size_t i = pick(rng, src.size());
    const ActionIndex a = src[i];
    if (!problem.capable(to, a)) {
      continue;
    }
    Genotype child = parent;
    if (dst.empty()) {
      child.routes[*from].erase(child.routes[*from].begin() + static_cast<std::ptrdiff_t>(i));
      child.routes[to].push_back(a);
    } else {
      const std::size_t j = pick(rng, dst.size());
      const ActionIndex b = dst[j];
      if (!problem.capable(*from, b)) {
        continue;
      }
      child.routes[*from][i] = b;
      child.routes[to][j] = a;
    }
    if (try_render(problem, child)) {
      return {std::move(child), true};
    }
  }
  return {parent, false};
}

MutationResult single_action_reroute(const Genotype& parent, const SchedulingProblem& problem,
                                     Rng& rng, const InsertionWeights& weights) {
  if (problem.action_count() == 0) {
    return {parent, false};
  }
  const ActionIndex a = pick(rng, problem.action_count());
  Genotype child = parent;
  const ActionIndex removed[] = {a};
  remove_actions(child, removed);
  auto at = best_insertion(problem, child, a, weights);
  if (!at) {
    return {parent, false};
  }
  insert_at(child, a, at->robot, at->position);
  return {std::move(child), true};
}

}  // namespace mrplan
