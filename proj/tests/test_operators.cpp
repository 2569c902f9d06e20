#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrplan/operators.hpp"
#include "oracles.hpp"

using namespace mrplan;

namespace {

double travel(const RobotProfile& robot, const Point& from, const Point& to) {
  return std::hypot(from.x - to.x, from.y - to.y) / robot.speed;
}

struct RouteTotals {
  double seconds = 0.0;  // travel plus service, no waiting
  double travel = 0.0;
};

RouteTotals totals(const SchedulingProblem& p, RobotIndex r, const std::vector<ActionIndex>& route) {
  const auto& robot = p.robot(r);
  RouteTotals t;
  Point at = robot.start;
  for (ActionIndex a : route) {
    const double leg = travel(robot, at, p.site(a).location);
    t.travel += leg;
    t.seconds += leg + robot.outcome(p.action_id(a)).duration;
    at = p.site(a).exit();
  }
  return t;
}

// Proxy of inserting `a` at (r, k), recomputed from whole routes.
double oracle_proxy(const SchedulingProblem& p, const Genotype& g, ActionIndex a, RobotIndex r,
                    std::size_t k, const InsertionWeights& w) {
  double max_end = 0.0;
  for (RobotIndex q = 0; q < g.routes.size(); ++q) max_end = std::max(max_end, totals(p, q, g.routes[q]).seconds);
  auto route = g.routes[r];
  route.insert(route.begin() + static_cast<std::ptrdiff_t>(k), a);
  const auto before = totals(p, r, g.routes[r]);
  const auto after = totals(p, r, route);
  const double grown = std::max(after.seconds, max_end) - max_end;
  const double extra = after.travel - before.travel;
  const auto& robot = p.robot(r);
  return w.makespan * grown + w.cost * (robot.outcome(p.action_id(a)).cost + extra * robot.drive_power / 1000.0);
}

Genotype with_inserted(Genotype g, ActionIndex a, RobotIndex r, std::size_t k) {
  g.routes[r].insert(g.routes[r].begin() + static_cast<std::ptrdiff_t>(k), a);
  return g;
}

}  // namespace

TEST_CASE("operator names") {
  CHECK(name(OperatorId::kBcrc) == "bcrc");
  CHECK(name(OperatorId::kIntraSwap) == "intra_swap");
  CHECK(name(OperatorId::kInterSwap) == "inter_swap");
  CHECK(name(OperatorId::kReroute) == "reroute");
}

TEST_CASE("insertion weights come from beta and gamma") {
  auto w = InsertionWeights::from({0.0, 0.3, 0.7});
  CHECK(w.makespan == doctest::Approx(0.3));
  CHECK(w.cost == doctest::Approx(0.7));
  w = InsertionWeights::from({0.4, 0.1, 0.1});
  CHECK(w.makespan == doctest::Approx(0.5));
  w = InsertionWeights::from({1.0, 0.0, 0.0});
  CHECK(w.makespan == 0.5);
  CHECK(w.cost == 0.5);
}

TEST_CASE("insertion window and best insertion match exhaustive search") {
  oracle::Rng rng(17);
  int compared = 0;
  for (int trial = 0; trial < 400; ++trial) {
    oracle::RandomProblemOptions opt;
    opt.actions = 2 + oracle::pick(rng, 12);
    opt.robots = 1 + oracle::pick(rng, 4);
    opt.edge_probability = oracle::uniform(rng, 0.0, 0.4);
    auto p = oracle::random_problem(rng, opt);
    auto g = oracle::random_assignment(rng, p, true);
    const ActionIndex a = oracle::pick(rng, p.action_count());
    const ActionIndex removed[] = {a};
    remove_actions(g, removed);
    const InsertionWeights w{oracle::uniform(rng, 0, 1), oracle::uniform(rng, 0, 1)};

    double best = std::numeric_limits<double>::infinity();
    for (RobotIndex r = 0; r < p.robot_count(); ++r) {
      auto window = insertion_window(p, g, a, r);
      if (!p.robot(r).can_perform(p.action_id(a))) {
        CHECK_FALSE(window.has_value());
        continue;
      }
      std::vector<std::size_t> feasible;
      for (std::size_t k = 0; k <= g.routes[r].size(); ++k) {
        if (!oracle::has_deadlock(p, with_inserted(g, a, r, k))) feasible.push_back(k);
      }
      REQUIRE(window.has_value());
      CHECK(feasible.size() == window->second - window->first + 1);
      CHECK(feasible.front() == window->first);
      CHECK(feasible.back() == window->second);
      for (std::size_t k : feasible) {
        const double want = oracle_proxy(p, g, a, r, k, w);
        CHECK(insertion_cost(p, g, a, r, k, w).cost == doctest::Approx(want).epsilon(1e-9));
        best = std::min(best, want);
      }
    }
    auto got = best_insertion(p, g, a, w);
    REQUIRE(got.has_value());
    CHECK(got->cost <= best + 1e-9);
    CHECK(oracle_proxy(p, g, a, got->robot, got->position, w) <= best + 1e-9);
    CHECK_FALSE(oracle::has_deadlock(p, with_inserted(g, a, got->robot, got->position)));
    ++compared;
  }
  CHECK(compared == 400);
}

TEST_CASE("best insertion breaks ties by route delta, robot and position") {
  // Two identical robots at the origin; the only action sits at the origin too.
  RobotProfile r0, r1;
  r0.id = "r0";
  r1.id = "r1";
  r0.outcomes = {{"a", {1, 2, 1}}};
  r1.outcomes = {{"a", {1, 2, 1}}};
  SchedulingProblem p({r0, r1}, {"a"}, {});
  Genotype empty{{{}, {}}};
  auto at = best_insertion(p, empty, 0, {});
  REQUIRE(at.has_value());
  CHECK(at->robot == 0);
  CHECK(at->position == 0);
  CHECK(at->route_delta == 2.0);
}

TEST_CASE("seeded genotypes satisfy the invariants") {
  oracle::Rng rng(2);
  Rng lib(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = oracle::random_problem(rng, {1 + oracle::pick(rng, 15), 1 + oracle::pick(rng, 4), 0.3, 0.5, 0.2, 20.0});
    CHECK(oracle::genotype_invariants(p, random_genotype(p, lib)));
    CHECK(oracle::genotype_invariants(p, greedy_genotype(p, lib, {})));
  }
}

TEST_CASE("every operator keeps genotypes feasible") {
  oracle::Rng rng(31);
  Rng lib(77);
  std::size_t applied[4] = {};
  std::size_t succeeded[4] = {};
  for (int trial = 0; trial < 150; ++trial) {
    auto p = oracle::random_problem(rng, {2 + oracle::pick(rng, 14), 1 + oracle::pick(rng, 4), 0.25, 0.6, 0.2, 20.0});
    Genotype a = random_genotype(p, lib);
    Genotype b = greedy_genotype(p, lib, {});
    for (int rep = 0; rep < 4; ++rep) {
      auto x = bcrc_crossover(a, b, p, lib, {});
      CHECK(oracle::genotype_invariants(p, x.first));
      CHECK(oracle::genotype_invariants(p, x.second));
      ++applied[0];
      succeeded[0] += x.ok;

      auto m1 = intra_depot_swap(a, p, lib);
      CHECK(oracle::genotype_invariants(p, m1.child));
      ++applied[1];
      succeeded[1] += m1.ok;

      auto m2 = inter_depot_swap(b, p, lib);
      CHECK(oracle::genotype_invariants(p, m2.child));
      ++applied[2];
      succeeded[2] += m2.ok;

      auto m3 = single_action_reroute(a, p, lib, {});
      CHECK(oracle::genotype_invariants(p, m3.child));
      ++applied[3];
      succeeded[3] += m3.ok;

      a = x.first;
      b = m2.child;
      if (m1.ok) a = m1.child;
    }
  }
  for (int k = 0; k < 4; ++k) {
    CHECK(succeeded[k] > applied[k] / 4);
  }
}

TEST_CASE("failed mutations return the parent") {
  RobotProfile r;
  r.id = "r";
  r.outcomes = {{"a", {1, 1, 1}}};
  SchedulingProblem p({r}, {"a"}, {});
  Genotype g{{{0}}};
  Rng lib(1);
  auto m = intra_depot_swap(g, p, lib);
  CHECK_FALSE(m.ok);
  CHECK(m.child == g);
  m = inter_depot_swap(g, p, lib);
  CHECK_FALSE(m.ok);
  CHECK(m.child == g);
}
