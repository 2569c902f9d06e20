#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mrplan/decomposition.hpp"
#include "mrplan/errors.hpp"
#include "oracles.hpp"

using namespace mrplan;

namespace {

RobotProfile robot(std::string id, std::map<NodeId, Outcome> outcomes) {
  RobotProfile r;
  r.id = std::move(id);
  r.outcomes = std::move(outcomes);
  return r;
}

std::set<NodeId> as_set(const Alternative& a) { return {a.actions.begin(), a.actions.end()}; }

}  // namespace

TEST_CASE("criteria") {
  CHECK_NOTHROW((Criteria{0.0, 0.5, 0.5}.validate()));
  CHECK_THROWS_AS((Criteria{0.5, 0.5, 0.5}.validate()), ValidationError);
  CHECK_THROWS_AS((Criteria{-0.5, 1.0, 0.5}.validate()), ValidationError);
  Criteria c = Criteria::from_importance(30, 70);
  CHECK(c.alpha == 0.0);
  CHECK(c.beta == doctest::Approx(0.3));
  CHECK(c.gamma == doctest::Approx(0.7));
  CHECK_THROWS_AS(Criteria::from_importance(30, 30), ValidationError);
}

TEST_CASE("mean estimate and score follow their definitions on random inputs") {
  oracle::Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<RobotProfile> robots;
    const std::size_t n = 1 + oracle::pick(rng, 5);
    for (std::size_t r = 0; r < n; ++r) {
      std::map<NodeId, Outcome> outs;
      if (r == 0 || oracle::uniform(rng, 0, 1) < 0.5) {
        outs["x"] = {oracle::uniform(rng, 0, 10), oracle::uniform(rng, 0, 1000), oracle::uniform(rng, 0, 100)};
      }
      robots.push_back(robot("r" + std::to_string(r), outs));
    }
    Outcome got = estimate_action("x", robots);
    Outcome want = *oracle::mean_outcome("x", robots);
    CHECK(std::abs(got.quality - want.quality) <= 1e-12 * std::max(1.0, want.quality));
    CHECK(std::abs(got.duration - want.duration) <= 1e-12 * std::max(1.0, want.duration));
    CHECK(std::abs(got.cost - want.cost) <= 1e-12 * std::max(1.0, want.cost));

    Criteria c = oracle::random_criteria(rng);
    const double s = score(got, c);
    const double ref = oracle::weighted_score(want, c.alpha, c.beta, c.gamma);
    CHECK(std::abs(s - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("estimate of an action nobody performs throws") {
  std::vector<RobotProfile> robots{robot("r", {{"a", {1, 1, 1}}})};
  CHECK_THROWS_AS(estimate_action("b", robots), InfeasibleError);
}

TEST_CASE("two-branch XOR example") {
  // p(XOR) -> {s(AND) -> {a, b}, c}
  MissionTree t({Node::task("p", Qaf::kXor, {"s", "c"}), Node::task("s", Qaf::kAnd, {"a", "b"}),
                 Node::action("a"), Node::action("b"), Node::action("c")},
                "p");
  std::vector<RobotProfile> robots{robot("r0", {{"a", {1, 10, 1}}, {"b", {1, 10, 1}}}),
                                   robot("r1", {{"c", {1, 40, 0}}, {"a", {1, 30, 3}}})};
  DecompositionOptions opt;
  opt.criteria = {0.0, 1.0, 0.0};
  auto alts = generate_alternatives(t, "p", robots, opt);
  REQUIRE(alts.size() == 2);
  // a averages 20 s, so {a, b} costs 30 s against 40 s for c.
  CHECK(alts[0].actions == std::vector<NodeId>{"a", "b"});
  CHECK(alts[0].score == doctest::Approx(-30.0));
  CHECK(alts[0].branches.at("p") == "s");
  CHECK(alts[1].actions == std::vector<NodeId>{"c"});
  CHECK(alts[1].branches.at("p") == "c");

  opt.criteria = {0.0, 0.0, 1.0};
  alts = generate_alternatives(t, "p", robots, opt);
  CHECK(alts[0].actions == std::vector<NodeId>{"c"});
}

TEST_CASE("exhaustive equivalence with brute-force enumeration") {
  oracle::Rng rng(11);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto inst = oracle::random_tree(rng, {12, 0.05, 3});
    Criteria c = oracle::random_criteria(rng);
    auto expected = oracle::brute_force_alternatives(inst, c);
    DecompositionOptions opt;
    opt.criteria = c;
    opt.mu = std::max<std::size_t>(1, oracle::count_alternatives(inst.tree, inst.tree.root()));
    if (expected.empty()) {
      CHECK_THROWS_AS(generate_alternatives(inst.tree, inst.tree.root(), inst.robots, opt), InfeasibleError);
      continue;
    }
    auto got = generate_alternatives(inst.tree, inst.tree.root(), inst.robots, opt);
    REQUIRE(got.size() == expected.size());
    for (const auto& alt : got) {
      auto it = std::find_if(expected.begin(), expected.end(),
                             [&](const oracle::ScoredSet& s) { return s.actions == as_set(alt); });
      REQUIRE(it != expected.end());
      CHECK(std::abs(it->score - alt.score) <= 1e-9);
    }
    CHECK(std::is_sorted(got.begin(), got.end(), ranks_before));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("pruning keeps the best mu of the full enumeration") {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 150; ++trial) {
    auto inst = oracle::random_tree(rng, {12, 0.0, 3});
    Criteria c = oracle::random_criteria(rng);
    auto expected = oracle::brute_force_alternatives(inst, c);
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    const std::size_t mu = 1 + oracle::pick(rng, 6);
    DecompositionOptions opt;
    opt.criteria = c;
    opt.mu = mu;
    auto got = generate_alternatives(inst.tree, inst.tree.root(), inst.robots, opt);
    REQUIRE(got.size() == std::min(mu, expected.size()));
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].score == doctest::Approx(expected[k].score).epsilon(1e-9));
    }
  }
}

TEST_CASE("unservable branches are dropped") {
  MissionTree t({Node::task("p", Qaf::kXor, {"a", "b"}), Node::action("a"), Node::action("b")}, "p");
  std::vector<RobotProfile> robots{robot("r", {{"b", {1, 1, 1}}})};
  auto alts = generate_alternatives(t, "p", robots, {});
  REQUIRE(alts.size() == 1);
  CHECK(alts[0].actions == std::vector<NodeId>{"b"});

  robots = {robot("r", {})};
  CHECK_THROWS_AS(generate_alternatives(t, "p", robots, {}), InfeasibleError);
}

TEST_CASE("hard cap aborts oversized combinations") {
  std::vector<Node> nodes{Node::task("root", Qaf::kAnd, {"x", "y"})};
  std::vector<NodeId> xs, ys;
  std::map<NodeId, Outcome> outs;
  for (int i = 0; i < 40; ++i) {
    xs.push_back("x" + std::to_string(i));
    ys.push_back("y" + std::to_string(i));
  }
  nodes.push_back(Node::task("x", Qaf::kXor, xs));
  nodes.push_back(Node::task("y", Qaf::kXor, ys));
  for (const auto& id : xs) nodes.push_back(Node::action(id)), outs[id] = {1, 1, 1};
  for (const auto& id : ys) nodes.push_back(Node::action(id)), outs[id] = {1, 1, 1};
  MissionTree t(nodes, "root");
  std::vector<RobotProfile> robots{robot("r", outs)};
  DecompositionOptions opt;
  opt.mu = 100;
  opt.hard_cap = 1000;
  CHECK_THROWS_AS(generate_alternatives(t, "root", robots, opt), ResourceCapError);
  opt.hard_cap = 1600;
  CHECK(generate_alternatives(t, "root", robots, opt).size() == 100);
}

TEST_CASE("prune log has one record per task") {
  MissionTree t({Node::task("root", Qaf::kAnd, {"x", "c"}), Node::task("x", Qaf::kXor, {"a", "b"}),
                 Node::action("a"), Node::action("b"), Node::action("c")},
                "root");
  std::vector<RobotProfile> robots{robot("r", {{"a", {1, 1, 1}}, {"b", {1, 2, 2}}, {"c", {1, 1, 1}}})};
  std::vector<PruneRecord> log;
  DecompositionOptions opt;
  opt.mu = 1;
  opt.on_task = [&](const PruneRecord& r) { log.push_back(r); };
  auto alts = generate_alternatives(t, "root", robots, opt);
  REQUIRE(log.size() == 2);
  CHECK(format_prune_record(log[0]) == "node=x candidates=2 kept=1");
  CHECK(format_prune_record(log[1]) == "node=root candidates=1 kept=1");
  CHECK(alts.front().actions == std::vector<NodeId>{"a", "c"});
}

TEST_CASE("select_top_k") {
  std::vector<Alternative> alts(5);
  for (int i = 0; i < 5; ++i) alts[i].score = -i;
  CHECK(select_top_k(alts, 3).size() == 3);
  CHECK(select_top_k(alts, 9).size() == 5);
  CHECK(select_top_k(alts, 3)[2].score == -2);
}
