#include <doctest.h>

#include <functional>

#include "mrplan/errors.hpp"
#include "mrplan/task_model.hpp"
#include "oracles.hpp"

using namespace mrplan;

namespace {

// mission(AND) -> {p(XOR) -> {s(AND) -> {a, b}, m -> c}, d}
MissionTree small_tree(std::vector<Precedence> precedence = {}) {
  return MissionTree({Node::task("mission", Qaf::kAnd, {"p", "d"}),
                      Node::task("p", Qaf::kXor, {"s", "c"}),
                      Node::task("s", Qaf::kAnd, {"a", "b"}),
                      Node::action("a"), Node::action("b"), Node::action("c"), Node::action("d")},
                     "mission", std::move(precedence));
}

bool cyclic_by_brute_force(const MissionTree& tree) {
  for (const auto& alt : oracle::enumerate_alternatives(tree, tree.root())) {
    auto edges = induced_action_precedence(tree, alt);
    std::map<NodeId, std::vector<NodeId>> succ;
    for (const auto& e : edges) succ[e.before].push_back(e.after);
    std::map<NodeId, int> color;
    std::function<bool(const NodeId&)> visit = [&](const NodeId& n) {
      color[n] = 1;
      for (const auto& m : succ[n]) {
        if (color[m] == 1 || (color[m] == 0 && visit(m))) return true;
      }
      color[n] = 2;
      return false;
    };
    for (const auto& a : alt) {
      if (color[a] == 0 && visit(a)) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("well-formed tree validates") {
  auto report = validate_tree(small_tree({{"s", "d"}}));
  CHECK(report.ok());
  CHECK(report.to_string().empty());
}

TEST_CASE("structural violations are reported") {
  SUBCASE("duplicate id") {
    MissionTree t({Node::task("r", Qaf::kAnd, {"a"}), Node::action("a"), Node::action("a")}, "r");
    CHECK(validate_tree(t).has(ViolationKind::kDuplicateId));
  }
  SUBCASE("missing root") {
    MissionTree t({Node::action("a")}, "r");
    CHECK(validate_tree(t).has(ViolationKind::kMissingRoot));
  }
  SUBCASE("dangling child") {
    MissionTree t({Node::task("r", Qaf::kAnd, {"a", "ghost"}), Node::action("a")}, "r");
    CHECK(validate_tree(t).has(ViolationKind::kDanglingChild));
  }
  SUBCASE("two parents") {
    MissionTree t({Node::task("r", Qaf::kAnd, {"x", "y"}), Node::task("x", Qaf::kAnd, {"a"}),
                   Node::task("y", Qaf::kAnd, {"a"}), Node::action("a")},
                  "r");
    CHECK(validate_tree(t).has(ViolationKind::kMultipleParents));
  }
  SUBCASE("unreachable node") {
    MissionTree t({Node::task("r", Qaf::kAnd, {"a"}), Node::action("a"), Node::action("lost")}, "r");
    CHECK(validate_tree(t).has(ViolationKind::kUnreachable));
  }
  SUBCASE("task without children") {
    MissionTree t({Node::task("r", Qaf::kAnd, {"e"}), Node::task("e", Qaf::kXor, {})}, "r");
    auto report = validate_tree(t);
    CHECK(report.has(ViolationKind::kTaskWithoutChildren));
    CHECK(report.to_string().find("task without children") != std::string::npos);
  }
  SUBCASE("action with children") {
    Node bad = Node::action("a");
    bad.children = {"b"};
    MissionTree t({Node::task("r", Qaf::kAnd, {"a"}), bad, Node::action("b")}, "r");
    CHECK(validate_tree(t).has(ViolationKind::kActionWithChildren));
  }
}

TEST_CASE("precedence checks") {
  SUBCASE("unknown endpoint") {
    CHECK(validate_tree(small_tree({{"a", "zz"}})).has(ViolationKind::kDanglingPrecedence));
  }
  SUBCASE("two-cycle across AND siblings") {
    auto report = validate_tree(small_tree({{"a", "d"}, {"d", "a"}}));
    CHECK(report.has(ViolationKind::kCyclicPrecedence));
    CHECK(report.to_string().find("cyclic precedence") != std::string::npos);
  }
  SUBCASE("cycle through a task endpoint") {
    CHECK(validate_tree(small_tree({{"s", "d"}, {"d", "b"}})).has(ViolationKind::kCyclicPrecedence));
  }
  SUBCASE("cycle across exclusive branches is harmless") {
    // a and c never appear together, so a->d->c->a cannot all be selected.
    CHECK(validate_tree(small_tree({{"a", "d"}, {"d", "c"}, {"c", "a"}})).ok());
  }
  SUBCASE("ancestor precedence makes an action precede itself") {
    CHECK(validate_tree(small_tree({{"s", "a"}})).has(ViolationKind::kCyclicPrecedence));
  }
}

TEST_CASE("cycle detection agrees with per-alternative search on random trees") {
  oracle::Rng rng(7);
  int cyclic = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = oracle::random_tree(rng, {8, 0.0, 1});
    auto actions = inst.tree.actions();
    std::vector<Precedence> prec;
    const std::size_t edges = oracle::pick(rng, 2 * actions.size() + 1);
    for (std::size_t e = 0; e < edges && actions.size() > 1; ++e) {
      NodeId x = actions[oracle::pick(rng, actions.size())];
      NodeId y = actions[oracle::pick(rng, actions.size())];
      if (x != y) prec.push_back({x, y});
    }
    MissionTree tree(inst.tree.nodes(), inst.tree.root(), prec);
    const bool expected = cyclic_by_brute_force(tree);
    cyclic += expected ? 1 : 0;
    CHECK(validate_tree(tree).has(ViolationKind::kCyclicPrecedence) == expected);
  }
  CHECK(cyclic > 10);
}

TEST_CASE("mission validation covers robots") {
  Mission m;
  m.tree = small_tree();
  RobotProfile r;
  r.id = "r0";
  r.outcomes["a"] = {1, 2, 3};
  m.robots = {r, r};
  CHECK(validate_mission(m).has(ViolationKind::kInvalidRobot));

  m.robots = {r};
  m.robots[0].speed = 0.0;
  CHECK(validate_mission(m).has(ViolationKind::kInvalidRobot));

  m.robots[0].speed = 1.0;
  m.robots[0].outcomes["s"] = {1, 1, 1};
  CHECK(validate_mission(m).has(ViolationKind::kInvalidRobot));

  m.robots[0].outcomes.erase("s");
  m.robots[0].outcomes["a"] = {1, -2, 3};
  CHECK(validate_mission(m).has(ViolationKind::kInvalidRobot));

  m.robots[0].outcomes["a"] = {1, 2, 3};
  CHECK(validate_mission(m).ok());
}

TEST_CASE("robots_for_action") {
  MissionTree t = small_tree();
  RobotProfile r0, r1;
  r0.id = "r0";
  r1.id = "r1";
  r0.outcomes["a"] = {1, 1, 1};
  r1.outcomes["a"] = {1, 1, 1};
  r1.outcomes["c"] = {1, 1, 1};
  std::vector<RobotProfile> robots{r0, r1};
  CHECK(robots_for_action(t, "a", robots) == std::vector<RobotId>{"r0", "r1"});
  CHECK(robots_for_action(t, "c", robots) == std::vector<RobotId>{"r1"});
  CHECK(robots_for_action(t, "d", robots).empty());
  CHECK_THROWS_AS((void)robots_for_action(t, "s", robots), ValidationError);
}

TEST_CASE("quality accumulation") {
  MissionTree t = small_tree();
  std::map<NodeId, Outcome> outcomes{{"a", {1, 2, 3}}, {"b", {4, 5, 6}}, {"s", {5, 7, 9}}, {"c", {2, 1, 1}}};

  SUBCASE("AND sums every child") {
    Outcome o = accumulate_outcome(t, "s", outcomes, {"a", "b"});
    CHECK(o == Outcome{5, 7, 9});
    CHECK(accomplished(o));
    CHECK_THROWS_AS(accumulate_outcome(t, "s", outcomes, {"a"}), ValidationError);
  }
  SUBCASE("XOR passes the chosen child through") {
    CHECK(accumulate_outcome(t, "p", outcomes, {"c"}) == Outcome{2, 1, 1});
    CHECK(accumulate_outcome(t, "p", outcomes, {"s"}) == Outcome{5, 7, 9});
    CHECK_THROWS_AS(accumulate_outcome(t, "p", outcomes, {"s", "c"}), ValidationError);
    CHECK_THROWS_AS(accumulate_outcome(t, "p", outcomes, {}), ValidationError);
  }
  SUBCASE("zero quality is not accomplished") {
    CHECK_FALSE(accomplished(Outcome{0, 1, 1}));
  }
}

TEST_CASE("induced action precedence") {
  MissionTree t = small_tree({{"s", "d"}, {"c", "d"}});
  auto with_s = induced_action_precedence(t, {"a", "b", "d"});
  CHECK(with_s == std::set<Precedence>{{"a", "d"}, {"b", "d"}});
  auto with_c = induced_action_precedence(t, {"c", "d"});
  CHECK(with_c == std::set<Precedence>{{"c", "d"}});
  CHECK(induced_action_precedence(t, {"a", "b"}).empty());
}
