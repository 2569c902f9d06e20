#include <doctest.h>

#include "mrplan/coalition.hpp"
#include "mrplan/errors.hpp"
#include "oracles.hpp"

using namespace mrplan;

namespace {

SchedulingProblem instance(std::uint64_t seed, std::size_t actions = 10) {
  oracle::Rng rng(seed);
  return oracle::random_problem(rng, {actions, 3, 0.2, 0.6, 0.2, 20.0});
}

CoalitionConfig small_config(std::size_t generations) {
  CoalitionConfig c;
  c.evolution.population = 12;
  c.evolution.generations = generations;
  c.share_period = 5;
  return c;
}

}  // namespace

TEST_CASE("experience merge") {
  OperatorStats local = OperatorStats::uniform();
  OperatorStats remote = OperatorStats::uniform();
  local.at(OperatorId::kBcrc).weight = 0.2;
  remote.at(OperatorId::kBcrc).weight = 0.6;
  local.at(OperatorId::kBcrc).applications = 3;
  remote.at(OperatorId::kBcrc).applications = 4;
  auto m = merge_experience(local, remote, 0.5);
  CHECK(m.at(OperatorId::kBcrc).weight == doctest::Approx(0.4));
  CHECK(m.at(OperatorId::kBcrc).applications == 7);
  CHECK(merge_experience(local, remote, 0.0).at(OperatorId::kBcrc).weight == doctest::Approx(0.2));
  CHECK(merge_experience(local, remote, 1.0).at(OperatorId::kBcrc).weight == doctest::Approx(0.6));
  CHECK_THROWS_AS(merge_experience(local, remote, 1.5), ValidationError);

  const OperatorId two[] = {OperatorId::kBcrc, OperatorId::kReroute};
  CHECK_THROWS_AS(merge_experience(local, OperatorStats::uniform(two), 0.5), ValidationError);
}

TEST_CASE("agent seeds") {
  CHECK(agent_seed(42, 0) == 42);
  CHECK(agent_seed(42, 1) != agent_seed(42, 2));
}

TEST_CASE("config validation") {
  CoalitionConfig c;
  CHECK_NOTHROW(c.validate());
  c.share_period = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.blend = -0.1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("one agent without sharing is the plain engine") {
  auto p = instance(3);
  CoalitionConfig c = small_config(30);
  c.sharing = false;
  c.deterministic = true;
  auto result = run_coalition(p, 1, c, 77);
  EvolutionEngine engine(p, c.evolution, 77);
  engine.run(30);
  REQUIRE(result.agents.size() == 1);
  CHECK(result.agents[0].telemetry == engine.telemetry());
  CHECK(result.agents[0].stats == engine.stats());
  CHECK(result.agents[0].archive == objectives_of(engine.archive()));
  CHECK(result.events.empty());
  CHECK(result.generations == 30);
}

TEST_CASE("threaded and round-robin runs agree") {
  auto p = instance(5, 12);
  CoalitionConfig c = small_config(20);
  auto threaded = run_coalition(p, 3, c, 9);
  c.deterministic = true;
  auto serial = run_coalition(p, 3, c, 9);
  REQUIRE(threaded.agents.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(threaded.agents[i].telemetry == serial.agents[i].telemetry);
    CHECK(threaded.agents[i].archive == serial.agents[i].archive);
  }
  CHECK(threaded.best.genotype == serial.best.genotype);
  CHECK(threaded.events.size() == serial.events.size());
}

TEST_CASE("sharing exchanges both message kinds with every other agent") {
  auto p = instance(6);
  CoalitionConfig c = small_config(10);
  c.deterministic = true;
  auto r = run_coalition(p, 3, c, 1);
  // One exchange after generation 5 (none after the last epoch);
  // 3 senders x 2 receivers x 2 kinds.
  CHECK(r.events.size() == 3 * 2 * 2);
  for (const auto& e : r.events) {
    CHECK(e.sender != e.receiver);
    CHECK((e.kind == "best_solution" || e.kind == "experience"));
  }
  CHECK(oracle::genotype_invariants(p, r.best.genotype));
  CHECK(check_feasible(p, r.best.phenotype).ok());
  for (const auto& ind : r.front) CHECK(oracle::genotype_invariants(p, ind.genotype));
  CHECK(nondominated(objectives_of(r.front)).size() == r.front.size());
}

TEST_CASE("received solutions stay feasible in the receiver") {
  auto p = instance(8);
  AgentNode a(0, p, small_config(0).evolution, 1);
  AgentNode b(1, p, small_config(0).evolution, 2);
  a.run(5);
  for (auto& m : a.broadcast()) b.deliver(std::move(m));
  b.receive(0.5);
  for (const auto& ind : b.engine().population()) {
    CHECK(oracle::genotype_invariants(p, ind.genotype));
  }
  bool found = false;
  for (const auto& ind : b.engine().population()) found = found || ind.genotype == a.engine().best().genotype;
  CHECK(found);
}

TEST_CASE("coalition front covers every agent's archive") {
  auto p = instance(11);
  CoalitionConfig c = small_config(15);
  c.deterministic = true;
  auto r = run_coalition(p, 2, c, 4);
  const auto front = objectives_of(r.front);
  for (const auto& agent : r.agents) CHECK(weakly_covers(front, agent.archive));
}

TEST_CASE("weighted pick") {
  auto p = instance(2, 4);
  Rng rng(1);
  std::vector<Individual> front;
  for (int i = 0; i < 6; ++i) front.push_back(make_individual(p, random_genotype(p, rng)));
  auto u = union_front(front);
  for (std::size_t k = 1; k < u.size(); ++k) {
    CHECK(u[k - 1].phenotype.makespan <= u[k].phenotype.makespan);
  }
  const auto& fast = pick_weighted(u, {1.0, 0.0});
  for (const auto& ind : u) CHECK(fast.phenotype.makespan <= ind.phenotype.makespan);
  const auto& cheap = pick_weighted(u, {0.0, 1.0});
  for (const auto& ind : u) CHECK(cheap.phenotype.total_cost <= ind.phenotype.total_cost);
}

TEST_CASE("stagnation stops the run early") {
  auto p = instance(13, 4);
  CoalitionConfig c = small_config(400);
  c.deterministic = true;
  c.stagnation_window = 10;
  auto r = run_coalition(p, 2, c, 3);
  CHECK(r.stagnated);
  CHECK(r.generations < 400);
}
