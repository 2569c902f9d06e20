#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mrplan/errors.hpp"
#include "mrplan/mission_io.hpp"
#include "mrplan/pipeline.hpp"
#include "mrplan/schedule_io.hpp"
#include "oracles.hpp"

using namespace mrplan;

namespace {

GreenhouseConfig plants(std::size_t n) {
  GreenhouseConfig c = GreenhouseConfig::defaults();
  auto ids = c.plants();
  for (std::size_t k = n; k < ids.size(); ++k) {
    c.counts.erase(ids[k]);
    c.batches.erase(ids[k]);
  }
  return c;
}

RunConfig quick(Criteria criteria) {
  RunConfig r;
  r.criteria = criteria;
  r.agents = 2;
  r.coalition.evolution.population = 8;
  r.coalition.evolution.generations = 10;
  r.coalition.share_period = 5;
  r.coalition.deterministic = true;
  return r;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("mission JSON round trip") {
  Mission m = build_mission(plants(3), setup_fleet(4));
  const std::string text = mission_to_json(m);
  Mission back = parse_mission(text);
  CHECK(mission_to_json(back) == text);
  CHECK(back.tree.root() == "mission");
  CHECK(back.robots.size() == 3);
  CHECK(back.sites == m.sites);
  CHECK(validate_mission(back).ok());

  CHECK_THROWS_AS(parse_mission("{"), ValidationError);
  CHECK_THROWS_AS(parse_mission(R"({"root": "x"})"), ValidationError);
  CHECK_THROWS_AS(load_mission("/nonexistent/mission.json"), ValidationError);
}

TEST_CASE("run config validation") {
  RunConfig r;
  CHECK_NOTHROW(r.validate());
  r.top_k = 0;
  CHECK_THROWS_AS(r.validate(), ValidationError);
  r = {};
  r.criteria = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(r.validate(), ValidationError);
  CHECK(alternative_seed(5, 0) == 5);
  CHECK(alternative_seed(5, 1) != alternative_seed(5, 2));
}

TEST_CASE("a single action plans trivially") {
  Mission m;
  m.tree = MissionTree({Node::action("a")}, "a");
  RobotProfile r;
  r.id = "r0";
  r.outcomes["a"] = {1, 4, 2};
  m.robots = {r};
  m.sites["a"] = {{3, 4}, std::nullopt};
  auto result = plan(m, quick({0, 0.5, 0.5}));
  REQUIRE(result.runs.size() == 1);
  CHECK(result.best().result.best.phenotype.makespan == doctest::Approx(9.0));
}

TEST_CASE("one plant follows the criteria") {
  const auto c = plants(1);
  Mission m = build_mission(c, setup_fleet(4));
  auto cheap = plan(m, quick({0, 0, 1}));
  CHECK(classify_branches(c, cheap.best().alternative.actions).stationary == 1);
  auto fast = plan(m, quick({0, 1, 0}));
  CHECK(classify_branches(c, fast.best().alternative.actions).mobile == 1);
  CHECK(fast.best().result.best.phenotype.makespan < cheap.best().result.best.phenotype.makespan);
  CHECK(cheap.best().result.best.phenotype.total_cost < fast.best().result.best.phenotype.total_cost);
}

TEST_CASE("a serialized mission plans like the in-memory one") {
  const auto c = plants(4);
  Mission m = build_mission(c, setup_fleet(4));
  auto config = quick(setup_fleet(4).criteria());
  auto direct = plan(m, config);
  auto reparsed = plan(parse_mission(mission_to_json(m)), config);
  const auto& a = direct.best();
  const auto& b = reparsed.best();
  CHECK(schedule_csv(a.problem, a.result.best.phenotype) == schedule_csv(b.problem, b.result.best.phenotype));
  CHECK(direct.chosen == reparsed.chosen);
}

TEST_CASE("artifacts are written and the schedule reloads feasibly") {
  const auto c = plants(3);
  Mission m = build_mission(c, setup_fleet(4));
  auto config = quick(setup_fleet(4).criteria());
  auto result = plan(m, config);
  CHECK(result.prune_log.size() > 0);
  CHECK(result.runs.size() == std::min<std::size_t>(config.top_k, 8));
  for (std::size_t j = 0; j < result.runs.size(); ++j) {
    CHECK(result.best().weighted <= result.runs[j].weighted);
  }

  const auto dir = std::filesystem::temp_directory_path() / "mrplan_pipeline_test";
  std::filesystem::remove_all(dir);
  write_plan_artifacts(result, config, dir.string());
  for (const char* f : {"schedule.csv", "front.csv", "telemetry.csv", "report.json", "gantt.json", "summary.txt"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::istringstream in(read_file(dir / "schedule.csv"));
  Phenotype back = read_schedule_csv(in, result.best().problem);
  CHECK(check_feasible(result.best().problem, back, 1e-5).ok());

  const std::string telemetry = read_file(dir / "telemetry.csv");
  CHECK(telemetry.rfind("agent,generation,", 0) == 0);
  CHECK(telemetry.find("alt0.agent1,") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("benchmark report") {
  auto config = quick({0, 0.5, 0.5});
  config.top_k = 1;
  auto report = run_benchmark(plants(4), {1, 2}, config);
  REQUIRE(report.rows.size() == 2);
  REQUIRE(report.row(1) != nullptr);
  CHECK(report.row(3) == nullptr);
  CHECK(report.row(1)->branches.stationary == 4);
  CHECK(report.row(2)->branches.mobile == 4);
  REQUIRE(report.makespan_ratio().has_value());
  CHECK(*report.makespan_ratio() == doctest::Approx(report.row(1)->makespan / report.row(2)->makespan));
  CHECK(*report.cost_ratio() == doctest::Approx(report.row(2)->cost / report.row(1)->cost));
  const std::string table = benchmark_table(report);
  CHECK(table.rfind("setup,mobile,stationary,ugv,", 0) == 0);
  CHECK(table.find("(reference 1.570000)") != std::string::npos);
  CHECK(table.find("(reference 16.000000)") != std::string::npos);
}
