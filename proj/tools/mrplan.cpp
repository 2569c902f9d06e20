// mrplan: two-stage mission planner for heterogeneous robot teams.
//
//   mrplan plan --mission M.json --out DIR [--seed S] [--deterministic] ...
//   mrplan scenario --setup N --out M.json [--config greenhouse.json]
//   mrplan benchmark --setups 1,2,3,4,5 --seed S --out DIR
//
// Exit codes: 0 success, 2 invalid input, 3 infeasible mission, 4 resource cap.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrplan/errors.hpp"
#include "mrplan/greenhouse.hpp"
#include "mrplan/mission_io.hpp"
#include "mrplan/pipeline.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitResourceCap = 4;

struct SearchFlags {
  std::size_t mu = 32;
  std::size_t top_k = 3;
  std::size_t population = 64;
  std::size_t generations = 500;
  std::size_t agents = 2;
  std::size_t share_period = 10;
  double blend = 0.5;
  bool no_sharing = false;
  std::size_t stagnation = 0;
  std::uint64_t seed = 1;
  bool deterministic = false;

  void add_to(CLI::App& app) {
    app.add_option("--mu", mu, "alternatives kept per task")->capture_default_str();
    app.add_option("--top-k", top_k, "root alternatives to schedule")->capture_default_str();
    app.add_option("--pop", population, "population size per agent")->capture_default_str();
    app.add_option("--gens", generations, "generations per agent")->capture_default_str();
    app.add_option("--agents", agents, "coalition agents")->capture_default_str();
    app.add_option("--share-period", share_period, "generations between exchanges")->capture_default_str();
    app.add_option("--blend", blend, "weight of received operator statistics")->capture_default_str();
    app.add_flag("--no-sharing", no_sharing, "agents never exchange solutions or statistics");
    app.add_option("--stagnation", stagnation, "stop after this many generations without progress (0: never)")
        ->capture_default_str();
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_flag("--deterministic", deterministic, "run agents round-robin on one thread");
  }

  [[nodiscard]] mrplan::RunConfig config() const {
    mrplan::RunConfig c;
    c.mu = mu;
    c.top_k = top_k;
    c.agents = agents;
    c.seed = seed;
    c.coalition.evolution.population = population;
    c.coalition.evolution.generations = generations;
    c.coalition.share_period = share_period;
    c.coalition.blend = blend;
    c.coalition.sharing = !no_sharing;
    c.coalition.stagnation_window = stagnation;
    c.coalition.deterministic = deterministic;
    return c;
  }
};

mrplan::GreenhouseConfig greenhouse_config(const std::string& path) {
  return path.empty() ? mrplan::GreenhouseConfig::defaults()
                      : mrplan::config_from_json(mrplan::load_text(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage mission planner for heterogeneous robot teams"};
  app.require_subcommand(1);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "decompose, allocate and schedule a mission file");
  std::string mission_path;
  std::string plan_out;
  mrplan::Criteria criteria;
  SearchFlags plan_flags;
  plan_cmd->add_option("--mission", mission_path, "mission JSON file")->required();
  plan_cmd->add_option("--alpha", criteria.alpha, "quality weight")->capture_default_str();
  plan_cmd->add_option("--beta", criteria.beta, "duration / makespan weight")->capture_default_str();
  plan_cmd->add_option("--gamma", criteria.gamma, "cost weight")->capture_default_str();
  plan_cmd->add_option("--out", plan_out, "output directory")->required();
  plan_flags.add_to(*plan_cmd);

  // scenario
  auto* scenario_cmd = app.add_subcommand("scenario", "write a greenhouse mission file");
  int setup = 0;
  std::string scenario_out;
  std::string scenario_config;
  std::string config_out;
  scenario_cmd->add_option("--setup", setup, "fleet setup 1-5")->required();
  scenario_cmd->add_option("--config", scenario_config, "greenhouse config JSON");
  scenario_cmd->add_option("--out", scenario_out, "mission file to write")->required();
  scenario_cmd->add_option("--config-out", config_out, "also write the effective greenhouse config");

  // benchmark
  auto* bench_cmd = app.add_subcommand("benchmark", "run the greenhouse setups and compare them");
  std::vector<int> setups{1, 2, 3, 4, 5};
  std::string bench_out;
  std::string bench_config;
  SearchFlags bench_flags;
  bench_flags.top_k = 1;
  bench_cmd->add_option("--setups", setups, "comma-separated setups")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--config", bench_config, "greenhouse config JSON");
  bench_cmd->add_option("--out", bench_out, "output directory")->required();
  bench_flags.add_to(*bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*plan_cmd) {
      mrplan::RunConfig config = plan_flags.config();
      config.criteria = criteria;
      const mrplan::Mission mission = mrplan::load_mission(mission_path);
      const mrplan::PlanResult result = mrplan::plan(mission, config);
      mrplan::write_plan_artifacts(result, config, plan_out);
      std::cout << mrplan::plan_summary(result, config);
    } else if (*scenario_cmd) {
      const mrplan::GreenhouseConfig gh = greenhouse_config(scenario_config);
      const mrplan::Mission mission = mrplan::build_mission(gh, mrplan::setup_fleet(setup));
      mrplan::save_text(scenario_out, mrplan::mission_to_json(mission));
      if (!config_out.empty()) {
        mrplan::save_text(config_out, mrplan::config_to_json(gh) + "\n");
      }
      std::cout << "wrote " << scenario_out << " (" << mission.tree.actions().size() << " actions, "
                << mission.robots.size() << " robots)\n";
    } else if (*bench_cmd) {
      const mrplan::GreenhouseConfig gh = greenhouse_config(bench_config);
      const mrplan::BenchmarkReport report = mrplan::run_benchmark(gh, setups, bench_flags.config());
      mrplan::write_benchmark_artifacts(report, bench_out);
      std::cout << mrplan::benchmark_table(report);
    }
  } catch (const mrplan::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const mrplan::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const mrplan::ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return kExitResourceCap;
  }
  return 0;
}
