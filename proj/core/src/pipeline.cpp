#include "mrplan/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "mrplan/errors.hpp"
#include "mrplan/mission_io.hpp"
#include "mrplan/schedule_io.hpp"

namespace mrplan {

namespace {

using nlohmann::ordered_json;

double weighted_objective(const InsertionWeights& w, const Phenotype& p) {
  return w.makespan * p.makespan + w.cost * p.total_cost;
}

std::string agent_label(std::size_t alternative, std::size_t agent) {
  return "alt" + std::to_string(alternative) + ".agent" + std::to_string(agent);
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
  }
}

}  // namespace

void RunConfig::validate() const {
  criteria.validate();
  if (mu == 0) {
    throw ValidationError("mu must be positive");
  }
  if (top_k == 0) {
    throw ValidationError("top-k must be positive");
  }
  if (agents == 0) {
    throw ValidationError("at least one agent is required");
  }
  coalition.validate();
}

std::uint64_t alternative_seed(std::uint64_t seed, std::size_t index) {
  return seed + static_cast<std::uint64_t>(index) * 0xD1B54A32D192ED03ULL;
}

PlanResult plan(const Mission& mission, const RunConfig& config) {
  config.validate();
  ValidationReport report = validate_mission(mission);
  if (!report.ok()) {
    throw ValidationError(report.to_string());
  }

  PlanResult result;
  result.weights = InsertionWeights::from(config.criteria);

  DecompositionOptions options;
  options.criteria = config.criteria;
  options.mu = config.mu;
  options.hard_cap = config.hard_cap;
  options.on_task = [&](const PruneRecord& r) { result.prune_log.push_back(r); };
  auto alternatives = generate_alternatives(mission.tree, mission.tree.root(), mission.robots, options);
  auto top = select_top_k(alternatives, config.top_k);

  CoalitionConfig coalition = config.coalition;
  coalition.evolution.weights = result.weights;
  for (std::size_t j = 0; j < top.size(); ++j) {
    SchedulingProblem problem = SchedulingProblem::from_mission(mission, top[j].actions);
    CoalitionResult run = run_coalition(problem, config.agents, coalition, alternative_seed(config.seed, j));
    const double weighted = weighted_objective(result.weights, run.best.phenotype);
    result.runs.push_back({j, std::move(top[j]), std::move(problem), std::move(run), weighted});
  }
  for (std::size_t j = 1; j < result.runs.size(); ++j) {
    if (result.runs[j].weighted < result.runs[result.chosen].weighted) {
      result.chosen = j;
    }
  }
  return result;
}

std::string plan_summary(const PlanResult& result, const RunConfig& config) {
  std::ostringstream os;
  const auto& best = result.best();
  os << "criteria: alpha=" << format_fixed(config.criteria.alpha) << " beta=" << format_fixed(config.criteria.beta)
     << " gamma=" << format_fixed(config.criteria.gamma) << '\n';
  os << "mu=" << config.mu << " top_k=" << config.top_k << " agents=" << config.agents
     << " population=" << config.coalition.evolution.population
     << " generations=" << config.coalition.evolution.generations << " seed=" << config.seed << '\n';
  os << "alternatives scheduled: " << result.runs.size() << '\n';
  for (const auto& run : result.runs) {
    os << "  alt " << run.index << ": score=" << format_fixed(run.alternative.score)
       << " actions=" << run.alternative.actions.size()
       << " makespan_s=" << format_fixed(run.result.best.phenotype.makespan)
       << " total_cost=" << format_fixed(run.result.best.phenotype.total_cost)
       << " front=" << run.result.front.size() << " generations=" << run.result.generations
       << (run.index == best.index ? "  <- selected" : "") << '\n';
  }
  const Phenotype& p = best.result.best.phenotype;
  os << "selected schedule: makespan_s=" << format_fixed(p.makespan) << " total_cost=" << format_fixed(p.total_cost)
     << " (service " << format_fixed(p.service_cost) << ", travel " << format_fixed(p.travel_cost) << ")\n";
  for (RobotIndex r = 0; r < p.schedules.size(); ++r) {
    const auto& s = p.schedules[r];
    os << "  " << best.problem.robot(r).id << ": " << s.size() << " actions";
    if (!s.empty()) {
      os << ", busy until " << format_fixed(s.back().finish) << " s";
    }
    os << '\n';
  }
  return os.str();
}

std::string telemetry_csv(const PlanResult& result) {
  std::ostringstream os;
  const auto& first = result.runs.front().result.agents.front().stats;
  std::vector<OperatorId> ops;
  for (const auto& r : first.records) {
    ops.push_back(r.op);
  }
  os << telemetry_csv_header(ops) << '\n';
  for (const auto& run : result.runs) {
    for (const auto& agent : run.result.agents) {
      for (const auto& rec : agent.telemetry) {
        os << telemetry_csv_row(agent_label(run.index, agent.agent_id), rec) << '\n';
      }
    }
  }
  return os.str();
}

std::string run_report_json(const PlanResult& result, const RunConfig& config) {
  ordered_json doc;
  doc["criteria"] = {{"alpha", config.criteria.alpha}, {"beta", config.criteria.beta},
                     {"gamma", config.criteria.gamma}};
  doc["parameters"] = {{"mu", config.mu},
                       {"top_k", config.top_k},
                       {"agents", config.agents},
                       {"population", config.coalition.evolution.population},
                       {"generations", config.coalition.evolution.generations},
                       {"share_period", config.coalition.share_period},
                       {"blend", config.coalition.blend},
                       {"sharing", config.coalition.sharing},
                       {"deterministic", config.coalition.deterministic},
                       {"seed", config.seed}};
  doc["prune_log"] = ordered_json::array();
  for (const auto& r : result.prune_log) {
    doc["prune_log"].push_back({{"node", r.task}, {"candidates", r.candidates}, {"kept", r.kept}});
  }
  doc["alternatives"] = ordered_json::array();
  for (const auto& run : result.runs) {
    ordered_json alt;
    alt["index"] = run.index;
    alt["score"] = run.alternative.score;
    alt["actions"] = run.alternative.actions;
    alt["branches"] = run.alternative.branches;
    alt["seed"] = alternative_seed(config.seed, run.index);
    alt["makespan_s"] = run.result.best.phenotype.makespan;
    alt["total_cost"] = run.result.best.phenotype.total_cost;
    alt["weighted"] = run.weighted;
    alt["generations"] = run.result.generations;
    alt["stagnated"] = run.result.stagnated;
    alt["front"] = ordered_json::array();
    for (const auto& ind : run.result.front) {
      alt["front"].push_back({{"makespan_s", ind.phenotype.makespan}, {"total_cost", ind.phenotype.total_cost}});
    }
    alt["agents"] = ordered_json::array();
    for (const auto& agent : run.result.agents) {
      ordered_json a;
      a["id"] = agent.agent_id;
      a["seed"] = agent.seed;
      a["archive_size"] = agent.archive.size();
      a["operators"] = ordered_json::array();
      for (const auto& r : agent.stats.records) {
        a["operators"].push_back({{"name", std::string(name(r.op))},
                                  {"weight", r.weight},
                                  {"applications", r.applications},
                                  {"successes", r.successes},
                                  {"mean_reward", r.mean_reward}});
      }
      alt["agents"].push_back(std::move(a));
    }
    alt["share_events"] = ordered_json::array();
    for (const auto& e : run.result.events) {
      alt["share_events"].push_back({{"generation", e.generation},
                                     {"sender", e.sender},
                                     {"receiver", e.receiver},
                                     {"kind", std::string(e.kind)}});
    }
    doc["alternatives"].push_back(std::move(alt));
  }
  doc["selected"] = result.best().index;
  const auto& best = result.best();
  doc["schedule"] = ordered_json::parse(schedule_json(best.problem, best.result.best.phenotype));
  return doc.dump(2) + "\n";
}

void write_plan_artifacts(const PlanResult& result, const RunConfig& config, const std::string& dir) {
  ensure_dir(dir);
  const auto& best = result.best();
  std::vector<Objectives> front = objectives_of(best.result.front);
  save_text(join_path(dir, "schedule.csv"), schedule_csv(best.problem, best.result.best.phenotype));
  save_text(join_path(dir, "front.csv"), front_csv(front));
  save_text(join_path(dir, "telemetry.csv"), telemetry_csv(result));
  save_text(join_path(dir, "report.json"), run_report_json(result, config));
  save_text(join_path(dir, "gantt.json"), schedule_json(best.problem, best.result.best.phenotype));
  save_text(join_path(dir, "summary.txt"), plan_summary(result, config));
}

const BenchmarkRow* BenchmarkReport::row(int setup) const {
  for (const auto& r : rows) {
    if (r.setup == setup) return &r;
  }
  return nullptr;
}

std::optional<double> BenchmarkReport::makespan_ratio() const {
  const auto* one = row(1);
  const auto* two = row(2);
  if (!one || !two || two->makespan <= 0.0) return std::nullopt;
  return one->makespan / two->makespan;
}

std::optional<double> BenchmarkReport::cost_ratio() const {
  const auto* one = row(1);
  const auto* two = row(2);
  if (!one || !two || one->cost <= 0.0) return std::nullopt;
  return two->cost / one->cost;
}

namespace {

std::optional<double> branch_score(const TreeFragment& f, RobotRole role, const Mission& mission,
                                   const Criteria& criteria) {
  Outcome total;
  for (const auto& [id, spec] : f.actions) {
    if ((spec.role == RobotRole::kMobile) != (role == RobotRole::kMobile)) continue;
    try {
      total += estimate_action(id, mission.robots);
    } catch (const InfeasibleError&) {
      return std::nullopt;
    }
  }
  return score(total, criteria);
}

}  // namespace

BenchmarkReport run_benchmark(const GreenhouseConfig& greenhouse, const std::vector<int>& setups,
                              const RunConfig& config) {
  BenchmarkReport report;
  for (int setup : setups) {
    const FleetSpec fleet = setup_fleet(setup);
    const Mission mission = build_mission(greenhouse, fleet);
    RunConfig cfg = config;
    cfg.criteria = fleet.criteria();

    const auto started = std::chrono::steady_clock::now();
    PlanResult result = plan(mission, cfg);
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const auto& best = result.best();
    BenchmarkRow row;
    row.setup = setup;
    row.fleet = fleet;
    row.actions = best.alternative.actions.size();
    row.makespan = best.result.best.phenotype.makespan;
    row.cost = best.result.best.phenotype.total_cost;
    row.branches = classify_branches(greenhouse, best.alternative.actions);
    row.seconds = elapsed;
    row.schedule_csv = schedule_csv(best.problem, best.result.best.phenotype);
    for (const auto& plant : greenhouse.plants()) {
      TreeFragment f = build_plant_tree(plant, greenhouse.batches.at(plant), greenhouse);
      PlantBalance b;
      b.plant = plant;
      b.branch = row.branches.plants.at(plant);
      auto stationary = branch_score(f, RobotRole::kStationary, mission, cfg.criteria);
      auto mobile = branch_score(f, RobotRole::kMobile, mission, cfg.criteria);
      if (stationary && mobile) {
        b.margin = *stationary - *mobile;
      }
      row.balance.push_back(b);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string benchmark_table(const BenchmarkReport& report) {
  std::ostringstream os;
  os << "setup,mobile,stationary,ugv,makespan_importance,cost_importance,actions,makespan_s,total_cost,"
        "stationary_plants,mobile_plants,seconds\n";
  for (const auto& r : report.rows) {
    os << r.setup << ',' << r.fleet.mobile << ',' << r.fleet.stationary << ',' << r.fleet.ugv << ','
       << format_fixed(r.fleet.makespan_importance) << ',' << format_fixed(r.fleet.cost_importance) << ','
       << r.actions << ',' << format_fixed(r.makespan) << ',' << format_fixed(r.cost) << ','
       << r.branches.stationary << ',' << r.branches.mobile << ',' << format_fixed(r.seconds) << '\n';
  }
  os << '\n';
  if (auto m = report.makespan_ratio()) {
    os << "makespan ratio setup1/setup2: " << format_fixed(*m) << " (reference " << format_fixed(kReferenceMakespanRatio)
       << ")\n";
  }
  if (auto c = report.cost_ratio()) {
    os << "cost ratio setup2/setup1: " << format_fixed(*c) << " (reference " << format_fixed(kReferenceCostRatio)
       << ")\n";
  }
  for (const auto& r : report.rows) {
    os << "setup " << r.setup << " branches: stationary=" << r.branches.stationary
       << " mobile=" << r.branches.mobile << '\n';
    if (r.setup != 4) continue;
    os << "setup 4 balance (stationary score minus mobile score per plant):\n";
    for (const auto& b : r.balance) {
      os << "  " << b.plant << ' ' << to_string(b.branch) << ' '
         << (b.margin ? format_fixed(*b.margin) : std::string("n/a")) << '\n';
    }
  }
  return os.str();
}

void write_benchmark_artifacts(const BenchmarkReport& report, const std::string& dir) {
  ensure_dir(dir);
  const std::string table = benchmark_table(report);
  save_text(join_path(dir, "benchmark.txt"), table);
  save_text(join_path(dir, "benchmark.csv"), table.substr(0, table.find("\n\n") + 1));
  for (const auto& r : report.rows) {
    save_text(join_path(dir, "setup" + std::to_string(r.setup) + "_schedule.csv"), r.schedule_csv);
  }
}

}  // namespace mrplan
