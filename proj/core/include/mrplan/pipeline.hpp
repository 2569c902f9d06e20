#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrplan/coalition.hpp"
#include "mrplan/decomposition.hpp"
#include "mrplan/greenhouse.hpp"
#include "mrplan/schedule.hpp"

namespace mrplan {

struct RunConfig {
  Criteria criteria;
  std::size_t mu = 32;
  std::size_t top_k = 3;                 // root alternatives scheduled
  std::size_t hard_cap = 1'000'000;
  std::size_t agents = 2;
  // Population, generations and sharing. The insertion weights are derived
  // from `criteria` when the run starts.
  CoalitionConfig coalition;
  std::uint64_t seed = 1;

  void validate() const;
};

struct AlternativeRun {
  std::size_t index = 0;                 // position in the stage-one ranking
  Alternative alternative;
  SchedulingProblem problem;
  CoalitionResult result;
  double weighted = 0.0;                 // final-pick objective
};

struct PlanResult {
  std::vector<PruneRecord> prune_log;
  std::vector<AlternativeRun> runs;
  std::size_t chosen = 0;
  InsertionWeights weights;

  [[nodiscard]] const AlternativeRun& best() const { return runs.at(chosen); }
};

// Seed of the coalition that schedules alternative `index`.
std::uint64_t alternative_seed(std::uint64_t seed, std::size_t index);

// Validates the mission, generates and ranks root alternatives, schedules
// the best top_k with a coalition each and keeps the one with the smallest
// weighted makespan and cost (weights from beta and gamma). Throws
// ValidationError, InfeasibleError or ResourceCapError.
PlanResult plan(const Mission& mission, const RunConfig& config);

std::string plan_summary(const PlanResult& result, const RunConfig& config);
std::string telemetry_csv(const PlanResult& result);
std::string run_report_json(const PlanResult& result, const RunConfig& config);

// schedule.csv, front.csv, telemetry.csv, report.json, gantt.json and
// summary.txt under `dir` (created if missing).
void write_plan_artifacts(const PlanResult& result, const RunConfig& config, const std::string& dir);

struct PlantBalance {
  std::string plant;
  Branch branch = Branch::kNone;
  // Stage-one score of the stationary branch minus that of the mobile
  // branch; positive favours stationary. Empty when a branch is unservable.
  std::optional<double> margin;
};

struct BenchmarkRow {
  int setup = 0;
  FleetSpec fleet;
  std::size_t actions = 0;
  double makespan = 0.0;
  double cost = 0.0;
  BranchSelection branches;
  std::vector<PlantBalance> balance;
  double seconds = 0.0;
  std::string schedule_csv;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;

  [[nodiscard]] const BenchmarkRow* row(int setup) const;
  // setup 1 makespan / setup 2 makespan and setup 2 cost / setup 1 cost.
  [[nodiscard]] std::optional<double> makespan_ratio() const;
  [[nodiscard]] std::optional<double> cost_ratio() const;
};

// Reference values the two ratios are compared against.
inline constexpr double kReferenceMakespanRatio = 1.57;
inline constexpr double kReferenceCostRatio = 16.0;

// Runs each setup on the greenhouse with the fleet's importance weights
// replacing config.criteria.
BenchmarkReport run_benchmark(const GreenhouseConfig& greenhouse, const std::vector<int>& setups,
                              const RunConfig& config);

std::string benchmark_table(const BenchmarkReport& report);
// benchmark.csv, benchmark.txt and setup<N>_schedule.csv under `dir`.
void write_benchmark_artifacts(const BenchmarkReport& report, const std::string& dir);

}  // namespace mrplan
