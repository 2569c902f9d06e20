#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mrplan/operators.hpp"
#include "mrplan/pareto.hpp"
#include "mrplan/schedule.hpp"

namespace mrplan {

struct OperatorRecord {
  OperatorId op = OperatorId::kBcrc;
  std::size_t applications = 0;
  std::size_t successes = 0;  // child fitness above parent fitness
  double mean_reward = 0.0;
  double weight = 1.0;

  friend bool operator==(const OperatorRecord&, const OperatorRecord&) = default;
};

// Reward memory of the adaptive operator choice.
struct OperatorStats {
  std::vector<OperatorRecord> records;

  // Weight 1 for each listed operator.
  static OperatorStats uniform(std::span<const OperatorId> ops = kAllOperators);

  [[nodiscard]] OperatorRecord& at(OperatorId op);
  [[nodiscard]] const OperatorRecord& at(OperatorId op) const;
  [[nodiscard]] std::vector<double> weights() const;

  friend bool operator==(const OperatorStats&, const OperatorStats&) = default;
};

// Smallest weight an operator can decay to.
inline constexpr double kMinOperatorWeight = 1e-9;

// p_i = floor + (1 - n*floor) * w_i / sum(w). Requires n*floor <= 1.
std::vector<double> selection_probabilities(const OperatorStats& stats, double floor);

OperatorId select_operator(const OperatorStats& stats, Rng& rng, double floor);

// reward = max(0, child - parent); weight <- (1 - rate) * weight + rate * reward,
// clamped to kMinOperatorWeight.
OperatorStats update_reward(OperatorStats stats, OperatorId op, double parent_fitness,
                            double child_fitness, double learning_rate);

struct Individual {
  Genotype genotype;
  Phenotype phenotype;
  ParetoScore score;

  [[nodiscard]] Objectives objectives() const { return mrplan::objectives(phenotype); }
};

using Population = std::vector<Individual>;

struct EvolutionConfig {
  std::size_t population = 64;
  std::size_t generations = 500;
  double learning_rate = 0.2;
  double floor = 0.05;
  // Share of the initial population built by greedy best insertion; the
  // rest is random.
  double greedy_fraction = 0.25;
  InsertionWeights weights;
  std::vector<OperatorId> operators{kAllOperators.begin(), kAllOperators.end()};

  // Throws ValidationError.
  void validate() const;
};

Individual make_individual(const SchedulingProblem& problem, Genotype genotype);

// Recomputes every member's ParetoScore within the population.
void rescore(Population& population);

Population initial_population(const SchedulingProblem& problem, const EvolutionConfig& config,
                              Rng& rng);

struct StepReport {
  std::size_t offspring = 0;
  std::size_t failures = 0;  // operator applications that returned the parent
};

// One generation: binary-tournament parents, adaptively chosen operators,
// double-rank scoring of parents and offspring together, operator rewards,
// and truncation back to the population size by fitness (distinct
// objective vectors first). The fittest individual always survives.
StepReport evolve_step(Population& population, const SchedulingProblem& problem,
                       OperatorStats& stats, Rng& rng, const EvolutionConfig& config);

// Adds the non-dominated newcomers and drops members they dominate. Keeps
// one individual per objective vector.
void update_archive(std::vector<Individual>& archive, std::span<const Individual> candidates);

std::vector<Objectives> objectives_of(std::span<const Individual> individuals);

struct TelemetryRecord {
  std::size_t generation = 0;
  double best_makespan = 0.0;
  double best_cost = 0.0;
  std::size_t front_size = 0;
  std::vector<double> weights;

  friend bool operator==(const TelemetryRecord&, const TelemetryRecord&) = default;
};

// Header "agent,generation,best_makespan,best_cost,front_size,w_<op>...".
std::string telemetry_csv_header(std::span<const OperatorId> ops);
std::string telemetry_csv_row(const std::string& agent, const TelemetryRecord& record);

// Single-population engine with an archive of every non-dominated solution
// seen so far. Generation 0 is the initial population.
class EvolutionEngine {
 public:
  EvolutionEngine(const SchedulingProblem& problem, EvolutionConfig config, std::uint64_t seed);

  void step();
  void run(std::size_t generations);

  // Replaces the least fit member with `genotype` (which must be feasible).
  void inject(const Genotype& genotype);
  void set_stats(OperatorStats stats) { stats_ = std::move(stats); }

  [[nodiscard]] const Population& population() const { return population_; }
  [[nodiscard]] const OperatorStats& stats() const { return stats_; }
  [[nodiscard]] const std::vector<Individual>& archive() const { return archive_; }
  [[nodiscard]] const std::vector<TelemetryRecord>& telemetry() const { return telemetry_; }
  [[nodiscard]] std::size_t generation() const { return generation_; }
  [[nodiscard]] const EvolutionConfig& config() const { return config_; }
  [[nodiscard]] const SchedulingProblem& problem() const { return *problem_; }

  // Highest-fitness member; ties broken by the configured scalarization.
  [[nodiscard]] const Individual& best() const;

 private:
  void record();

  const SchedulingProblem* problem_;
  EvolutionConfig config_;
  Rng rng_;
  Population population_;
  OperatorStats stats_;
  std::vector<Individual> archive_;
  std::vector<TelemetryRecord> telemetry_;
  std::size_t generation_ = 0;
};

}  // namespace mrplan
