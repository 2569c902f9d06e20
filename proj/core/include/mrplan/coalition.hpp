#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mrplan/evolution.hpp"

namespace mrplan {

struct CoalitionConfig {
  EvolutionConfig evolution;
  // Generations between two exchanges.
  std::size_t share_period = 10;
  // Weight given to a received operator snapshot when merging.
  double blend = 0.5;
  bool sharing = true;
  // Stop once the coalition front has not improved for this many
  // generations (checked at exchange points). 0 disables the check.
  std::size_t stagnation_window = 0;
  // Run agents round-robin on the calling thread instead of one thread each.
  bool deterministic = false;

  void validate() const;
};

struct BestSolution {
  Genotype genotype;
  Objectives objectives;
};

struct Experience {
  OperatorStats stats;
};

struct ShareMessage {
  std::size_t sender = 0;
  std::size_t generation = 0;
  std::variant<BestSolution, Experience> payload;
};

struct ShareEvent {
  std::size_t generation = 0;
  std::size_t sender = 0;
  std::size_t receiver = 0;
  std::string_view kind;  // "best_solution" or "experience"
};

// weight' = (1 - blend) * local + blend * remote per operator. Application
// and success counts are summed. Throws ValidationError when the operator
// lists differ or blend is outside [0, 1].
OperatorStats merge_experience(const OperatorStats& local, const OperatorStats& remote, double blend);

// Seed of agent `index`; agent 0 uses `seed` itself.
std::uint64_t agent_seed(std::uint64_t seed, std::size_t index);

// One solver agent: an evolution engine plus a mailbox.
class AgentNode {
 public:
  AgentNode(std::size_t id, const SchedulingProblem& problem, const EvolutionConfig& config,
            std::uint64_t seed);

  void run(std::size_t generations) { engine_.run(generations); }
  [[nodiscard]] std::vector<ShareMessage> broadcast() const;
  void deliver(ShareMessage message) { inbox_.push_back(std::move(message)); }
  // Applies and clears the inbox in sender order.
  void receive(double blend);

  [[nodiscard]] std::size_t id() const { return id_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] const EvolutionEngine& engine() const { return engine_; }

 private:
  std::size_t id_;
  std::uint64_t seed_;
  EvolutionEngine engine_;
  std::vector<ShareMessage> inbox_;
};

struct AgentReport {
  std::size_t agent_id = 0;
  std::uint64_t seed = 0;
  std::vector<TelemetryRecord> telemetry;
  OperatorStats stats;
  std::vector<Objectives> archive;
};

struct CoalitionResult {
  Individual best;
  std::vector<Individual> front;  // non-dominated union of all archives
  std::vector<AgentReport> agents;
  std::vector<ShareEvent> events;
  std::size_t generations = 0;    // generations each agent completed
  bool stagnated = false;
};

// Non-dominated members of the union, one per objective vector, sorted by
// makespan. Earlier entries win ties.
std::vector<Individual> union_front(std::span<const Individual> individuals);

// Member of `front` with the smallest weighted makespan and cost; ties go to
// the earlier member.
const Individual& pick_weighted(std::span<const Individual> front, const InsertionWeights& weights);

// Runs `n_agents` agents for config.evolution.generations generations,
// exchanging best solutions and operator weights every share_period
// generations. The result is deterministic for a given seed in both the
// threaded and the round-robin mode.
CoalitionResult run_coalition(const SchedulingProblem& problem, std::size_t n_agents,
                              const CoalitionConfig& config, std::uint64_t seed);

}  // namespace mrplan
