#include "mrplan/coalition.hpp"

#include <algorithm>
#include <barrier>
#include <exception>
#include <mutex>
#include <thread>

#include "mrplan/errors.hpp"

namespace mrplan {

void CoalitionConfig::validate() const {
  evolution.validate();
  if (share_period == 0) {
    throw ValidationError("share period must be positive");
  }
  if (!(blend >= 0.0 && blend <= 1.0)) {
    throw ValidationError("blend factor must lie in [0, 1]");
  }
}

OperatorStats merge_experience(const OperatorStats& local, const OperatorStats& remote, double blend) {
  if (!(blend >= 0.0 && blend <= 1.0)) {
    throw ValidationError("blend factor must lie in [0, 1]");
  }
  if (local.records.size() != remote.records.size()) {
    throw ValidationError("cannot merge statistics over different operator sets");
  }
  OperatorStats out = local;
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    const auto& r = remote.records[i];
    auto& o = out.records[i];
    if (o.op != r.op) {
      throw ValidationError("cannot merge statistics over different operator sets");
    }
    o.weight = std::max(kMinOperatorWeight, (1.0 - blend) * o.weight + blend * r.weight);
    o.applications += r.applications;
    o.successes += r.successes;
  }
  return out;
}

std::uint64_t agent_seed(std::uint64_t seed, std::size_t index) {
  return seed + static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ULL;
}

AgentNode::AgentNode(std::size_t id, const SchedulingProblem& problem, const EvolutionConfig& config,
                     std::uint64_t seed)
    : id_(id), seed_(seed), engine_(problem, config, seed) {}

std::vector<ShareMessage> AgentNode::broadcast() const {
  const Individual& best = engine_.best();
  std::vector<ShareMessage> out;
  out.push_back({id_, engine_.generation(), BestSolution{best.genotype, best.objectives()}});
  out.push_back({id_, engine_.generation(), Experience{engine_.stats()}});
  return out;
}

void AgentNode::receive(double blend) {
  std::stable_sort(inbox_.begin(), inbox_.end(),
                   [](const ShareMessage& a, const ShareMessage& b) { return a.sender < b.sender; });
  for (auto& message : inbox_) {
    if (auto* solution = std::get_if<BestSolution>(&message.payload)) {
      // The channel is trusted, but a foreign genotype is still re-checked
      // before it enters the population.
      if (check_genotype(engine_.problem(), solution->genotype).ok()) {
        engine_.inject(solution->genotype);
      }
    } else {
      const auto& remote = std::get<Experience>(message.payload).stats;
      engine_.set_stats(merge_experience(engine_.stats(), remote, blend));
    }
  }
  inbox_.clear();
}

std::vector<Individual> union_front(std::span<const Individual> individuals) {
  std::vector<Individual> out;
  for (const auto& ind : individuals) {
    const Objectives o = ind.objectives();
    bool beaten = std::any_of(individuals.begin(), individuals.end(),
                              [&](const Individual& other) { return dominates(other.objectives(), o); });
    bool seen = std::any_of(out.begin(), out.end(),
                            [&](const Individual& other) { return other.objectives() == o; });
    if (!beaten && !seen) {
      out.push_back(ind);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Individual& a, const Individual& b) {
    return a.phenotype.makespan < b.phenotype.makespan;
  });
  return out;
}

const Individual& pick_weighted(std::span<const Individual> front, const InsertionWeights& weights) {
  if (front.empty()) {
    throw ValidationError("cannot pick from an empty front");
  }
  auto scalar = [&](const Individual& ind) {
    return weights.makespan * ind.phenotype.makespan + weights.cost * ind.phenotype.total_cost;
  };
  const Individual* best = &front.front();
  for (const auto& ind : front) {
    if (scalar(ind) < scalar(*best)) {
      best = &ind;
    }
  }
  return *best;
}

namespace {

std::vector<Objectives> coalition_front(const std::vector<AgentNode>& agents) {
  std::vector<Objectives> all;
  for (const auto& a : agents) {
    auto part = objectives_of(a.engine().archive());
    all.insert(all.end(), part.begin(), part.end());
  }
  return nondominated(all);
}

// State touched only at exchange points, which run on a single thread.
class Coordinator {
 public:
  Coordinator(std::vector<AgentNode>& agents, const CoalitionConfig& config)
      : agents_(agents), config_(config), front_(coalition_front(agents)) {
    epoch_ = std::min(config_.share_period, config_.evolution.generations);
    finished_ = epoch_ == 0;
  }

  [[nodiscard]] bool finished() const { return finished_; }
  [[nodiscard]] std::size_t epoch() const { return epoch_; }
  [[nodiscard]] std::size_t done() const { return done_; }
  [[nodiscard]] bool stagnated() const { return stagnated_; }
  [[nodiscard]] const std::vector<ShareEvent>& events() const { return events_; }

  void fail(std::exception_ptr error) {
    std::lock_guard lock(mutex_);
    if (!error_) {
      error_ = std::move(error);
    }
  }
  void rethrow() const {
    if (error_) {
      std::rethrow_exception(error_);
    }
  }

  void exchange() noexcept {
    if (error_) {
      finished_ = true;
      return;
    }
    try {
      done_ += epoch_;
      auto front = coalition_front(agents_);
      if (!weakly_covers(front_, front)) {
        last_improvement_ = done_;
      }
      front_ = std::move(front);
      const std::size_t total = config_.evolution.generations;
      if (config_.stagnation_window > 0 && done_ - last_improvement_ >= config_.stagnation_window &&
          done_ < total) {
        stagnated_ = true;
      }
      if (done_ >= total || stagnated_) {
        finished_ = true;
        return;
      }
      if (config_.sharing) {
        for (const auto& sender : agents_) {
          for (const auto& message : sender.broadcast()) {
            for (auto& receiver : agents_) {
              if (receiver.id() == sender.id()) continue;
              events_.push_back({message.generation, sender.id(), receiver.id(),
                                 std::holds_alternative<BestSolution>(message.payload) ? "best_solution"
                                                                                        : "experience"});
              receiver.deliver(message);
            }
          }
        }
      }
      epoch_ = std::min(config_.share_period, total - done_);
    } catch (...) {
      fail(std::current_exception());
      finished_ = true;
    }
  }

 private:
  std::vector<AgentNode>& agents_;
  const CoalitionConfig& config_;
  std::vector<Objectives> front_;
  std::vector<ShareEvent> events_;
  std::size_t epoch_ = 0;
  std::size_t done_ = 0;
  std::size_t last_improvement_ = 0;
  bool finished_ = false;
  bool stagnated_ = false;
  std::exception_ptr error_;
  std::mutex mutex_;
};

}  // namespace

CoalitionResult run_coalition(const SchedulingProblem& problem, std::size_t n_agents,
                              const CoalitionConfig& config, std::uint64_t seed) {
  if (n_agents == 0) {
    throw ValidationError("a coalition needs at least one agent");
  }
  config.validate();

  std::vector<AgentNode> agents;
  agents.reserve(n_agents);
  for (std::size_t i = 0; i < n_agents; ++i) {
    agents.emplace_back(i, problem, config.evolution, agent_seed(seed, i));
  }

  Coordinator coordinator(agents, config);
  auto epoch = [&](AgentNode& agent) {
    try {
      agent.receive(config.blend);
      agent.run(coordinator.epoch());
    } catch (...) {
      coordinator.fail(std::current_exception());
    }
  };

  if (config.deterministic || n_agents == 1) {
    while (!coordinator.finished()) {
      for (auto& agent : agents) {
        epoch(agent);
      }
      coordinator.exchange();
    }
  } else {
    std::barrier sync(static_cast<std::ptrdiff_t>(n_agents), [&]() noexcept { coordinator.exchange(); });
    std::vector<std::jthread> workers;
    workers.reserve(n_agents);
    for (auto& agent : agents) {
      workers.emplace_back([&, a = &agent] {
        while (!coordinator.finished()) {
          epoch(*a);
          sync.arrive_and_wait();
        }
      });
    }
    workers.clear();
  }
  coordinator.rethrow();

  CoalitionResult result;
  std::vector<Individual> pool;
  for (const auto& agent : agents) {
    const auto& archive = agent.engine().archive();
    pool.insert(pool.end(), archive.begin(), archive.end());
    result.agents.push_back({agent.id(), agent.seed(), agent.engine().telemetry(), agent.engine().stats(),
                             objectives_of(archive)});
  }
  result.front = union_front(pool);
  result.best = pick_weighted(result.front, config.evolution.weights);
  result.events = coordinator.events();
  result.generations = coordinator.done();
  result.stagnated = coordinator.stagnated();
  return result;
}

}  // namespace mrplan
