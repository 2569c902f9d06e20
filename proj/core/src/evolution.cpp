#include "mrplan/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "mrplan/errors.hpp"
#include "mrplan/schedule_io.hpp"

namespace mrplan {

OperatorStats OperatorStats::uniform(std::span<const OperatorId> ops) {
  OperatorStats stats;
  for (OperatorId op : ops) {
    stats.records.push_back(OperatorRecord{op});
  }
  return stats;
}

OperatorRecord& OperatorStats::at(OperatorId op) {
  return const_cast<OperatorRecord&>(std::as_const(*this).at(op));
}

const OperatorRecord& OperatorStats::at(OperatorId op) const {
  for (const auto& r : records) {
    if (r.op == op) {
      return r;
    }
  }
  throw ValidationError("operator '" + std::string(name(op)) + "' is not tracked");
}

std::vector<double> OperatorStats::weights() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(r.weight);
  }
  return out;
}

std::vector<double> selection_probabilities(const OperatorStats& stats, double floor) {
  const std::size_t n = stats.records.size();
  if (n == 0) {
    throw ValidationError("no operators to select from");
  }
  if (floor < 0.0 || floor * static_cast<double>(n) > 1.0) {
    throw ValidationError("operator floor probability out of range");
  }
  double total = 0.0;
  for (const auto& r : stats.records) {
    total += r.weight;
  }
  std::vector<double> p(n);
  const double spread = 1.0 - floor * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = floor + spread * stats.records[i].weight / total;
  }
  return p;
}

OperatorId select_operator(const OperatorStats& stats, Rng& rng, double floor) {
  auto p = selection_probabilities(stats, floor);
  std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
  return stats.records[dist(rng)].op;
}

OperatorStats update_reward(OperatorStats stats, OperatorId op, double parent_fitness,
                            double child_fitness, double learning_rate) {
  auto& r = stats.at(op);
  const double reward = std::max(0.0, child_fitness - parent_fitness);
  ++r.applications;
  if (child_fitness > parent_fitness) {
    ++r.successes;
  }
  r.mean_reward += (reward - r.mean_reward) / static_cast<double>(r.applications);
  r.weight = std::max(kMinOperatorWeight, (1.0 - learning_rate) * r.weight + learning_rate * reward);
  return stats;
}

void EvolutionConfig::validate() const {
  if (population < 2) {
    throw ValidationError("population size must be at least 2");
  }
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ValidationError("learning rate must lie in (0, 1]");
  }
  if (operators.empty()) {
    throw ValidationError("at least one operator is required");
  }
  auto ops = operators;
  std::sort(ops.begin(), ops.end());
  if (std::adjacent_find(ops.begin(), ops.end()) != ops.end()) {
    throw ValidationError("operators listed twice");
  }
  if (floor < 0.0 || floor * static_cast<double>(operators.size()) > 1.0) {
    throw ValidationError("operator floor probability out of range");
  }
  if (!(greedy_fraction >= 0.0 && greedy_fraction <= 1.0)) {
    throw ValidationError("greedy fraction must lie in [0, 1]");
  }
  if (weights.makespan < 0.0 || weights.cost < 0.0) {
    throw ValidationError("insertion weights must be nonnegative");
  }
}

Individual make_individual(const SchedulingProblem& problem, Genotype genotype) {
  Individual ind;
  ind.phenotype = render_phenotype(problem, genotype);
  ind.genotype = std::move(genotype);
  return ind;
}

std::vector<Objectives> objectives_of(std::span<const Individual> individuals) {
  std::vector<Objectives> out;
  out.reserve(individuals.size());
  for (const auto& ind : individuals) {
    out.push_back(ind.objectives());
  }
  return out;
}

void rescore(Population& population) {
  auto scores = score_population(objectives_of(population));
  for (std::size_t i = 0; i < population.size(); ++i) {
    population[i].score = scores[i];
  }
}

Population initial_population(const SchedulingProblem& problem, const EvolutionConfig& config,
                              Rng& rng) {
  const auto greedy =
      static_cast<std::size_t>(std::lround(config.greedy_fraction * static_cast<double>(config.population)));
  Population pop;
  pop.reserve(config.population);
  for (std::size_t i = 0; i < config.population; ++i) {
    Genotype g = i < greedy ? greedy_genotype(problem, rng, config.weights)
                            : random_genotype(problem, rng);
    pop.push_back(make_individual(problem, std::move(g)));
  }
  rescore(pop);
  return pop;
}

namespace {

std::size_t tournament(const Population& pop, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, pop.size() - 1);
  const std::size_t a = dist(rng);
  const std::size_t b = dist(rng);
  if (pop[a].score.fitness != pop[b].score.fitness) {
    return pop[a].score.fitness > pop[b].score.fitness ? a : b;
  }
  return std::min(a, b);
}

constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

struct Lineage {
  OperatorId op;
  std::size_t first;
  std::size_t second = kNoParent;
  bool ok;
};

}  // namespace

StepReport evolve_step(Population& population, const SchedulingProblem& problem,
                       OperatorStats& stats, Rng& rng, const EvolutionConfig& config) {
  if (population.empty()) {
    throw ValidationError("cannot evolve an empty population");
  }
  const std::size_t target = population.size();
  Population offspring;
  offspring.reserve(target + 1);
  std::vector<Lineage> lineage;
  lineage.reserve(target + 1);
  StepReport report;

  while (offspring.size() < target) {
    const OperatorId op = select_operator(stats, rng, config.floor);
    const std::size_t p = tournament(population, rng);
    const Individual& parent = population[p];
    switch (op) {
      case OperatorId::kBcrc: {
        const std::size_t q = tournament(population, rng);
        auto kids = bcrc_crossover(parent.genotype, population[q].genotype, problem, rng,
                                   config.weights);
        offspring.push_back(make_individual(problem, std::move(kids.first)));
        lineage.push_back({op, p, q, kids.ok});
        if (offspring.size() < target) {
          offspring.push_back(make_individual(problem, std::move(kids.second)));
          lineage.push_back({op, p, q, kids.ok});
        }
        break;
      }
      case OperatorId::kIntraSwap:
      case OperatorId::kInterSwap:
      case OperatorId::kReroute: {
        MutationResult m = op == OperatorId::kIntraSwap   ? intra_depot_swap(parent.genotype, problem, rng)
                           : op == OperatorId::kInterSwap ? inter_depot_swap(parent.genotype, problem, rng)
                                                          : single_action_reroute(parent.genotype, problem, rng,
                                                                                  config.weights);
        if (m.ok) {
          offspring.push_back(make_individual(problem, std::move(m.child)));
        } else {
          offspring.push_back(parent);
        }
        lineage.push_back({op, p, kNoParent, m.ok});
        break;
      }
    }
  }

  Population pool = std::move(population);
  const std::size_t parents = pool.size();
  for (auto& child : offspring) {
    pool.push_back(std::move(child));
  }
  rescore(pool);

  for (std::size_t i = 0; i < lineage.size(); ++i) {
    const auto& l = lineage[i];
    double parent_fitness = pool[l.first].score.fitness;
    if (l.second != kNoParent) {
      parent_fitness = std::max(parent_fitness, pool[l.second].score.fitness);
    }
    const double child_fitness = l.ok ? pool[parents + i].score.fitness : parent_fitness;
    stats = update_reward(std::move(stats), l.op, parent_fitness, child_fitness, config.learning_rate);
    report.failures += l.ok ? 0 : 1;
  }
  report.offspring = lineage.size();

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pool[a].score.fitness > pool[b].score.fitness;
  });
  std::vector<char> taken(pool.size(), 0);
  std::vector<Objectives> kept;
  population.clear();
  population.reserve(target);
  for (std::size_t i : order) {
    if (population.size() == target) break;
    const Objectives o = pool[i].objectives();
    if (std::find(kept.begin(), kept.end(), o) == kept.end()) {
      kept.push_back(o);
      taken[i] = 1;
      population.push_back(pool[i]);
    }
  }
  for (std::size_t i : order) {
    if (population.size() == target) break;
    if (!taken[i]) {
      population.push_back(pool[i]);
    }
  }
  rescore(population);
  return report;
}

void update_archive(std::vector<Individual>& archive, std::span<const Individual> candidates) {
  for (const auto& c : candidates) {
    const Objectives o = c.objectives();
    bool covered = std::any_of(archive.begin(), archive.end(), [&](const Individual& a) {
      const Objectives ao = a.objectives();
      return ao == o || dominates(ao, o);
    });
    if (covered) {
      continue;
    }
    std::erase_if(archive, [&](const Individual& a) { return dominates(o, a.objectives()); });
    archive.push_back(c);
  }
}

std::string telemetry_csv_header(std::span<const OperatorId> ops) {
  std::string out = "agent,generation,best_makespan,best_cost,front_size";
  for (OperatorId op : ops) {
    out += ",w_";
    out += name(op);
  }
  return out;
}

std::string telemetry_csv_row(const std::string& agent, const TelemetryRecord& record) {
  std::ostringstream os;
  os << agent << ',' << record.generation << ',' << format_fixed(record.best_makespan) << ','
     << format_fixed(record.best_cost) << ',' << record.front_size;
  for (double w : record.weights) {
    os << ',' << format_fixed(w);
  }
  return os.str();
}

EvolutionEngine::EvolutionEngine(const SchedulingProblem& problem, EvolutionConfig config,
                                 std::uint64_t seed)
    : problem_(&problem), config_(std::move(config)), rng_(seed) {
  config_.validate();
  population_ = initial_population(problem, config_, rng_);
  stats_ = OperatorStats::uniform(config_.operators);
  update_archive(archive_, population_);
  record();
}

void EvolutionEngine::step() {
  evolve_step(population_, *problem_, stats_, rng_, config_);
  ++generation_;
  update_archive(archive_, population_);
  record();
}

void EvolutionEngine::run(std::size_t generations) {
  for (std::size_t g = 0; g < generations; ++g) {
    step();
  }
}

void EvolutionEngine::inject(const Genotype& genotype) {
  Individual newcomer = make_individual(*problem_, genotype);
  std::size_t worst = 0;
  for (std::size_t i = 1; i < population_.size(); ++i) {
    if (population_[i].score.fitness <= population_[worst].score.fitness) {
      worst = i;
    }
  }
  population_[worst] = std::move(newcomer);
  rescore(population_);
  update_archive(archive_, std::span<const Individual>(&population_[worst], 1));
}

const Individual& EvolutionEngine::best() const {
  auto scalar = [&](const Individual& ind) {
    return config_.weights.makespan * ind.phenotype.makespan + config_.weights.cost * ind.phenotype.total_cost;
  };
  const Individual* best = &population_.front();
  for (const auto& ind : population_) {
    if (ind.score.fitness > best->score.fitness ||
        (ind.score.fitness == best->score.fitness && scalar(ind) < scalar(*best))) {
      best = &ind;
    }
  }
  return *best;
}

void EvolutionEngine::record() {
  TelemetryRecord rec;
  rec.generation = generation_;
  rec.best_makespan = std::numeric_limits<double>::infinity();
  rec.best_cost = std::numeric_limits<double>::infinity();
  for (const auto& a : archive_) {
    rec.best_makespan = std::min(rec.best_makespan, a.phenotype.makespan);
    rec.best_cost = std::min(rec.best_cost, a.phenotype.total_cost);
  }
  rec.front_size = archive_.size();
  rec.weights = stats_.weights();
  telemetry_.push_back(std::move(rec));
}

}  // namespace mrplan
