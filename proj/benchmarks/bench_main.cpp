#include <benchmark/benchmark.h>

#include "mrplan/decomposition.hpp"
#include "mrplan/evolution.hpp"
#include "mrplan/greenhouse.hpp"
#include "mrplan/operators.hpp"
#include "mrplan/schedule.hpp"

using namespace mrplan;

namespace {

// The greenhouse with one fleet of each kind and every plant on its
// stationary branch.
SchedulingProblem greenhouse_problem() {
  const auto config = GreenhouseConfig::defaults();
  const Mission mission = build_mission(config, setup_fleet(4));
  DecompositionOptions opt;
  opt.criteria = Criteria::from_importance(0, 100);
  auto alts = generate_alternatives(mission.tree, mission.tree.root(), mission.robots, opt);
  return SchedulingProblem::from_mission(mission, alts.front().actions);
}

void BM_GenerateAlternatives(benchmark::State& state) {
  const auto config = GreenhouseConfig::defaults();
  const Mission mission = build_mission(config, setup_fleet(4));
  DecompositionOptions opt;
  opt.mu = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_alternatives(mission.tree, mission.tree.root(), mission.robots, opt));
  }
}
BENCHMARK(BM_GenerateAlternatives)->Arg(8)->Arg(32)->Arg(128);

void BM_RenderPhenotype(benchmark::State& state) {
  const auto problem = greenhouse_problem();
  Rng rng(1);
  const Genotype g = greedy_genotype(problem, rng, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_phenotype(problem, g));
  }
}
BENCHMARK(BM_RenderPhenotype);

void BM_BestInsertion(benchmark::State& state) {
  const auto problem = greenhouse_problem();
  Rng rng(2);
  Genotype g = greedy_genotype(problem, rng, {});
  const ActionIndex a = problem.action_count() / 2;
  const ActionIndex removed[] = {a};
  remove_actions(g, removed);
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_insertion(problem, g, a, {}));
  }
}
BENCHMARK(BM_BestInsertion);

void BM_EvolveStep(benchmark::State& state) {
  const auto problem = greenhouse_problem();
  EvolutionConfig config;
  config.population = static_cast<std::size_t>(state.range(0));
  EvolutionEngine engine(problem, config, 3);
  for (auto _ : state) {
    engine.step();
  }
}
BENCHMARK(BM_EvolveStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
