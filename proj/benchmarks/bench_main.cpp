#include <benchmark/benchmark.h>

#include "uqd/algorithms.hpp"
#include "uqd/estimators.hpp"
#include "uqd/tasks.hpp"

namespace {

std::vector<uqd::EvaluationSample> make_samples(std::size_t n) {
  uqd::RngStream stream(7);
  std::vector<uqd::EvaluationSample> samples(n);
  for (auto& sample : samples) {
    sample.fitness = stream.next_double();
    sample.features = {stream.next_double(), stream.next_double()};
  }
  return samples;
}

void BM_EstimateReproducibility(benchmark::State& state) {
  const auto samples = make_samples(static_cast<std::size_t>(state.range(0)));
  const uqd::EstimatorConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(uqd::estimate_reproducibility(samples, cfg));
  }
}
BENCHMARK(BM_EstimateReproducibility)->Arg(32)->Arg(512);

void BM_AddScoredDepth(benchmark::State& state) {
  const uqd::TaskSpec task = uqd::builtin_task("linear");
  uqd::GridSpec grid = task.grid;
  grid.depth = 3;
  uqd::RngStream stream(11);
  for (auto _ : state) {
    state.PauseTiming();
    uqd::Archive archive(grid);
    state.ResumeTiming();
    for (int i = 0; i < 4096; ++i) {
      uqd::SolutionRecord record;
      record.genotype = {stream.next_double(), stream.next_double(), stream.next_double()};
      record.sample_count = 1;
      record.est_fitness = stream.next_double();
      record.est_features = {stream.next_double(), stream.next_double()};
      record.est_reproducibility = -stream.next_double();
      uqd::add_scored_depth(archive, std::move(record), uqd::AdditionRule::fitness_only());
    }
    benchmark::DoNotOptimize(archive.occupancy());
  }
}
BENCHMARK(BM_AddScoredDepth);

void BM_Generation(benchmark::State& state) {
  const uqd::TaskSpec task = uqd::builtin_task("linear");
  uqd::AlgorithmConfig cfg;
  cfg.algorithm = uqd::Algorithm::MeWeighted;
  cfg.sampling_size = 4096;
  cfg.generations = 1;
  for (auto _ : state) {
    state.PauseTiming();
    uqd::ExperimentState experiment = uqd::make_initial_state(task, cfg, 3);
    state.ResumeTiming();
    uqd::run_generation(experiment, task, cfg);
    benchmark::DoNotOptimize(experiment.generation);
  }
}
BENCHMARK(BM_Generation);

}  // namespace

BENCHMARK_MAIN();
