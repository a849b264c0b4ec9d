#include <benchmark/benchmark.h>

#include "clickcast/filter.hpp"
#include "clickcast/model.hpp"
#include "clickcast/oracle.hpp"
#include "clickcast/simulator.hpp"

using namespace clickcast;

namespace {

const MarkSpace& dataset() {
  static const MarkSpace space = sim::generate_dataset(1951, 8, 1);
  return space;
}

void BM_StepPredict(benchmark::State& state) {
  const MarkSpace& space = dataset();
  FilterParams params;
  params.particles = static_cast<std::size_t>(state.range(0));
  ParticleSet ps = init_particles(space, params);
  Rng pick(5);
  for (auto _ : state) {
    const MarkId id = space.mark(pick.uniform_index(space.size())).id;
    step(ps, make_click(space, id, ps.t + 1), space, params);
    benchmark::DoNotOptimize(predict(ps, space, params));
  }
}
BENCHMARK(BM_StepPredict)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state) {
  const MarkSpace& space = dataset();
  FilterParams params;
  params.particles = static_cast<std::size_t>(state.range(0));
  ParticleSet ps = init_particles(space, params);
  Rng pick(6);
  for (auto _ : state) {
    const MarkId id = space.mark(pick.uniform_index(space.size())).id;
    benchmark::DoNotOptimize(step(ps, make_click(space, id, ps.t + 1), space, params));
  }
}
BENCHMARK(BM_Step)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_ScoreCandidates(benchmark::State& state) {
  const MarkSpace& space = dataset();
  FilterParams params;
  params.particles = static_cast<std::size_t>(state.range(0));
  const ParticleSet ps = init_particles(space, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_candidates(space, ps.particles, params.model));
  }
}
BENCHMARK(BM_ScoreCandidates)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ExactPosterior(benchmark::State& state) {
  const MarkSpace space = sim::generate_dataset(12, 2, 3);
  std::vector<ClickEvent> clicks;
  for (int t = 1; t <= 8; ++t) clicks.push_back(make_click(space, space.mark(t % 12).id, t));
  const int n = static_cast<int>(state.range(0));
  const oracle::GridSpec grid{n, n, 5, 2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::exact_posterior(space, clicks, ModelParams{}, grid));
  }
}
BENCHMARK(BM_ExactPosterior)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
