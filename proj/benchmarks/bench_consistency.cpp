#include <benchmark/benchmark.h>

#include "peerreview/consistency_stats.hpp"

using namespace peerreview;

static void BM_PosteriorRatioMC(benchmark::State& state) {
  const auto posterior = dirichlet_posterior({1, 1, 1}, {22, 43, 101});
  for (auto _ : state) benchmark::DoNotOptimize(posterior_ratio_mc(posterior, state.range(0), 2014));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PosteriorRatioMC)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
