#include <benchmark/benchmark.h>

#include "peerreview/committee_sim.hpp"

using namespace peerreview;

static void BM_SimulateConference(benchmark::State& state) {
  SimConfig config;
  config.reviewers_per_paper = static_cast<std::size_t>(state.range(0));
  config.total_paper_samples = static_cast<std::size_t>(state.range(1));
  config.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_conference(config));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_SimulateConference)
    ->Args({3, 100'000})
    ->Args({10, 100'000})
    ->Args({3, 1'000'000})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
