#include <benchmark/benchmark.h>

#include <chrono>

#include "peerreview/synthetic.hpp"
#include "peerreview/timeline.hpp"

using namespace peerreview;

namespace {

const Dataset& dataset() {
  static const Dataset d = [] {
    synthetic::DatasetConfig config;
    config.seed = 1;
    return synthetic::generate_dataset(config);
  }();
  return d;
}

}  // namespace

static void BM_MovingWindowMean(benchmark::State& state) {
  const auto& d = dataset();
  const auto times = step_times(d.reviews, std::chrono::duration_cast<Duration>(std::chrono::hours(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(moving_window_mean(d.reviews, ReviewField::confidence, times));
  state.counters["samples"] = static_cast<double>(times.size());
}
BENCHMARK(BM_MovingWindowMean)->Arg(24)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_ReviewsPerPaper(benchmark::State& state) {
  const auto& d = dataset();
  const auto times = step_times(d.reviews);
  for (auto _ : state) benchmark::DoNotOptimize(reviews_per_paper_series(d.reviews, times));
}
BENCHMARK(BM_ReviewsPerPaper)->Unit(benchmark::kMillisecond);

static void BM_DuplicateCorrelation(benchmark::State& state) {
  const auto& d = dataset();
  const auto times = step_times(d.reviews);
  for (auto _ : state) benchmark::DoNotOptimize(duplicate_correlation_series(d.reviews, d.duplicates, times));
}
BENCHMARK(BM_DuplicateCorrelation)->Unit(benchmark::kMillisecond);

static void BM_BootstrapBand(benchmark::State& state) {
  const auto& d = dataset();
  const auto times = step_times(d.reviews);
  BootstrapOptions options;
  options.resamples = static_cast<std::size_t>(state.range(0));
  options.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_correlation_band(d.reviews, d.duplicates, times, options));
}
BENCHMARK(BM_BootstrapBand)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
