#include <benchmark/benchmark.h>

#include <map>
#include <numeric>
#include <vector>

#include "peerreview/calibration.hpp"
#include "peerreview/synthetic.hpp"

using namespace peerreview;

namespace {

struct Corpus {
  synthetic::CalibrationCorpus corpus;
  std::vector<double> centered;
};

// Conference-sized corpus scaled by 1/divisor, built once per size.
const Corpus& corpus(std::size_t divisor) {
  static std::map<std::size_t, Corpus> cache;
  auto it = cache.find(divisor);
  if (it == cache.end()) {
    Corpus c{synthetic::calibration_corpus(synthetic::conference_params(), 1, 1678 / divisor, 1474 / divisor), {}};
    const auto& y = c.corpus.draw.scores;
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    for (double v : y) c.centered.push_back(v - mean);
    it = cache.emplace(divisor, std::move(c)).first;
  }
  return it->second;
}

}  // namespace

// One grid node: covariance assembly plus factorization of every block.
static void BM_EvaluateNode(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  const auto cov = build_covariance(c.corpus.graph, 0.19, 0.99);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_node(c.centered, cov));
  state.counters["edges"] = static_cast<double>(c.corpus.graph.num_edges());
}
BENCHMARK(BM_EvaluateNode)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_EvaluateNodeDense(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  const auto cov = build_covariance(c.corpus.graph, 0.19, 0.99);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_node(c.centered, cov, FactorStrategy::dense));
  state.counters["edges"] = static_cast<double>(c.corpus.graph.num_edges());
}
BENCHMARK(BM_EvaluateNodeDense)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_CalibratedScores(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  const auto params = synthetic::conference_params();
  for (auto _ : state) benchmark::DoNotOptimize(calibrated_scores(c.corpus.draw.scores, c.corpus.graph, params));
}
BENCHMARK(BM_CalibratedScores)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

// A coarse 8x8 grid with refinement, at a quarter of conference scale.
static void BM_GridFitCoarse(benchmark::State& state) {
  const auto& c = corpus(4);
  const auto grid = GridSpec::logarithmic(8, 1e-3, 10.0, 8, 1e-2, 10.0, 4);
  FitOptions options;
  options.posteriors = false;
  for (auto _ : state) benchmark::DoNotOptimize(grid_fit(c.corpus.draw.scores, c.corpus.graph, grid, options));
}
BENCHMARK(BM_GridFitCoarse)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
