#include "peerreview/committee_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "peerreview/parallel.hpp"
#include "peerreview/random.hpp"

namespace peerreview {

void SimConfig::validate() const {
  if (n_papers == 0) throw ValidationError("n_papers must be positive");
  if (reviewers_per_paper == 0) throw ValidationError("reviewers_per_paper must be positive");
  if (!(subjectivity > 0.0 && subjectivity <= 1.0)) throw ValidationError("subjectivity must lie in (0, 1]");
  if (!(accept_rate > 0.0 && accept_rate <= 1.0)) throw ValidationError("accept_rate must lie in (0, 1]");
  if (accepted_per_committee() < 1) throw ValidationError("accept_rate * n_papers must admit at least one paper");
  if (total_paper_samples < n_papers) throw ValidationError("total_paper_samples must be >= n_papers");
}

std::size_t SimConfig::accepted_per_committee() const {
  // The small epsilon keeps products such as 0.23 * 500 = 114.99999 at 115.
  return static_cast<std::size_t>(std::floor(accept_rate * static_cast<double>(n_papers) + 1e-9));
}

std::size_t SimConfig::trials() const { return (total_paper_samples + n_papers - 1) / n_papers; }

namespace {

// Indices of the k highest scores. Ties fall to a seeded shuffle order.
std::vector<std::size_t> top_k(const std::vector<double>& score, std::size_t k, Rng& rng) {
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  order.resize(k);
  return order;
}

double run_trial(const SimConfig& c, std::size_t trial) {
  Rng rng = make_rng(c.seed, trial);
  std::normal_distribution<double> normal;
  const double sd_f = std::sqrt(1.0 - c.subjectivity);
  const double sd_e = std::sqrt(c.subjectivity);
  const std::size_t n = c.n_papers, k = c.accepted_per_committee();

  std::vector<double> f(n);
  for (auto& v : f) v = sd_f * normal(rng);

  std::vector<char> accepted_by_first(n, 0);
  std::size_t agreed = 0;
  std::vector<double> score(n);
  for (int committee = 0; committee < 2; ++committee) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t r = 0; r < c.reviewers_per_paper; ++r) sum += normal(rng);
      score[i] = f[i] + sd_e * sum / static_cast<double>(c.reviewers_per_paper);
    }
    const auto accepted = top_k(score, k, rng);
    for (auto i : accepted) {
      if (committee == 0)
        accepted_by_first[i] = 1;
      else
        agreed += accepted_by_first[i];
    }
  }
  return static_cast<double>(agreed) / static_cast<double>(k);
}

}  // namespace

SimOutcome simulate_conference(const SimConfig& config) {
  config.validate();
  const std::size_t trials = config.trials();
  std::vector<double> per_trial(trials);
  parallel_for(trials, config.threads ? config.threads : max_threads(),
               [&](std::size_t t) { per_trial[t] = run_trial(config, t); });

  // Reduced in trial order so the result does not depend on scheduling.
  double sum = 0.0;
  for (double v : per_trial) sum += v;
  const double mean = sum / static_cast<double>(trials);
  double ss = 0.0;
  for (double v : per_trial) ss += (v - mean) * (v - mean);
  SimOutcome out;
  out.accept_consistency = mean;
  out.trials = trials;
  out.std_error = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
  return out;
}

std::vector<CurvePoint> consistency_curve(const SimConfig& base, std::span<const double> accept_rates,
                                          std::span<const std::size_t> reviewer_counts) {
  if (accept_rates.empty() || reviewer_counts.empty()) throw ValidationError("consistency curve sweeps are empty");
  std::vector<CurvePoint> out;
  for (double rate : accept_rates) {
    for (auto r : reviewer_counts) {
      SimConfig c = base;
      c.accept_rate = rate;
      c.reviewers_per_paper = r;
      out.push_back({rate, r, simulate_conference(c)});
    }
  }
  return out;
}

double subjectivity_from_fit(const CalibrationParams& params) {
  if (!(params.alpha_f > 0.0) || params.sigma2 < 0.0)
    throw ValidationError("subjectivity needs alpha_f > 0 and sigma2 >= 0");
  return params.sigma2 / (params.alpha_f + params.sigma2);
}

}  // namespace peerreview
