#pragma once

// Two independent committees score the same papers under the calibrated
// model: each review is f_i + e with f_i ~ N(0, 1 - s) shared and
// e ~ N(0, s) private to the reviewer. Each committee averages its R reviews
// and accepts the top floor(rate * n) papers; the accept consistency is the
// fraction of one committee's accepts that the other also accepted.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "peerreview/calibration.hpp"

namespace peerreview {

struct SimConfig {
  std::size_t n_papers = 500;
  std::size_t reviewers_per_paper = 3;
  double subjectivity = 0.5;  ///< s = sigma2 / (alpha_f + sigma2), in (0, 1]
  double accept_rate = 0.23;  ///< in (0, 1]
  std::size_t total_paper_samples = 100'000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  ///< 0: process default

  /// Throws ValidationError.
  void validate() const;
  std::size_t accepted_per_committee() const;
  std::size_t trials() const;
};

struct SimOutcome {
  double accept_consistency = 0.0;
  double std_error = 0.0;  ///< sd of per-trial consistency / sqrt(trials)
  std::size_t trials = 0;
};

/// Bit-identical for identical configs, independent of the thread count.
SimOutcome simulate_conference(const SimConfig& config);

struct CurvePoint {
  double accept_rate = 0.0;
  std::size_t reviewers = 0;
  SimOutcome outcome;
};

/// One row per (accept_rate, reviewers) in sweep order, accept rate outermost.
/// Every row reuses the base seed, so rows share their quality draws.
std::vector<CurvePoint> consistency_curve(const SimConfig& base, std::span<const double> accept_rates,
                                          std::span<const std::size_t> reviewer_counts);

/// sigma2 / (alpha_f + sigma2). The reviewer offset variance is excluded since
/// calibration removes it.
double subjectivity_from_fit(const CalibrationParams& params);

}  // namespace peerreview
