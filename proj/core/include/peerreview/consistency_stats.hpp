#pragma once

// Statistics of the duplicated-paper experiment: confusion-matrix summaries,
// the random-committee baseline, an exact binomial check of the accept rate,
// and a Dirichlet posterior over the three outcome classes (consistent
// accept, inconsistent, consistent reject) with Monte Carlo ratio statistics.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace peerreview {

/// Counts of committee-1 x committee-2 decisions (a = accept, r = reject).
struct ConfusionMatrix {
  std::int64_t aa = 0, ar = 0, ra = 0, rr = 0;

  std::int64_t total() const noexcept { return aa + ar + ra + rr; }
};

/// Real-valued cells, as produced by expectations.
struct ExpectedConfusion {
  double aa = 0.0, ar = 0.0, ra = 0.0, rr = 0.0;

  double total() const noexcept { return aa + ar + ra + rr; }
};

/// Fields whose denominator is zero are absent rather than zero.
struct ConsistencySummary {
  std::optional<double> inconsistency;
  std::optional<double> accept_precision_c1;  ///< aa / (aa + ar)
  std::optional<double> accept_precision_c2;  ///< aa / (aa + ra)
  std::optional<double> accept_precision_avg;
  std::optional<double> reject_precision_c1;  ///< rr / (ra + rr)
  std::optional<double> reject_precision_c2;  ///< rr / (ar + rr)
  std::optional<double> reject_precision_avg;
  std::optional<double> agreed_accept_rate;      ///< aa / rr
  std::optional<double> agreed_accept_rate_alt;  ///< aa / (aa + rr), the alternate reading
  std::optional<double> inconsistency_se;        ///< sqrt(p(1-p)/(aa+ar)), p = ar/(aa+ar)
};

/// Throws ValidationError for negative counts or an empty matrix.
ConsistencySummary confusion_stats(const ConfusionMatrix& m);
ConsistencySummary confusion_stats(const ExpectedConfusion& m);

/// Cells expected when both committees accept independently at random with
/// probability p: total * (p^2, p(1-p), p(1-p), (1-p)^2).
ExpectedConfusion random_committee_expectation(double total, double accept_rate);

struct BinomialReport {
  std::int64_t k = 0, n = 0;
  double p = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double pmf = 0.0;  ///< P(K = k)
  std::int64_t lower = 0, upper = 0;  ///< central interval, inclusive
  double coverage = 0.0;              ///< probability mass of [lower, upper]
  double z = 0.0;
  bool inside = false;
};

/// Exact pmf via log-gamma.
double binomial_pmf(std::int64_t k, std::int64_t n, double p);

/// Smallest interval grown outward from the mode, adding whichever neighbour
/// is more probable (the lower one on ties), until it holds `level` mass.
BinomialReport binomial_check(std::int64_t k, std::int64_t n, double p, double level = 0.95);

struct DirichletPosterior {
  std::array<double, 3> alpha{};  ///< prior concentrations
  std::array<double, 3> counts{};
  std::array<double, 3> posterior_alpha{};
  std::array<double, 3> means{};
  std::array<double, 3> variances{};

  double sd(std::size_t i) const;
};

/// Conjugate update; variances use the standard Dirichlet formula
/// a_i (a_0 - a_i) / (a_0^2 (a_0 + 1)). Throws ValidationError for a
/// non-positive prior or negative counts.
DirichletPosterior dirichlet_posterior(const std::array<double, 3>& prior_alpha,
                                       const std::array<double, 3>& counts);

/// (consistent accept, inconsistent, consistent reject) counts of a matrix.
std::array<double, 3> outcome_counts(const ConfusionMatrix& m);

struct Histogram {
  double lo = 0.0, hi = 1.0;
  std::vector<std::int64_t> counts;  ///< uniform bins over [lo, hi]
  std::int64_t underflow = 0, overflow = 0;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  void add(double x);
  void merge(const Histogram& other);
};

struct RatioSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::int64_t samples = 0;  ///< draws where the ratio was defined
  Histogram histogram;

  double band_lower(double k = 2.0) const { return mean - k * sd; }
  double band_upper(double k = 2.0) const { return mean + k * sd; }
  bool outside_band(double x, double k = 2.0) const { return x < band_lower(k) || x > band_upper(k); }
};

struct RatioStats {
  RatioSummary accept_precision;        ///< p1 / (p1 + p2/2)
  RatioSummary reject_precision;        ///< p3 / (p3 + p2/2)
  RatioSummary agreed_accept_rate;      ///< p1 / p3
  RatioSummary agreed_accept_rate_alt;  ///< p1 / (p1 + p3)
  std::int64_t n_samples = 0;
};

inline constexpr std::size_t kHistogramBins = 50;
inline constexpr std::int64_t kMinRatioSamples = 10'000;

/// Draws p ~ Dir(posterior_alpha) in chunks with per-chunk derived seeds and
/// maps each draw to the statistics of a conference with those outcome
/// probabilities, the inconsistent mass split evenly between committees.
/// Deterministic for a given seed regardless of `threads`. Throws
/// ValidationError when n_samples < kMinRatioSamples.
RatioStats posterior_ratio_mc(const DirichletPosterior& posterior, std::int64_t n_samples, std::uint64_t seed,
                              unsigned threads = 0);

}  // namespace peerreview
