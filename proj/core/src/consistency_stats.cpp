#include "peerreview/consistency_stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "peerreview/errors.hpp"
#include "peerreview/parallel.hpp"
#include "peerreview/random.hpp"

namespace peerreview {

namespace {

std::optional<double> ratio(double num, double den) {
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

std::optional<double> average(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return 0.5 * (*a + *b);
}

ConsistencySummary summarize(double aa, double ar, double ra, double rr) {
  if (aa < 0 || ar < 0 || ra < 0 || rr < 0) throw ValidationError("confusion counts must be non-negative");
  const double total = aa + ar + ra + rr;
  if (!(total > 0)) throw ValidationError("confusion matrix is empty");

  ConsistencySummary s;
  s.inconsistency = (ar + ra) / total;
  s.accept_precision_c1 = ratio(aa, aa + ar);
  s.accept_precision_c2 = ratio(aa, aa + ra);
  s.accept_precision_avg = average(s.accept_precision_c1, s.accept_precision_c2);
  s.reject_precision_c1 = ratio(rr, ra + rr);
  s.reject_precision_c2 = ratio(rr, ar + rr);
  s.reject_precision_avg = average(s.reject_precision_c1, s.reject_precision_c2);
  s.agreed_accept_rate = ratio(aa, rr);
  s.agreed_accept_rate_alt = ratio(aa, aa + rr);
  if (aa + ar > 0) {
    const double p = ar / (aa + ar);
    s.inconsistency_se = std::sqrt(p * (1.0 - p) / (aa + ar));
  }
  return s;
}

}  // namespace

ConsistencySummary confusion_stats(const ConfusionMatrix& m) {
  return summarize(static_cast<double>(m.aa), static_cast<double>(m.ar), static_cast<double>(m.ra),
                   static_cast<double>(m.rr));
}

ConsistencySummary confusion_stats(const ExpectedConfusion& m) { return summarize(m.aa, m.ar, m.ra, m.rr); }

ExpectedConfusion random_committee_expectation(double total, double p) {
  if (!(total > 0.0)) throw ValidationError("total must be positive");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("accept_rate must lie in (0, 1)");
  const double q = 1.0 - p;
  return {total * p * p, total * p * q, total * p * q, total * q * q};
}

// ---------------------------------------------------------------------------
// Binomial

double binomial_pmf(std::int64_t k, std::int64_t n, double p) {
  if (n < 0 || k < 0 || k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  using boost::math::lgamma;
  const double dn = static_cast<double>(n), dk = static_cast<double>(k);
  const double log_pmf = lgamma(dn + 1.0) - lgamma(dk + 1.0) - lgamma(dn - dk + 1.0) + dk * std::log(p) +
                         (dn - dk) * std::log1p(-p);
  return std::exp(log_pmf);
}

BinomialReport binomial_check(std::int64_t k, std::int64_t n, double p, double level) {
  if (n < 0 || k < 0 || k > n) throw ValidationError("binomial check requires 0 <= k <= n");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("binomial check requires p in (0, 1)");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("interval level must lie in (0, 1)");

  BinomialReport r;
  r.k = k;
  r.n = n;
  r.p = p;
  r.mean = static_cast<double>(n) * p;
  r.sd = std::sqrt(r.mean * (1.0 - p));
  r.pmf = binomial_pmf(k, n, p);
  r.z = r.sd > 0.0 ? (static_cast<double>(k) - r.mean) / r.sd : 0.0;

  const auto mode = std::min<std::int64_t>(n, static_cast<std::int64_t>(std::floor((static_cast<double>(n) + 1) * p)));
  std::int64_t lo = mode, hi = mode;
  double mass = binomial_pmf(mode, n, p);
  double left = binomial_pmf(lo - 1, n, p), right = binomial_pmf(hi + 1, n, p);
  while (mass < level && (lo > 0 || hi < n)) {
    if (lo > 0 && (hi >= n || left >= right)) {
      mass += left;
      --lo;
      left = binomial_pmf(lo - 1, n, p);
    } else {
      mass += right;
      ++hi;
      right = binomial_pmf(hi + 1, n, p);
    }
  }
  r.lower = lo;
  r.upper = hi;
  r.coverage = mass;
  r.inside = k >= lo && k <= hi;
  return r;
}

// ---------------------------------------------------------------------------
// Dirichlet

double DirichletPosterior::sd(std::size_t i) const { return std::sqrt(variances.at(i)); }

DirichletPosterior dirichlet_posterior(const std::array<double, 3>& prior_alpha, const std::array<double, 3>& counts) {
  DirichletPosterior d;
  d.alpha = prior_alpha;
  d.counts = counts;
  double a0 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(prior_alpha[i] > 0.0)) throw ValidationError("Dirichlet prior concentrations must be positive");
    if (counts[i] < 0.0) throw ValidationError("Dirichlet counts must be non-negative");
    d.posterior_alpha[i] = prior_alpha[i] + counts[i];
    a0 += d.posterior_alpha[i];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double a = d.posterior_alpha[i];
    d.means[i] = a / a0;
    d.variances[i] = a * (a0 - a) / (a0 * a0 * (a0 + 1.0));
  }
  return d;
}

std::array<double, 3> outcome_counts(const ConfusionMatrix& m) {
  return {static_cast<double>(m.aa), static_cast<double>(m.ar + m.ra), static_cast<double>(m.rr)};
}

// ---------------------------------------------------------------------------
// Monte Carlo ratio statistics

void Histogram::add(double x) {
  if (std::isnan(x)) return;
  if (x < lo) {
    ++underflow;
  } else if (x > hi) {
    ++overflow;
  } else {
    auto bin = static_cast<std::size_t>((x - lo) / bin_width());
    counts[std::min(bin, counts.size() - 1)] += 1;
  }
}

void Histogram::merge(const Histogram& other) {
  for (std::size_t b = 0; b < counts.size(); ++b) counts[b] += other.counts[b];
  underflow += other.underflow;
  overflow += other.overflow;
}

namespace {

constexpr std::int64_t kChunk = 10'000;

// Running mean and sum of squared deviations, merged with Chan's update.
struct Moments {
  std::int64_t n = 0;
  double mean = 0.0, m2 = 0.0;
  Histogram hist{0.0, 1.0, std::vector<std::int64_t>(kHistogramBins, 0), 0, 0};

  void add(double x) {
    if (!std::isfinite(x)) return;
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
    hist.add(x);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    mean += d * nb / (na + nb);
    m2 += o.m2 + d * d * na * nb / (na + nb);
    n += o.n;
    hist.merge(o.hist);
  }

  RatioSummary summary() const {
    return {mean, n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0, n, hist};
  }
};

struct ChunkResult {
  Moments accept, reject, agreed, agreed_alt;
};

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : std::nan(""); }

}  // namespace

RatioStats posterior_ratio_mc(const DirichletPosterior& posterior, std::int64_t n_samples, std::uint64_t seed,
                              unsigned threads) {
  if (n_samples < kMinRatioSamples) throw ValidationError("posterior_ratio_mc needs at least 10000 samples");
  for (double a : posterior.posterior_alpha)
    if (!(a > 0.0)) throw ValidationError("posterior concentrations must be positive");

  const auto chunks = static_cast<std::size_t>((n_samples + kChunk - 1) / kChunk);
  std::vector<ChunkResult> results(chunks);
  parallel_for(chunks, threads ? threads : max_threads(), [&](std::size_t c) {
    Rng rng = make_rng(seed, c);
    std::array<std::gamma_distribution<double>, 3> gamma{
        std::gamma_distribution<double>(posterior.posterior_alpha[0]),
        std::gamma_distribution<double>(posterior.posterior_alpha[1]),
        std::gamma_distribution<double>(posterior.posterior_alpha[2])};
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(n_samples, begin + kChunk);
    auto& out = results[c];
    for (std::int64_t s = begin; s < end; ++s) {
      const double g1 = gamma[0](rng), g2 = gamma[1](rng), g3 = gamma[2](rng);
      const double sum = g1 + g2 + g3;
      const double p1 = g1 / sum, p2 = g2 / sum, p3 = g3 / sum;
      out.accept.add(safe_ratio(p1, p1 + 0.5 * p2));
      out.reject.add(safe_ratio(p3, p3 + 0.5 * p2));
      out.agreed.add(safe_ratio(p1, p3));
      out.agreed_alt.add(safe_ratio(p1, p1 + p3));
    }
  });

  ChunkResult total;
  for (const auto& r : results) {
    total.accept.merge(r.accept);
    total.reject.merge(r.reject);
    total.agreed.merge(r.agreed);
    total.agreed_alt.merge(r.agreed_alt);
  }
  return {total.accept.summary(), total.reject.summary(), total.agreed.summary(), total.agreed_alt.summary(),
          n_samples};
}

}  // namespace peerreview
