#include <cmath>
#include <random>

#include "doctest.h"
#include "peerreview/consistency_stats.hpp"
#include "peerreview/errors.hpp"
#include "peerreview/random.hpp"

using namespace peerreview;

namespace {

const ConfusionMatrix kExperiment{22, 21, 22, 101};

// Independent pmf by the multiplicative recurrence from k = 0.
std::vector<double> pmf_table(std::int64_t n, double p) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  long double v = std::pow(static_cast<long double>(1 - p), n);
  for (std::int64_t k = 0; k <= n; ++k) {
    out[static_cast<std::size_t>(k)] = static_cast<double>(v);
    v = v * (n - k) / (k + 1) * p / (1 - p);
  }
  return out;
}

}  // namespace

TEST_CASE("confusion statistics of the experiment") {
  const auto s = confusion_stats(kExperiment);
  CHECK(std::abs(*s.inconsistency - 43.0 / 166.0) < 1e-12);
  CHECK(*s.accept_precision_c1 == doctest::Approx(22.0 / 43.0));
  CHECK(*s.accept_precision_c2 == doctest::Approx(0.5));
  CHECK(*s.reject_precision_c1 == doctest::Approx(101.0 / 123.0));
  CHECK(*s.reject_precision_c2 == doctest::Approx(101.0 / 122.0));
  CHECK(*s.agreed_accept_rate == doctest::Approx(22.0 / 101.0));
  CHECK(*s.agreed_accept_rate_alt == doctest::Approx(22.0 / 123.0));
  const double p = 21.0 / 43.0;
  CHECK(*s.inconsistency_se == doctest::Approx(std::sqrt(p * (1 - p) / 43.0)));
}

TEST_CASE("zero denominators leave fields absent") {
  const auto s = confusion_stats(ConfusionMatrix{0, 0, 0, 5});
  CHECK(s.inconsistency == 0.0);
  CHECK_FALSE(s.accept_precision_c1);
  CHECK_FALSE(s.accept_precision_avg);
  CHECK_FALSE(s.inconsistency_se);
  CHECK(s.agreed_accept_rate == 0.0);
  CHECK_FALSE(confusion_stats(ConfusionMatrix{3, 0, 0, 0}).agreed_accept_rate);
  CHECK_THROWS_AS(confusion_stats(ConfusionMatrix{}), ValidationError);
  CHECK_THROWS_AS(confusion_stats(ConfusionMatrix{1, -1, 0, 0}), ValidationError);
}

TEST_CASE("confusion statistics are scale free") {
  Rng rng(21);
  std::uniform_int_distribution<std::int64_t> cell(0, 200), factor(2, 50);
  for (int trial = 0; trial < 100; ++trial) {
    const ConfusionMatrix m{cell(rng) + 1, cell(rng), cell(rng), cell(rng) + 1};
    const auto k = factor(rng);
    const auto a = confusion_stats(m), b = confusion_stats(ConfusionMatrix{m.aa * k, m.ar * k, m.ra * k, m.rr * k});
    for (auto field : {&ConsistencySummary::inconsistency, &ConsistencySummary::accept_precision_avg,
                       &ConsistencySummary::reject_precision_avg, &ConsistencySummary::agreed_accept_rate}) {
      REQUIRE((a.*field).has_value() == (b.*field).has_value());
      if (a.*field) CHECK(std::abs(*(a.*field) - *(b.*field)) < 1e-12);
    }
  }
}

TEST_CASE("random committee baseline") {
  const auto e = random_committee_expectation(166, 0.25);
  CHECK(e.aa == doctest::Approx(10.375));
  CHECK(e.ar == doctest::Approx(31.125));
  CHECK(e.rr == doctest::Approx(93.375));
  CHECK(e.total() == 166.0);
  const auto s = confusion_stats(e);
  CHECK(*s.inconsistency == doctest::Approx(0.375));
  CHECK(*s.accept_precision_avg == doctest::Approx(0.25));
  CHECK(*s.reject_precision_avg == doctest::Approx(0.75));
  CHECK_THROWS_AS(random_committee_expectation(10, 1.5), ValidationError);
}

TEST_CASE("binomial check") {
  const auto r = binomial_check(87, 340, 0.23);
  CHECK(r.mean == doctest::Approx(78.2));
  CHECK(std::abs(r.z - 1.13) < 0.01);
  CHECK(r.inside);
  const auto table = pmf_table(340, 0.23);
  CHECK(r.pmf == doctest::Approx(table[87]).epsilon(1e-10));
  double mass = 0.0;
  for (auto k = r.lower; k <= r.upper; ++k) mass += table[static_cast<std::size_t>(k)];
  CHECK(mass == doctest::Approx(r.coverage).epsilon(1e-10));
  CHECK(mass >= 0.95);
  // Dropping either end falls below the level.
  CHECK(mass - table[static_cast<std::size_t>(r.lower)] < 0.95);
  CHECK(mass - table[static_cast<std::size_t>(r.upper)] < 0.95);
  CHECK_FALSE(binomial_check(120, 340, 0.23).inside);
  CHECK_THROWS_AS(binomial_check(5, 4, 0.5), ValidationError);
}

TEST_CASE("binomial interval coverage over synthetic draws") {
  const auto r = binomial_check(0, 340, 0.23);
  std::binomial_distribution<std::int64_t> draw(340, 0.23);
  Rng rng(22);
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto k = draw(rng);
    inside += k >= r.lower && k <= r.upper;
  }
  CHECK(inside >= 930);
  CHECK(inside <= 970);
}

TEST_CASE("Dirichlet posterior") {
  const auto post = dirichlet_posterior({1, 1, 1}, outcome_counts(kExperiment));
  CHECK(post.counts == std::array<double, 3>{22, 43, 101});
  CHECK(post.means[0] == doctest::Approx(23.0 / 169.0));
  CHECK(post.means[1] == doctest::Approx(44.0 / 169.0));
  CHECK(post.means[2] == doctest::Approx(102.0 / 169.0));
  CHECK(post.means[0] + post.means[1] + post.means[2] == doctest::Approx(1.0));
  CHECK(post.variances[0] == doctest::Approx(23.0 * 146.0 / (169.0 * 169.0 * 170.0)));
  CHECK_THROWS_AS(dirichlet_posterior({0, 1, 1}, {1, 1, 1}), ValidationError);
  CHECK_THROWS_AS(dirichlet_posterior({1, 1, 1}, {-1, 1, 1}), ValidationError);
}

TEST_CASE("Dirichlet conjugacy") {
  const std::array<double, 3> k1{4, 7, 11}, k2{3, 0, 9};
  const auto once = dirichlet_posterior({1, 2, 0.5}, {7, 7, 20});
  const auto first = dirichlet_posterior({1, 2, 0.5}, k1);
  const auto seq = dirichlet_posterior(first.posterior_alpha, k2);
  for (int i = 0; i < 3; ++i) {
    CHECK(seq.posterior_alpha[i] == once.posterior_alpha[i]);
    CHECK(seq.means[i] == doctest::Approx(once.means[i]));
  }
}

TEST_CASE("ratio MC matches the Beta marginal of p1 / (p1 + p3)") {
  // Under Dir(a1, a2, a3), p1 / (p1 + p3) ~ Beta(a1, a3).
  const auto post = dirichlet_posterior({1, 1, 1}, outcome_counts(kExperiment));
  const double a = post.posterior_alpha[0], b = post.posterior_alpha[2];
  const double mean = a / (a + b), sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1)));
  double err_small = 0.0, err_large = 0.0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto small = posterior_ratio_mc(post, 10'000, seed);
    const auto large = posterior_ratio_mc(post, 160'000, seed + 100);
    CHECK(std::abs(small.agreed_accept_rate_alt.mean - mean) < 5 * sd / std::sqrt(10'000.0));
    CHECK(std::abs(small.agreed_accept_rate_alt.sd - sd) < 0.05 * sd);
    err_small += std::pow(small.agreed_accept_rate_alt.mean - mean, 2);
    err_large += std::pow(large.agreed_accept_rate_alt.mean - mean, 2);
  }
  // RMS error over seeds shrinks about fourfold for 16x the samples.
  const double ratio = std::sqrt(err_small / err_large);
  CHECK(ratio > 2.0);
  CHECK(ratio < 8.0);
}

TEST_CASE("ratio MC agrees with a test-side sampler") {
  const auto post = dirichlet_posterior({1, 1, 1}, outcome_counts(kExperiment));
  const auto mc = posterior_ratio_mc(post, 100'000, 7);
  std::mt19937_64 rng(99);
  std::array<std::gamma_distribution<double>, 3> g = {
      std::gamma_distribution<double>(post.posterior_alpha[0]), std::gamma_distribution<double>(post.posterior_alpha[1]),
      std::gamma_distribution<double>(post.posterior_alpha[2])};
  const int n = 100'000;
  double acc = 0.0, rej = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x1 = g[0](rng), x2 = g[1](rng), x3 = g[2](rng);
    acc += x1 / (x1 + x2 / 2);
    rej += x3 / (x3 + x2 / 2);
  }
  CHECK(std::abs(mc.accept_precision.mean - acc / n) < 0.003);
  CHECK(std::abs(mc.reject_precision.mean - rej / n) < 0.002);
  CHECK(mc.accept_precision.histogram.counts.size() == kHistogramBins);
  std::int64_t total = mc.accept_precision.histogram.underflow + mc.accept_precision.histogram.overflow;
  for (auto c : mc.accept_precision.histogram.counts) total += c;
  CHECK(total == mc.accept_precision.samples);
}

TEST_CASE("ratio MC is deterministic across thread counts") {
  const auto post = dirichlet_posterior({1, 1, 1}, {22, 43, 101});
  const auto a = posterior_ratio_mc(post, 30'000, 5, 1), b = posterior_ratio_mc(post, 30'000, 5, 3);
  CHECK(a.accept_precision.mean == b.accept_precision.mean);
  CHECK(a.agreed_accept_rate.sd == b.agreed_accept_rate.sd);
  CHECK(a.reject_precision.histogram.counts == b.reject_precision.histogram.counts);
  CHECK_THROWS_AS(posterior_ratio_mc(post, 9'999, 5), ValidationError);
}

TEST_CASE("degenerate posterior without inconsistency") {
  const auto post = dirichlet_posterior({1, 1e-6, 1}, {500, 0, 500});
  const auto mc = posterior_ratio_mc(post, 10'000, 1);
  CHECK(mc.accept_precision.mean > 0.999);
  CHECK(mc.reject_precision.mean > 0.999);
}
