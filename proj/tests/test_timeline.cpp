#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "peerreview/synthetic.hpp"
#include "peerreview/timeline.hpp"

using namespace peerreview;

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("series match brute-force recomputation") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = fixture::random_corpus(rng);
    const auto times = step_times(c.reviews);
    for (auto field : {ReviewField::confidence, ReviewField::quality, ReviewField::impact, ReviewField::length}) {
      const auto got = moving_window_mean(c.reviews, field, times, days(4));
      const auto want = oracle::window_means(c.reviews, field, times, days(4));
      REQUIRE(got.size() == want.size());
      for (std::size_t k = 0; k < got.size(); ++k) {
        CHECK(got[k].t == want[k].t);
        CHECK(got[k].n == want[k].n);
        CHECK(close(got[k].value, want[k].mean));
        CHECK(close(*got[k].se, want[k].se));
      }
    }
    const auto quorum = papers_below_quorum(c.reviews, times, 3);
    const auto want_q = oracle::below_quorum(c.reviews, times, 3);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(quorum[k].value == static_cast<double>(want_q[k]));

    const auto per = reviews_per_paper_series(c.reviews, times);
    const auto want_p = oracle::per_paper_stats(c.reviews, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      CHECK(per[k].min == want_p[k].min);
      CHECK(per[k].max == want_p[k].max);
      CHECK(per[k].median == want_p[k].median);
      CHECK(close(per[k].mean, want_p[k].mean));
      CHECK(per[k].papers == want_p[k].papers);
    }

    const auto corr = duplicate_correlation_series(c.reviews, c.pairs, times);
    const auto want_c = oracle::duplicate_correlation(c.reviews, c.pairs, times);
    REQUIRE(corr.size() == want_c.size());
    for (std::size_t k = 0; k < corr.size(); ++k) {
      CHECK(corr[k].t == want_c[k].t);
      CHECK(corr[k].n == want_c[k].n);
      CHECK(std::abs(corr[k].value - want_c[k].rho) < 1e-12);
      CHECK(std::abs(*corr[k].se * *corr[k].se - want_c[k].se * want_c[k].se) < 1e-12);  // se is steep at |rho| = 1
    }
  }
}

TEST_CASE("series are invariant to row order") {
  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = fixture::random_corpus(rng);
    const auto r2 = fixture::shuffled(c.reviews, rng);
    const auto p2 = fixture::shuffled(c.pairs, rng);
    const auto times = step_times(c.reviews);
    CHECK(times == step_times(r2));
    auto same = [](const TimeSeries& a, const TimeSeries& b) {
      if (a.size() != b.size()) return false;
      for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k].t != b[k].t || a[k].value != b[k].value || a[k].se != b[k].se || a[k].n != b[k].n) return false;
      return true;
    };
    CHECK(same(cumulative_reviews(c.reviews), cumulative_reviews(r2)));
    CHECK(same(moving_window_mean(c.reviews, ReviewField::length, times), moving_window_mean(r2, ReviewField::length, times)));
    CHECK(same(papers_below_quorum(c.reviews, times), papers_below_quorum(r2, times)));
    CHECK(same(duplicate_correlation_series(c.reviews, c.pairs, times), duplicate_correlation_series(r2, p2, times)));
  }
}

TEST_CASE("cumulative counts and sample times") {
  const std::vector<ReviewRecord> rows = {fixture::review("P1", "R1", 5, "2014-07-01T10:00:00Z"),
                                          fixture::review("P2", "R1", 5, "2014-07-01T10:00:00Z"),
                                          fixture::review("P1", "R2", 5, "2014-07-03T08:00:00Z")};
  const auto cum = cumulative_reviews(rows);
  REQUIRE(cum.size() == 2);
  CHECK(cum[0].value == 2);
  CHECK(cum[1].value == 3);
  const auto times = step_times(rows);
  REQUIRE(times.size() == 3);
  CHECK(format_timestamp(times.front()) == "2014-07-02T00:00:00Z");
  CHECK(format_timestamp(times.back()) == "2014-07-04T00:00:00Z");
  // Window [t - 4d, t) at t = 07-03T08:00 excludes the review arriving at t.
  const std::vector<Timestamp> at = {parse_timestamp("2014-07-03T08:00:00Z")};
  const auto w = moving_window_mean(rows, ReviewField::quality, at);
  REQUIRE(w.size() == 1);
  CHECK(w[0].n == 2);
  CHECK(papers_below_quorum(rows, at, 2)[0].value == 1);
  CHECK_THROWS_AS(reviews_per_paper_series(rows, std::vector<Timestamp>{times[1], times[0]}), ValidationError);
}

TEST_CASE("Welch test against a hand-computed fixture") {
  const std::vector<double> a = {1, 2, 3, 4, 5}, b = {2, 4, 6, 8, 10, 12};
  const auto r = welch_t_test(a, b);
  CHECK(std::abs(r.t_stat - (-2.3764)) < 5e-5);
  CHECK(std::abs(r.dof - 6.9723) < 5e-5);
  CHECK(std::abs(r.p_value - 0.0493) < 5e-5);
  const auto s = welch_t_test(b, a);
  CHECK(s.t_stat == -r.t_stat);
  CHECK(s.p_value == doctest::Approx(r.p_value).epsilon(1e-14));
  CHECK_THROWS_AS(welch_t_test(std::vector<double>{1}, b), ValidationError);
  const auto flat = welch_t_test(std::vector<double>{2, 2}, std::vector<double>{2, 2, 2});
  CHECK(flat.p_value == 1.0);
}

TEST_CASE("deadline split") {
  std::vector<ReviewRecord> rows;
  for (int i = 0; i < 4; ++i) rows.push_back(fixture::review("P" + std::to_string(i), "R1", 5, "2014-07-10T00:00:00Z", 3 + i % 2));
  for (int i = 0; i < 4; ++i) rows.push_back(fixture::review("Q" + std::to_string(i), "R2", 5, "2014-07-25T00:00:00Z", 2 + i % 2));
  rows.push_back(fixture::review("Z", "R3", 5, "2014-08-10T00:00:00Z", 5));
  const auto r = deadline_split_test(rows, ReviewField::confidence);
  CHECK(r.n_before == 4);
  CHECK(r.n_after == 4);
  CHECK(r.mean_before == 3.5);
  CHECK(r.mean_after == 2.5);
  CHECK(r.p_value >= 0.0);
  CHECK(r.p_value <= 1.0);
  CHECK_THROWS_AS(deadline_split_test(rows, ReviewField::confidence, kDefaultCutoff, kDefaultDeadline), ValidationError);
}

TEST_CASE("an injected confidence drop is detected") {
  synthetic::DatasetConfig cfg;
  cfg.seed = 4;
  const auto rows = synthetic::timeline_reviews(6000, 1500, cfg);
  CHECK(deadline_split_test(rows, ReviewField::confidence).p_value < 1e-3);
}

namespace {

struct PairCorpus {
  std::vector<ReviewRecord> reviews;
  std::vector<DuplicatePair> pairs;
  std::vector<Timestamp> times;
};

PairCorpus pair_corpus(std::size_t n_pairs, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<int> hour(0, 24 * 20 - 1);
  const auto start = parse_timestamp("2014-07-01T00:00:00Z");
  PairCorpus c;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const auto a = fixture::id('A', i), b = fixture::id('B', i);
    c.pairs.push_back({a, b, "E"});
    const double f = noise(rng);
    for (const auto& paper : {a, b})
      for (int r = 0; r < 3; ++r) {
        const int q = std::clamp(static_cast<int>(std::lround(5.5 + 1.2 * f + 1.1 * noise(rng))), 1, 10);
        auto rec = fixture::review(paper, "R" + std::to_string(r), q, "2014-07-01T00:00:00Z");
        rec.submitted_at = start + std::chrono::hours(hour(rng));
        c.reviews.push_back(rec);
      }
  }
  for (int d = 2; d <= 21; ++d) c.times.push_back(start + days(d));
  return c;
}

}  // namespace

TEST_CASE("bootstrap band") {
  const auto c = pair_corpus(60, 1);
  BootstrapOptions o;
  o.resamples = 200;
  o.seed = 3;
  const auto band = bootstrap_correlation_band(c.reviews, c.pairs, c.times, o);
  REQUIRE_FALSE(band.empty());
  const auto point = duplicate_correlation_series(c.reviews, c.pairs, c.times);
  REQUIRE(band.size() == point.size());
  CHECK(band.back().estimate == point.back().value);
  // Anchored: every trajectory ends at the point estimate.
  CHECK(band.back().lower == point.back().value);
  CHECK(band.back().upper == point.back().value);
  for (const auto& p : band) {
    CHECK(p.lower <= p.median);
    CHECK(p.median <= p.upper);
  }
  SUBCASE("deterministic") {
    const auto again = bootstrap_correlation_band(c.reviews, c.pairs, c.times, o);
    CHECK(again[band.size() / 2].lower == band[band.size() / 2].lower);
  }
  SUBCASE("unanchored bands have width at the end") {
    o.anchor = false;
    const auto free = bootstrap_correlation_band(c.reviews, c.pairs, c.times, o);
    CHECK(free.back().upper - free.back().lower > 0.0);
  }
  SUBCASE("a single full-sample resample collapses to the estimate") {
    o.resamples = 1;
    o.anchor = false;
    o.resampler = [](std::size_t n, Rng&) {
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), 0);
      return all;
    };
    for (const auto& p : bootstrap_correlation_band(c.reviews, c.pairs, c.times, o)) {
      CHECK(p.lower == p.estimate);
      CHECK(p.upper == p.estimate);
    }
  }
  SUBCASE("resample floor") {
    o.resamples = 99;
    CHECK_THROWS_AS(bootstrap_correlation_band(c.reviews, c.pairs, c.times, o), ValidationError);
  }
}

TEST_CASE("band narrows with more pairs") {
  BootstrapOptions o;
  o.resamples = 200;
  o.anchor = false;
  const auto small = pair_corpus(50, 2), large = pair_corpus(500, 2);
  const auto a = bootstrap_correlation_band(small.reviews, small.pairs, small.times, o);
  const auto b = bootstrap_correlation_band(large.reviews, large.pairs, large.times, o);
  CHECK(b.back().upper - b.back().lower < 0.6 * (a.back().upper - a.back().lower));
}

TEST_CASE("series CSV") {
  TimeSeries s = {{parse_timestamp("2014-07-01T00:00:00Z"), 1.5, std::nullopt, 2},
                  {parse_timestamp("2014-07-02T00:00:00Z"), 2.0, 0.25, 3}};
  std::ostringstream out;
  write_series_csv(out, s);
  CHECK(out.str() == "t,value,se,n\n2014-07-01T00:00:00Z,1.5,,2\n2014-07-02T00:00:00Z,2,0.25,3\n");
}
