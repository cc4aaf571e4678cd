#include <cmath>

#include "doctest.h"
#include "peerreview/committee_sim.hpp"

using namespace peerreview;

namespace {

SimConfig config(double s, std::size_t r, std::size_t samples = 20'000, std::uint64_t seed = 1) {
  SimConfig c;
  c.subjectivity = s;
  c.reviewers_per_paper = r;
  c.total_paper_samples = samples;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  SimConfig c;
  CHECK(c.trials() == 200);
  CHECK(c.accepted_per_committee() == 115);
  c.accept_rate = 0.001;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.subjectivity = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.total_paper_samples = 100;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.reviewers_per_paper = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("bit-identical for identical configs regardless of threads") {
  auto c = config(0.5, 3);
  c.threads = 1;
  const auto a = simulate_conference(c);
  c.threads = 4;
  const auto b = simulate_conference(c);
  CHECK(a.accept_consistency == b.accept_consistency);
  CHECK(a.std_error == b.std_error);
  c.seed = 2;
  CHECK(simulate_conference(c).accept_consistency != a.accept_consistency);
}

TEST_CASE("bounds") {
  for (double s : {0.05, 0.3, 0.5, 0.8, 1.0}) {
    for (std::size_t r : {1u, 3u}) {
      const auto o = simulate_conference(config(s, r));
      CHECK(o.accept_consistency <= 1.0);
      CHECK(o.std_error >= 0.0);
      CHECK(o.accept_consistency >= 0.23 - 3 * o.std_error);
    }
  }
}

TEST_CASE("limits") {
  CHECK(simulate_conference(config(1e-9, 3)).accept_consistency >= 0.999);
  const auto random = simulate_conference(config(1.0, 1, 100'000));
  CHECK(std::abs(random.accept_consistency - 0.25) <= 0.02);
}

TEST_CASE("more reviewers make committees agree more") {
  double prev = 0.0;
  for (std::size_t r : {1u, 3u, 10u, 30u, 100u}) {
    const auto o = simulate_conference(config(0.5, r));
    CHECK(o.accept_consistency > prev);
    prev = o.accept_consistency;
  }
  // At R = 100 the committee mean still carries noise of variance s/R.
  CHECK(prev > 0.9);
  CHECK(simulate_conference(config(0.5, 2000, 10'000)).accept_consistency > 0.97);
}

TEST_CASE("standard error shrinks as one over root trials") {
  const auto a = simulate_conference(config(0.5, 3, 20'000));
  const auto b = simulate_conference(config(0.5, 3, 80'000));
  CHECK(a.trials * 4 == b.trials);
  CHECK(std::abs(b.std_error / a.std_error - 0.5) <= 0.1);
}

TEST_CASE("curve rows follow sweep order and share the seed") {
  const std::vector<double> rates = {0.1, 0.23};
  const std::vector<std::size_t> rs = {1, 3};
  const auto curve = consistency_curve(config(0.5, 3), rates, rs);
  REQUIRE(curve.size() == 4);
  CHECK(curve[0].accept_rate == 0.1);
  CHECK(curve[1].reviewers == 3);
  CHECK(curve[2].accept_rate == 0.23);
  auto c = config(0.5, 3);
  c.accept_rate = 0.23;
  CHECK(curve[3].outcome.accept_consistency == simulate_conference(c).accept_consistency);
}

TEST_CASE("subjectivity from fitted parameters") {
  CHECK(subjectivity_from_fit(CalibrationParams::from_variances(5.5, 1.28, 0.24, 1.27)) ==
        doctest::Approx(1.27 / 2.55));
  CHECK(subjectivity_from_fit(CalibrationParams::from_variances(0, 2.0, 0.3, 2.0)) == 0.5);
  CalibrationParams p;
  p.alpha_f = 1.0;
  p.sigma2 = 0.0;
  CHECK(subjectivity_from_fit(p) == 0.0);
}
