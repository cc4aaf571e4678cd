#pragma once

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "peerreview/calibration.hpp"
#include "peerreview/random.hpp"
#include "peerreview/review_data.hpp"
#include "peerreview/time.hpp"

namespace fixture {

using peerreview::Rng;

inline std::string id(char prefix, std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%04zu", prefix, k + 1);
  return buf;
}

// Random bipartite graph with up to `max_edges` distinct edges. Some papers
// and reviewers may stay isolated, so several components are common.
// At least two edges, so centered scores are never identically zero.
inline peerreview::AssignmentGraph random_graph(Rng& rng, std::size_t max_edges = 200) {
  std::uniform_int_distribution<std::size_t> np_d(1, 25), nr_d(2, 20);
  const std::size_t np = np_d(rng), nr = nr_d(rng);
  std::uniform_int_distribution<std::size_t> ne_d(2, std::max<std::size_t>(2, std::min(max_edges, np * nr)));
  const std::size_t target = ne_d(rng);
  std::uniform_int_distribution<std::size_t> pick_p(0, np - 1), pick_r(0, nr - 1);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<peerreview::Edge> edges;
  for (std::size_t tries = 0; edges.size() < target && tries < 20 * target; ++tries) {
    const auto p = pick_p(rng), r = pick_r(rng);
    if (seen.emplace(p, r).second) edges.push_back({p, r});
  }
  return {np, nr, std::move(edges)};
}

inline std::vector<double> random_scores(Rng& rng, std::size_t n, double mu = 5.0, double sd = 1.5) {
  std::normal_distribution<double> d(mu, sd);
  std::vector<double> y(n);
  for (auto& v : y) v = d(rng);
  return y;
}

inline peerreview::ReviewRecord review(std::string paper, std::string reviewer, int quality, std::string when,
                                       int confidence = 3, int impact = 1, std::int64_t words = 100) {
  peerreview::ReviewRecord r;
  r.paper_id = std::move(paper);
  r.reviewer_id = std::move(reviewer);
  r.quality = quality;
  r.impact = impact;
  r.confidence = confidence;
  r.submitted_at = peerreview::parse_timestamp(when);
  r.summary_words = words / 4;
  r.body_words = words - words / 4;
  return r;
}

// Small random review corpus over a few weeks with duplicate pairs; arrival
// times are drawn on a coarse grid so ties in time are frequent.
struct Corpus {
  std::vector<peerreview::ReviewRecord> reviews;
  std::vector<peerreview::DuplicatePair> pairs;
};

inline Corpus random_corpus(Rng& rng, std::size_t max_reviews = 500) {
  std::uniform_int_distribution<std::size_t> np_d(8, 60);
  const std::size_t np = np_d(rng);
  const std::size_t nr = np;
  std::uniform_int_distribution<std::size_t> pick_p(0, np - 1), pick_r(0, nr - 1);
  std::uniform_int_distribution<int> q(1, 10), c(1, 5), imp(1, 2), hour(0, 24 * 28 - 1);
  std::uniform_int_distribution<std::int64_t> words(20, 900);
  const auto start = peerreview::parse_timestamp("2014-06-30T00:00:00Z");
  std::uniform_int_distribution<std::size_t> nrev_d(np, std::min<std::size_t>(max_reviews, np * 6));
  const std::size_t n_reviews = nrev_d(rng);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  Corpus out;
  for (std::size_t tries = 0; out.reviews.size() < n_reviews && tries < 10 * n_reviews; ++tries) {
    const auto p = pick_p(rng), r = pick_r(rng);
    if (!seen.emplace(p, r).second) continue;
    peerreview::ReviewRecord rec;
    rec.paper_id = id('P', p);
    rec.reviewer_id = id('R', r);
    rec.quality = q(rng);
    rec.impact = imp(rng);
    rec.confidence = c(rng);
    rec.submitted_at = start + std::chrono::hours(hour(rng) / 3 * 3);
    rec.summary_words = words(rng) / 5;
    rec.body_words = words(rng);
    out.reviews.push_back(std::move(rec));
  }
  for (std::size_t k = 0; k + 1 < np / 2; k += 2)
    out.pairs.push_back({id('P', k), id('P', k + 1), "E" + std::to_string(k)});
  return out;
}

template <class T>
std::vector<T> shuffled(std::vector<T> v, Rng& rng) {
  std::ranges::shuffle(v, rng);
  return v;
}

}  // namespace fixture
