#include "peerreview/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

namespace peerreview::synthetic {

std::vector<Edge> balanced_assignment(std::size_t n_papers, std::size_t n_reviewers, std::size_t per_reviewer,
                                      Rng& rng) {
  if (per_reviewer > n_papers) throw ValidationError("reviewers cannot take more papers than exist");
  std::vector<std::size_t> load(n_papers, 0);
  std::uniform_int_distribution<std::size_t> pick(0, n_papers - 1);
  std::vector<Edge> edges;
  edges.reserve(n_reviewers * per_reviewer);
  std::vector<std::size_t> mine;
  for (std::size_t r = 0; r < n_reviewers; ++r) {
    mine.clear();
    while (mine.size() < per_reviewer) {
      const auto a = pick(rng), b = pick(rng);
      const auto p = load[a] <= load[b] ? a : b;
      if (std::ranges::find(mine, p) != mine.end()) continue;
      mine.push_back(p);
      ++load[p];
      edges.push_back({p, r});
    }
  }
  return edges;
}

LatentDraw sample_scores(const AssignmentGraph& graph, const CalibrationParams& params, Rng& rng) {
  std::normal_distribution<double> normal;
  LatentDraw d;
  d.f.resize(graph.num_papers());
  d.b.resize(graph.num_reviewers());
  for (auto& v : d.f) v = std::sqrt(params.alpha_f) * normal(rng);
  for (auto& v : d.b) v = std::sqrt(params.alpha_b) * normal(rng);
  d.scores.resize(graph.num_edges());
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const auto& edge = graph.edges()[e];
    d.scores[e] = params.mu + d.f[edge.paper] + d.b[edge.reviewer] + std::sqrt(params.sigma2) * normal(rng);
  }
  return d;
}

CalibrationCorpus calibration_corpus(const CalibrationParams& params, std::uint64_t seed, std::size_t n_papers,
                                     std::size_t n_reviewers, std::size_t per_reviewer) {
  Rng assign = make_rng(seed, 0);
  Rng scores = make_rng(seed, 1);
  AssignmentGraph graph(n_papers, n_reviewers, balanced_assignment(n_papers, n_reviewers, per_reviewer, assign));
  auto draw = sample_scores(graph, params, scores);
  return {std::move(graph), std::move(draw)};
}

CalibrationParams conference_params() { return CalibrationParams::from_variances(5.5, 1.28, 0.24, 1.27); }

std::vector<std::pair<double, double>> bivariate_normal(std::size_t n, double rho, Rng& rng) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw ValidationError("rho must lie in [-1, 1]");
  std::normal_distribution<double> normal;
  std::vector<std::pair<double, double>> out(n);
  const double c = std::sqrt(1.0 - rho * rho);
  for (auto& [x, y] : out) {
    x = normal(rng);
    y = rho * x + c * normal(rng);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full datasets

namespace {

std::string make_id(char prefix, std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%04zu", prefix, k + 1);
  return buf;
}

int clamp_round(double v, int lo, int hi) { return std::clamp(static_cast<int>(std::lround(v)), lo, hi); }

Timestamp uniform_time(Rng& rng, Timestamp lo, Timestamp hi) {
  std::uniform_int_distribution<std::int64_t> d(0, (hi - lo).count() - 1);
  return lo + Duration(d(rng));
}

struct Arrival {
  Timestamp t;
  bool late;
};

// Most reviews arrive in the days before the deadline; a late share arrives
// before the rebuttal cutoff and a small tail after it.
Arrival draw_arrival(Rng& rng, const DatasetConfig& c) {
  std::uniform_real_distribution<double> u01;
  const double u = u01(rng);
  if (u < c.very_late_fraction) return {uniform_time(rng, c.cutoff, c.cutoff + days(7)), true};
  if (u < c.very_late_fraction + c.late_fraction) return {uniform_time(rng, c.deadline, c.cutoff), true};
  const auto span = (c.deadline - c.review_start).count();
  const auto offset = static_cast<std::int64_t>(std::sqrt(u01(rng)) * static_cast<double>(span - 1));
  return {c.review_start + Duration(offset), false};
}

int draw_confidence(Rng& rng, const DatasetConfig& c, bool late) {
  std::normal_distribution<double> normal(c.confidence_mean, c.confidence_sd);
  return clamp_round(normal(rng) - (late ? c.late_confidence_shift : 0.0), kMinConfidence, kMaxConfidence);
}

std::int64_t draw_words(Rng& rng, double log_mean, double log_sd, bool late) {
  std::lognormal_distribution<double> d(log_mean, log_sd);
  return std::max<std::int64_t>(1, std::llround(d(rng) * (late ? 0.9 : 1.0)));
}

// Venue frequencies shaped like the published-elsewhere tail of 2014.
const std::vector<std::pair<const char*, double>>& venue_weights() {
  static const std::vector<std::pair<const char*, double>> w = {
      {"AAAI", 72},      {"AISTATS", 57}, {"ICML", 33},  {"CVPR", 17},     {"NeurIPS", 15},
      {"JMLR", 14},      {"IJCAI", 14},   {"ICLR", 13},  {"UAI", 11},      {"KDD", 9},
      {"COLT", 9},       {"ECCV", 8},     {"ICCV", 8},   {"ACL", 7},       {"EMNLP", 7},
      {"ECML-PKDD", 9},  {"ICDM", 6},     {"SDM", 6},    {"WWW", 5},       {"Neural Computation", 5}};
  return w;
}

}  // namespace

Dataset generate_dataset(const DatasetConfig& c) {
  if (c.n_papers < 2 * c.duplicate_pairs) throw ValidationError("too many duplicate pairs for the paper count");
  if (c.withdrawn > c.duplicate_pairs) throw ValidationError("withdrawn papers are drawn from duplicate pairs");
  if (!(c.accept_rate > 0.0 && c.accept_rate < 1.0)) throw ValidationError("accept_rate must lie in (0, 1)");

  Rng assign_rng = make_rng(c.seed, 0), latent_rng = make_rng(c.seed, 1), review_rng = make_rng(c.seed, 2),
      outcome_rng = make_rng(c.seed, 3);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u01;
  const auto& p = c.params;

  const auto edges = balanced_assignment(c.n_papers, c.n_reviewers, c.per_reviewer, assign_rng);

  // True qualities; duplicated papers share theirs.
  std::vector<double> f(c.n_papers), b(c.n_reviewers);
  for (auto& v : f) v = std::sqrt(p.alpha_f) * normal(latent_rng);
  for (auto& v : b) v = std::sqrt(p.alpha_b) * normal(latent_rng);
  std::vector<std::size_t> order(c.n_papers);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), latent_rng);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t k = 0; k < c.duplicate_pairs; ++k) {
    auto a = order[2 * k], d = order[2 * k + 1];
    if (a > d) std::swap(a, d);
    f[d] = f[a];
    pairs.emplace_back(a, d);
  }

  Dataset ds;
  std::vector<double> quality_sum(c.n_papers, 0.0);
  std::vector<int> quality_n(c.n_papers, 0);
  for (const auto& e : edges) {
    ReviewRecord r;
    r.paper_id = make_id('P', e.paper);
    r.reviewer_id = make_id('R', e.reviewer);
    const double y = p.mu + f[e.paper] + b[e.reviewer] + std::sqrt(p.sigma2) * normal(review_rng);
    r.quality = clamp_round(y, kMinQuality, kMaxQuality);
    r.impact = f[e.paper] + normal(review_rng) > 0.8 ? 2 : 1;
    const auto arrival = draw_arrival(review_rng, c);
    r.submitted_at = arrival.t;
    r.confidence = draw_confidence(review_rng, c, arrival.late);
    r.summary_words = draw_words(review_rng, 4.0, 0.5, arrival.late);
    r.body_words = draw_words(review_rng, 6.0, 0.6, arrival.late);
    quality_sum[e.paper] += r.quality;
    ++quality_n[e.paper];
    ds.reviews.push_back(std::move(r));
  }

  // Decisions: each paper is accepted when its mean raw quality is in the top
  // accept_rate fraction; ties are broken by paper index.
  std::vector<double> mean_q(c.n_papers, -1.0);
  for (std::size_t i = 0; i < c.n_papers; ++i)
    if (quality_n[i]) mean_q[i] = quality_sum[i] / quality_n[i];
  std::vector<std::size_t> rank(c.n_papers);
  std::iota(rank.begin(), rank.end(), 0);
  std::ranges::stable_sort(rank, [&](std::size_t a, std::size_t d) { return mean_q[a] > mean_q[d]; });
  std::vector<char> accepted(c.n_papers, 0);
  const auto n_accept = static_cast<std::size_t>(std::floor(c.accept_rate * static_cast<double>(c.n_papers)));
  for (std::size_t k = 0; k < n_accept; ++k) accepted[rank[k]] = 1;

  std::vector<char> in_pair(c.n_papers, 0), withdrawn(c.n_papers, 0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, d] = pairs[k];
    in_pair[a] = in_pair[d] = 1;
    ds.duplicates.push_back({make_id('P', a), make_id('P', d), "E" + std::to_string(k + 1)});
    const bool gone = k < c.withdrawn;
    withdrawn[a] = withdrawn[d] = gone;
    auto verdict = [&](std::size_t i) { return gone ? Verdict::withdrawn : (accepted[i] ? Verdict::accept : Verdict::reject); };
    ds.decisions.push_back({make_id('P', a), Committee::one, verdict(a)});
    ds.decisions.push_back({make_id('P', d), Committee::two, verdict(d)});
  }
  for (std::size_t i = 0; i < c.n_papers; ++i)
    if (!in_pair[i] && quality_n[i]) ds.decisions.push_back({make_id('P', i), Committee::main, accepted[i] ? Verdict::accept : Verdict::reject});

  // Outcomes: accepted papers appear here; rejected ones scatter.
  const auto& venues = venue_weights();
  std::vector<double> weights;
  for (const auto& v : venues) weights.push_back(v.second);
  std::discrete_distribution<std::size_t> venue_pick(weights.begin(), weights.end());
  const double sd_f = std::sqrt(p.alpha_f);
  for (std::size_t i = 0; i < c.n_papers; ++i) {
    if (withdrawn[i] || !quality_n[i]) continue;
    PaperOutcome o;
    o.paper_id = make_id('P', i);
    o.track = accepted[i] ? Track::accepted : Track::rejected;
    if (accepted[i]) {
      o.fate = Fate::this_conference;
    } else {
      const double u = u01(outcome_rng);
      o.fate = u < 0.45 ? Fate::other_venue : u < 0.64 ? Fate::preprint_only : u < 0.72 ? Fate::pdf_only : Fate::untraced;
      if (o.fate == Fate::other_venue) o.venue = venues[venue_pick(outcome_rng)].first;
    }
    if (o.fate != Fate::untraced) {
      const double x = 1.2 + (accepted[i] ? 0.3 : 0.0) + c.citation_signal * f[i] / sd_f + 0.5 * normal(outcome_rng);
      o.citations = std::max<std::int64_t>(0, std::llround(std::pow(10.0, x) - 1.0));
    }
    ds.outcomes.push_back(std::move(o));
  }

  for (std::size_t j = 0; j < c.n_reviewers; ++j) ds.reviewer_roster.push_back(make_id('R', j));
  return ds;
}

std::vector<ReviewRecord> timeline_reviews(std::size_t n_reviews, std::size_t n_papers, const DatasetConfig& c) {
  if (n_papers == 0) throw ValidationError("timeline corpus needs at least one paper");
  Rng rng = make_rng(c.seed, 4);
  std::normal_distribution<double> normal;
  std::vector<ReviewRecord> out;
  out.reserve(n_reviews);
  for (std::size_t k = 0; k < n_reviews; ++k) {
    ReviewRecord r;
    r.paper_id = make_id('P', k % n_papers);
    r.reviewer_id = make_id('R', k);
    r.quality = clamp_round(c.params.mu + std::sqrt(c.params.alpha_f + c.params.sigma2) * normal(rng), kMinQuality,
                            kMaxQuality);
    r.impact = normal(rng) > 0.5 ? 2 : 1;
    const auto arrival = draw_arrival(rng, c);
    r.submitted_at = arrival.t;
    r.confidence = draw_confidence(rng, c, arrival.late);
    r.summary_words = draw_words(rng, 4.0, 0.5, arrival.late);
    r.body_words = draw_words(rng, 6.0, 0.6, arrival.late);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// 2014 fate fixture

std::vector<PaperOutcome> rejected_fate_fixture(std::size_t untraced) {
  // Spellings rotate through variants the alias table must fold together.
  const std::vector<std::pair<std::vector<const char*>, int>> big = {
      {{"AAAI", "AAAI 2015", "aaai-16", "AAAI Conference on Artificial Intelligence"}, 72},
      {{"AISTATS", "AISTATS 2015", "Artificial Intelligence and Statistics"}, 57},
      {{"ICML", "ICML 2015", "International Conference on Machine Learning"}, 33},
      {{"CVPR", "CVPR 2015", "IEEE Conference on Computer Vision and Pattern Recognition"}, 17},
      {{"NIPS 2015", "NeurIPS", "Advances in Neural Information Processing Systems"}, 15},
      {{"JMLR", "Journal of Machine Learning Research"}, 14},
      {{"IJCAI", "IJCAI-15"}, 14},
      {{"ICLR", "ICLR 2016"}, 13},
      {{"UAI", "UAI 2015", "Uncertainty in Artificial Intelligence"}, 11},
  };
  // 181 papers over venues that each stay below the listing threshold.
  const std::vector<const char*> small = {"KDD",  "COLT",  "ECCV",       "ICCV",   "ACL",   "EMNLP", "WWW",
                                          "SDM",  "ICDM",  "ECML-PKDD",  "ICASSP", "ICRA",  "IROS",  "BMVC",
                                          "ACML", "WSDM",  "CIKM",       "SIGIR",  "NAACL", "ALT",   "Interspeech"};
  std::vector<PaperOutcome> out;
  std::size_t next = 0;
  auto add = [&](Fate fate, std::optional<std::string> venue) {
    PaperOutcome o;
    o.paper_id = make_id('X', next++);
    o.track = Track::rejected;
    o.fate = fate;
    o.venue = std::move(venue);
    o.citations = fate == Fate::untraced ? 0 : static_cast<std::int64_t>(next % 97);
    out.push_back(std::move(o));
  };
  for (const auto& [names, count] : big)
    for (int k = 0; k < count; ++k) add(Fate::other_venue, std::string(names[k % names.size()]));
  int remaining = 181;
  for (std::size_t v = 0; remaining > 0; ++v) {
    const int n = std::min(9, remaining);
    for (int k = 0; k < n; ++k) add(Fate::other_venue, std::string(small[v]));
    remaining -= n;
  }
  for (int k = 0; k < 177; ++k) add(Fate::preprint_only, std::nullopt);
  for (int k = 0; k < 76; ++k) add(Fate::pdf_only, std::nullopt);
  for (std::size_t k = 0; k < untraced; ++k) add(Fate::untraced, std::nullopt);
  return out;
}

}  // namespace peerreview::synthetic
