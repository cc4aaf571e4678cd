#include "peerreview/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "peerreview/parallel.hpp"

namespace peerreview {

// ---------------------------------------------------------------------------
// AssignmentGraph

namespace {

void build_csr(std::size_t n, const std::vector<std::size_t>& keys, std::vector<std::size_t>& offsets,
               std::vector<std::size_t>& adj) {
  offsets.assign(n + 1, 0);
  for (auto k : keys) ++offsets[k + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  adj.resize(keys.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t e = 0; e < keys.size(); ++e) adj[cursor[keys[e]]++] = e;
}

}  // namespace

AssignmentGraph::AssignmentGraph(std::size_t n_papers, std::size_t n_reviewers, std::vector<Edge> edges)
    : n_papers_(n_papers), n_reviewers_(n_reviewers), edges_(std::move(edges)) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges_) {
    if (e.paper >= n_papers_ || e.reviewer >= n_reviewers_)
      throw ValidationError("assignment edge index out of range");
    if (!seen.emplace(e.paper, e.reviewer).second) throw ValidationError("duplicate assignment edge");
  }
  std::vector<std::size_t> pk(edges_.size()), rk(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    pk[e] = edges_[e].paper;
    rk[e] = edges_[e].reviewer;
  }
  build_csr(n_papers_, pk, paper_offsets_, paper_adj_);
  build_csr(n_reviewers_, rk, reviewer_offsets_, reviewer_adj_);
}

std::span<const std::size_t> AssignmentGraph::paper_edges(std::size_t i) const {
  return {paper_adj_.data() + paper_offsets_[i], paper_offsets_[i + 1] - paper_offsets_[i]};
}

std::span<const std::size_t> AssignmentGraph::reviewer_edges(std::size_t j) const {
  return {reviewer_adj_.data() + reviewer_offsets_[j], reviewer_offsets_[j + 1] - reviewer_offsets_[j]};
}

void AssignmentGraph::set_labels(std::vector<std::string> papers, std::vector<std::string> reviewers) {
  if (papers.size() != n_papers_ || reviewers.size() != n_reviewers_)
    throw ValidationError("label count does not match graph size");
  paper_labels_ = std::move(papers);
  reviewer_labels_ = std::move(reviewers);
}

std::string AssignmentGraph::paper_label(std::size_t i) const {
  return paper_labels_.empty() ? std::to_string(i) : paper_labels_[i];
}

std::string AssignmentGraph::reviewer_label(std::size_t j) const {
  return reviewer_labels_.empty() ? std::to_string(j) : reviewer_labels_[j];
}

ScoredGraph graph_from_reviews(std::span<const ReviewRecord> reviews, ScoreField field,
                               std::span<const std::string> exclude_papers) {
  const std::set<std::string> excluded(exclude_papers.begin(), exclude_papers.end());
  std::vector<const ReviewRecord*> kept;
  for (const auto& r : reviews)
    if (!excluded.contains(r.paper_id)) kept.push_back(&r);
  std::ranges::sort(kept, {}, [](const ReviewRecord* r) { return std::tie(r->paper_id, r->reviewer_id); });

  std::map<std::string, std::size_t> papers, reviewers;
  for (const auto* r : kept) {
    papers.emplace(r->paper_id, 0);
    reviewers.emplace(r->reviewer_id, 0);
  }
  std::vector<std::string> paper_labels, reviewer_labels;
  for (auto& [id, idx] : papers) {
    idx = paper_labels.size();
    paper_labels.push_back(id);
  }
  for (auto& [id, idx] : reviewers) {
    idx = reviewer_labels.size();
    reviewer_labels.push_back(id);
  }

  std::vector<Edge> edges;
  std::vector<double> scores;
  edges.reserve(kept.size());
  scores.reserve(kept.size());
  for (const auto* r : kept) {
    edges.push_back({papers.at(r->paper_id), reviewers.at(r->reviewer_id)});
    switch (field) {
      case ScoreField::quality: scores.push_back(r->quality); break;
      case ScoreField::impact: scores.push_back(r->impact); break;
      case ScoreField::confidence: scores.push_back(r->confidence); break;
    }
  }
  ScoredGraph out{AssignmentGraph(paper_labels.size(), reviewer_labels.size(), std::move(edges)), std::move(scores)};
  out.graph.set_labels(std::move(paper_labels), std::move(reviewer_labels));
  return out;
}

// ---------------------------------------------------------------------------
// Connected components (union-find over papers and reviewers)

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

}  // namespace

Partition connected_components(const AssignmentGraph& graph) {
  const std::size_t np = graph.num_papers();
  DisjointSets sets(np + graph.num_reviewers());
  for (const auto& e : graph.edges()) sets.unite(e.paper, np + e.reviewer);

  Partition out;
  out.block_of_edge.resize(graph.num_edges());
  std::map<std::size_t, std::size_t> block_of_root;
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const auto root = sets.find(graph.edges()[e].paper);
    const auto [it, inserted] = block_of_root.emplace(root, out.blocks.size());
    if (inserted) out.blocks.emplace_back();
    out.blocks[it->second].push_back(e);
    out.block_of_edge[e] = it->second;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parameters and covariance

CalibrationParams CalibrationParams::from_variances(double mu, double alpha_f, double alpha_b, double sigma2) {
  if (!(alpha_f > 0.0) || alpha_b < 0.0 || !(sigma2 > 0.0))
    throw ValidationError("calibration variances require alpha_f > 0, alpha_b >= 0, sigma2 > 0");
  return {mu, alpha_f, alpha_b, sigma2, alpha_b / alpha_f, sigma2 / alpha_f};
}

CalibrationParams CalibrationParams::from_ratios(double mu, double alpha_f, double ratio_b, double ratio_s) {
  if (!(alpha_f > 0.0) || ratio_b < 0.0 || !(ratio_s > 0.0))
    throw ValidationError("calibration ratios require alpha_f > 0, ratio_b >= 0, ratio_s > 0");
  return {mu, alpha_f, ratio_b * alpha_f, ratio_s * alpha_f, ratio_b, ratio_s};
}

CovarianceModel::CovarianceModel(std::shared_ptr<const AssignmentGraph> graph, double ratio_b, double ratio_s,
                                 double jitter)
    : CovarianceModel(graph, std::make_shared<const Partition>(connected_components(*graph)), ratio_b, ratio_s,
                      jitter) {}

CovarianceModel::CovarianceModel(std::shared_ptr<const AssignmentGraph> graph,
                                 std::shared_ptr<const Partition> partition, double ratio_b, double ratio_s,
                                 double jitter)
    : graph_(std::move(graph)), partition_(std::move(partition)), ratio_b_(ratio_b), ratio_s_(ratio_s),
      jitter_(jitter) {
  if (!(ratio_b >= 0.0)) throw ValidationError("ratio_b must be >= 0");
  if (!(ratio_s > 0.0)) throw ValidationError("ratio_s must be > 0 (zero subjective noise is degenerate)");
  if (jitter < 0.0) throw ValidationError("jitter must be >= 0");
}

CovarianceModel CovarianceModel::with_ratios(double ratio_b, double ratio_s) const {
  return CovarianceModel(graph_, partition_, ratio_b, ratio_s, jitter_);
}

double CovarianceModel::entry(std::size_t e1, std::size_t e2) const {
  const auto& a = graph_->edges()[e1];
  const auto& b = graph_->edges()[e2];
  const bool same_paper = a.paper == b.paper;
  const bool same_reviewer = a.reviewer == b.reviewer;
  double k = 0.0;
  if (same_paper) k += 1.0;
  if (same_reviewer) k += ratio_b_;
  if (same_paper && same_reviewer) k += ratio_s_ + jitter_;
  return k;
}

Eigen::MatrixXd CovarianceModel::dense_block(std::size_t b) const {
  const auto& edges = partition_->blocks.at(b);
  Eigen::MatrixXd k(edges.size(), edges.size());
  for (std::size_t r = 0; r < edges.size(); ++r)
    for (std::size_t c = 0; c <= r; ++c) k(r, c) = k(c, r) = entry(edges[r], edges[c]);
  return k;
}

Eigen::MatrixXd CovarianceModel::dense() const {
  const std::size_t n = graph_->num_edges();
  Eigen::MatrixXd k(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c <= r; ++c) k(r, c) = k(c, r) = entry(r, c);
  return k;
}

CovarianceModel build_covariance(const AssignmentGraph& graph, double ratio_b, double ratio_s, double jitter) {
  return CovarianceModel(std::make_shared<const AssignmentGraph>(graph), ratio_b, ratio_s, jitter);
}

// ---------------------------------------------------------------------------
// Likelihood

namespace {

void check_scores(std::span<const double> y, const AssignmentGraph& graph) {
  if (y.empty()) throw ValidationError("calibration needs at least one score");
  if (y.size() != graph.num_edges()) throw ValidationError("score vector length does not match edge count");
}

std::vector<double> centered(std::span<const double> scores, double mu) {
  std::vector<double> y(scores.begin(), scores.end());
  for (auto& v : y) v -= mu;
  return y;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double quadratic(const CovarianceFactor& factor, std::span<const double> y) {
  double q = 0.0;
  for (std::size_t b = 0; b < factor.num_blocks(); ++b) q += factor.block_quadratic(b, y);
  return q;
}

double profiled_nll(double n, double alpha_f, double logdet) {
  return 0.5 * n * std::log(alpha_f) + 0.5 * logdet + 0.5 * n;
}

}  // namespace

double profile_alpha_f(std::span<const double> y, const CovarianceModel& cov, FactorStrategy strategy) {
  check_scores(y, cov.graph());
  const CovarianceFactor factor(cov, strategy);
  return quadratic(factor, y) / static_cast<double>(y.size());
}

double negative_log_likelihood(std::span<const double> scores, const AssignmentGraph& graph, double ratio_b,
                               double ratio_s, double jitter, FactorStrategy strategy) {
  check_scores(scores, graph);
  const auto y = centered(scores, mean_of(scores));
  const auto cov = build_covariance(graph, ratio_b, ratio_s, jitter);
  const CovarianceFactor factor(cov, strategy);
  const double alpha_f = quadratic(factor, y) / static_cast<double>(y.size());
  if (!(alpha_f > 0.0)) throw ValidationError("scores have zero variance; likelihood is degenerate");
  return profiled_nll(static_cast<double>(y.size()), alpha_f, factor.logdet());
}

double negative_log_likelihood_at(std::span<const double> y, const CovarianceModel& cov, double alpha_f,
                                  FactorStrategy strategy) {
  check_scores(y, cov.graph());
  if (!(alpha_f > 0.0)) throw ValidationError("alpha_f must be positive");
  const CovarianceFactor factor(cov, strategy);
  const double n = static_cast<double>(y.size());
  return 0.5 * n * std::log(alpha_f) + 0.5 * factor.logdet() + 0.5 * quadratic(factor, y) / alpha_f;
}

NodeEvaluation evaluate_node(std::span<const double> y, const CovarianceModel& cov, FactorStrategy strategy) {
  NodeEvaluation node;
  node.ratio_b = cov.ratio_b();
  node.ratio_s = cov.ratio_s();
  try {
    const CovarianceFactor factor(cov, strategy);
    node.alpha_f = quadratic(factor, y) / static_cast<double>(y.size());
    if (!(node.alpha_f > 0.0) || !std::isfinite(node.alpha_f)) {
      node.failure = "degenerate: profiled alpha_f is not positive";
      node.nll = std::numeric_limits<double>::quiet_NaN();
      return node;
    }
    node.nll = profiled_nll(static_cast<double>(y.size()), node.alpha_f, factor.logdet());
    node.ok = std::isfinite(node.nll);
    if (!node.ok) node.failure = "non-finite likelihood";
  } catch (const NumericalError& e) {
    node.failure = e.what();
    node.nll = std::numeric_limits<double>::quiet_NaN();
  }
  return node;
}

// ---------------------------------------------------------------------------
// Grid search

GridSpec GridSpec::logarithmic(std::size_t nb, double b_lo, double b_hi, std::size_t ns, double s_lo, double s_hi,
                               std::size_t refine_factor) {
  auto axis = [](std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    if (n == 1) {
      v[0] = lo;
      return v;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(a + (b - a) * static_cast<double>(i) / (n - 1));
    v.back() = hi;
    return v;
  };
  return {axis(nb, b_lo, b_hi), axis(ns, s_lo, s_hi), refine_factor};
}

namespace {

// Points between the neighbours of axis[best], each coarse interval split into
// `factor` pieces (geometrically when both ends are positive).
std::vector<double> refine_axis(const std::vector<double>& axis, std::size_t best, std::size_t factor) {
  std::vector<double> out;
  const std::size_t lo = best > 0 ? best - 1 : best;
  const std::size_t hi = best + 1 < axis.size() ? best + 1 : best;
  out.push_back(axis[lo]);
  for (std::size_t k = lo; k < hi; ++k) {
    const double a = axis[k], b = axis[k + 1];
    for (std::size_t s = 1; s <= factor; ++s) {
      const double t = static_cast<double>(s) / static_cast<double>(factor);
      out.push_back(a > 0.0 && b > 0.0 ? std::exp(std::log(a) + t * (std::log(b) - std::log(a))) : a + t * (b - a));
    }
    out.back() = b;
  }
  return out;
}

void check_grid(const GridSpec& grid) {
  if (grid.ratio_b.empty() || grid.ratio_s.empty()) throw ValidationError("calibration grid is empty");
  if (!std::ranges::is_sorted(grid.ratio_b) || !std::ranges::is_sorted(grid.ratio_s))
    throw ValidationError("calibration grid axes must be ascending");
  if (grid.ratio_b.front() < 0.0) throw ValidationError("ratio_b grid values must be >= 0");
  if (!(grid.ratio_s.front() > 0.0)) throw ValidationError("ratio_s grid values must be > 0");
}

std::vector<NodeEvaluation> evaluate_nodes(std::span<const double> y, const CovarianceModel& base,
                                           const std::vector<std::pair<double, double>>& nodes,
                                           const FitOptions& options) {
  std::vector<NodeEvaluation> out(nodes.size());
  parallel_for(nodes.size(), options.threads ? options.threads : max_threads(), [&](std::size_t k) {
    out[k] = evaluate_node(y, base.with_ratios(nodes[k].first, nodes[k].second), options.strategy);
  });
  return out;
}

// Posterior summaries at fixed ratios and alpha_f.
void fill_posteriors(CalibrationFit& fit, std::span<const double> scores, std::span<const double> y,
                     const CovarianceModel& cov, const FitOptions& options) {
  const auto& graph = cov.graph();
  const auto& p = fit.params;
  const CovarianceFactor factor(cov, options.strategy);
  const Eigen::VectorXd w = factor.solve(y);

  fit.per_paper.resize(graph.num_papers());
  fit.per_reviewer.resize(graph.num_reviewers());
  fit.per_review.resize(graph.num_edges());

  // Posterior means: mu_t + c_t' K^{-1} y = mu_t + chat_t' Khat^{-1} y.
  for (std::size_t i = 0; i < graph.num_papers(); ++i) {
    auto& out = fit.per_paper[i];
    out.paper_id = graph.paper_label(i);
    out.reviews = graph.paper_edges(i).size();
    double m = 0.0;
    for (auto e : graph.paper_edges(i)) m += w[e];
    out.mean = p.mu + m;
  }
  for (std::size_t j = 0; j < graph.num_reviewers(); ++j) {
    auto& out = fit.per_reviewer[j];
    out.reviewer_id = graph.reviewer_label(j);
    out.reviews = graph.reviewer_edges(j).size();
    double m = 0.0;
    for (auto e : graph.reviewer_edges(j)) m += w[e];
    out.offset_mean = p.ratio_b * m;
  }

  // Variances: alpha_f * (prior - v' Khat^{-1} v) with v the normalized
  // cross-covariance between the target and the observations.
  std::vector<std::pair<std::size_t, double>> v;
  for (std::size_t i = 0; i < graph.num_papers(); ++i) {
    const auto edges = graph.paper_edges(i);
    v.clear();
    for (auto e : edges) v.emplace_back(e, 1.0);
    const double qf = edges.empty() ? 0.0 : factor.quadratic_form(v);
    fit.per_paper[i].variance = p.alpha_f * (1.0 - qf);

    double paper_sum = 0.0;
    for (auto e : edges) paper_sum += w[e];
    for (auto e : edges) {
      auto& out = fit.per_review[e];
      out.paper_id = graph.paper_label(i);
      out.reviewer_id = graph.reviewer_label(graph.edges()[e].reviewer);
      out.raw = scores[e];
      out.mean = p.mu + paper_sum + p.ratio_s * w[e];
      v.clear();
      for (auto e2 : edges) v.emplace_back(e2, e2 == e ? 1.0 + p.ratio_s : 1.0);
      out.variance = p.alpha_f * (1.0 + p.ratio_s - factor.quadratic_form(v));
    }
  }
}

}  // namespace

CalibrationFit grid_fit(std::span<const double> scores, const AssignmentGraph& graph, const GridSpec& grid,
                        const FitOptions& options) {
  check_scores(scores, graph);
  check_grid(grid);
  const double mu = mean_of(scores);
  const auto y = centered(scores, mu);
  const CovarianceModel base(std::make_shared<const AssignmentGraph>(graph), grid.ratio_b.front(),
                             grid.ratio_s.front(), options.jitter);

  CalibrationFit fit;
  auto& diag = fit.grid;
  diag.ratio_b = grid.ratio_b;
  diag.ratio_s = grid.ratio_s;

  std::vector<std::pair<double, double>> nodes;
  for (double rb : grid.ratio_b)
    for (double rs : grid.ratio_s) nodes.emplace_back(rb, rs);
  const auto coarse = evaluate_nodes(y, base, nodes, options);
  diag.nll.resize(coarse.size());
  std::size_t best = coarse.size();
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    diag.nll[k] = coarse[k].ok ? coarse[k].nll : std::numeric_limits<double>::quiet_NaN();
    if (!coarse[k].ok) ++diag.nodes_failed;
    if (coarse[k].ok && (best == coarse.size() || coarse[k].nll < coarse[best].nll)) best = k;
  }
  diag.nodes_evaluated = coarse.size();
  if (best == coarse.size()) {
    throw ValidationError("no calibration grid node could be evaluated (" +
                          (coarse.empty() ? std::string("empty grid") : coarse.front().failure) + ")");
  }
  NodeEvaluation best_node = coarse[best];

  const std::size_t ib = best / grid.ratio_s.size();
  const std::size_t is = best % grid.ratio_s.size();
  const bool can_refine = grid.refine_factor > 1 && (grid.ratio_b.size() > 1 || grid.ratio_s.size() > 1);
  if (can_refine) {
    const auto rb_axis = refine_axis(grid.ratio_b, ib, grid.refine_factor);
    const auto rs_axis = refine_axis(grid.ratio_s, is, grid.refine_factor);
    std::vector<std::pair<double, double>> fine;
    for (double rb : rb_axis)
      for (double rs : rs_axis) fine.emplace_back(rb, rs);
    diag.refined = evaluate_nodes(y, base, fine, options);
    diag.nodes_evaluated += fine.size();
    for (const auto& node : diag.refined) {
      if (!node.ok) {
        ++diag.nodes_failed;
        continue;
      }
      if (node.nll < best_node.nll) best_node = node;
    }
  }

  fit.params = CalibrationParams::from_ratios(mu, best_node.alpha_f, best_node.ratio_b, best_node.ratio_s);
  fit.nll = best_node.nll;
  if (options.posteriors) fill_posteriors(fit, scores, y, base.with_ratios(best_node.ratio_b, best_node.ratio_s), options);
  return fit;
}

CalibrationFit calibrated_scores(std::span<const double> scores, const AssignmentGraph& graph,
                                 const CalibrationParams& params, const FitOptions& options) {
  check_scores(scores, graph);
  const auto p = CalibrationParams::from_variances(params.mu, params.alpha_f, params.alpha_b, params.sigma2);
  const auto y = centered(scores, p.mu);
  const auto cov = build_covariance(graph, p.ratio_b, p.ratio_s, options.jitter);
  CalibrationFit fit;
  fit.params = p;
  fit.nll = negative_log_likelihood_at(y, cov, p.alpha_f, options.strategy);
  fill_posteriors(fit, scores, y, cov, options);
  return fit;
}

}  // namespace peerreview
