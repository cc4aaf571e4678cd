#pragma once

// Reviewer calibration with a jointly Gaussian latent model.
//
// A score from reviewer j on paper i decomposes as
//
//     y_ij = f_i + b_j + e_ij,   f_i ~ N(mu, alpha_f), b_j ~ N(0, alpha_b), e_ij ~ N(0, sigma2),
//
// so the stacked scores are y ~ N(mu 1, K) with
//
//     K[(i,j),(k,l)] = alpha_f * (d_ik + d_jl * ratio_b + d_ik * d_jl * ratio_s),
//
// where ratio_b = alpha_b / alpha_f and ratio_s = sigma2 / alpha_f. Writing
// K = alpha_f * Khat, the scale has a closed-form profile
//
//     alpha_f* = y'Khat^{-1}y / |y|,
//
// leaving the two ratios to be searched on a grid. Khat is block diagonal over
// the connected components of the paper-reviewer graph, and every quantity
// below is accumulated block by block.
//
// Large blocks are never materialized. Khat = s I + U D U' with U = [Z_f Z_b]
// the paper and reviewer incidence matrices and D = diag(1, ratio_b), so the
// Woodbury identity reduces solves and log-determinants to the small matrix
// M = D^{-1} + U'U / s. Its paper block is diagonal; eliminating it leaves a
// reviewer-by-reviewer Schur complement, factorized densely up to a few
// thousand reviewers and with a sparse LDL' beyond that.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "peerreview/errors.hpp"
#include "peerreview/review_data.hpp"

namespace peerreview {

struct Edge {
  std::size_t paper = 0;
  std::size_t reviewer = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Bipartite paper-reviewer graph; one edge per review.
class AssignmentGraph {
 public:
  AssignmentGraph() = default;

  /// Throws ValidationError on out-of-range indices or repeated edges.
  AssignmentGraph(std::size_t n_papers, std::size_t n_reviewers, std::vector<Edge> edges);

  std::size_t num_papers() const noexcept { return n_papers_; }
  std::size_t num_reviewers() const noexcept { return n_reviewers_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Edge indices incident to paper i / reviewer j.
  std::span<const std::size_t> paper_edges(std::size_t i) const;
  std::span<const std::size_t> reviewer_edges(std::size_t j) const;

  /// Optional external ids; default to the decimal index.
  void set_labels(std::vector<std::string> papers, std::vector<std::string> reviewers);
  std::string paper_label(std::size_t i) const;
  std::string reviewer_label(std::size_t j) const;

 private:
  std::size_t n_papers_ = 0;
  std::size_t n_reviewers_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> paper_offsets_, paper_adj_;
  std::vector<std::size_t> reviewer_offsets_, reviewer_adj_;
  std::vector<std::string> paper_labels_, reviewer_labels_;
};

/// Scores aligned with graph edges.
struct ScoredGraph {
  AssignmentGraph graph;
  std::vector<double> scores;
};

enum class ScoreField { quality, impact, confidence };

/// Builds the assignment graph from reviews. Papers and reviewers are indexed
/// in order of first appearance after sorting by id, so the result does not
/// depend on row order. Papers listed in `exclude_papers` are dropped.
ScoredGraph graph_from_reviews(std::span<const ReviewRecord> reviews, ScoreField field = ScoreField::quality,
                               std::span<const std::string> exclude_papers = {});

/// Edge blocks of the connected components, ordered by smallest edge index.
struct Partition {
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> block_of_edge;
};

Partition connected_components(const AssignmentGraph& graph);

struct CalibrationParams {
  double mu = 0.0;
  double alpha_f = 1.0;
  double alpha_b = 0.0;
  double sigma2 = 1.0;
  double ratio_b = 0.0;
  double ratio_s = 1.0;

  static CalibrationParams from_variances(double mu, double alpha_f, double alpha_b, double sigma2);
  static CalibrationParams from_ratios(double mu, double alpha_f, double ratio_b, double ratio_s);
};

/// Diagonal jitter added to Khat before factorization. It behaves like a tiny
/// extra observation noise and is not part of sigma2.
inline constexpr double kDefaultJitter = 1e-8;

enum class FactorStrategy {
  automatic,   ///< dense for blocks up to kDenseBlockLimit edges, structured above
  dense,       ///< explicit Khat block + Cholesky
  structured,  ///< Woodbury + reviewer Schur complement
};

inline constexpr std::size_t kDenseBlockLimit = 96;

/// Scale-normalized covariance Khat over the graph edges.
class CovarianceModel {
 public:
  /// Throws ValidationError when ratio_b < 0 or ratio_s <= 0.
  CovarianceModel(std::shared_ptr<const AssignmentGraph> graph, double ratio_b, double ratio_s,
                  double jitter = kDefaultJitter);

  const AssignmentGraph& graph() const noexcept { return *graph_; }
  std::shared_ptr<const AssignmentGraph> graph_ptr() const noexcept { return graph_; }
  const Partition& partition() const noexcept { return *partition_; }
  double ratio_b() const noexcept { return ratio_b_; }
  double ratio_s() const noexcept { return ratio_s_; }
  double jitter() const noexcept { return jitter_; }

  /// Khat entry for two edges, jitter included on the diagonal.
  double entry(std::size_t e1, std::size_t e2) const;

  /// Explicit block `b`, rows ordered as partition().blocks[b].
  Eigen::MatrixXd dense_block(std::size_t b) const;

  /// Whole Khat in edge order. Intended for small graphs.
  Eigen::MatrixXd dense() const;

  /// Reuses a precomputed partition of the same graph.
  CovarianceModel with_ratios(double ratio_b, double ratio_s) const;

 private:
  CovarianceModel(std::shared_ptr<const AssignmentGraph> graph, std::shared_ptr<const Partition> partition,
                  double ratio_b, double ratio_s, double jitter);

  std::shared_ptr<const AssignmentGraph> graph_;
  std::shared_ptr<const Partition> partition_;
  double ratio_b_;
  double ratio_s_;
  double jitter_;
};

CovarianceModel build_covariance(const AssignmentGraph& graph, double ratio_b, double ratio_s,
                                 double jitter = kDefaultJitter);

/// Block-wise Cholesky factorization of Khat.
class CovarianceFactor {
 public:
  /// Throws NumericalError naming the first block that fails.
  explicit CovarianceFactor(const CovarianceModel& model, FactorStrategy strategy = FactorStrategy::automatic);
  ~CovarianceFactor();
  CovarianceFactor(CovarianceFactor&&) noexcept;
  CovarianceFactor& operator=(CovarianceFactor&&) noexcept;

  std::size_t num_blocks() const noexcept;
  bool is_dense(std::size_t b) const;

  double logdet() const;
  double block_logdet(std::size_t b) const;

  /// Khat^{-1} y over all edges.
  Eigen::VectorXd solve(std::span<const double> y) const;

  /// y_b' Khat_b^{-1} y_b for block b, with y indexed by edge.
  double block_quadratic(std::size_t b, std::span<const double> y) const;

  /// v' Khat^{-1} v for a vector given by (edge, value) entries that all lie in
  /// one block.
  double quadratic_form(std::span<const std::pair<std::size_t, double>> v) const;

  class Block;  // opaque per-component factorization

 private:
  const CovarianceModel* model_;
  std::vector<std::unique_ptr<Block>> blocks_;
};

/// alpha_f* = y'Khat^{-1}y / |y| for centered scores. Returns 0 for y = 0,
/// which callers treat as degenerate. Throws NumericalError or
/// ValidationError (empty or mismatched y).
double profile_alpha_f(std::span<const double> centered, const CovarianceModel& cov,
                       FactorStrategy strategy = FactorStrategy::automatic);

/// Profiled negative log marginal likelihood (2*pi constant dropped):
///   (|y|/2) log alpha_f* + (1/2) log|Khat| + |y|/2,
/// with scores centered on their mean.
double negative_log_likelihood(std::span<const double> scores, const AssignmentGraph& graph, double ratio_b,
                               double ratio_s, double jitter = kDefaultJitter,
                               FactorStrategy strategy = FactorStrategy::automatic);

/// Unprofiled objective at a given alpha_f, for centered scores.
double negative_log_likelihood_at(std::span<const double> centered, const CovarianceModel& cov, double alpha_f,
                                  FactorStrategy strategy = FactorStrategy::automatic);

struct GridSpec {
  std::vector<double> ratio_b;  ///< ascending, >= 0
  std::vector<double> ratio_s;  ///< ascending, > 0
  std::size_t refine_factor = 10;  ///< 0 or 1 disables the refinement pass

  /// Log-spaced grid: 40x40 over ratio_b in [1e-3, 10], ratio_s in [1e-2, 10].
  static GridSpec logarithmic(std::size_t nb = 40, double b_lo = 1e-3, double b_hi = 10.0, std::size_t ns = 40,
                              double s_lo = 1e-2, double s_hi = 10.0, std::size_t refine_factor = 10);
};

struct FitOptions {
  double jitter = kDefaultJitter;
  FactorStrategy strategy = FactorStrategy::automatic;
  unsigned threads = 0;  ///< 0: process default
  bool posteriors = true;
};

struct NodeEvaluation {
  double ratio_b = 0.0;
  double ratio_s = 0.0;
  double alpha_f = 0.0;
  double nll = 0.0;
  bool ok = false;
  std::string failure;
};

struct GridDiagnostics {
  std::vector<double> ratio_b;
  std::vector<double> ratio_s;
  std::vector<double> nll;  ///< row-major [ratio_b][ratio_s]; NaN where evaluation failed
  std::vector<NodeEvaluation> refined;
  std::size_t nodes_evaluated = 0;
  std::size_t nodes_failed = 0;
};

struct PaperPosterior {
  std::string paper_id;
  double mean = 0.0;      ///< E[f_i | y], includes mu
  double variance = 0.0;  ///< Var[f_i | y]
  std::size_t reviews = 0;
};

struct ReviewerPosterior {
  std::string reviewer_id;
  double offset_mean = 0.0;  ///< E[b_j | y]
  std::size_t reviews = 0;
};

struct ReviewPosterior {
  std::string paper_id;
  std::string reviewer_id;
  double raw = 0.0;
  double mean = 0.0;      ///< E[f_i + e_ij | y], includes mu
  double variance = 0.0;  ///< Var[f_i + e_ij | y]
};

struct CalibrationFit {
  CalibrationParams params;
  std::vector<PaperPosterior> per_paper;
  std::vector<ReviewerPosterior> per_reviewer;
  std::vector<ReviewPosterior> per_review;  ///< in edge order
  double nll = 0.0;
  GridDiagnostics grid;
};

/// Evaluates one grid node. Never throws for numerical failures; they are
/// reported through NodeEvaluation::ok.
NodeEvaluation evaluate_node(std::span<const double> centered, const CovarianceModel& cov,
                             FactorStrategy strategy = FactorStrategy::automatic);

/// mu is fixed at the score mean; the ratio grid is searched, refined once
/// around the best node, and posteriors are computed there. Throws
/// ValidationError for an empty grid or when no node can be evaluated.
CalibrationFit grid_fit(std::span<const double> scores, const AssignmentGraph& graph, const GridSpec& grid,
                        const FitOptions& options = {});

/// Gaussian conditioning of f_i, b_j and f_i + e_ij on the observed scores at
/// the given parameters. `nll` is evaluated at params.alpha_f.
CalibrationFit calibrated_scores(std::span<const double> scores, const AssignmentGraph& graph,
                                 const CalibrationParams& params, const FitOptions& options = {});

/// JSON document: params, per-paper, per-reviewer and per-review tables, nll
/// and grid diagnostics.
std::string to_json(const CalibrationFit& fit, int indent = 2);
CalibrationFit fit_from_json(std::string_view text);

}  // namespace peerreview
