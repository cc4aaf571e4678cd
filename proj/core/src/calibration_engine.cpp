// Block factorizations of the scale-normalized covariance Khat.
//
// Dense blocks: explicit Khat_b and an LLT.
//
// Structured blocks, for a component with papers P, reviewers R and edges E:
//
//   Khat_b = s I + U D U',   s = ratio_s + jitter,   U = [Z_f Z_b],   D = diag(I_P, ratio_b I_R)
//
//   M = D^{-1} + U'U / s = [ A  B ]     A = diag(1 + c_i / s)        (c_i reviews of paper i)
//                          [ B' C ]     C = diag(1/ratio_b + d_j/s)  (d_j reviews by reviewer j)
//                                       B_ij = 1/s for each edge (i, j)
//
//   log|Khat_b| = |E| log s + |R| log ratio_b + log|A| + log|S|,   S = C - B' A^{-1} B
//   Khat_b^{-1} v = (v - U M^{-1} U'v / s) / s
//
// With ratio_b == 0 the reviewer columns drop out and M = A.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "peerreview/calibration.hpp"

namespace peerreview {

class CovarianceFactor::Block {
 public:
  virtual ~Block() = default;
  virtual bool dense() const = 0;
  virtual double logdet() const = 0;
  /// Local solve; `y` and the result are ordered as the block's edge list.
  virtual Eigen::VectorXd solve(const Eigen::VectorXd& y) const = 0;
  /// v' Khat_b^{-1} v for sparse local entries.
  virtual double quadratic_form(std::span<const std::pair<std::size_t, double>> v) const = 0;
};

namespace {

constexpr std::size_t kDenseSchurLimit = 4000;

class DenseBlock final : public CovarianceFactor::Block {
 public:
  DenseBlock(const CovarianceModel& model, std::size_t b) : llt_(model.dense_block(b)) {
    if (llt_.info() != Eigen::Success)
      throw NumericalError("covariance block " + std::to_string(b) + " is not positive definite", b);
    const auto& l = llt_.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) logdet_ += 2.0 * std::log(l(i, i));
  }

  bool dense() const override { return true; }
  double logdet() const override { return logdet_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& y) const override { return llt_.solve(y); }

  double quadratic_form(std::span<const std::pair<std::size_t, double>> v) const override {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(llt_.rows());
    for (const auto& [k, value] : v) x[static_cast<Eigen::Index>(k)] += value;
    llt_.matrixL().solveInPlace(x);
    return x.squaredNorm();
  }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double logdet_ = 0.0;
};

class StructuredBlock final : public CovarianceFactor::Block {
 public:
  StructuredBlock(const CovarianceModel& model, std::size_t b) {
    const auto& graph = model.graph();
    const auto& edges = model.partition().blocks.at(b);
    s_ = model.ratio_s() + model.jitter();
    const double rb = model.ratio_b();
    with_reviewers_ = rb > 0.0;

    // Local numbering.
    std::vector<std::size_t> papers, reviewers;
    papers.reserve(edges.size());
    reviewers.reserve(edges.size());
    for (auto e : edges) {
      papers.push_back(graph.edges()[e].paper);
      reviewers.push_back(graph.edges()[e].reviewer);
    }
    auto unique_sorted = [](std::vector<std::size_t>& v) {
      std::ranges::sort(v);
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    unique_sorted(papers);
    unique_sorted(reviewers);
    auto local = [](const std::vector<std::size_t>& ids, std::size_t id) {
      return static_cast<std::size_t>(std::ranges::lower_bound(ids, id) - ids.begin());
    };
    edge_paper_.resize(edges.size());
    edge_reviewer_.resize(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
      edge_paper_[k] = local(papers, graph.edges()[edges[k]].paper);
      edge_reviewer_[k] = local(reviewers, graph.edges()[edges[k]].reviewer);
    }
    np_ = papers.size();
    nr_ = reviewers.size();

    a_.assign(np_, 1.0);
    for (auto p : edge_paper_) a_[p] += 1.0 / s_;
    logdet_ = static_cast<double>(edges.size()) * std::log(s_);
    for (double v : a_) logdet_ += std::log(v);
    if (!with_reviewers_) return;

    logdet_ += static_cast<double>(nr_) * std::log(rb);

    // S = C - B' A^{-1} B, assembled from each paper's reviewer clique.
    std::vector<std::vector<std::size_t>> by_paper(np_);
    for (std::size_t k = 0; k < edges.size(); ++k) by_paper[edge_paper_[k]].push_back(edge_reviewer_[k]);
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> diag(nr_, 1.0 / rb);
    for (auto r : edge_reviewer_) diag[r] += 1.0 / s_;
    for (std::size_t r = 0; r < nr_; ++r) triplets.emplace_back(r, r, diag[r]);
    const double s2 = s_ * s_;
    for (std::size_t i = 0; i < np_; ++i) {
      const double w = 1.0 / (s2 * a_[i]);
      for (auto j : by_paper[i])
        for (auto k : by_paper[i])
          if (k <= j) triplets.emplace_back(j, k, -w);
    }
    // Reviewer cliques overlap heavily in conference-sized components and the
    // sparse factor fills to a large fraction of dense, so moderate Schur
    // complements go through a dense Cholesky.
    if (nr_ <= kDenseSchurLimit) {
      schur_.setZero(static_cast<Eigen::Index>(nr_), static_cast<Eigen::Index>(nr_));
      for (const auto& t : triplets) schur_(t.row(), t.col()) += t.value();
      dense_schur_.emplace(schur_);
      if (dense_schur_->info() != Eigen::Success)
        throw NumericalError("covariance block " + std::to_string(b) + " is not positive definite", b);
      const auto& l = dense_schur_->matrixLLT();
      for (Eigen::Index i = 0; i < l.rows(); ++i) logdet_ += 2.0 * std::log(l(i, i));
      use_dense_schur_ = true;
      return;
    }
    Eigen::SparseMatrix<double> schur(static_cast<Eigen::Index>(nr_), static_cast<Eigen::Index>(nr_));
    schur.setFromTriplets(triplets.begin(), triplets.end());
    ldlt_.compute(schur);
    if (ldlt_.info() != Eigen::Success)
      throw NumericalError("covariance block " + std::to_string(b) + " failed to factorize", b);
    const auto d = ldlt_.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (!(d[i] > 0.0))
        throw NumericalError("covariance block " + std::to_string(b) + " is not positive definite", b);
      logdet_ += std::log(d[i]);
    }
  }

  bool dense() const override { return false; }
  double logdet() const override { return logdet_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& y) const override {
    Eigen::VectorXd up = Eigen::VectorXd::Zero(np_), ur = Eigen::VectorXd::Zero(nr_);
    for (std::size_t k = 0; k < edge_paper_.size(); ++k) {
      up[edge_paper_[k]] += y[k];
      ur[edge_reviewer_[k]] += y[k];
    }
    Eigen::VectorXd xp, xr;
    apply_m_inverse(up, ur, xp, xr);
    Eigen::VectorXd w(y.size());
    for (std::size_t k = 0; k < edge_paper_.size(); ++k) {
      double ux = xp[edge_paper_[k]];
      if (with_reviewers_) ux += xr[edge_reviewer_[k]];
      w[k] = (y[k] - ux / s_) / s_;
    }
    return w;
  }

  double quadratic_form(std::span<const std::pair<std::size_t, double>> v) const override {
    Eigen::VectorXd up = Eigen::VectorXd::Zero(np_), ur = Eigen::VectorXd::Zero(nr_);
    double vv = 0.0;
    // Entries may repeat an edge; accumulate into a local map first.
    std::vector<std::pair<std::size_t, double>> merged(v.begin(), v.end());
    std::ranges::sort(merged);
    for (std::size_t k = 0; k < merged.size();) {
      const auto edge = merged[k].first;
      double value = 0.0;
      for (; k < merged.size() && merged[k].first == edge; ++k) value += merged[k].second;
      vv += value * value;
      up[edge_paper_[edge]] += value;
      ur[edge_reviewer_[edge]] += value;
    }
    Eigen::VectorXd xp, xr;
    apply_m_inverse(up, ur, xp, xr);
    double uxu = up.dot(xp);
    if (with_reviewers_) uxu += ur.dot(xr);
    return (vv - uxu / s_) / s_;
  }

 private:
  void apply_m_inverse(const Eigen::VectorXd& up, const Eigen::VectorXd& ur, Eigen::VectorXd& xp,
                       Eigen::VectorXd& xr) const {
    if (!with_reviewers_) {
      xp = up.cwiseQuotient(Eigen::Map<const Eigen::VectorXd>(a_.data(), static_cast<Eigen::Index>(np_)));
      return;
    }
    // t = u_r - B' A^{-1} u_p;  x_r = S^{-1} t;  x_p = A^{-1} (u_p - B x_r)
    Eigen::VectorXd t = ur;
    for (std::size_t k = 0; k < edge_paper_.size(); ++k) t[edge_reviewer_[k]] -= up[edge_paper_[k]] / (a_[edge_paper_[k]] * s_);
    xr = use_dense_schur_ ? Eigen::VectorXd(dense_schur_->solve(t)) : Eigen::VectorXd(ldlt_.solve(t));
    xp = up;
    for (std::size_t k = 0; k < edge_paper_.size(); ++k) xp[edge_paper_[k]] -= xr[edge_reviewer_[k]] / s_;
    for (std::size_t i = 0; i < np_; ++i) xp[i] /= a_[i];
  }

  double s_ = 1.0;
  bool with_reviewers_ = true;
  std::size_t np_ = 0, nr_ = 0;
  std::vector<std::size_t> edge_paper_, edge_reviewer_;
  std::vector<double> a_;
  bool use_dense_schur_ = false;
  Eigen::MatrixXd schur_;  // factorized in place by dense_schur_
  std::optional<Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>>> dense_schur_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  double logdet_ = 0.0;
};

}  // namespace

CovarianceFactor::CovarianceFactor(const CovarianceModel& model, FactorStrategy strategy) : model_(&model) {
  const auto& blocks = model.partition().blocks;
  blocks_.reserve(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const bool dense = strategy == FactorStrategy::dense ||
                       (strategy == FactorStrategy::automatic && blocks[b].size() <= kDenseBlockLimit);
    if (dense) blocks_.push_back(std::make_unique<DenseBlock>(model, b));
    else blocks_.push_back(std::make_unique<StructuredBlock>(model, b));
  }
}

CovarianceFactor::~CovarianceFactor() = default;
CovarianceFactor::CovarianceFactor(CovarianceFactor&&) noexcept = default;
CovarianceFactor& CovarianceFactor::operator=(CovarianceFactor&&) noexcept = default;

std::size_t CovarianceFactor::num_blocks() const noexcept { return blocks_.size(); }
bool CovarianceFactor::is_dense(std::size_t b) const { return blocks_.at(b)->dense(); }

double CovarianceFactor::logdet() const {
  double total = 0.0;
  for (const auto& b : blocks_) total += b->logdet();
  return total;
}

double CovarianceFactor::block_logdet(std::size_t b) const { return blocks_.at(b)->logdet(); }

Eigen::VectorXd CovarianceFactor::solve(std::span<const double> y) const {
  const auto& blocks = model_->partition().blocks;
  if (y.size() != model_->graph().num_edges()) throw ValidationError("vector length does not match edge count");
  Eigen::VectorXd out(static_cast<Eigen::Index>(y.size()));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& edges = blocks[b];
    Eigen::VectorXd local(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t k = 0; k < edges.size(); ++k) local[k] = y[edges[k]];
    const Eigen::VectorXd w = blocks_[b]->solve(local);
    for (std::size_t k = 0; k < edges.size(); ++k) out[edges[k]] = w[k];
  }
  return out;
}

double CovarianceFactor::block_quadratic(std::size_t b, std::span<const double> y) const {
  const auto& edges = model_->partition().blocks.at(b);
  Eigen::VectorXd local(static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) local[k] = y[edges[k]];
  return local.dot(blocks_[b]->solve(local));
}

double CovarianceFactor::quadratic_form(std::span<const std::pair<std::size_t, double>> v) const {
  if (v.empty()) return 0.0;
  const auto& partition = model_->partition();
  const std::size_t b = partition.block_of_edge.at(v.front().first);
  // Block edge lists are ascending by construction.
  const auto& edges = partition.blocks[b];
  std::vector<std::pair<std::size_t, double>> local;
  local.reserve(v.size());
  for (const auto& [edge, value] : v) {
    if (partition.block_of_edge.at(edge) != b) throw ValidationError("quadratic_form entries span several blocks");
    const auto it = std::ranges::lower_bound(edges, edge);
    local.emplace_back(static_cast<std::size_t>(it - edges.begin()), value);
  }
  return blocks_[b]->quadratic_form(local);
}

}  // namespace peerreview
