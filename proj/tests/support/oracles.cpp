#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace oracle {

using peerreview::Edge;
using peerreview::ReviewRecord;
using peerreview::Timestamp;

DenseGaussian::DenseGaussian(std::size_t papers, std::size_t reviewers, std::vector<Edge> e)
    : n_papers(papers), n_reviewers(reviewers), edges(std::move(e)) {
  const auto n = static_cast<Eigen::Index>(edges.size());
  A = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(papers + reviewers) + n);
  for (Eigen::Index k = 0; k < n; ++k) {
    A(k, static_cast<Eigen::Index>(edges[k].paper)) = 1.0;
    A(k, static_cast<Eigen::Index>(papers + edges[k].reviewer)) = 1.0;
    A(k, static_cast<Eigen::Index>(papers + reviewers) + k) = 1.0;
  }
}

Eigen::MatrixXd DenseGaussian::khat(double ratio_b, double ratio_s, double jitter) const {
  const auto n = static_cast<Eigen::Index>(edges.size());
  Eigen::MatrixXd zf = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(n_papers));
  Eigen::MatrixXd zb = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(n_reviewers));
  for (Eigen::Index k = 0; k < n; ++k) {
    zf(k, static_cast<Eigen::Index>(edges[k].paper)) = 1.0;
    zb(k, static_cast<Eigen::Index>(edges[k].reviewer)) = 1.0;
  }
  Eigen::MatrixXd k = zf * zf.transpose() + ratio_b * zb * zb.transpose();
  k.diagonal().array() += ratio_s + jitter;
  return k;
}

double DenseGaussian::alpha_f_star(const Eigen::VectorXd& y, double ratio_b, double ratio_s, double jitter) const {
  const Eigen::LLT<Eigen::MatrixXd> llt(khat(ratio_b, ratio_s, jitter));
  return y.dot(llt.solve(y)) / static_cast<double>(y.size());
}

double DenseGaussian::profiled_nll(const Eigen::VectorXd& y, double ratio_b, double ratio_s, double jitter) const {
  const Eigen::LLT<Eigen::MatrixXd> llt(khat(ratio_b, ratio_s, jitter));
  const double n = static_cast<double>(y.size());
  const double af = y.dot(llt.solve(y)) / n;
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return 0.5 * n * std::log(af) + 0.5 * logdet + 0.5 * n;
}

DenseGaussian::Posterior DenseGaussian::posterior(const Eigen::VectorXd& scores, const peerreview::CalibrationParams& p,
                                                  double jitter) const {
  const auto np = static_cast<Eigen::Index>(n_papers), nr = static_cast<Eigen::Index>(n_reviewers);
  const auto ne = static_cast<Eigen::Index>(edges.size());
  Eigen::VectorXd prior(np + nr + ne);
  prior << Eigen::VectorXd::Constant(np, p.alpha_f), Eigen::VectorXd::Constant(nr, p.alpha_b),
      Eigen::VectorXd::Constant(ne, p.sigma2);
  const Eigen::MatrixXd cross = prior.asDiagonal() * A.transpose();  // Cov(z, y)
  Eigen::MatrixXd cy = A * cross;
  cy.diagonal().array() += p.alpha_f * jitter;
  const Eigen::LLT<Eigen::MatrixXd> llt(cy);
  const Eigen::VectorXd resid = scores.array() - p.mu;
  const Eigen::VectorXd zmean = cross * llt.solve(resid);
  Eigen::MatrixXd zcov = -cross * llt.solve(cross.transpose());
  zcov.diagonal() += prior;

  Posterior out;
  out.f_mean = zmean.head(np).array() + p.mu;
  out.f_var = zcov.diagonal().head(np);
  out.b_mean = zmean.segment(np, nr);
  out.fe_mean.resize(ne);
  out.fe_var.resize(ne);
  for (Eigen::Index k = 0; k < ne; ++k) {
    const auto fi = static_cast<Eigen::Index>(edges[k].paper), ek = np + nr + k;
    out.fe_mean[k] = p.mu + zmean[fi] + zmean[ek];
    out.fe_var[k] = zcov(fi, fi) + zcov(ek, ek) + 2.0 * zcov(fi, ek);
  }
  return out;
}

std::vector<std::size_t> edge_components(std::size_t papers, std::size_t reviewers, const std::vector<Edge>& edges) {
  std::vector<std::size_t> parent(papers + reviewers);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) parent[find(e.paper)] = find(papers + e.reviewer);
  std::map<std::size_t, std::size_t> label;
  std::vector<std::size_t> out;
  for (const auto& e : edges) out.push_back(label.emplace(find(e.paper), label.size()).first->second);
  return out;
}

namespace {

double mean_of(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / v.size());
}

std::map<std::string, int> counts_by(const std::vector<ReviewRecord>& reviews, Timestamp t) {
  std::map<std::string, int> c;
  for (const auto& r : reviews) c[r.paper_id];
  for (const auto& r : reviews)
    if (r.submitted_at <= t) ++c[r.paper_id];
  return c;
}

}  // namespace

std::vector<WindowPoint> window_means(const std::vector<ReviewRecord>& reviews, peerreview::ReviewField field,
                                      const std::vector<Timestamp>& times, peerreview::Duration window) {
  std::vector<WindowPoint> out;
  for (const auto t : times) {
    std::vector<double> v;
    for (const auto& r : reviews)
      if (r.submitted_at >= t - window && r.submitted_at < t) v.push_back(peerreview::field_value(r, field));
    if (v.size() < 2) continue;
    const double m = mean_of(v);
    long double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    const double var = static_cast<double>(ss / (v.size() - 1));
    out.push_back({t, m, std::sqrt(var / static_cast<double>(v.size())), v.size()});
  }
  return out;
}

std::vector<std::size_t> below_quorum(const std::vector<ReviewRecord>& reviews, const std::vector<Timestamp>& times,
                                      int quorum) {
  std::vector<std::size_t> out;
  for (const auto t : times) {
    std::size_t below = 0;
    for (const auto& [id, c] : counts_by(reviews, t)) below += c < quorum;
    out.push_back(below);
  }
  return out;
}

std::vector<PerPaperStats> per_paper_stats(const std::vector<ReviewRecord>& reviews,
                                           const std::vector<Timestamp>& times) {
  std::vector<PerPaperStats> out;
  for (const auto t : times) {
    std::vector<double> c;
    for (const auto& [id, n] : counts_by(reviews, t)) c.push_back(n);
    std::ranges::sort(c);
    const std::size_t n = c.size();
    const double median = n % 2 ? c[n / 2] : (c[n / 2 - 1] + c[n / 2]) / 2.0;
    out.push_back({c.front(), median, mean_of(c), c.back(), n});
  }
  return out;
}

std::vector<CorrelationPoint> duplicate_correlation(const std::vector<ReviewRecord>& reviews,
                                                    const std::vector<peerreview::DuplicatePair>& pairs,
                                                    const std::vector<Timestamp>& times) {
  auto mean_quality = [&](const std::string& paper, Timestamp t) -> std::optional<double> {
    std::vector<double> v;
    for (const auto& r : reviews)
      if (r.paper_id == paper && r.submitted_at <= t) v.push_back(r.quality);
    if (v.empty()) return std::nullopt;
    return mean_of(v);
  };
  std::vector<CorrelationPoint> out;
  for (const auto t : times) {
    std::vector<double> x, y;
    for (const auto& p : pairs) {
      const auto a = mean_quality(p.committee1_paper, t), b = mean_quality(p.committee2_paper, t);
      if (a && b) {
        x.push_back(*a);
        y.push_back(*b);
      }
    }
    if (x.size() < 3) continue;
    const double mx = mean_of(x), my = mean_of(y);
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) continue;
    const double rho = static_cast<double>(sxy / std::sqrt(sxx * syy));
    const double n = static_cast<double>(x.size());
    out.push_back({t, rho, std::sqrt((1 - rho * rho) / (n - 2)), x.size()});
  }
  return out;
}

}  // namespace oracle
