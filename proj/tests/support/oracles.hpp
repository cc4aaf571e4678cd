#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library beyond its plain data types.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "peerreview/calibration.hpp"
#include "peerreview/review_data.hpp"
#include "peerreview/timeline.hpp"

namespace oracle {

// Joint Gaussian over latents z = [f, b, e] with y = mu + A z + eta, where
// eta ~ N(0, alpha_f * jitter) stands in for the diagonal jitter. Everything
// is computed from the full dense matrices.
struct DenseGaussian {
  std::size_t n_papers = 0, n_reviewers = 0;
  std::vector<peerreview::Edge> edges;
  Eigen::MatrixXd A;  // edges x (papers + reviewers + edges)

  DenseGaussian(std::size_t papers, std::size_t reviewers, std::vector<peerreview::Edge> e);

  // Khat = Zf Zf' + rb Zb Zb' + (rs + jitter) I, built from incidence matrices.
  Eigen::MatrixXd khat(double ratio_b, double ratio_s, double jitter) const;

  double alpha_f_star(const Eigen::VectorXd& centered, double ratio_b, double ratio_s, double jitter) const;
  double profiled_nll(const Eigen::VectorXd& centered, double ratio_b, double ratio_s, double jitter) const;

  struct Posterior {
    Eigen::VectorXd f_mean, f_var;    // per paper, f_mean includes mu
    Eigen::VectorXd b_mean;           // per reviewer
    Eigen::VectorXd fe_mean, fe_var;  // per edge, f_i + e_ij, includes mu
  };
  Posterior posterior(const Eigen::VectorXd& scores, const peerreview::CalibrationParams& p, double jitter) const;
};

// Connected components by union-find; returns a component label per edge,
// labels numbered by smallest edge index.
std::vector<std::size_t> edge_components(std::size_t papers, std::size_t reviewers,
                                         const std::vector<peerreview::Edge>& edges);

// Brute-force timeline statistics: every sample time rescans every review.
struct WindowPoint {
  peerreview::Timestamp t;
  double mean, se;
  std::size_t n;
};
std::vector<WindowPoint> window_means(const std::vector<peerreview::ReviewRecord>& reviews,
                                      peerreview::ReviewField field, const std::vector<peerreview::Timestamp>& times,
                                      peerreview::Duration window);

std::vector<std::size_t> below_quorum(const std::vector<peerreview::ReviewRecord>& reviews,
                                      const std::vector<peerreview::Timestamp>& times, int quorum);

struct PerPaperStats {
  double min, median, mean, max;
  std::size_t papers;
};
std::vector<PerPaperStats> per_paper_stats(const std::vector<peerreview::ReviewRecord>& reviews,
                                           const std::vector<peerreview::Timestamp>& times);

struct CorrelationPoint {
  peerreview::Timestamp t;
  double rho, se;
  std::size_t n;
};
std::vector<CorrelationPoint> duplicate_correlation(const std::vector<peerreview::ReviewRecord>& reviews,
                                                    const std::vector<peerreview::DuplicatePair>& pairs,
                                                    const std::vector<peerreview::Timestamp>& times);

}  // namespace oracle
