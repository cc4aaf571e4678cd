#pragma once

// Model-faithful synthetic corpora for tests, benchmarks and demos.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "peerreview/calibration.hpp"
#include "peerreview/random.hpp"
#include "peerreview/review_data.hpp"

namespace peerreview::synthetic {

/// Each reviewer takes `per_reviewer` distinct papers; each pick takes the
/// less loaded of two random papers, which keeps paper loads within about
/// one review of each other.
std::vector<Edge> balanced_assignment(std::size_t n_papers, std::size_t n_reviewers, std::size_t per_reviewer,
                                      Rng& rng);

/// Latent draws behind a set of scores.
struct LatentDraw {
  std::vector<double> f;       ///< per paper, includes no mean
  std::vector<double> b;       ///< per reviewer
  std::vector<double> scores;  ///< per edge: mu + f + b + e
};

/// Continuous scores y = mu + f_i + b_j + e_ij from the calibration model.
LatentDraw sample_scores(const AssignmentGraph& graph, const CalibrationParams& params, Rng& rng);

/// Assignment graph plus model scores, sized like the 2014 conference by default.
struct CalibrationCorpus {
  AssignmentGraph graph;
  LatentDraw draw;
};

CalibrationCorpus calibration_corpus(const CalibrationParams& params, std::uint64_t seed,
                                     std::size_t n_papers = 1678, std::size_t n_reviewers = 1474,
                                     std::size_t per_reviewer = 4);

/// Paper defaults: mu 5.5, alpha_f 1.28, alpha_b 0.24, sigma2 1.27.
CalibrationParams conference_params();

/// n draws of a standard bivariate normal with correlation rho.
std::vector<std::pair<double, double>> bivariate_normal(std::size_t n, double rho, Rng& rng);

struct DatasetConfig {
  std::size_t n_papers = 400;
  std::size_t n_reviewers = 350;
  std::size_t per_reviewer = 4;
  std::size_t duplicate_pairs = 40;  ///< pairs of papers sharing the same true quality
  std::size_t withdrawn = 2;         ///< duplicate pairs marked withdrawn
  double accept_rate = 0.23;
  CalibrationParams params = conference_params();

  Timestamp review_start = Timestamp(std::chrono::sys_days(std::chrono::year(2014) / 6 / 30));
  Timestamp deadline = Timestamp(std::chrono::sys_days(std::chrono::year(2014) / 7 / 21));
  Timestamp cutoff = Timestamp(std::chrono::sys_days(std::chrono::year(2014) / 8 / 4));
  double late_fraction = 0.4;       ///< reviews arriving between deadline and cutoff
  double very_late_fraction = 0.02; ///< reviews arriving after the cutoff
  double confidence_mean = 3.6;
  double confidence_sd = 0.8;
  double late_confidence_shift = 0.1;  ///< latent confidence drop for late reviews

  double citation_signal = 0.2;  ///< slope of log10(1+c) on standardized quality
  std::uint64_t seed = 0;
};

/// Reviews (integer scores rounded and clamped to their scales), duplicate
/// pairs, decisions from both committees and the main track, outcomes with
/// fates, venues and citations, and the reviewer roster. Paper ids are
/// P0001.., reviewer ids R0001...
Dataset generate_dataset(const DatasetConfig& config);

/// Reviews only, for timeline studies: `n_reviews` reviews spread over
/// `n_papers` papers with the configured arrival process and confidence
/// shift.
std::vector<ReviewRecord> timeline_reviews(std::size_t n_reviews, std::size_t n_papers, const DatasetConfig& config);

/// Outcomes that reproduce the 2014 fate counts of rejected papers: 427 in
/// other venues (AAAI 72, AISTATS 57, ICML 33, CVPR 17, later NeurIPS 15,
/// JMLR 14, IJCAI 14, ICLR 13, UAI 11 and 181 scattered over smaller
/// venues), 177 arXiv only, 76 PDF only, plus `untraced` untraced papers.
/// Venue spellings vary (case, years, aliases) to exercise normalization.
std::vector<PaperOutcome> rejected_fate_fixture(std::size_t untraced = 0);

}  // namespace peerreview::synthetic
