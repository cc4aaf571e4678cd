#pragma once

// Time-resolved review statistics. "Received by t" means submitted_at <= t;
// moving windows are half-open [t - window, t). Every series is computed from
// reviews sorted by (submitted_at, paper_id, reviewer_id), so results do not
// depend on input row order.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "peerreview/random.hpp"
#include "peerreview/review_data.hpp"

namespace peerreview {

struct TimeSeriesPoint {
  Timestamp t{};
  double value = 0.0;
  std::optional<double> se;
  std::size_t n = 0;
};

using TimeSeries = std::vector<TimeSeriesPoint>;

enum class ReviewField { confidence, quality, impact, length };

double field_value(const ReviewRecord& r, ReviewField field);

/// Per-review score used by the duplicate-correlation series. Defaults to the
/// raw field; the CLI substitutes calibrated scores.
using ReviewScore = std::function<double(const ReviewRecord&)>;

/// Step series with one point per distinct arrival time; value = n = reviews
/// received so far.
TimeSeries cumulative_reviews(std::span<const ReviewRecord> reviews);

struct ReviewsPerPaperPoint {
  Timestamp t{};
  double min = 0.0, median = 0.0, mean = 0.0, max = 0.0;
  std::size_t papers = 0;
};

/// Reviews received per paper at each sample time, over every paper that
/// appears in `reviews` (papers without reviews yet count as zero).
std::vector<ReviewsPerPaperPoint> reviews_per_paper_series(std::span<const ReviewRecord> reviews,
                                                           std::span<const Timestamp> sample_times);

/// value = papers with fewer than `quorum` reviews received by t; n = papers.
TimeSeries papers_below_quorum(std::span<const ReviewRecord> reviews, std::span<const Timestamp> sample_times,
                               int quorum = 3);

/// Daily (or `step`) sample times from the first midnight after the first
/// review through the first one past the last review.
std::vector<Timestamp> step_times(std::span<const ReviewRecord> reviews, Duration step = days(1));

/// Mean and standard error (sample sd / sqrt(n)) of `field` over reviews in
/// [t - window, t). Points with fewer than two reviews are omitted.
TimeSeries moving_window_mean(std::span<const ReviewRecord> reviews, ReviewField field,
                              std::span<const Timestamp> sample_times, Duration window = days(4));

struct SplitTestResult {
  double mean_before = 0.0, mean_after = 0.0;
  double se_before = 0.0, se_after = 0.0;
  std::size_t n_before = 0, n_after = 0;
  double t_stat = 0.0;
  double p_value = 1.0;  ///< two-sided
  double dof = 0.0;      ///< Welch-Satterthwaite
};

/// Welch's unequal-variance t-test of mean(a) - mean(b). Throws
/// ValidationError when either group has fewer than two values.
SplitTestResult welch_t_test(std::span<const double> before, std::span<const double> after);

inline const Timestamp kDefaultDeadline = Timestamp(std::chrono::sys_days(std::chrono::year(2014) / 7 / 21));
inline const Timestamp kDefaultCutoff = Timestamp(std::chrono::sys_days(std::chrono::year(2014) / 8 / 4));

/// Before: submitted_at < deadline. After: deadline <= submitted_at < cutoff.
/// Reviews at or after the cutoff are ignored.
SplitTestResult deadline_split_test(std::span<const ReviewRecord> reviews, ReviewField field,
                                    Timestamp deadline = kDefaultDeadline, Timestamp cutoff = kDefaultCutoff);

/// Pearson correlation between the two committees' per-paper mean scores over
/// pairs where both sides have at least one review by t. Points with fewer
/// than three such pairs, or constant scores on either side, are omitted.
/// se = sqrt((1 - rho^2) / (n - 2)), n = pairs.
TimeSeries duplicate_correlation_series(std::span<const ReviewRecord> reviews,
                                        std::span<const DuplicatePair> duplicates,
                                        std::span<const Timestamp> sample_times, const ReviewScore& score = {});

struct BandPoint {
  Timestamp t{};
  double estimate = 0.0;  ///< point-estimate trajectory
  double lower = 0.0, median = 0.0, upper = 0.0;
  std::size_t resamples = 0;  ///< trajectories defined at t
};

/// Pair indices for one bootstrap resample.
using PairResampler = std::function<std::vector<std::size_t>(std::size_t n_pairs, Rng& rng)>;

inline constexpr std::size_t kMinBootstrapResamples = 100;

struct BootstrapOptions {
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
  /// Shift each trajectory additively so its final value equals the point
  /// estimate's; trajectories undefined at that time are dropped.
  bool anchor = true;
  unsigned threads = 0;
  /// Defaults to uniform sampling with replacement, which requires at least
  /// kMinBootstrapResamples resamples. A custom scheme lifts that floor.
  PairResampler resampler;
  ReviewScore score;
};

/// 2.5 / 50 / 97.5 percentile band of the duplicate-correlation trajectory
/// under pair resampling. Only times where the point estimate is defined are
/// reported.
std::vector<BandPoint> bootstrap_correlation_band(std::span<const ReviewRecord> reviews,
                                                  std::span<const DuplicatePair> duplicates,
                                                  std::span<const Timestamp> sample_times,
                                                  const BootstrapOptions& options = {});

/// CSV `t,value,se,n`; se is empty where absent.
void write_series_csv(std::ostream& out, const TimeSeries& series);

}  // namespace peerreview
