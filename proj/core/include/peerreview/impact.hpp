#pragma once

// Citation impact and its relation to review scores, noised scatter output
// for publication, and the fate of submissions after the decision.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peerreview/calibration.hpp"
#include "peerreview/review_data.hpp"

namespace peerreview {

/// log10(1 + citations). Throws ValidationError for negative counts.
double citation_impact(std::int64_t citations);

struct CorrelationResult {
  double rho = 0.0;
  double se = 0.0;  ///< sqrt((1 - rho^2) / (n - 2))
  std::size_t n = 0;
  bool significant = false;  ///< |rho| > 2 se
};

/// Sample Pearson correlation. Throws ValidationError for mismatched lengths,
/// fewer than three points, or a constant input.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

enum class PaperScore {
  quality_calibrated,  ///< calibrated quality, see QualityMode
  quality_raw,         ///< mean raw quality
  impact,              ///< mean raw impact
  confidence,          ///< mean raw confidence
};

enum class QualityMode {
  posterior_f,     ///< posterior mean of f_i
  review_average,  ///< average of the per-review calibrated scores
};

enum class Subset { accepted, rejected, all };

/// Per-paper score for every paper with at least one review. `fit` may be
/// null unless `score` is quality_calibrated.
std::map<std::string, double> paper_scores(const Dataset& dataset, const CalibrationFit* fit, PaperScore score,
                                           QualityMode mode = QualityMode::posterior_f);

/// Pearson correlation between per-paper score and citation impact over the
/// papers in `subset` with a traced fate. Throws ValidationError when fewer
/// than three papers join.
CorrelationResult correlation_report(const Dataset& dataset, const CalibrationFit* fit, PaperScore score,
                                     Subset subset, QualityMode mode = QualityMode::posterior_f);

/// Correlation of per-paper scores between the two committees over duplicate
/// pairs. Pairs involving a withdrawn paper or a paper without a score are
/// skipped.
CorrelationResult committee_score_correlation(const Dataset& dataset, const CalibrationFit* fit, PaperScore score,
                                              QualityMode mode = QualityMode::posterior_f);

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  std::string track;
  std::string fate;
};

/// Laplace-noised copy of a scatter. It deliberately exposes no raw values
/// and no conversion to plain vectors, so it cannot be fed to pearson().
class NoisedScatter {
 public:
  struct Point {
    double x_noised = 0.0;
    double y_noised = 0.0;
    std::string track;
    std::string fate;
  };

  const std::vector<Point>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  friend NoisedScatter dp_scatter(std::span<const ScatterPoint>, double, double, std::uint64_t);
  std::vector<Point> points_;
};

inline constexpr double kDefaultNoiseX = 0.25;
inline constexpr double kDefaultNoiseY = 0.05;

/// Adds independent Laplace(0, scale) noise to each coordinate. This is
/// visual obfuscation only; no privacy budget is claimed. A zero scale leaves
/// that coordinate unchanged.
NoisedScatter dp_scatter(std::span<const ScatterPoint> points, double scale_x = kDefaultNoiseX,
                         double scale_y = kDefaultNoiseY, std::uint64_t seed = 0);

/// CSV `x_noised,y_noised,track,fate`.
void write_scatter_csv(std::ostream& out, const NoisedScatter& scatter);

struct SvgOptions {
  int width = 480;
  int height = 360;
  std::string x_title;  ///< axis titles only; tick labels are never drawn
  std::string y_title;
};

/// Scatter plot with no tick labels, coloured by track.
void write_scatter_svg(std::ostream& out, const NoisedScatter& scatter, const SvgOptions& options = {});

/// Venue alias table keyed by normalized name.
class VenueAliases {
 public:
  /// The table shipped with the library.
  static VenueAliases builtin();
  /// CSV `alias,venue`. Throws IoError or LoadError.
  static VenueAliases load(const std::filesystem::path& path);
  static VenueAliases parse(std::istream& in, std::string_view source = "<stream>");

  void add(std::string_view alias, std::string venue);

  /// Case-folded, whitespace-collapsed, year suffix removed.
  static std::string key(std::string_view venue);

  /// Display name for a raw venue: the alias target when known, else the
  /// cleaned venue text.
  std::string normalize(std::string_view venue) const;

 private:
  std::map<std::string, std::string> table_;
};

struct VenueCount {
  std::string venue;
  std::int64_t count = 0;
};

struct SankeyLink {
  std::string source;
  std::string target;
  std::int64_t count = 0;
};

struct FateTable {
  std::map<Fate, std::int64_t> by_fate;  ///< every fate, zero included
  /// Venues of papers published elsewhere with at least `threshold` papers,
  /// by descending count then name, followed by "Other" for the rest.
  std::vector<VenueCount> venues;
  std::int64_t total = 0;
  std::int64_t traced = 0;               ///< total minus untraced
  std::int64_t published_elsewhere = 0;  ///< fate other_venue
  std::vector<SankeyLink> links;
};

inline constexpr std::int64_t kDefaultVenueThreshold = 10;

std::string_view fate_label(Fate f);

FateTable fate_table(std::span<const PaperOutcome> outcomes, const VenueAliases& aliases = VenueAliases::builtin(),
                     std::int64_t threshold = kDefaultVenueThreshold);

/// CSV `source,target,count`.
void write_sankey_csv(std::ostream& out, const FateTable& table);

}  // namespace peerreview
