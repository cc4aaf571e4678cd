#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peerreview/errors.hpp"
#include "peerreview/time.hpp"

namespace peerreview {

// Score scales follow the 2014 reviewer instructions: quality 1-10,
// impact 1 (incremental) or 2 (potentially high impact), confidence 1-5.
inline constexpr int kMinQuality = 1, kMaxQuality = 10;
inline constexpr int kMinImpact = 1, kMaxImpact = 2;
inline constexpr int kMinConfidence = 1, kMaxConfidence = 5;

struct ReviewRecord {
  std::string paper_id;
  std::string reviewer_id;
  int quality = 0;
  int impact = 0;
  int confidence = 0;
  Timestamp submitted_at{};
  std::int64_t summary_words = 0;
  std::int64_t body_words = 0;

  /// Combined length of summary and main body.
  std::int64_t length() const noexcept { return summary_words + body_words; }

  friend bool operator==(const ReviewRecord&, const ReviewRecord&) = default;
};

struct DuplicatePair {
  std::string committee1_paper;
  std::string committee2_paper;
  std::string experiment_id;

  friend bool operator==(const DuplicatePair&, const DuplicatePair&) = default;
};

enum class Committee { one, two, main };
enum class Verdict { accept, reject, withdrawn };

struct Decision {
  std::string paper_id;
  Committee committee = Committee::main;
  Verdict verdict = Verdict::reject;

  friend bool operator==(const Decision&, const Decision&) = default;
};

enum class Track { accepted, rejected };
enum class Fate { this_conference, other_venue, preprint_only, pdf_only, untraced };

struct PaperOutcome {
  std::string paper_id;
  Track track = Track::rejected;
  Fate fate = Fate::untraced;
  std::optional<std::string> venue;
  std::int64_t citations = 0;

  friend bool operator==(const PaperOutcome&, const PaperOutcome&) = default;
};

std::string_view to_string(Committee c);
std::string_view to_string(Verdict v);
std::string_view to_string(Track t);
std::string_view to_string(Fate f);

/// One problem found while loading a file.
struct LoadIssue {
  std::size_t line = 0;
  std::string column;
  std::string reason;
};

/// Raised when any row of a file fails to load; carries every issue found.
class LoadError : public ValidationError {
 public:
  LoadError(std::string file, std::vector<LoadIssue> issues);

  const std::vector<LoadIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<LoadIssue> issues_;
};

// Loaders are all-or-nothing: they either return every row or throw.
// Missing/unreadable files raise IoError; content problems raise LoadError.
std::vector<ReviewRecord> load_reviews(const std::filesystem::path& path);
std::vector<DuplicatePair> load_duplicates(const std::filesystem::path& path);
std::vector<Decision> load_decisions(const std::filesystem::path& path);
std::vector<PaperOutcome> load_outcomes(const std::filesystem::path& path);

std::vector<ReviewRecord> parse_reviews(std::istream& in, std::string_view source = "<stream>");
std::vector<DuplicatePair> parse_duplicates(std::istream& in, std::string_view source = "<stream>");
std::vector<Decision> parse_decisions(std::istream& in, std::string_view source = "<stream>");
std::vector<PaperOutcome> parse_outcomes(std::istream& in, std::string_view source = "<stream>");

// Canonical writers (header + one row per record, input order preserved).
void write_reviews(std::ostream& out, std::span<const ReviewRecord> rows);
void write_duplicates(std::ostream& out, std::span<const DuplicatePair> rows);
void write_decisions(std::ostream& out, std::span<const Decision> rows);
void write_outcomes(std::ostream& out, std::span<const PaperOutcome> rows);

struct Dataset {
  std::vector<ReviewRecord> reviews;
  std::vector<DuplicatePair> duplicates;
  std::vector<Decision> decisions;
  std::vector<PaperOutcome> outcomes;
  /// Optional roster of invited reviewers; only used by validate().
  std::vector<std::string> reviewer_roster;

  /// Copy with every collection sorted by key, for set-semantics comparison.
  Dataset canonical() const;
};

struct ValidationReport {
  struct DanglingReference {
    std::string source;  // "duplicates", "decisions" or "outcomes"
    std::string paper_id;
  };
  std::vector<DanglingReference> dangling;
  /// Papers listed in outcomes that received no review.
  std::vector<std::string> papers_without_reviews;
  /// Roster reviewers that submitted no review.
  std::vector<std::string> reviewers_without_reviews;

  bool empty() const noexcept {
    return dangling.empty() && papers_without_reviews.empty() && reviewers_without_reviews.empty();
  }
};

/// Cross-file consistency report. The paper universe is every paper that has
/// a review or an outcome row; references outside it are dangling.
ValidationReport validate(const Dataset& dataset);

/// Paper ids with a `withdrawn` verdict from any committee.
std::vector<std::string> withdrawn_papers(const Dataset& dataset);

}  // namespace peerreview
