#include "peerreview/review_data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "peerreview/csv.hpp"

namespace peerreview {

std::string_view to_string(Committee c) {
  switch (c) {
    case Committee::one: return "1";
    case Committee::two: return "2";
    case Committee::main: return "main";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::accept: return "accept";
    case Verdict::reject: return "reject";
    case Verdict::withdrawn: return "withdrawn";
  }
  return "?";
}

std::string_view to_string(Track t) { return t == Track::accepted ? "accepted" : "rejected"; }

std::string_view to_string(Fate f) {
  switch (f) {
    case Fate::this_conference: return "this_conference";
    case Fate::other_venue: return "other_venue";
    case Fate::preprint_only: return "preprint_only";
    case Fate::pdf_only: return "pdf_only";
    case Fate::untraced: return "untraced";
  }
  return "?";
}

namespace {

std::string describe(const std::string& file, const std::vector<LoadIssue>& issues) {
  std::ostringstream os;
  os << file << ": " << issues.size() << " problem(s)";
  const std::size_t shown = std::min<std::size_t>(issues.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    os << "\n  line " << issues[i].line;
    if (!issues[i].column.empty()) os << ", column " << issues[i].column;
    os << ": " << issues[i].reason;
  }
  if (shown < issues.size()) os << "\n  ...";
  return os.str();
}

// Shared scaffolding for the four loaders: header check, per-row field count,
// issue collection, and the final all-or-nothing throw.
class RowReader {
 public:
  RowReader(std::istream& in, std::string_view source, std::vector<std::string> header)
      : source_(source), header_(std::move(header)) {
    rows_ = csv::read(in);
    if (rows_.empty()) {
      issues_.push_back({1, "", "missing header row"});
      finish();
    }
    if (rows_.front().fields != header_) {
      std::string expected;
      for (std::size_t i = 0; i < header_.size(); ++i) expected += (i ? "," : "") + header_[i];
      issues_.push_back({rows_.front().line, "", "header must be `" + expected + "`"});
      finish();
    }
  }

  template <class Fn>
  void for_each(Fn&& fn) {
    for (std::size_t r = 1; r < rows_.size(); ++r) {
      const auto& row = rows_[r];
      if (row.fields.size() != header_.size()) {
        issue(row.line, "", "expected " + std::to_string(header_.size()) + " fields, found " +
                                std::to_string(row.fields.size()));
        continue;
      }
      fn(row);
    }
  }

  void issue(std::size_t line, std::string column, std::string reason) {
    issues_.push_back({line, std::move(column), std::move(reason)});
  }

  std::optional<std::int64_t> integer(const csv::Row& row, std::size_t col) {
    const std::string& s = row.fields[col];
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      issue(row.line, header_[col], "not an integer: `" + s + "`");
      return std::nullopt;
    }
    return v;
  }

  std::optional<int> bounded(const csv::Row& row, std::size_t col, int lo, int hi) {
    const auto v = integer(row, col);
    if (!v) return std::nullopt;
    if (*v < lo || *v > hi) {
      issue(row.line, header_[col],
            header_[col] + " out of range [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
      return std::nullopt;
    }
    return static_cast<int>(*v);
  }

  bool non_empty(const csv::Row& row, std::size_t col) {
    if (row.fields[col].empty()) {
      issue(row.line, header_[col], "empty value");
      return false;
    }
    return true;
  }

  void finish() {
    if (!issues_.empty()) throw LoadError(std::string(source_), std::move(issues_));
  }

 private:
  std::string_view source_;
  std::vector<std::string> header_;
  std::vector<csv::Row> rows_;
  std::vector<LoadIssue> issues_;
};

template <class Parse>
auto load_file(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse(in, path.string());
}

}  // namespace

LoadError::LoadError(std::string file, std::vector<LoadIssue> issues)
    : ValidationError(describe(file, issues)), issues_(std::move(issues)) {}

std::vector<ReviewRecord> parse_reviews(std::istream& in, std::string_view source) {
  RowReader reader(in, source,
                   {"paper_id", "reviewer_id", "quality", "impact", "confidence", "submitted_at", "summary_words",
                    "body_words"});
  std::vector<ReviewRecord> out;
  std::set<std::pair<std::string, std::string>> keys;
  reader.for_each([&](const csv::Row& row) {
    ReviewRecord r;
    bool ok = reader.non_empty(row, 0) & reader.non_empty(row, 1);
    r.paper_id = row.fields[0];
    r.reviewer_id = row.fields[1];
    const auto q = reader.bounded(row, 2, kMinQuality, kMaxQuality);
    const auto i = reader.bounded(row, 3, kMinImpact, kMaxImpact);
    const auto c = reader.bounded(row, 4, kMinConfidence, kMaxConfidence);
    try {
      r.submitted_at = parse_timestamp(row.fields[5]);
    } catch (const ValidationError& e) {
      reader.issue(row.line, "submitted_at", e.what());
      ok = false;
    }
    const auto sw = reader.integer(row, 6);
    const auto bw = reader.integer(row, 7);
    if (sw && *sw < 0) reader.issue(row.line, "summary_words", "summary_words must be non-negative");
    if (bw && *bw < 0) reader.issue(row.line, "body_words", "body_words must be non-negative");
    if (!ok || !q || !i || !c || !sw || !bw || *sw < 0 || *bw < 0) return;
    r.quality = *q;
    r.impact = *i;
    r.confidence = *c;
    r.summary_words = *sw;
    r.body_words = *bw;
    if (!keys.emplace(r.paper_id, r.reviewer_id).second) {
      reader.issue(row.line, "", "duplicate review key (" + r.paper_id + ", " + r.reviewer_id + ")");
      return;
    }
    out.push_back(std::move(r));
  });
  reader.finish();
  return out;
}

std::vector<DuplicatePair> parse_duplicates(std::istream& in, std::string_view source) {
  RowReader reader(in, source, {"committee1_paper", "committee2_paper", "experiment_id"});
  std::vector<DuplicatePair> out;
  std::unordered_set<std::string> seen;
  reader.for_each([&](const csv::Row& row) {
    if (!(reader.non_empty(row, 0) & reader.non_empty(row, 1))) return;
    DuplicatePair p{row.fields[0], row.fields[1], row.fields[2]};
    if (p.committee1_paper == p.committee2_paper) {
      reader.issue(row.line, "", "self-pair: " + p.committee1_paper);
      return;
    }
    for (const auto& id : {p.committee1_paper, p.committee2_paper}) {
      if (!seen.insert(id).second) {
        reader.issue(row.line, "", "paper " + id + " occurs in more than one pair");
        return;
      }
    }
    out.push_back(std::move(p));
  });
  reader.finish();
  return out;
}

std::vector<Decision> parse_decisions(std::istream& in, std::string_view source) {
  RowReader reader(in, source, {"paper_id", "committee", "verdict"});
  std::vector<Decision> out;
  std::set<std::pair<std::string, Committee>> keys;
  reader.for_each([&](const csv::Row& row) {
    if (!reader.non_empty(row, 0)) return;
    Decision d;
    d.paper_id = row.fields[0];
    const auto& c = row.fields[1];
    if (c == "1") d.committee = Committee::one;
    else if (c == "2") d.committee = Committee::two;
    else if (c == "main") d.committee = Committee::main;
    else {
      reader.issue(row.line, "committee", "unknown committee `" + c + "` (expected 1, 2 or main)");
      return;
    }
    const auto& v = row.fields[2];
    if (v == "accept") d.verdict = Verdict::accept;
    else if (v == "reject") d.verdict = Verdict::reject;
    else if (v == "withdrawn") d.verdict = Verdict::withdrawn;
    else {
      reader.issue(row.line, "verdict", "unknown verdict `" + v + "` (expected accept, reject or withdrawn)");
      return;
    }
    if (!keys.emplace(d.paper_id, d.committee).second) {
      reader.issue(row.line, "", "duplicate decision for (" + d.paper_id + ", committee " + c + ")");
      return;
    }
    out.push_back(std::move(d));
  });
  reader.finish();
  return out;
}

std::vector<PaperOutcome> parse_outcomes(std::istream& in, std::string_view source) {
  RowReader reader(in, source, {"paper_id", "track", "fate", "venue", "citations"});
  std::vector<PaperOutcome> out;
  std::unordered_set<std::string> ids;
  reader.for_each([&](const csv::Row& row) {
    if (!reader.non_empty(row, 0)) return;
    PaperOutcome o;
    o.paper_id = row.fields[0];
    const auto& t = row.fields[1];
    if (t == "accepted") o.track = Track::accepted;
    else if (t == "rejected") o.track = Track::rejected;
    else {
      reader.issue(row.line, "track", "unknown track `" + t + "`");
      return;
    }
    static const std::map<std::string, Fate, std::less<>> fates{{"this_conference", Fate::this_conference},
                                                                {"other_venue", Fate::other_venue},
                                                                {"preprint_only", Fate::preprint_only},
                                                                {"pdf_only", Fate::pdf_only},
                                                                {"untraced", Fate::untraced}};
    const auto f = fates.find(row.fields[2]);
    if (f == fates.end()) {
      reader.issue(row.line, "fate", "unknown fate `" + row.fields[2] + "`");
      return;
    }
    o.fate = f->second;
    if (o.fate == Fate::this_conference && o.track != Track::accepted) {
      reader.issue(row.line, "fate", "fate this_conference requires track accepted");
      return;
    }
    if (!row.fields[3].empty()) o.venue = row.fields[3];
    const auto c = reader.integer(row, 4);
    if (!c) return;
    if (*c < 0) {
      reader.issue(row.line, "citations", "citations must be non-negative");
      return;
    }
    o.citations = *c;
    if (!ids.insert(o.paper_id).second) {
      reader.issue(row.line, "", "duplicate outcome for " + o.paper_id);
      return;
    }
    out.push_back(std::move(o));
  });
  reader.finish();
  return out;
}

std::vector<ReviewRecord> load_reviews(const std::filesystem::path& path) {
  return load_file(path, [](std::istream& in, const std::string& s) { return parse_reviews(in, s); });
}
std::vector<DuplicatePair> load_duplicates(const std::filesystem::path& path) {
  return load_file(path, [](std::istream& in, const std::string& s) { return parse_duplicates(in, s); });
}
std::vector<Decision> load_decisions(const std::filesystem::path& path) {
  return load_file(path, [](std::istream& in, const std::string& s) { return parse_decisions(in, s); });
}
std::vector<PaperOutcome> load_outcomes(const std::filesystem::path& path) {
  return load_file(path, [](std::istream& in, const std::string& s) { return parse_outcomes(in, s); });
}

void write_reviews(std::ostream& out, std::span<const ReviewRecord> rows) {
  csv::write_row(out, {"paper_id", "reviewer_id", "quality", "impact", "confidence", "submitted_at", "summary_words",
                       "body_words"});
  for (const auto& r : rows) {
    csv::write_row(out, {r.paper_id, r.reviewer_id, std::to_string(r.quality), std::to_string(r.impact),
                         std::to_string(r.confidence), format_timestamp(r.submitted_at),
                         std::to_string(r.summary_words), std::to_string(r.body_words)});
  }
}

void write_duplicates(std::ostream& out, std::span<const DuplicatePair> rows) {
  csv::write_row(out, {"committee1_paper", "committee2_paper", "experiment_id"});
  for (const auto& p : rows) csv::write_row(out, {p.committee1_paper, p.committee2_paper, p.experiment_id});
}

void write_decisions(std::ostream& out, std::span<const Decision> rows) {
  csv::write_row(out, {"paper_id", "committee", "verdict"});
  for (const auto& d : rows) csv::write_row(out, {d.paper_id, to_string(d.committee), to_string(d.verdict)});
}

void write_outcomes(std::ostream& out, std::span<const PaperOutcome> rows) {
  csv::write_row(out, {"paper_id", "track", "fate", "venue", "citations"});
  for (const auto& o : rows) {
    csv::write_row(out, {o.paper_id, to_string(o.track), to_string(o.fate), o.venue.value_or(""),
                         std::to_string(o.citations)});
  }
}

Dataset Dataset::canonical() const {
  Dataset d = *this;
  std::ranges::sort(d.reviews, {}, [](const ReviewRecord& r) { return std::tie(r.paper_id, r.reviewer_id); });
  std::ranges::sort(d.duplicates, {}, &DuplicatePair::committee1_paper);
  std::ranges::sort(d.decisions, {}, [](const Decision& x) { return std::tie(x.paper_id, x.committee); });
  std::ranges::sort(d.outcomes, {}, &PaperOutcome::paper_id);
  std::ranges::sort(d.reviewer_roster);
  return d;
}

ValidationReport validate(const Dataset& data) {
  ValidationReport report;
  std::set<std::string> reviewed, reviewers, universe;
  for (const auto& r : data.reviews) {
    reviewed.insert(r.paper_id);
    reviewers.insert(r.reviewer_id);
  }
  universe = reviewed;
  for (const auto& o : data.outcomes) universe.insert(o.paper_id);

  auto check = [&](std::string_view source, const std::string& id) {
    if (!universe.contains(id)) report.dangling.push_back({std::string(source), id});
  };
  for (const auto& p : data.duplicates) {
    check("duplicates", p.committee1_paper);
    check("duplicates", p.committee2_paper);
  }
  for (const auto& d : data.decisions) check("decisions", d.paper_id);

  std::set<std::string> unreviewed;
  for (const auto& o : data.outcomes)
    if (!reviewed.contains(o.paper_id)) unreviewed.insert(o.paper_id);
  report.papers_without_reviews.assign(unreviewed.begin(), unreviewed.end());

  std::set<std::string> idle;
  for (const auto& r : data.reviewer_roster)
    if (!reviewers.contains(r)) idle.insert(r);
  report.reviewers_without_reviews.assign(idle.begin(), idle.end());
  return report;
}

std::vector<std::string> withdrawn_papers(const Dataset& data) {
  std::set<std::string> ids;
  for (const auto& d : data.decisions)
    if (d.verdict == Verdict::withdrawn) ids.insert(d.paper_id);
  return {ids.begin(), ids.end()};
}

}  // namespace peerreview
