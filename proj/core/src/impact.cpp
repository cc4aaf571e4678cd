#include "peerreview/impact.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "peerreview/csv.hpp"
#include "peerreview/random.hpp"
#include "peerreview/stats.hpp"

namespace peerreview {

namespace detail {
extern const char* const kVenueAliasesCsv;
}

double citation_impact(std::int64_t citations) {
  if (citations < 0) throw ValidationError("citation count must be non-negative");
  return std::log10(1.0 + static_cast<double>(citations));
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: vectors differ in length");
  if (x.size() < 3) throw ValidationError("pearson: need at least three points");
  const auto r = stats::pearson_r(x, y);
  if (!r) throw ValidationError("pearson: correlation undefined for a constant input");
  CorrelationResult out;
  out.rho = *r;
  out.n = x.size();
  out.se = stats::correlation_se(out.rho, out.n);
  out.significant = std::abs(out.rho) > 2.0 * out.se;
  return out;
}

// ---------------------------------------------------------------------------
// Per-paper scores and correlation reports

std::map<std::string, double> paper_scores(const Dataset& dataset, const CalibrationFit* fit, PaperScore score,
                                           QualityMode mode) {
  std::map<std::string, double> out;
  if (score == PaperScore::quality_calibrated) {
    if (!fit) throw ValidationError("calibrated quality needs a calibration fit");
    if (mode == QualityMode::posterior_f) {
      for (const auto& p : fit->per_paper)
        if (p.reviews > 0) out[p.paper_id] = p.mean;
      return out;
    }
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& r : fit->per_review) {
      auto& [sum, n] = acc[r.paper_id];
      sum += r.mean;
      ++n;
    }
    for (const auto& [id, a] : acc) out[id] = a.first / static_cast<double>(a.second);
    return out;
  }

  // Reviews are summed in (paper, reviewer) order so row order cannot matter.
  std::vector<const ReviewRecord*> sorted;
  for (const auto& r : dataset.reviews) sorted.push_back(&r);
  std::ranges::sort(sorted, {}, [](const ReviewRecord* r) { return std::tie(r->paper_id, r->reviewer_id); });
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto* r : sorted) {
    double v = 0.0;
    switch (score) {
      case PaperScore::quality_raw: v = r->quality; break;
      case PaperScore::impact: v = r->impact; break;
      case PaperScore::confidence: v = r->confidence; break;
      case PaperScore::quality_calibrated: break;
    }
    auto& [sum, n] = acc[r->paper_id];
    sum += v;
    ++n;
  }
  for (const auto& [id, a] : acc) out[id] = a.first / static_cast<double>(a.second);
  return out;
}

CorrelationResult correlation_report(const Dataset& dataset, const CalibrationFit* fit, PaperScore score,
                                     Subset subset, QualityMode mode) {
  const auto scores = paper_scores(dataset, fit, score, mode);
  const auto withdrawn = withdrawn_papers(dataset);
  const std::set<std::string> excluded(withdrawn.begin(), withdrawn.end());

  std::vector<const PaperOutcome*> rows;
  for (const auto& o : dataset.outcomes) rows.push_back(&o);
  std::ranges::sort(rows, {}, &PaperOutcome::paper_id);

  std::vector<double> x, y;
  for (const auto* o : rows) {
    if (o->fate == Fate::untraced || excluded.contains(o->paper_id)) continue;
    if (subset == Subset::accepted && o->track != Track::accepted) continue;
    if (subset == Subset::rejected && o->track != Track::rejected) continue;
    const auto it = scores.find(o->paper_id);
    if (it == scores.end()) continue;
    x.push_back(it->second);
    y.push_back(citation_impact(o->citations));
  }
  if (x.empty()) throw ValidationError("correlation report: no papers join scores with outcomes");
  return pearson(x, y);
}

CorrelationResult committee_score_correlation(const Dataset& dataset, const CalibrationFit* fit, PaperScore score,
                                              QualityMode mode) {
  if (dataset.duplicates.empty()) throw ValidationError("committee correlation: no duplicate pairs");
  const auto scores = paper_scores(dataset, fit, score, mode);
  const auto withdrawn = withdrawn_papers(dataset);
  const std::set<std::string> excluded(withdrawn.begin(), withdrawn.end());

  std::vector<const DuplicatePair*> pairs;
  for (const auto& d : dataset.duplicates) pairs.push_back(&d);
  std::ranges::sort(pairs, {}, [](const DuplicatePair* d) { return std::tie(d->committee1_paper, d->committee2_paper); });

  std::vector<double> x, y;
  for (const auto* d : pairs) {
    if (excluded.contains(d->committee1_paper) || excluded.contains(d->committee2_paper)) continue;
    const auto a = scores.find(d->committee1_paper);
    const auto b = scores.find(d->committee2_paper);
    if (a == scores.end() || b == scores.end()) continue;
    x.push_back(a->second);
    y.push_back(b->second);
  }
  if (x.size() < 3) throw ValidationError("committee correlation: fewer than three complete pairs");
  return pearson(x, y);
}

// ---------------------------------------------------------------------------
// Noised scatter

NoisedScatter dp_scatter(std::span<const ScatterPoint> points, double scale_x, double scale_y, std::uint64_t seed) {
  if (scale_x < 0.0 || scale_y < 0.0) throw ValidationError("noise scales must be non-negative");
  NoisedScatter out;
  Rng rng = make_rng(seed, 0);
  out.points_.reserve(points.size());
  for (const auto& p : points) {
    const double nx = sample_laplace(rng, scale_x);
    const double ny = sample_laplace(rng, scale_y);
    out.points_.push_back({p.x + nx, p.y + ny, p.track, p.fate});
  }
  return out;
}

void write_scatter_csv(std::ostream& out, const NoisedScatter& scatter) {
  csv::write_row(out, {"x_noised", "y_noised", "track", "fate"});
  for (const auto& p : scatter.points()) {
    const auto x = csv::number(p.x_noised), y = csv::number(p.y_noised);
    csv::write_row(out, {x, y, p.track, p.fate});
  }
}

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

void write_scatter_svg(std::ostream& out, const NoisedScatter& scatter, const SvgOptions& o) {
  constexpr double margin = 30.0;
  const double w = o.width, h = o.height;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (scatter.size() > 0) {
    const auto [xmin, xmax] = std::ranges::minmax(scatter.points(), {}, &NoisedScatter::Point::x_noised);
    const auto [ymin, ymax] = std::ranges::minmax(scatter.points(), {}, &NoisedScatter::Point::y_noised);
    x0 = xmin.x_noised;
    x1 = xmax.x_noised;
    y0 = ymin.y_noised;
    y1 = ymax.y_noised;
    if (x1 - x0 <= 0.0) x1 = x0 + 1.0;
    if (y1 - y0 <= 0.0) y1 = y0 + 1.0;
  }
  auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (w - 2 * margin); };
  auto py = [&](double y) { return h - margin - (y - y0) / (y1 - y0) * (h - 2 * margin); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height
      << "\" viewBox=\"0 0 " << o.width << ' ' << o.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << fixed(margin) << "\" y1=\"" << fixed(h - margin) << "\" x2=\"" << fixed(w - margin)
      << "\" y2=\"" << fixed(h - margin) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fixed(margin) << "\" y1=\"" << fixed(margin) << "\" x2=\"" << fixed(margin) << "\" y2=\""
      << fixed(h - margin) << "\" stroke=\"black\"/>\n";
  if (!o.x_title.empty())
    out << "<text x=\"" << fixed(w / 2) << "\" y=\"" << fixed(h - 8) << "\" text-anchor=\"middle\" font-size=\"12\">"
        << xml_escape(o.x_title) << "</text>\n";
  if (!o.y_title.empty())
    out << "<text x=\"12\" y=\"" << fixed(h / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 12 "
        << fixed(h / 2) << ")\">" << xml_escape(o.y_title) << "</text>\n";
  for (const auto& p : scatter.points()) {
    const char* colour = p.track == "accepted" ? "#1f77b4" : (p.track == "rejected" ? "#d62728" : "#7f7f7f");
    out << "<circle cx=\"" << fixed(px(p.x_noised)) << "\" cy=\"" << fixed(py(p.y_noised))
        << "\" r=\"2.5\" fill=\"" << colour << "\" fill-opacity=\"0.6\"/>\n";
  }
  out << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Venues and fates

namespace {

std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

// Trailing years such as "2015", "'15", "-15" or " 15" after a non-digit.
std::string strip_year(const std::string& s) {
  static const std::regex year(R"(^(.*[^\s\d'\-])[\s'\-]*(?:(?:19|20)\d{2}|\d{2})$)");
  std::smatch m;
  if (std::regex_match(s, m, year)) return m[1].str();
  return s;
}

std::string clean(std::string_view venue) {
  std::string s = collapse_spaces(venue);
  for (std::string_view prefix : {"proceedings of the ", "proceedings of "}) {
    if (s.size() > prefix.size()) {
      std::string head = s.substr(0, prefix.size());
      std::ranges::transform(head, head.begin(), [](unsigned char c) { return std::tolower(c); });
      if (head == prefix) {
        s = s.substr(prefix.size());
        break;
      }
    }
  }
  return strip_year(s);
}

}  // namespace

std::string VenueAliases::key(std::string_view venue) {
  std::string s = clean(venue);
  std::ranges::transform(s, s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void VenueAliases::add(std::string_view alias, std::string venue) { table_[key(alias)] = std::move(venue); }

std::string VenueAliases::normalize(std::string_view venue) const {
  const auto it = table_.find(key(venue));
  return it != table_.end() ? it->second : clean(venue);
}

VenueAliases VenueAliases::parse(std::istream& in, std::string_view source) {
  VenueAliases out;
  std::vector<LoadIssue> issues;
  const auto rows = csv::read(in);
  if (rows.empty() || rows.front().fields != std::vector<std::string>{"alias", "venue"}) {
    issues.push_back({rows.empty() ? 0 : rows.front().line, "", "header must be alias,venue"});
    throw LoadError(std::string(source), std::move(issues));
  }
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (r.fields.size() != 2 || r.fields[0].empty() || r.fields[1].empty()) {
      issues.push_back({r.line, "", "expected two non-empty fields"});
      continue;
    }
    out.add(r.fields[0], r.fields[1]);
  }
  if (!issues.empty()) throw LoadError(std::string(source), std::move(issues));
  return out;
}

VenueAliases VenueAliases::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse(in, path.string());
}

VenueAliases VenueAliases::builtin() {
  std::istringstream in(detail::kVenueAliasesCsv);
  return parse(in, "builtin venue aliases");
}

std::string_view fate_label(Fate f) {
  switch (f) {
    case Fate::this_conference: return "This conference";
    case Fate::other_venue: return "Published elsewhere";
    case Fate::preprint_only: return "arXiv only";
    case Fate::pdf_only: return "PDF only";
    case Fate::untraced: return "Untraced";
  }
  return "";
}

FateTable fate_table(std::span<const PaperOutcome> outcomes, const VenueAliases& aliases, std::int64_t threshold) {
  FateTable t;
  for (Fate f : {Fate::this_conference, Fate::other_venue, Fate::preprint_only, Fate::pdf_only, Fate::untraced})
    t.by_fate[f] = 0;
  std::map<std::pair<Track, Fate>, std::int64_t> flows;
  std::map<std::string, std::int64_t> venue_counts;
  std::int64_t accepted = 0, rejected = 0;
  for (const auto& o : outcomes) {
    ++t.total;
    ++t.by_fate[o.fate];
    ++flows[{o.track, o.fate}];
    (o.track == Track::accepted ? accepted : rejected) += 1;
    if (o.fate == Fate::other_venue) {
      ++t.published_elsewhere;
      ++venue_counts[o.venue ? aliases.normalize(*o.venue) : std::string()];
    }
  }
  t.traced = t.total - t.by_fate[Fate::untraced];
  if (t.total == 0) return t;

  std::int64_t other = 0;
  for (const auto& [venue, n] : venue_counts) {
    if (!venue.empty() && n >= threshold)
      t.venues.push_back({venue, n});
    else
      other += n;
  }
  std::ranges::sort(t.venues, [](const VenueCount& a, const VenueCount& b) {
    return a.count != b.count ? a.count > b.count : a.venue < b.venue;
  });
  if (other > 0) t.venues.push_back({"Other", other});

  if (accepted) t.links.push_back({"Submitted", "Accepted", accepted});
  if (rejected) t.links.push_back({"Submitted", "Rejected", rejected});
  for (const auto& [key, n] : flows)
    t.links.push_back({key.first == Track::accepted ? "Accepted" : "Rejected", std::string(fate_label(key.second)), n});
  for (const auto& v : t.venues) t.links.push_back({std::string(fate_label(Fate::other_venue)), v.venue, v.count});
  return t;
}

void write_sankey_csv(std::ostream& out, const FateTable& table) {
  csv::write_row(out, {"source", "target", "count"});
  for (const auto& l : table.links) {
    const auto n = std::to_string(l.count);
    csv::write_row(out, {l.source, l.target, n});
  }
}

}  // namespace peerreview
