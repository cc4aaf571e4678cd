#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "output.hpp"
#include "peerreview/calibration.hpp"
#include "peerreview/citation_client.hpp"
#include "peerreview/committee_sim.hpp"
#include "peerreview/consistency_stats.hpp"
#include "peerreview/csv.hpp"
#include "peerreview/impact.hpp"
#include "peerreview/parallel.hpp"
#include "peerreview/review_data.hpp"
#include "peerreview/synthetic.hpp"
#include "peerreview/timeline.hpp"

namespace peerreview::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Global {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool no_timestamp = false;
  unsigned threads = 0;
};

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

CalibrationFit load_fit(const fs::path& path) { return fit_from_json(read_file(path)); }

template <class E>
E parse_choice(const std::string& value, const std::map<std::string, E>& choices, const char* what) {
  const auto it = choices.find(value);
  if (it == choices.end()) throw ValidationError(std::string("unknown ") + what + ": " + value);
  return it->second;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  std::string reviews;
  std::string field = "quality";
  double b_min = 1e-3, b_max = 10.0, s_min = 1e-2, s_max = 10.0;
  std::size_t b_steps = 40, s_steps = 40, refine = 10;
};

CalibrationFit fit_reviews(const std::vector<ReviewRecord>& reviews, ScoreField field, const GridSpec& grid,
                           unsigned threads) {
  const auto scored = graph_from_reviews(reviews, field);
  FitOptions options;
  options.threads = threads;
  return grid_fit(scored.scores, scored.graph, grid, options);
}

void run_calibrate(const CalibrateArgs& a, OutputContext& ctx, const Global& g, std::ostream& out) {
  const auto reviews = load_reviews(a.reviews);
  ctx.add_input(a.reviews);
  const auto field = parse_choice<ScoreField>(
      a.field, {{"quality", ScoreField::quality}, {"impact", ScoreField::impact}, {"confidence", ScoreField::confidence}},
      "score field");
  const auto grid = GridSpec::logarithmic(a.b_steps, a.b_min, a.b_max, a.s_steps, a.s_min, a.s_max, a.refine);
  const auto fit = fit_reviews(reviews, field, grid, g.threads);
  ctx.write_json("calibration.json", ojson::parse(to_json(fit)));
  const auto& p = fit.params;
  out << "alpha_f " << p.alpha_f << "  alpha_b " << p.alpha_b << "  sigma2 " << p.sigma2 << "  subjectivity "
      << subjectivity_from_fit(p) << '\n';
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  double subjectivity = 0.5;
  std::string fit;
  std::vector<std::size_t> reviewers = {3};
  std::vector<double> accept_rates = {0.23};
  std::size_t papers = 500;
  std::size_t samples = 100'000;
};

void run_simulate(const SimulateArgs& a, OutputContext& ctx, const Global& g, std::ostream& out) {
  SimConfig base;
  base.subjectivity = a.subjectivity;
  if (!a.fit.empty()) {
    base.subjectivity = subjectivity_from_fit(load_fit(a.fit).params);
    ctx.add_input(a.fit);
  }
  base.n_papers = a.papers;
  base.total_paper_samples = a.samples;
  base.seed = g.seed;
  base.threads = g.threads;
  const auto curve = consistency_curve(base, a.accept_rates, a.reviewers);
  ctx.write_csv("consistency_curve.csv", [&](std::ostream& s) {
    csv::write_row(s, {"accept_rate", "reviewers", "consistency", "std_error", "trials"});
    for (const auto& p : curve) {
      csv::write_row(s, {csv::number(p.accept_rate), std::to_string(p.reviewers),
                         csv::number(p.outcome.accept_consistency), csv::number(p.outcome.std_error),
                         std::to_string(p.outcome.trials)});
    }
  });
  for (const auto& p : curve)
    out << "rate " << p.accept_rate << "  R " << p.reviewers << "  consistency " << p.outcome.accept_consistency
        << " +/- " << p.outcome.std_error << '\n';
}

// ---------------------------------------------------------------------------
// consistency

struct ConsistencyArgs {
  std::optional<std::int64_t> aa, ar, ra, rr;
  std::string duplicates, decisions;
  std::vector<double> prior = {1.0, 1.0, 1.0};
  std::int64_t samples = 100'000;
  double accept_rate = 0.23;
  double random_rate = 0.25;
  std::optional<std::int64_t> binomial_k, binomial_n;
};

ConfusionMatrix matrix_from_files(const ConsistencyArgs& a, OutputContext& ctx) {
  const auto pairs = load_duplicates(a.duplicates);
  const auto decisions = load_decisions(a.decisions);
  ctx.add_input(a.duplicates);
  ctx.add_input(a.decisions);
  std::map<std::pair<std::string, Committee>, Verdict> verdict;
  for (const auto& d : decisions) verdict[{d.paper_id, d.committee}] = d.verdict;
  ConfusionMatrix m;
  for (const auto& p : pairs) {
    const auto v1 = verdict.find({p.committee1_paper, Committee::one});
    const auto v2 = verdict.find({p.committee2_paper, Committee::two});
    if (v1 == verdict.end() || v2 == verdict.end()) continue;
    if (v1->second == Verdict::withdrawn || v2->second == Verdict::withdrawn) continue;
    const bool acc1 = v1->second == Verdict::accept, acc2 = v2->second == Verdict::accept;
    (acc1 ? (acc2 ? m.aa : m.ar) : (acc2 ? m.ra : m.rr)) += 1;
  }
  return m;
}

ojson summary_json(const ConsistencySummary& s) {
  return {{"inconsistency", optional_number(s.inconsistency)},
          {"accept_precision_c1", optional_number(s.accept_precision_c1)},
          {"accept_precision_c2", optional_number(s.accept_precision_c2)},
          {"accept_precision_avg", optional_number(s.accept_precision_avg)},
          {"reject_precision_c1", optional_number(s.reject_precision_c1)},
          {"reject_precision_c2", optional_number(s.reject_precision_c2)},
          {"reject_precision_avg", optional_number(s.reject_precision_avg)},
          {"agreed_accept_rate", optional_number(s.agreed_accept_rate)},
          {"inconsistency_se", optional_number(s.inconsistency_se)}};
}

ojson histogram_json(const Histogram& h) {
  return {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}, {"underflow", h.underflow}, {"overflow", h.overflow}};
}

ojson ratio_json(const RatioSummary& r) {
  return {{"mean", r.mean},
          {"sd", r.sd},
          {"samples", r.samples},
          {"band_2sd", {r.band_lower(), r.band_upper()}},
          {"histogram", histogram_json(r.histogram)}};
}

void run_consistency(const ConsistencyArgs& a, OutputContext& ctx, const Global& g, std::ostream& out) {
  ConfusionMatrix m;
  const bool from_counts = a.aa || a.ar || a.ra || a.rr;
  if (from_counts) {
    if (!(a.aa && a.ar && a.ra && a.rr)) throw ValidationError("--aa, --ar, --ra and --rr must be given together");
    m = {*a.aa, *a.ar, *a.ra, *a.rr};
  } else if (!a.duplicates.empty() && !a.decisions.empty()) {
    m = matrix_from_files(a, ctx);
  } else {
    throw ValidationError("give either --aa/--ar/--ra/--rr or --duplicates with --decisions");
  }
  if (a.prior.size() != 3) throw ValidationError("--prior takes three concentrations");

  const auto summary = confusion_stats(m);
  const auto expected = random_committee_expectation(static_cast<double>(m.total()), a.random_rate);
  const std::int64_t k = a.binomial_k.value_or(2 * m.aa + m.ar + m.ra);
  const std::int64_t n = a.binomial_n.value_or(2 * m.total());
  const auto binom = binomial_check(k, n, a.accept_rate);
  const auto post = dirichlet_posterior({a.prior[0], a.prior[1], a.prior[2]}, outcome_counts(m));
  const auto mc = posterior_ratio_mc(post, a.samples, g.seed, g.threads);

  ojson doc;
  doc["confusion"] = {{"aa", m.aa}, {"ar", m.ar}, {"ra", m.ra}, {"rr", m.rr}, {"total", m.total()}};
  doc["summary"] = summary_json(summary);
  doc["alternates"] = {{"agreed_accept_rate_aa_over_aa_plus_rr", optional_number(summary.agreed_accept_rate_alt)},
                       {"note", "agreed_accept_rate is aa/rr; the alternate reading aa/(aa+rr) is reported here"}};
  doc["random_committee"] = {
      {"accept_rate", a.random_rate},
      {"expected", {{"aa", expected.aa}, {"ar", expected.ar}, {"ra", expected.ra}, {"rr", expected.rr}}},
      {"summary", summary_json(confusion_stats(expected))}};
  doc["binomial"] = {{"k", binom.k},         {"n", binom.n},         {"p", binom.p},
                     {"mean", binom.mean},   {"sd", binom.sd},       {"pmf", binom.pmf},
                     {"interval", {binom.lower, binom.upper}},      {"coverage", binom.coverage},
                     {"z", binom.z},         {"inside", binom.inside}};
  std::array<double, 3> sds{post.sd(0), post.sd(1), post.sd(2)};
  doc["dirichlet"] = {{"outcomes", {"consistent_accept", "inconsistent", "consistent_reject"}},
                      {"prior_alpha", post.alpha},
                      {"counts", post.counts},
                      {"posterior_alpha", post.posterior_alpha},
                      {"means", post.means},
                      {"variances", post.variances},
                      {"sds", sds}};
  doc["ratio_mc"] = {{"samples", mc.n_samples},
                     {"accept_precision", ratio_json(mc.accept_precision)},
                     {"reject_precision", ratio_json(mc.reject_precision)},
                     {"agreed_accept_rate", ratio_json(mc.agreed_accept_rate)},
                     {"agreed_accept_rate_alt", ratio_json(mc.agreed_accept_rate_alt)}};
  ctx.write_json("consistency.json", std::move(doc));

  ctx.write_csv("ratio_histograms.csv", [&](std::ostream& s) {
    csv::write_row(s, {"statistic", "bin_lo", "bin_hi", "count"});
    const std::pair<const char*, const RatioSummary*> stats[] = {{"accept_precision", &mc.accept_precision},
                                                                 {"reject_precision", &mc.reject_precision},
                                                                 {"agreed_accept_rate", &mc.agreed_accept_rate},
                                                                 {"agreed_accept_rate_alt", &mc.agreed_accept_rate_alt}};
    for (const auto& [name, r] : stats) {
      const auto& h = r->histogram;
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double lo = h.lo + static_cast<double>(b) * h.bin_width();
        csv::write_row(s, {name, csv::number(lo), csv::number(lo + h.bin_width()), std::to_string(h.counts[b])});
      }
    }
  });
  out << "inconsistency " << *summary.inconsistency << " (" << m.ar + m.ra << "/" << m.total() << ")\n";
}

// ---------------------------------------------------------------------------
// timeline

struct TimelineArgs {
  std::string reviews, duplicates, calibrated;
  std::string deadline = "2014-07-21T00:00:00Z";
  std::string cutoff = "2014-08-04T00:00:00Z";
  int window_days = 4, step_days = 1, quorum = 3;
  std::size_t bootstrap = 1000;
  bool no_anchor = false;
};

void run_timeline(const TimelineArgs& a, OutputContext& ctx, const Global& g, std::ostream& out) {
  const auto reviews = load_reviews(a.reviews);
  ctx.add_input(a.reviews);
  const auto times = step_times(reviews, days(a.step_days));

  ctx.write_csv("cumulative_reviews.csv", [&](std::ostream& s) { write_series_csv(s, cumulative_reviews(reviews)); });
  ctx.write_csv("reviews_per_paper.csv", [&](std::ostream& s) {
    csv::write_row(s, {"t", "min", "median", "mean", "max", "papers"});
    for (const auto& p : reviews_per_paper_series(reviews, times))
      csv::write_row(s, {format_timestamp(p.t), csv::number(p.min), csv::number(p.median), csv::number(p.mean),
                         csv::number(p.max), std::to_string(p.papers)});
  });
  ctx.write_csv("below_quorum.csv",
                [&](std::ostream& s) { write_series_csv(s, papers_below_quorum(reviews, times, a.quorum)); });

  const std::pair<const char*, ReviewField> fields[] = {{"confidence", ReviewField::confidence},
                                                        {"quality", ReviewField::quality},
                                                        {"impact", ReviewField::impact},
                                                        {"length", ReviewField::length}};
  const auto deadline = parse_timestamp(a.deadline), cutoff = parse_timestamp(a.cutoff);
  ojson tests;
  for (const auto& [name, field] : fields) {
    ctx.write_csv(std::string("window_") + name + ".csv", [&](std::ostream& s) {
      write_series_csv(s, moving_window_mean(reviews, field, times, days(a.window_days)));
    });
    try {
      const auto r = deadline_split_test(reviews, field, deadline, cutoff);
      tests[name] = {{"mean_before", r.mean_before}, {"mean_after", r.mean_after}, {"se_before", r.se_before},
                     {"se_after", r.se_after},       {"n_before", r.n_before},     {"n_after", r.n_after},
                     {"t_stat", r.t_stat},           {"dof", r.dof},               {"p_value", r.p_value}};
    } catch (const ValidationError& e) {
      tests[name] = {{"error", e.what()}};
    }
  }
  ctx.write_json("split_tests.json",
                 {{"deadline", format_timestamp(deadline)},
                  {"cutoff", format_timestamp(cutoff)},
                  {"test", "Welch two-sample t-test, two-sided"},
                  {"fields", std::move(tests)}});

  if (!a.duplicates.empty()) {
    const auto pairs = load_duplicates(a.duplicates);
    ctx.add_input(a.duplicates);
    ReviewScore score;
    if (!a.calibrated.empty()) {
      const auto fit = load_fit(a.calibrated);
      ctx.add_input(a.calibrated);
      auto calibrated = std::make_shared<std::map<std::pair<std::string, std::string>, double>>();
      for (const auto& r : fit.per_review) (*calibrated)[{r.paper_id, r.reviewer_id}] = r.mean;
      score = [calibrated](const ReviewRecord& r) {
        const auto it = calibrated->find({r.paper_id, r.reviewer_id});
        if (it == calibrated->end())
          throw ValidationError("no calibrated score for review (" + r.paper_id + ", " + r.reviewer_id + ")");
        return it->second;
      };
    }
    ctx.write_csv("duplicate_correlation.csv", [&](std::ostream& s) {
      write_series_csv(s, duplicate_correlation_series(reviews, pairs, times, score));
    });
    BootstrapOptions bo;
    bo.resamples = a.bootstrap;
    bo.seed = g.seed;
    bo.anchor = !a.no_anchor;
    bo.threads = g.threads;
    bo.score = score;
    const auto band = bootstrap_correlation_band(reviews, pairs, times, bo);
    ctx.write_csv("correlation_band.csv", [&](std::ostream& s) {
      csv::write_row(s, {"t", "estimate", "lower", "median", "upper", "resamples"});
      for (const auto& p : band)
        csv::write_row(s, {format_timestamp(p.t), csv::number(p.estimate), csv::number(p.lower), csv::number(p.median),
                           csv::number(p.upper), std::to_string(p.resamples)});
    });
  }
  out << reviews.size() << " reviews over " << times.size() << " sample times\n";
}

// ---------------------------------------------------------------------------
// impact

struct ImpactArgs {
  std::string reviews, outcomes, fit, duplicates, decisions;
  std::string quality_mode = "posterior";
  double noise_x = kDefaultNoiseX, noise_y = kDefaultNoiseY;
};

const char* score_name(PaperScore s) {
  switch (s) {
    case PaperScore::quality_calibrated: return "quality_calibrated";
    case PaperScore::quality_raw: return "quality_raw";
    case PaperScore::impact: return "impact";
    case PaperScore::confidence: return "confidence";
  }
  return "";
}

ojson correlation_json(const CorrelationResult& r) {
  return {{"rho", r.rho}, {"se", r.se}, {"n", r.n}, {"significant", r.significant}};
}

void run_impact(const ImpactArgs& a, OutputContext& ctx, const Global& g, std::ostream& out) {
  Dataset ds;
  ds.reviews = load_reviews(a.reviews);
  ctx.add_input(a.reviews);
  ds.outcomes = load_outcomes(a.outcomes);
  ctx.add_input(a.outcomes);
  if (!a.duplicates.empty()) {
    ds.duplicates = load_duplicates(a.duplicates);
    ctx.add_input(a.duplicates);
  }
  if (!a.decisions.empty()) {
    ds.decisions = load_decisions(a.decisions);
    ctx.add_input(a.decisions);
  }
  const auto mode = parse_choice<QualityMode>(
      a.quality_mode, {{"posterior", QualityMode::posterior_f}, {"average", QualityMode::review_average}},
      "quality mode");

  CalibrationFit fit;
  if (!a.fit.empty()) {
    fit = load_fit(a.fit);
    ctx.add_input(a.fit);
  } else {
    fit = fit_reviews(ds.reviews, ScoreField::quality, GridSpec::logarithmic(), g.threads);
  }

  ojson correlations = ojson::array();
  for (auto score : {PaperScore::quality_calibrated, PaperScore::impact, PaperScore::confidence}) {
    for (auto [subset, name] : {std::pair{Subset::accepted, "accepted"}, std::pair{Subset::rejected, "rejected"},
                                std::pair{Subset::all, "all"}}) {
      ojson row = {{"score", score_name(score)}, {"subset", name}};
      try {
        row.update(correlation_json(correlation_report(ds, &fit, score, subset, mode)));
      } catch (const ValidationError& e) {
        row["error"] = e.what();
      }
      correlations.push_back(std::move(row));
    }
  }
  ojson committee = ojson::array();
  if (!ds.duplicates.empty()) {
    for (auto score : {PaperScore::quality_calibrated, PaperScore::impact, PaperScore::confidence}) {
      ojson row = {{"score", score_name(score)}};
      try {
        row.update(correlation_json(committee_score_correlation(ds, &fit, score, mode)));
      } catch (const ValidationError& e) {
        row["error"] = e.what();
      }
      committee.push_back(std::move(row));
    }
  }

  // Scatter of calibrated quality against citation impact. Correlations above
  // come from the raw values; only the plot is noised.
  const auto quality = paper_scores(ds, &fit, PaperScore::quality_calibrated, mode);
  std::vector<const PaperOutcome*> rows;
  for (const auto& o : ds.outcomes) rows.push_back(&o);
  std::ranges::sort(rows, {}, &PaperOutcome::paper_id);
  std::vector<ScatterPoint> points;
  for (const auto* o : rows) {
    if (o->fate == Fate::untraced) continue;
    const auto it = quality.find(o->paper_id);
    if (it == quality.end()) continue;
    points.push_back({it->second, citation_impact(o->citations), std::string(to_string(o->track)),
                      std::string(to_string(o->fate))});
  }
  const auto noised = dp_scatter(points, a.noise_x, a.noise_y, g.seed);
  ctx.write_csv("scatter.csv", [&](std::ostream& s) { write_scatter_csv(s, noised); });
  ctx.write_svg("scatter.svg", [&](std::ostream& s) {
    write_scatter_svg(s, noised, {480, 360, "calibrated quality", "citation impact"});
  });

  ctx.write_json("impact.json", {{"citation_impact", "log10(1 + citations)"},
                                 {"quality_mode", a.quality_mode},
                                 {"correlations", std::move(correlations)},
                                 {"committee_correlations", std::move(committee)},
                                 {"scatter",
                                  {{"points", noised.size()},
                                   {"noise", "Laplace"},
                                   {"scale_x", a.noise_x},
                                   {"scale_y", a.noise_y},
                                   {"note", "visual obfuscation only; no privacy budget is claimed"}}}});
  out << points.size() << " traced papers in the scatter\n";
}

// ---------------------------------------------------------------------------
// fate

struct FateArgs {
  std::string outcomes, aliases;
  std::int64_t threshold = kDefaultVenueThreshold;
};

void run_fate(const FateArgs& a, OutputContext& ctx, std::ostream& out) {
  const auto outcomes = load_outcomes(a.outcomes);
  ctx.add_input(a.outcomes);
  VenueAliases aliases = VenueAliases::builtin();
  if (!a.aliases.empty()) {
    aliases = VenueAliases::load(a.aliases);
    ctx.add_input(a.aliases);
  }
  const auto table = fate_table(outcomes, aliases, a.threshold);
  ctx.write_csv("sankey.csv", [&](std::ostream& s) { write_sankey_csv(s, table); });
  ojson fates;
  for (const auto& [f, n] : table.by_fate) fates[std::string(to_string(f))] = n;
  ojson venues = ojson::array();
  for (const auto& v : table.venues) venues.push_back({{"venue", v.venue}, {"count", v.count}});
  ctx.write_json("fate_table.json", {{"total", table.total},
                                     {"traced", table.traced},
                                     {"published_elsewhere", table.published_elsewhere},
                                     {"threshold", a.threshold},
                                     {"fates", std::move(fates)},
                                     {"venues", std::move(venues)}});
  out << table.traced << " of " << table.total << " papers traced\n";
}

// ---------------------------------------------------------------------------
// fetch

struct FetchArgs {
  std::string ids, cache;
  bool offline = false;
  std::string api_base = kDefaultApiBase;
  unsigned in_flight = 4;
  int retries = 5;
};

std::vector<std::string> read_ids(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    ids.push_back(line.substr(b, e - b + 1));
  }
  return ids;
}

void run_fetch(const FetchArgs& a, OutputContext& ctx, std::ostream& out) {
  const auto ids = read_ids(a.ids);
  ctx.add_input(a.ids);
  FetchOptions options;
  options.cache_path = a.cache;
  options.offline = a.offline;
  options.api_base = a.api_base;
  options.max_in_flight = a.in_flight;
  options.max_retries = a.retries;
  const auto result = fetch_citations(ids, options);
  ctx.write_csv("citations.csv", [&](std::ostream& s) {
    csv::write_row(s, {"id", "citations"});
    for (const auto& [id, n] : result.citations) csv::write_row(s, {id, std::to_string(n)});
  });
  out << result.cache_hits << " cached, " << result.fetched << " fetched\n";
}

// ---------------------------------------------------------------------------
// gen-synthetic

struct GenerateArgs {
  synthetic::DatasetConfig config;
};

void run_generate(GenerateArgs a, OutputContext& ctx, const Global& g, std::ostream& out) {
  a.config.seed = g.seed;
  const auto ds = synthetic::generate_dataset(a.config);
  ctx.write_csv("reviews.csv", [&](std::ostream& s) { write_reviews(s, ds.reviews); });
  ctx.write_csv("duplicates.csv", [&](std::ostream& s) { write_duplicates(s, ds.duplicates); });
  ctx.write_csv("decisions.csv", [&](std::ostream& s) { write_decisions(s, ds.decisions); });
  ctx.write_csv("outcomes.csv", [&](std::ostream& s) { write_outcomes(s, ds.outcomes); });

  // Offline citation cache and id list for `fetch`, timestamped at the cutoff
  // so the files are reproducible.
  std::vector<std::string> ids;
  for (const auto& o : ds.outcomes)
    if (o.fate != Fate::untraced) ids.push_back(o.paper_id);
  ctx.write_csv("paper_ids.txt", [&](std::ostream& s) {
    for (const auto& id : ids) s << id << '\n';
  });
  ctx.write_raw("citation_cache.jsonl", [&](std::ostream& s) {
    for (const auto& o : ds.outcomes)
      if (o.fate != Fate::untraced)
        s << CitationCache::to_line({o.paper_id, o.citations, a.config.cutoff, "", {}}) << '\n';
  });
  out << ds.reviews.size() << " reviews, " << ds.duplicates.size() << " duplicate pairs, " << ds.outcomes.size()
      << " outcomes\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistics of conference peer review: calibration, committee consistency, timelines and impact",
               "peerreview"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit the generation time from output metadata");
  app.add_option("--threads", g.threads, "Worker thread cap (0: hardware default)")->capture_default_str();

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Fit the reviewer calibration model (writes calibration.json)");
  c_cal->add_option("--reviews", cal.reviews, "reviews.csv")->required();
  c_cal->add_option("--field", cal.field, "quality, impact or confidence")->capture_default_str();
  c_cal->add_option("--b-min", cal.b_min)->capture_default_str();
  c_cal->add_option("--b-max", cal.b_max)->capture_default_str();
  c_cal->add_option("--b-steps", cal.b_steps)->capture_default_str();
  c_cal->add_option("--s-min", cal.s_min)->capture_default_str();
  c_cal->add_option("--s-max", cal.s_max)->capture_default_str();
  c_cal->add_option("--s-steps", cal.s_steps)->capture_default_str();
  c_cal->add_option("--refine", cal.refine, "Refinement factor (0 or 1 disables)")->capture_default_str();

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate two-committee accept consistency (writes consistency_curve.csv)");
  auto* subj = c_sim->add_option("--subjectivity", sim.subjectivity, "s = sigma2/(alpha_f+sigma2)")->capture_default_str();
  c_sim->add_option("--fit", sim.fit, "Take s from a calibration.json")->excludes(subj);
  c_sim->add_option("--reviewers", sim.reviewers, "Reviewers per paper (comma list)")->delimiter(',')->capture_default_str();
  c_sim->add_option("--accept-rate", sim.accept_rates, "Accept rates (comma list)")->delimiter(',')->capture_default_str();
  c_sim->add_option("--papers", sim.papers, "Papers per simulated conference")->capture_default_str();
  c_sim->add_option("--samples", sim.samples, "Total paper samples")->capture_default_str();

  ConsistencyArgs con;
  auto* c_con = app.add_subcommand("consistency", "Confusion-matrix, binomial and Dirichlet statistics (writes consistency.json)");
  c_con->add_option("--aa", con.aa, "Both committees accept");
  c_con->add_option("--ar", con.ar, "Committee 1 accepts, committee 2 rejects");
  c_con->add_option("--ra", con.ra, "Committee 1 rejects, committee 2 accepts");
  c_con->add_option("--rr", con.rr, "Both committees reject");
  c_con->add_option("--duplicates", con.duplicates, "duplicates.csv");
  c_con->add_option("--decisions", con.decisions, "decisions.csv");
  c_con->add_option("--prior", con.prior, "Dirichlet prior (three values)")->delimiter(',')->capture_default_str();
  c_con->add_option("--samples", con.samples, "Monte Carlo draws")->capture_default_str();
  c_con->add_option("--accept-rate", con.accept_rate, "Hypothesized accept rate for the binomial check")->capture_default_str();
  c_con->add_option("--random-rate", con.random_rate, "Accept rate of the random-committee baseline")->capture_default_str();
  c_con->add_option("--binomial-k", con.binomial_k, "Observed accepts (default 2aa+ar+ra)");
  c_con->add_option("--binomial-n", con.binomial_n, "Decisions (default twice the total)");

  TimelineArgs tl;
  auto* c_tl = app.add_subcommand("timeline", "Review arrival series and deadline tests (writes series CSVs and split_tests.json)");
  c_tl->add_option("--reviews", tl.reviews, "reviews.csv")->required();
  c_tl->add_option("--duplicates", tl.duplicates, "duplicates.csv for the correlation series");
  c_tl->add_option("--calibrated", tl.calibrated, "calibration.json whose calibrated scores replace raw quality");
  c_tl->add_option("--deadline", tl.deadline)->capture_default_str();
  c_tl->add_option("--cutoff", tl.cutoff)->capture_default_str();
  c_tl->add_option("--window-days", tl.window_days)->capture_default_str();
  c_tl->add_option("--step-days", tl.step_days)->capture_default_str();
  c_tl->add_option("--quorum", tl.quorum)->capture_default_str();
  c_tl->add_option("--bootstrap", tl.bootstrap, "Bootstrap resamples")->capture_default_str();
  c_tl->add_flag("--no-anchor", tl.no_anchor, "Do not anchor bootstrap trajectories at the final time");

  ImpactArgs im;
  auto* c_im = app.add_subcommand("impact", "Score/citation correlations and a noised scatter (writes impact.json)");
  c_im->add_option("--reviews", im.reviews, "reviews.csv")->required();
  c_im->add_option("--outcomes", im.outcomes, "outcomes.csv")->required();
  c_im->add_option("--fit", im.fit, "calibration.json (fitted on the fly when absent)");
  c_im->add_option("--duplicates", im.duplicates, "duplicates.csv for committee correlations");
  c_im->add_option("--decisions", im.decisions, "decisions.csv (withdrawn papers are excluded)");
  c_im->add_option("--quality-mode", im.quality_mode, "posterior or average")->capture_default_str();
  c_im->add_option("--noise-x", im.noise_x, "Laplace scale on the score axis")->capture_default_str();
  c_im->add_option("--noise-y", im.noise_y, "Laplace scale on the impact axis")->capture_default_str();

  FateArgs fa;
  auto* c_fa = app.add_subcommand("fate", "Fate table and Sankey links (writes sankey.csv, fate_table.json)");
  c_fa->add_option("--outcomes", fa.outcomes, "outcomes.csv")->required();
  c_fa->add_option("--aliases", fa.aliases, "Venue alias CSV (alias,venue)");
  c_fa->add_option("--threshold", fa.threshold, "Minimum papers for a venue row")->capture_default_str();

  FetchArgs fe;
  auto* c_fe = app.add_subcommand("fetch", "Fetch citation counts into a cache (writes citations.csv)");
  c_fe->add_option("--ids", fe.ids, "File with one external id per line")->required();
  c_fe->add_option("--cache", fe.cache, "JSON-lines cache file")->required();
  c_fe->add_flag("--offline", fe.offline, "Fail on any cache miss instead of fetching");
  c_fe->add_option("--api-base", fe.api_base, "API base URL")->capture_default_str();
  c_fe->add_option("--in-flight", fe.in_flight, "Concurrent requests")->capture_default_str();
  c_fe->add_option("--retries", fe.retries, "Retries on rate limiting or network failure")->capture_default_str();

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("gen-synthetic", "Write a synthetic corpus");
  c_gen->group("");  // hidden
  c_gen->add_option("--papers", gen.config.n_papers)->capture_default_str();
  c_gen->add_option("--reviewers", gen.config.n_reviewers)->capture_default_str();
  c_gen->add_option("--per-reviewer", gen.config.per_reviewer)->capture_default_str();
  c_gen->add_option("--duplicate-pairs", gen.config.duplicate_pairs)->capture_default_str();
  c_gen->add_option("--late-shift", gen.config.late_confidence_shift)->capture_default_str();

  if (args.empty()) {
    err << app.help();
    return kValidationError;
  }
  std::vector<const char*> argv = {"peerreview"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kValidationError;
  }

  try {
    if (g.threads) set_max_threads(g.threads);
    const auto* sub = app.get_subcommands().front();
    OutputContext ctx(sub->get_name(), g.seed, g.out_dir, !g.no_timestamp);
    if (sub == c_cal) run_calibrate(cal, ctx, g, out);
    else if (sub == c_sim) run_simulate(sim, ctx, g, out);
    else if (sub == c_con) run_consistency(con, ctx, g, out);
    else if (sub == c_tl) run_timeline(tl, ctx, g, out);
    else if (sub == c_im) run_impact(im, ctx, g, out);
    else if (sub == c_fa) run_fate(fa, ctx, out);
    else if (sub == c_fe) run_fetch(fe, ctx, out);
    else if (sub == c_gen) run_generate(gen, ctx, g, out);
    for (const auto& p : ctx.written()) out << "wrote " << p.string() << '\n';
    return kOk;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

}  // namespace peerreview::cli
