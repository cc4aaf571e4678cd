#include "peerreview/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>

#include "peerreview/csv.hpp"
#include "peerreview/parallel.hpp"
#include "peerreview/stats.hpp"

namespace peerreview {

double field_value(const ReviewRecord& r, ReviewField field) {
  switch (field) {
    case ReviewField::confidence: return r.confidence;
    case ReviewField::quality: return r.quality;
    case ReviewField::impact: return r.impact;
    case ReviewField::length: return static_cast<double>(r.length());
  }
  return 0.0;
}

namespace {

std::vector<const ReviewRecord*> by_time(std::span<const ReviewRecord> reviews) {
  std::vector<const ReviewRecord*> out;
  out.reserve(reviews.size());
  for (const auto& r : reviews) out.push_back(&r);
  std::ranges::sort(out, {}, [](const ReviewRecord* r) { return std::tie(r->submitted_at, r->paper_id, r->reviewer_id); });
  return out;
}

void require_sorted(std::span<const Timestamp> times) {
  if (!std::ranges::is_sorted(times)) throw ValidationError("sample times must be sorted");
}

// Per-paper review counts swept forward through the sample times.
template <class Emit>
void sweep_counts(std::span<const ReviewRecord> reviews, std::span<const Timestamp> times, Emit&& emit) {
  require_sorted(times);
  const auto sorted = by_time(reviews);
  std::map<std::string, std::size_t> index;
  for (const auto* r : sorted) index.emplace(r->paper_id, 0);
  std::size_t next = 0;
  for (auto& [id, idx] : index) idx = next++;

  std::vector<int> counts(index.size(), 0);
  std::size_t cursor = 0;
  for (const auto t : times) {
    while (cursor < sorted.size() && sorted[cursor]->submitted_at <= t) ++counts[index.at(sorted[cursor++]->paper_id)];
    emit(t, counts);
  }
}

}  // namespace

TimeSeries cumulative_reviews(std::span<const ReviewRecord> reviews) {
  TimeSeries out;
  const auto sorted = by_time(reviews);
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto t = sorted[k]->submitted_at;
    if (!out.empty() && out.back().t == t) {
      out.back().value += 1.0;
      ++out.back().n;
    } else {
      out.push_back({t, static_cast<double>(k + 1), std::nullopt, k + 1});
    }
  }
  return out;
}

std::vector<ReviewsPerPaperPoint> reviews_per_paper_series(std::span<const ReviewRecord> reviews,
                                                           std::span<const Timestamp> sample_times) {
  std::vector<ReviewsPerPaperPoint> out;
  sweep_counts(reviews, sample_times, [&](Timestamp t, const std::vector<int>& counts) {
    ReviewsPerPaperPoint p;
    p.t = t;
    p.papers = counts.size();
    if (!counts.empty()) {
      std::vector<int> sorted = counts;
      std::ranges::sort(sorted);
      const std::size_t n = sorted.size();
      p.min = sorted.front();
      p.max = sorted.back();
      p.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
      double sum = 0.0;
      for (int c : counts) sum += c;
      p.mean = sum / static_cast<double>(n);
    }
    out.push_back(p);
  });
  return out;
}

TimeSeries papers_below_quorum(std::span<const ReviewRecord> reviews, std::span<const Timestamp> sample_times,
                               int quorum) {
  TimeSeries out;
  sweep_counts(reviews, sample_times, [&](Timestamp t, const std::vector<int>& counts) {
    const auto below = std::ranges::count_if(counts, [&](int c) { return c < quorum; });
    out.push_back({t, static_cast<double>(below), std::nullopt, counts.size()});
  });
  return out;
}

std::vector<Timestamp> step_times(std::span<const ReviewRecord> reviews, Duration step) {
  if (step <= Duration::zero()) throw ValidationError("step must be positive");
  std::vector<Timestamp> out;
  if (reviews.empty()) return out;
  const auto [first, last] = std::ranges::minmax(reviews, {}, &ReviewRecord::submitted_at);
  for (Timestamp t = floor_day(first.submitted_at) + step;; t += step) {
    out.push_back(t);
    if (t > last.submitted_at) break;
  }
  return out;
}

TimeSeries moving_window_mean(std::span<const ReviewRecord> reviews, ReviewField field,
                              std::span<const Timestamp> sample_times, Duration window) {
  if (window <= Duration::zero()) throw ValidationError("window must be positive");
  const auto sorted = by_time(reviews);
  auto first_at_or_after = [&](Timestamp t) {
    return std::ranges::lower_bound(sorted, t, {}, [](const ReviewRecord* r) { return r->submitted_at; });
  };
  TimeSeries out;
  std::vector<double> values;
  for (const auto t : sample_times) {
    values.clear();
    for (auto it = first_at_or_after(t - window), end = first_at_or_after(t); it < end; ++it)
      values.push_back(field_value(**it, field));
    if (values.size() < 2) continue;
    const double se = std::sqrt(stats::sample_variance(values) / static_cast<double>(values.size()));
    out.push_back({t, stats::mean(values), se, values.size()});
  }
  return out;
}

SplitTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ValidationError("t-test needs at least two values in each group");
  SplitTestResult r;
  r.n_before = a.size();
  r.n_after = b.size();
  r.mean_before = stats::mean(a);
  r.mean_after = stats::mean(b);
  const double va = stats::sample_variance(a) / static_cast<double>(a.size());
  const double vb = stats::sample_variance(b) / static_cast<double>(b.size());
  r.se_before = std::sqrt(va);
  r.se_after = std::sqrt(vb);
  const double diff = r.mean_before - r.mean_after;
  const double se = std::sqrt(va + vb);

  if (!(se > 0.0)) {
    // Both groups constant: the difference is either exactly zero or certain.
    r.dof = static_cast<double>(a.size() + b.size() - 2);
    r.t_stat = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    r.p_value = diff == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t_stat = diff / se;
  r.dof = (va + vb) * (va + vb) /
          (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  const boost::math::students_t dist(r.dof);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t_stat))));
  return r;
}

SplitTestResult deadline_split_test(std::span<const ReviewRecord> reviews, ReviewField field, Timestamp deadline,
                                    Timestamp cutoff) {
  if (!(deadline < cutoff)) throw ValidationError("deadline must precede cutoff");
  std::vector<double> before, after;
  for (const auto* r : by_time(reviews)) {
    if (r->submitted_at < deadline)
      before.push_back(field_value(*r, field));
    else if (r->submitted_at < cutoff)
      after.push_back(field_value(*r, field));
  }
  if (before.size() < 2 || after.size() < 2)
    throw ValidationError("deadline split needs at least two reviews on each side (have " +
                          std::to_string(before.size()) + " before, " + std::to_string(after.size()) + " after)");
  return welch_t_test(before, after);
}

// ---------------------------------------------------------------------------
// Duplicate-pair correlation

namespace {

struct Arrivals {
  std::vector<Timestamp> times;  // ascending
  std::vector<double> scores;
};

struct PairArrivals {
  Arrivals first, second;
};

std::vector<PairArrivals> collect_pairs(std::span<const ReviewRecord> reviews,
                                        std::span<const DuplicatePair> duplicates, const ReviewScore& score) {
  std::map<std::string, Arrivals> by_paper;
  for (const auto& d : duplicates) {
    by_paper.emplace(d.committee1_paper, Arrivals{});
    by_paper.emplace(d.committee2_paper, Arrivals{});
  }
  for (const auto* r : by_time(reviews)) {
    auto it = by_paper.find(r->paper_id);
    if (it == by_paper.end()) continue;
    it->second.times.push_back(r->submitted_at);
    it->second.scores.push_back(score ? score(*r) : static_cast<double>(r->quality));
  }
  // Pairs are taken in a canonical order so the series is independent of the
  // duplicates file's row order.
  std::vector<const DuplicatePair*> order;
  for (const auto& d : duplicates) order.push_back(&d);
  std::ranges::sort(order, {}, [](const DuplicatePair* d) { return std::tie(d->committee1_paper, d->committee2_paper); });
  std::vector<PairArrivals> out;
  for (const auto* d : order) out.push_back({by_paper.at(d->committee1_paper), by_paper.at(d->committee2_paper)});
  return out;
}

std::optional<double> mean_by(const Arrivals& a, Timestamp t) {
  const auto n = static_cast<std::size_t>(std::ranges::upper_bound(a.times, t) - a.times.begin());
  if (n == 0) return std::nullopt;
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a.scores[k];
  return s / static_cast<double>(n);
}

struct Trajectory {
  std::vector<std::optional<double>> rho;
  std::vector<std::size_t> n;
};

Trajectory trajectory(const std::vector<PairArrivals>& pairs, std::span<const std::size_t> members,
                      std::span<const Timestamp> times) {
  Trajectory out;
  out.rho.resize(times.size());
  out.n.resize(times.size(), 0);
  std::vector<double> x, y;
  for (std::size_t k = 0; k < times.size(); ++k) {
    x.clear();
    y.clear();
    for (auto m : members) {
      const auto a = mean_by(pairs[m].first, times[k]);
      const auto b = mean_by(pairs[m].second, times[k]);
      if (!a || !b) continue;
      x.push_back(*a);
      y.push_back(*b);
    }
    out.n[k] = x.size();
    if (x.size() >= 3) out.rho[k] = stats::pearson_r(x, y);
  }
  return out;
}

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TimeSeries duplicate_correlation_series(std::span<const ReviewRecord> reviews,
                                        std::span<const DuplicatePair> duplicates,
                                        std::span<const Timestamp> sample_times, const ReviewScore& score) {
  const auto pairs = collect_pairs(reviews, duplicates, score);
  const auto traj = trajectory(pairs, identity(pairs.size()), sample_times);
  TimeSeries out;
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    if (!traj.rho[k]) continue;
    out.push_back({sample_times[k], *traj.rho[k], stats::correlation_se(*traj.rho[k], traj.n[k]), traj.n[k]});
  }
  return out;
}

std::vector<BandPoint> bootstrap_correlation_band(std::span<const ReviewRecord> reviews,
                                                  std::span<const DuplicatePair> duplicates,
                                                  std::span<const Timestamp> sample_times,
                                                  const BootstrapOptions& options) {
  if (options.resamples == 0) throw ValidationError("bootstrap needs at least one resample");
  if (!options.resampler && options.resamples < kMinBootstrapResamples)
    throw ValidationError("bootstrap needs at least " + std::to_string(kMinBootstrapResamples) + " resamples");

  const auto pairs = collect_pairs(reviews, duplicates, options.score);
  const std::size_t n_pairs = pairs.size();
  const auto point = trajectory(pairs, identity(n_pairs), sample_times);

  std::optional<std::size_t> final_k;
  for (std::size_t k = sample_times.size(); k-- > 0;)
    if (point.rho[k]) {
      final_k = k;
      break;
    }
  if (!final_k) return {};

  std::vector<Trajectory> draws(options.resamples);
  parallel_for(options.resamples, options.threads ? options.threads : max_threads(), [&](std::size_t b) {
    Rng rng = make_rng(options.seed, b);
    std::vector<std::size_t> members;
    if (options.resampler) {
      members = options.resampler(n_pairs, rng);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, n_pairs - 1);
      members.resize(n_pairs);
      for (auto& m : members) m = pick(rng);
    }
    draws[b] = trajectory(pairs, members, sample_times);
  });

  std::vector<double> shift(draws.size(), 0.0);
  std::vector<char> keep(draws.size(), 1);
  if (options.anchor) {
    for (std::size_t b = 0; b < draws.size(); ++b) {
      const auto& end = draws[b].rho[*final_k];
      if (end)
        shift[b] = *point.rho[*final_k] - *end;
      else
        keep[b] = 0;
    }
  }

  std::vector<BandPoint> out;
  std::vector<double> values;
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    if (!point.rho[k]) continue;
    values.clear();
    for (std::size_t b = 0; b < draws.size(); ++b)
      if (keep[b] && draws[b].rho[k]) {
        // (p - e) + e need not round back to p, so the anchor point is set exactly.
        const bool at_anchor = options.anchor && k == *final_k;
        values.push_back(at_anchor ? *point.rho[k] : *draws[b].rho[k] + shift[b]);
      }
    std::ranges::sort(values);
    BandPoint p;
    p.t = sample_times[k];
    p.estimate = *point.rho[k];
    p.resamples = values.size();
    p.lower = stats::quantile_sorted(values, 0.025);
    p.median = stats::quantile_sorted(values, 0.5);
    p.upper = stats::quantile_sorted(values, 0.975);
    out.push_back(p);
  }
  return out;
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  csv::write_row(out, {"t", "value", "se", "n"});
  for (const auto& p : series) {
    const std::string t = format_timestamp(p.t);
    const std::string v = csv::number(p.value);
    const std::string se = p.se ? csv::number(*p.se) : std::string();
    const std::string n = std::to_string(p.n);
    csv::write_row(out, {t, v, se, n});
  }
}

}  // namespace peerreview
