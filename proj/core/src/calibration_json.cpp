#include <cmath>
#include <limits>

#include "json.hpp"
#include "peerreview/calibration.hpp"

namespace peerreview {

namespace {

using nlohmann::json;

// NaN and infinities are not representable in JSON; failed grid nodes are null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json node_json(const NodeEvaluation& n) {
  json j = {{"ratio_b", n.ratio_b}, {"ratio_s", n.ratio_s}, {"alpha_f", number(n.alpha_f)},
            {"nll", number(n.nll)}, {"ok", n.ok}};
  if (!n.failure.empty()) j["failure"] = n.failure;
  return j;
}

}  // namespace

std::string to_json(const CalibrationFit& fit, int indent) {
  const auto& p = fit.params;
  json doc;
  doc["params"] = {{"mu", p.mu},           {"alpha_f", p.alpha_f}, {"alpha_b", p.alpha_b},
                   {"sigma2", p.sigma2},   {"ratio_b", p.ratio_b}, {"ratio_s", p.ratio_s}};
  doc["nll"] = number(fit.nll);

  json papers = json::array();
  for (const auto& r : fit.per_paper)
    papers.push_back({{"paper_id", r.paper_id}, {"mean", r.mean}, {"variance", r.variance}, {"reviews", r.reviews}});
  doc["per_paper"] = std::move(papers);

  json reviewers = json::array();
  for (const auto& r : fit.per_reviewer)
    reviewers.push_back({{"reviewer_id", r.reviewer_id}, {"offset_mean", r.offset_mean}, {"reviews", r.reviews}});
  doc["per_reviewer"] = std::move(reviewers);

  json reviews = json::array();
  for (const auto& r : fit.per_review)
    reviews.push_back({{"paper_id", r.paper_id},
                       {"reviewer_id", r.reviewer_id},
                       {"raw", r.raw},
                       {"mean", r.mean},
                       {"variance", r.variance}});
  doc["per_review"] = std::move(reviews);

  const auto& g = fit.grid;
  json nll = json::array();
  for (double v : g.nll) nll.push_back(number(v));
  json refined = json::array();
  for (const auto& n : g.refined) refined.push_back(node_json(n));
  doc["grid"] = {{"ratio_b", g.ratio_b},
                 {"ratio_s", g.ratio_s},
                 {"nll", std::move(nll)},
                 {"refined", std::move(refined)},
                 {"nodes_evaluated", g.nodes_evaluated},
                 {"nodes_failed", g.nodes_failed}};
  return doc.dump(indent);
}

CalibrationFit fit_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("calibration fit is not valid JSON: ") + e.what());
  }
  try {
    CalibrationFit fit;
    const auto& p = doc.at("params");
    fit.params = CalibrationParams::from_variances(p.at("mu").get<double>(), p.at("alpha_f").get<double>(),
                                                   p.at("alpha_b").get<double>(), p.at("sigma2").get<double>());
    fit.nll = read_number(doc.at("nll"));
    for (const auto& r : doc.at("per_paper"))
      fit.per_paper.push_back({r.at("paper_id").get<std::string>(), r.at("mean").get<double>(),
                               r.at("variance").get<double>(), r.at("reviews").get<std::size_t>()});
    for (const auto& r : doc.at("per_reviewer"))
      fit.per_reviewer.push_back({r.at("reviewer_id").get<std::string>(), r.at("offset_mean").get<double>(),
                                  r.at("reviews").get<std::size_t>()});
    for (const auto& r : doc.at("per_review"))
      fit.per_review.push_back({r.at("paper_id").get<std::string>(), r.at("reviewer_id").get<std::string>(),
                                r.at("raw").get<double>(), r.at("mean").get<double>(),
                                r.at("variance").get<double>()});
    if (doc.contains("grid")) {
      const auto& g = doc.at("grid");
      auto& out = fit.grid;
      out.ratio_b = g.at("ratio_b").get<std::vector<double>>();
      out.ratio_s = g.at("ratio_s").get<std::vector<double>>();
      for (const auto& v : g.at("nll")) out.nll.push_back(read_number(v));
      for (const auto& n : g.at("refined")) {
        NodeEvaluation node;
        node.ratio_b = n.at("ratio_b").get<double>();
        node.ratio_s = n.at("ratio_s").get<double>();
        node.alpha_f = read_number(n.at("alpha_f"));
        node.nll = read_number(n.at("nll"));
        node.ok = n.at("ok").get<bool>();
        node.failure = n.value("failure", "");
        out.refined.push_back(std::move(node));
      }
      out.nodes_evaluated = g.at("nodes_evaluated").get<std::size_t>();
      out.nodes_failed = g.at("nodes_failed").get<std::size_t>();
    }
    return fit;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed calibration fit: ") + e.what());
  }
}

}  // namespace peerreview
