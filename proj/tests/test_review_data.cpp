#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "peerreview/review_data.hpp"
#include "peerreview/synthetic.hpp"

using namespace peerreview;

namespace {

const char* kReviews =
    "paper_id,reviewer_id,quality,impact,confidence,submitted_at,summary_words,body_words\n"
    "P1,R1,6,1,3,2014-07-01T10:00:00Z,40,300\n"
    "P1,R2,7,2,4,2014-07-02T12:00:00+02:00,35,410\n"
    "P2,R1,3,1,2,2014-07-03T09:30:00Z,20,150\n";

template <class T, class Write>
std::string serialize(const std::vector<T>& rows, Write write) {
  std::ostringstream out;
  write(out, rows);
  return out.str();
}

}  // namespace

TEST_CASE("reviews round-trip to the canonical form") {
  std::istringstream in(kReviews);
  const auto rows = parse_reviews(in);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].length() == 445);
  const auto text = serialize(rows, [](std::ostream& o, const auto& r) { write_reviews(o, r); });
  // Offsets are normalized to UTC; everything else is reproduced verbatim.
  std::string canonical = kReviews;
  canonical.replace(canonical.find("2014-07-02T12:00:00+02:00"), 25, "2014-07-02T10:00:00Z");
  CHECK(text == canonical);
  std::istringstream again(text);
  CHECK(parse_reviews(again) == rows);
}

TEST_CASE("every file type round-trips on a synthetic dataset") {
  synthetic::DatasetConfig cfg;
  cfg.n_papers = 60;
  cfg.n_reviewers = 50;
  cfg.duplicate_pairs = 8;
  cfg.seed = 5;
  const auto ds = synthetic::generate_dataset(cfg);
  {
    const auto text = serialize(ds.reviews, [](std::ostream& o, const auto& r) { write_reviews(o, r); });
    std::istringstream in(text);
    CHECK(parse_reviews(in) == ds.reviews);
  }
  {
    const auto text = serialize(ds.duplicates, [](std::ostream& o, const auto& r) { write_duplicates(o, r); });
    std::istringstream in(text);
    CHECK(parse_duplicates(in) == ds.duplicates);
  }
  {
    const auto text = serialize(ds.decisions, [](std::ostream& o, const auto& r) { write_decisions(o, r); });
    std::istringstream in(text);
    CHECK(parse_decisions(in) == ds.decisions);
  }
  {
    const auto text = serialize(ds.outcomes, [](std::ostream& o, const auto& r) { write_outcomes(o, r); });
    std::istringstream in(text);
    const auto back = parse_outcomes(in);
    CHECK(back == ds.outcomes);
    CHECK(serialize(back, [](std::ostream& o, const auto& r) { write_outcomes(o, r); }) == text);
  }
  CHECK(validate(ds).empty());
}

TEST_CASE("permuted rows load to an equal canonical dataset") {
  synthetic::DatasetConfig cfg;
  cfg.n_papers = 40;
  cfg.n_reviewers = 30;
  cfg.duplicate_pairs = 6;
  cfg.seed = 9;
  const auto ds = synthetic::generate_dataset(cfg);
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Dataset p = ds;
    p.reviews = fixture::shuffled(p.reviews, rng);
    p.duplicates = fixture::shuffled(p.duplicates, rng);
    p.decisions = fixture::shuffled(p.decisions, rng);
    p.outcomes = fixture::shuffled(p.outcomes, rng);
    std::ostringstream r, d, c, o;
    write_reviews(r, p.reviews);
    write_duplicates(d, p.duplicates);
    write_decisions(c, p.decisions);
    write_outcomes(o, p.outcomes);
    std::istringstream ri(r.str()), di(d.str()), ci(c.str()), oi(o.str());
    Dataset loaded{parse_reviews(ri), parse_duplicates(di), parse_decisions(ci), parse_outcomes(oi), ds.reviewer_roster};
    const auto a = loaded.canonical(), b = ds.canonical();
    CHECK(a.reviews == b.reviews);
    CHECK(a.duplicates == b.duplicates);
    CHECK(a.decisions == b.decisions);
    CHECK(a.outcomes == b.outcomes);
  }
}

TEST_CASE("loading reports every bad row and returns nothing") {
  std::istringstream in(
      "paper_id,reviewer_id,quality,impact,confidence,submitted_at,summary_words,body_words\n"
      "P1,R1,11,1,3,2014-07-01T10:00:00Z,40,300\n"
      "P1,R2,7,2,4,2014-07-02T12:00:00,35,410\n"
      "P2,R1,3,1,2,2014-07-03T09:30:00Z,20\n"
      "P3,R1,5,1,3,2014-07-01T10:00:00Z,40,300\n"
      "P3,R1,6,2,3,2014-07-01T11:00:00Z,40,300\n");
  try {
    parse_reviews(in, "reviews.csv");
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    REQUIRE(e.issues().size() == 4);
    CHECK(e.issues()[0].line == 2);
    CHECK(e.issues()[0].column == "quality");
    CHECK(e.issues()[1].column == "submitted_at");
    CHECK(e.issues()[2].line == 4);
    CHECK(e.issues()[3].line == 6);
    CHECK(std::string(e.what()).find("reviews.csv") != std::string::npos);
  }
}

TEST_CASE("loader invariants") {
  SUBCASE("header must match") {
    std::istringstream in("paper,reviewer\nP1,R1\n");
    CHECK_THROWS_AS(parse_reviews(in), LoadError);
  }
  SUBCASE("self pair and repeated paper") {
    std::istringstream in("committee1_paper,committee2_paper,experiment_id\nP1,P1,E1\nP2,P3,E2\nP3,P4,E3\n");
    try {
      parse_duplicates(in);
      FAIL("expected LoadError");
    } catch (const LoadError& e) {
      CHECK(e.issues().size() == 2);
    }
  }
  SUBCASE("one decision per paper and committee") {
    std::istringstream in("paper_id,committee,verdict\nP1,1,accept\nP1,1,reject\nP1,2,maybe\n");
    try {
      parse_decisions(in);
      FAIL("expected LoadError");
    } catch (const LoadError& e) {
      CHECK(e.issues().size() == 2);
    }
  }
  SUBCASE("outcomes") {
    std::istringstream in("paper_id,track,fate,venue,citations\nP1,rejected,this_conference,,3\nP2,accepted,this_conference,,-1\n");
    try {
      parse_outcomes(in);
      FAIL("expected LoadError");
    } catch (const LoadError& e) {
      CHECK(e.issues().size() == 2);
    }
  }
  SUBCASE("missing file is an I/O error") {
    CHECK_THROWS_AS(load_reviews("/nonexistent/reviews.csv"), IoError);
  }
}

TEST_CASE("cross-file validation report") {
  Dataset ds;
  ds.reviews = {fixture::review("P1", "R1", 5, "2014-07-01T00:00:00Z"),
                fixture::review("P2", "R1", 6, "2014-07-01T00:00:00Z")};
  ds.duplicates = {{"P1", "P2", "E1"}};
  ds.decisions = {{"P1", Committee::one, Verdict::accept}, {"P2", Committee::two, Verdict::reject}};
  ds.outcomes = {{"P1", Track::accepted, Fate::this_conference, std::nullopt, 4},
                 {"P2", Track::rejected, Fate::untraced, std::nullopt, 0}};
  ds.reviewer_roster = {"R1"};
  CHECK(validate(ds).empty());

  SUBCASE("decision for an unknown paper") {
    ds.decisions.push_back({"P9", Committee::main, Verdict::reject});
    const auto r = validate(ds);
    REQUIRE(r.dangling.size() == 1);
    CHECK(r.dangling[0].source == "decisions");
    CHECK(r.dangling[0].paper_id == "P9");
  }
  SUBCASE("paper with zero reviews") {
    ds.outcomes.push_back({"P3", Track::rejected, Fate::untraced, std::nullopt, 0});
    const auto r = validate(ds);
    CHECK(r.dangling.empty());
    REQUIRE(r.papers_without_reviews.size() == 1);
    CHECK(r.papers_without_reviews[0] == "P3");
  }
  SUBCASE("idle reviewer on the roster") {
    ds.reviewer_roster.push_back("R7");
    CHECK(validate(ds).reviewers_without_reviews == std::vector<std::string>{"R7"});
  }
  SUBCASE("withdrawn papers") {
    ds.decisions.push_back({"P2", Committee::main, Verdict::withdrawn});
    CHECK(withdrawn_papers(ds) == std::vector<std::string>{"P2"});
  }
}
