#include <filesystem>
#include <fstream>

#include "cli_runs.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using cli_runs::run;

namespace {

const fs::path kSample = PEERREVIEW_SAMPLE_DIR;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "peerreview_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("usage and exit codes") {
  const auto none = run({});
  CHECK(none.code == 1);
  CHECK(none.err.find("Usage") != std::string::npos);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"fate", "--bogus"}).code == 1);
  CHECK(run({"calibrate"}).code == 1);
  const auto dir = scratch("codes");
  CHECK(run({"--out-dir", dir.string(), "calibrate", "--reviews", (dir / "absent.csv").string()}).code == 2);
  std::ofstream(dir / "bad.csv") << "paper_id,reviewer_id\nP1,R1\n";
  const auto bad = run({"--out-dir", dir.string(), "fate", "--outcomes", (dir / "bad.csv").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("header") != std::string::npos);
  CHECK(run({"--out-dir", dir.string(), "consistency", "--aa", "1"}).code == 1);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("gen-synthetic") == std::string::npos);
}

TEST_CASE("consistency from published counts") {
  const auto dir = scratch("counts");
  const auto r = run({"--seed", "1", "--out-dir", dir.string(), "consistency", "--aa", "22", "--ar", "21", "--ra",
                      "22", "--rr", "101"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "consistency.json"));
  CHECK(std::abs(doc["summary"]["inconsistency"].get<double>() - 0.2590) < 1e-4);
  CHECK(doc["metadata"]["seed"] == 1);
  CHECK(doc["metadata"].contains("generated_at"));
  CHECK(doc["binomial"]["k"] == 87);
  CHECK(doc["binomial"]["n"] == 332);
  CHECK(fs::exists(dir / "ratio_histograms.csv"));
}

TEST_CASE("simulate writes one row per setting") {
  const auto dir = scratch("simulate");
  const auto r = run({"--seed", "1", "--out-dir", dir.string(), "simulate", "--subjectivity", "0.5", "--reviewers",
                      "3", "--accept-rate", "0.23"});
  REQUIRE(r.code == 0);
  std::istringstream in(slurp(dir / "consistency_curve.csv"));
  std::string line, last;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') {
      ++rows;
      last = line;
    }
  CHECK(rows == 2);
  const double c = std::stod(last.substr(last.find(',', last.find(',') + 1) + 1));
  CHECK(std::abs(c - 0.63) < 0.02);
}

TEST_CASE("metadata header carries seed and input digests") {
  const auto dir = scratch("meta");
  REQUIRE(run({"--seed", "11", "--no-timestamp", "--out-dir", dir.string(), "fate", "--outcomes",
               (kSample / "outcomes.csv").string()})
              .code == 0);
  const auto csv = slurp(dir / "sankey.csv");
  CHECK(csv.rfind("# peerreview ", 0) == 0);
  CHECK(csv.find("# seed: 11\n") != std::string::npos);
  CHECK(csv.find("# input: outcomes.csv sha256:") != std::string::npos);
  CHECK(csv.find("generated_at") == std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(dir / "fate_table.json"));
  CHECK(doc["metadata"]["inputs"][0]["sha256"].get<std::string>().size() == 64);
  CHECK_FALSE(doc["metadata"].contains("generated_at"));
}

TEST_CASE("every subcommand is byte-identical across runs on the sample") {
  const auto root = scratch("determinism");
  REQUIRE(cli_runs::run_round(kSample, root / "a") == "");
  REQUIRE(cli_runs::run_round(kSample, root / "b") == "");
  const auto a = cli_runs::read_tree(root / "a"), b = cli_runs::read_tree(root / "b");
  CHECK(a.size() >= 20);
  REQUIRE(a.size() == b.size());
  for (const auto& [name, content] : a) {
    INFO(name);
    CHECK(b.at(name) == content);
  }
}

TEST_CASE("gen-synthetic writes a loadable corpus") {
  const auto dir = scratch("gen");
  REQUIRE(run({"--seed", "3", "--out-dir", dir.string(), "gen-synthetic", "--papers", "60", "--reviewers", "50",
               "--duplicate-pairs", "6"})
              .code == 0);
  for (const char* f : {"reviews.csv", "duplicates.csv", "decisions.csv", "outcomes.csv", "paper_ids.txt",
                        "citation_cache.jsonl"})
    CHECK(fs::exists(dir / f));
  CHECK(run({"--out-dir", dir.string(), "fetch", "--ids", (dir / "paper_ids.txt").string(), "--cache",
             (dir / "citation_cache.jsonl").string(), "--offline"})
            .code == 0);
}
