#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace cli_runs {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out, err;
};

inline Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = peerreview::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Every subcommand on the shipped sample, each writing to out/<name>. Later
// runs consume the calibration written by the first.
inline std::vector<std::pair<std::string, std::vector<std::string>>> sample_invocations(const fs::path& sample,
                                                                                       const fs::path& out) {
  const auto s = [&](const char* f) { return (sample / f).string(); };
  const auto fit = (out / "calibrate" / "calibration.json").string();
  return {
      {"calibrate", {"calibrate", "--reviews", s("reviews.csv")}},
      {"simulate", {"simulate", "--fit", fit, "--reviewers", "1,3,5", "--accept-rate", "0.1,0.23"}},
      {"consistency", {"consistency", "--duplicates", s("duplicates.csv"), "--decisions", s("decisions.csv")}},
      {"consistency-counts", {"consistency", "--aa", "22", "--ar", "21", "--ra", "22", "--rr", "101"}},
      {"timeline", {"timeline", "--reviews", s("reviews.csv"), "--duplicates", s("duplicates.csv"), "--calibrated", fit}},
      {"impact", {"impact", "--reviews", s("reviews.csv"), "--outcomes", s("outcomes.csv"), "--duplicates",
                  s("duplicates.csv"), "--decisions", s("decisions.csv")}},
      {"fate", {"fate", "--outcomes", s("outcomes.csv")}},
      {"fetch", {"fetch", "--ids", s("paper_ids.txt"), "--cache", s("citation_cache.jsonl"), "--offline"}},
  };
}

inline std::vector<std::string> with_globals(std::vector<std::string> args, const fs::path& dir) {
  std::vector<std::string> full = {"--seed", "7", "--no-timestamp", "--threads", "2", "--out-dir", dir.string()};
  full.insert(full.end(), args.begin(), args.end());
  return full;
}

inline std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = s.str();
  }
  return files;
}

// Runs every invocation into a fresh tree; returns the failures as text.
inline std::string run_round(const fs::path& sample, const fs::path& out) {
  fs::remove_all(out);
  std::string failures;
  for (const auto& [name, args] : sample_invocations(sample, out)) {
    const auto r = run(with_globals(args, out / name));
    if (r.code != 0) failures += name + " exited " + std::to_string(r.code) + ": " + r.err + "\n";
  }
  return failures;
}

}  // namespace cli_runs
