#pragma once

// Output files with a provenance header: tool version, seed, SHA-256 digests
// of the inputs and (unless suppressed) the generation time. CSV files carry
// it as leading '#' lines, JSON files as a "metadata" object and SVG files as
// a comment.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace peerreview::cli {

std::string sha256_file(const std::filesystem::path& path);

class OutputContext {
 public:
  OutputContext(std::string command, std::uint64_t seed, std::filesystem::path out_dir, bool timestamp);

  /// Records an input file; its digest goes into every later output.
  void add_input(const std::filesystem::path& path);

  std::uint64_t seed() const noexcept { return seed_; }
  const std::filesystem::path& out_dir() const noexcept { return out_dir_; }
  const std::vector<std::filesystem::path>& written() const noexcept { return written_; }

  nlohmann::ordered_json metadata() const;

  void write_csv(const std::string& name, const std::function<void(std::ostream&)>& body);
  void write_json(const std::string& name, nlohmann::ordered_json doc);
  void write_svg(const std::string& name, const std::function<void(std::ostream&)>& body);
  /// No header, for formats that cannot carry one (JSON lines).
  void write_raw(const std::string& name, const std::function<void(std::ostream&)>& body);

 private:
  std::vector<std::string> header_lines() const;
  std::filesystem::path open_target(const std::string& name);

  std::string command_;
  std::uint64_t seed_;
  std::filesystem::path out_dir_;
  bool timestamp_;
  std::string generated_at_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::filesystem::path> written_;
};

}  // namespace peerreview::cli
