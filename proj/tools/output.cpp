#include "output.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "peerreview/errors.hpp"
#include "peerreview/time.hpp"

#ifndef PEERREVIEW_VERSION
#define PEERREVIEW_VERSION "unknown"
#endif

namespace peerreview::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

OutputContext::OutputContext(std::string command, std::uint64_t seed, std::filesystem::path out_dir, bool timestamp)
    : command_(std::move(command)), seed_(seed), out_dir_(std::move(out_dir)), timestamp_(timestamp) {
  if (timestamp_)
    generated_at_ = format_timestamp(std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now()));
}

void OutputContext::add_input(const std::filesystem::path& path) {
  inputs_.emplace_back(path.filename().string(), sha256_file(path));
}

nlohmann::ordered_json OutputContext::metadata() const {
  nlohmann::ordered_json m;
  m["tool"] = "peerreview";
  m["version"] = PEERREVIEW_VERSION;
  m["command"] = command_;
  m["seed"] = seed_;
  auto inputs = nlohmann::ordered_json::array();
  for (const auto& [name, digest] : inputs_) inputs.push_back({{"file", name}, {"sha256", digest}});
  m["inputs"] = std::move(inputs);
  if (timestamp_) m["generated_at"] = generated_at_;
  return m;
}

std::vector<std::string> OutputContext::header_lines() const {
  std::vector<std::string> lines = {"peerreview " + std::string(PEERREVIEW_VERSION) + " " + command_,
                                    "seed: " + std::to_string(seed_)};
  for (const auto& [name, digest] : inputs_) lines.push_back("input: " + name + " sha256:" + digest);
  if (timestamp_) lines.push_back("generated_at: " + generated_at_);
  return lines;
}

std::filesystem::path OutputContext::open_target(const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir_.string() + ": " + ec.message());
  auto path = out_dir_ / name;
  written_.push_back(path);
  return path;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

void OutputContext::write_csv(const std::string& name, const std::function<void(std::ostream&)>& body) {
  std::ostringstream s;
  for (const auto& line : header_lines()) s << "# " << line << '\n';
  body(s);
  write_file(open_target(name), s.str());
}

void OutputContext::write_json(const std::string& name, nlohmann::ordered_json doc) {
  nlohmann::ordered_json out;
  out["metadata"] = metadata();
  for (auto& [k, v] : doc.items()) out[k] = std::move(v);
  write_file(open_target(name), out.dump(2) + "\n");
}

void OutputContext::write_svg(const std::string& name, const std::function<void(std::ostream&)>& body) {
  std::ostringstream s;
  s << "<!--\n";
  for (const auto& line : header_lines()) s << "  " << line << '\n';
  s << "-->\n";
  body(s);
  write_file(open_target(name), s.str());
}

void OutputContext::write_raw(const std::string& name, const std::function<void(std::ostream&)>& body) {
  std::ostringstream s;
  body(s);
  write_file(open_target(name), s.str());
}

}  // namespace peerreview::cli
