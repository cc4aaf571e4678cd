#include "peerreview/citation_client.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "peerreview/errors.hpp"
#include "peerreview/parallel.hpp"
#include "peerreview/review_data.hpp"

namespace peerreview {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Cache

namespace {

CitationCacheEntry entry_from_json(const json& j) {
  CitationCacheEntry e;
  e.external_id = j.at("id").get<std::string>();
  e.citations = j.at("citations").get<std::int64_t>();
  if (e.citations < 0) throw ValidationError("negative citation count");
  e.fetched_at = parse_timestamp(j.at("fetched_at").get<std::string>());
  e.title = j.value("title", "");
  e.authors = j.value("authors", std::vector<std::string>{});
  return e;
}

}  // namespace

CitationCache CitationCache::load(const std::filesystem::path& path) {
  CitationCache cache;
  if (!std::filesystem::exists(path)) return cache;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open citation cache " + path.string());
  std::vector<LoadIssue> issues;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      cache.insert(entry_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      issues.push_back({n, "", e.what()});
    }
  }
  if (!issues.empty()) throw LoadError(path.string(), std::move(issues));
  return cache;
}

const CitationCacheEntry* CitationCache::find(std::string_view id) const {
  const auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

void CitationCache::insert(CitationCacheEntry entry) {
  auto id = entry.external_id;
  entries_.insert_or_assign(std::move(id), std::move(entry));
}

std::string CitationCache::to_line(const CitationCacheEntry& e) {
  const json j = {{"id", e.external_id},
                  {"citations", e.citations},
                  {"fetched_at", format_timestamp(e.fetched_at)},
                  {"title", e.title},
                  {"authors", e.authors}};
  return j.dump();
}

void CitationCache::append(const std::filesystem::path& path, std::span<const CitationCacheEntry> entries) {
  if (entries.empty()) return;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot write citation cache " + path.string());
  for (const auto& e : entries) out << to_line(e) << '\n';
  if (!out) throw IoError("cannot write citation cache " + path.string());
}

// ---------------------------------------------------------------------------
// Transport

HttpGet make_http_transport(const std::string& api_base, std::chrono::seconds timeout) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(api_base, m, url)) throw ValidationError("API base must look like https://host[/prefix]");
  std::string host = m[1].str();
  std::string prefix = m[2].matched ? m[2].str() : std::string();
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  return [host, prefix, timeout](const std::string& path, const HttpHeaders& headers) {
    httplib::Client client(host);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_follow_location(true);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Get(prefix + path, h);
    if (!res) throw IoError("request to " + host + " failed: " + httplib::to_string(res.error()));
    return HttpResponse{res->status, res->body};
  };
}

// ---------------------------------------------------------------------------
// Fetching

std::chrono::milliseconds backoff_delay(const FetchOptions& options, int attempt) {
  const double ms = static_cast<double>(options.backoff_base.count()) * std::pow(options.backoff_factor, attempt);
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(ms)));
}

namespace {

std::string encode_id(std::string_view id) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    if (std::isalnum(c) || std::string_view("-._~:/").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

bool retryable(int status) { return status == 429 || status == 503; }

CitationCacheEntry parse_response(const std::string& id, const std::string& body, Timestamp now) {
  try {
    const auto j = json::parse(body);
    const auto& count = j.at("citationCount");
    if (!count.is_number_integer() || count.get<std::int64_t>() < 0)
      throw ValidationError("citationCount is not a non-negative integer");
    CitationCacheEntry e;
    e.external_id = id;
    e.citations = count.get<std::int64_t>();
    e.fetched_at = now;
    if (j.contains("title") && j["title"].is_string()) e.title = j["title"].get<std::string>();
    if (j.contains("authors") && j["authors"].is_array())
      for (const auto& a : j["authors"])
        if (a.is_object() && a.contains("name") && a["name"].is_string()) e.authors.push_back(a["name"].get<std::string>());
    return e;
  } catch (const std::exception& e) {
    throw ValidationError("malformed API response for " + id + ": " + e.what());
  }
}

}  // namespace

FetchResult fetch_citations(std::span<const std::string> ids, const FetchOptions& options) {
  if (options.max_in_flight == 0) throw ValidationError("max_in_flight must be positive");
  if (options.max_retries < 0) throw ValidationError("max_retries must be non-negative");

  FetchResult result;
  CitationCache cache = CitationCache::load(options.cache_path);

  std::vector<std::string> misses;
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) continue;
    if (const auto* hit = cache.find(id)) {
      result.citations[id] = hit->citations;
      ++result.cache_hits;
    } else {
      misses.push_back(id);
    }
  }
  if (misses.empty()) return result;
  if (options.offline) throw IoError("offline mode: no cached citation count for " + misses.front());

  HttpGet transport = options.transport ? options.transport : make_http_transport(options.api_base);
  auto sleep = options.sleep ? options.sleep : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  auto clock = options.clock ? options.clock : [] {
    return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
  };
  HttpHeaders headers = {{"Accept", "application/json"}};
  std::optional<std::string> key = options.api_key;
  if (!key) {
    if (const char* env = std::getenv(kApiKeyEnv); env && *env) key = env;
  }
  if (key) headers.emplace_back("x-api-key", *key);

  std::atomic<std::size_t> requests{0};
  std::vector<std::optional<CitationCacheEntry>> fetched(misses.size());
  std::vector<std::exception_ptr> errors(misses.size());
  parallel_for(misses.size(), options.max_in_flight, [&](std::size_t k) {
    const auto& id = misses[k];
    const std::string path = "/paper/" + encode_id(id) + "?fields=citationCount,title,authors";
    try {
      for (int attempt = 0;; ++attempt) {
        std::string failure;
        std::optional<HttpResponse> res;
        try {
          ++requests;
          res = transport(path, headers);
        } catch (const IoError& e) {
          failure = e.what();
        }
        if (res) {
          if (res->status == 200) {
            fetched[k] = parse_response(id, res->body, clock());
            return;
          }
          if (!retryable(res->status)) throw IoError("HTTP " + std::to_string(res->status) + " fetching " + id);
          failure = "HTTP " + std::to_string(res->status);
        }
        if (attempt >= options.max_retries)
          throw IoError("giving up on " + id + " after " + std::to_string(options.max_retries) + " retries (" +
                        failure + ")");
        sleep(backoff_delay(options, attempt));
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  });
  result.requests = requests;

  // Single writer, input order: successful fetches persist even if others fail.
  std::vector<CitationCacheEntry> fresh;
  for (const auto& e : fetched)
    if (e) fresh.push_back(*e);
  CitationCache::append(options.cache_path, fresh);
  for (const auto& e : fresh) result.citations[e.external_id] = e.citations;
  result.fetched = fresh.size();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return result;
}

// ---------------------------------------------------------------------------
// Title matching

namespace {

std::string fold(std::string_view s) {
  std::string out;
  for (unsigned char c : s) out.push_back(std::isalnum(c) ? static_cast<char>(std::tolower(c)) : ' ');
  return out;
}

// Porter step 1a: sses -> ss, ies -> i, ss -> ss, s -> "".
std::string depluralize(std::string w) {
  auto ends = [&](std::string_view suffix) { return w.size() >= suffix.size() && w.ends_with(suffix); };
  if (ends("sses"))
    w.resize(w.size() - 2);
  else if (ends("ies"))
    w.resize(w.size() - 2);
  else if (ends("ss"))
    ;
  else if (ends("s") && w.size() > 1)
    w.pop_back();
  return w;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : fold(s)) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::vector<std::string> title_tokens(std::string_view title) {
  std::set<std::string> set;
  for (auto& w : words(title)) set.insert(depluralize(std::move(w)));
  return {set.begin(), set.end()};
}

double title_similarity(std::string_view a, std::string_view b) {
  const auto ta = title_tokens(a), tb = title_tokens(b);
  if (ta.empty() && tb.empty()) return 0.0;
  std::vector<std::string> common;
  std::ranges::set_intersection(ta, tb, std::back_inserter(common));
  const double inter = static_cast<double>(common.size());
  return inter / (static_cast<double>(ta.size() + tb.size()) - inter);
}

std::string surname(std::string_view name) {
  const auto comma = name.find(',');
  const auto parts = words(comma == std::string_view::npos ? name : name.substr(0, comma));
  return parts.empty() ? std::string() : parts.back();
}

std::vector<Match> match_candidates(std::string_view submission_title, std::string_view contact_author,
                                    std::span<const Candidate> candidates, double threshold) {
  if (title_tokens(submission_title).empty()) throw ValidationError("submission title is empty");
  const std::string contact = surname(contact_author);
  std::vector<Match> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const bool has_author = !contact.empty() && std::ranges::any_of(c.authors, [&](const std::string& a) {
      return surname(a) == contact;
    });
    if (!has_author) continue;
    const double score = title_similarity(submission_title, c.title);
    if (score >= threshold) out.push_back({i, score});
  }
  std::ranges::stable_sort(out, [](const Match& a, const Match& b) { return a.score > b.score; });
  return out;
}

}  // namespace peerreview
