#pragma once

// Citation counts from a scholarly-index HTTP API behind a JSON-lines cache,
// and title/author matching used to trace rejected submissions.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "peerreview/time.hpp"

namespace peerreview {

struct CitationCacheEntry {
  std::string external_id;
  std::int64_t citations = 0;
  Timestamp fetched_at{};
  std::string title;
  std::vector<std::string> authors;

  friend bool operator==(const CitationCacheEntry&, const CitationCacheEntry&) = default;
};

/// JSON-lines cache keyed by external id; a later line for the same id wins.
class CitationCache {
 public:
  CitationCache() = default;

  /// A missing file yields an empty cache. Malformed lines raise LoadError.
  static CitationCache load(const std::filesystem::path& path);

  const CitationCacheEntry* find(std::string_view id) const;
  void insert(CitationCacheEntry entry);
  std::size_t size() const noexcept { return entries_.size(); }

  /// Appends entries to the file, creating it if needed. Throws IoError.
  static void append(const std::filesystem::path& path, std::span<const CitationCacheEntry> entries);

  static std::string to_line(const CitationCacheEntry& entry);

 private:
  std::map<std::string, CitationCacheEntry, std::less<>> entries_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// GET `path` (already URL-encoded, relative to the API base). Throws IoError
/// when no response could be obtained.
using HttpGet = std::function<HttpResponse(const std::string& path, const HttpHeaders& headers)>;

/// HTTPS (or HTTP) transport for a base URL such as
/// `https://api.semanticscholar.org/graph/v1`.
HttpGet make_http_transport(const std::string& api_base, std::chrono::seconds timeout = std::chrono::seconds(30));

inline constexpr const char* kDefaultApiBase = "https://api.semanticscholar.org/graph/v1";
inline constexpr const char* kApiKeyEnv = "PEERREVIEW_API_KEY";

struct FetchOptions {
  std::filesystem::path cache_path;
  bool offline = false;
  std::string api_base = kDefaultApiBase;
  /// Sent as `x-api-key` when set; defaults to the environment variable.
  std::optional<std::string> api_key;
  unsigned max_in_flight = 4;
  int max_retries = 5;
  std::chrono::milliseconds backoff_base{1000};
  double backoff_factor = 2.0;
  /// Injection points for tests; defaults are the real network, sleep and clock.
  HttpGet transport;
  std::function<void(std::chrono::milliseconds)> sleep;
  std::function<Timestamp()> clock;
};

struct FetchResult {
  std::map<std::string, std::int64_t> citations;
  std::size_t cache_hits = 0;
  std::size_t fetched = 0;
  std::size_t requests = 0;  ///< HTTP attempts, retries included
};

/// Serves ids from the cache and fetches the rest (`/paper/{id}`, JSON with a
/// `citationCount` field), retrying rate-limit (429, 503) and transport
/// failures with exponential backoff. New entries are appended to the cache
/// in input order, also when another id fails. Throws IoError for an
/// offline cache miss or a failure after all retries, ValidationError for a
/// malformed response.
FetchResult fetch_citations(std::span<const std::string> ids, const FetchOptions& options);

/// Backoff delay before retry `attempt` (0-based): base * factor^attempt.
std::chrono::milliseconds backoff_delay(const FetchOptions& options, int attempt);

struct Candidate {
  std::string title;
  std::vector<std::string> authors;
};

struct Match {
  std::size_t index = 0;  ///< into the candidate list
  double score = 0.0;
};

inline constexpr double kDefaultMatchThreshold = 0.5;

/// Case-folded, punctuation-free title words with plural suffixes removed
/// (Porter step 1a), as a sorted set.
std::vector<std::string> title_tokens(std::string_view title);

/// Token-set Jaccard similarity of two titles.
double title_similarity(std::string_view a, std::string_view b);

/// Case-folded surname: the text before a comma, else the last word.
std::string surname(std::string_view name);

/// Candidates whose author list contains the contact author's surname, scored
/// by title similarity, at or above `threshold`, best first (ties by index).
/// Throws ValidationError for an empty title.
std::vector<Match> match_candidates(std::string_view submission_title, std::string_view contact_author,
                                    std::span<const Candidate> candidates,
                                    double threshold = kDefaultMatchThreshold);

}  // namespace peerreview
