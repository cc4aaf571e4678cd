#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace peerreview {

using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

/// Parses an ISO-8601 instant such as `2014-07-15T10:00:00Z` or
/// `2014-07-15T12:00:00+02:00` and normalizes it to UTC. Fractional seconds
/// are truncated. Timestamps without a zone designator are rejected.
/// Throws ValidationError.
Timestamp parse_timestamp(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp t);

/// Midnight UTC at the start of the day containing `t`.
Timestamp floor_day(Timestamp t);

constexpr Duration days(long n) { return std::chrono::duration_cast<Duration>(std::chrono::days(n)); }

}  // namespace peerreview
