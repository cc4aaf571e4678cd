#include "peerreview/time.hpp"

#include <cctype>
#include <cstdio>

#include "peerreview/errors.hpp"

namespace peerreview {
namespace {

int digits(std::string_view s, std::size_t pos, std::size_t count) {
  if (pos + count > s.size()) throw ValidationError("timestamp truncated");
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw ValidationError("timestamp is not ISO-8601");
    value = value * 10 + (s[i] - '0');
  }
  return value;
}

void expect(std::string_view s, std::size_t pos, char c) {
  if (pos >= s.size() || s[pos] != c) throw ValidationError("timestamp is not ISO-8601");
}

}  // namespace

Timestamp parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  // YYYY-MM-DDTHH:MM:SS
  const int y = digits(s, 0, 4);
  expect(s, 4, '-');
  const int mo = digits(s, 5, 2);
  expect(s, 7, '-');
  const int d = digits(s, 8, 2);
  if (s.size() <= 10 || (s[10] != 'T' && s[10] != ' ')) throw ValidationError("timestamp is not ISO-8601");
  const int hh = digits(s, 11, 2);
  expect(s, 13, ':');
  const int mm = digits(s, 14, 2);
  expect(s, 16, ':');
  const int ss = digits(s, 17, 2);

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) throw ValidationError("timestamp field out of range");

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) throw ValidationError("timestamp is not ISO-8601");
  }
  if (pos >= s.size()) throw ValidationError("timestamp has no UTC offset (naive timestamps are rejected)");

  int offset_minutes = 0;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '+' ? 1 : -1;
    const int oh = digits(s, pos + 1, 2);
    std::size_t next = pos + 3;
    if (next < s.size() && s[next] == ':') ++next;
    const int om = digits(s, next, 2);
    if (oh > 23 || om > 59) throw ValidationError("timestamp offset out of range");
    offset_minutes = sign * (oh * 60 + om);
    pos = next + 2;
  } else {
    throw ValidationError("timestamp is not ISO-8601");
  }
  if (pos != s.size()) throw ValidationError("trailing characters after timestamp");

  const sys_seconds local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
  return local - minutes{offset_minutes};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const sys_days day_point = floor<std::chrono::days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<seconds> tod{t - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long>(tod.seconds().count()));
  return buf;
}

Timestamp floor_day(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }

}  // namespace peerreview
