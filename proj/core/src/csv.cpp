#include "peerreview/csv.hpp"

#include <cstdio>
#include <istream>
#include <iterator>
#include <ostream>

#include "peerreview/errors.hpp"

namespace peerreview::csv {

std::vector<Row> read(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<Row> rows;
  std::size_t pos = 0;
  std::size_t line = 1;

  // UTF-8 byte-order mark.
  if (text.compare(0, 3, "\xEF\xBB\xBF") == 0) pos = 3;

  // Metadata preamble.
  while (pos < text.size() && text[pos] == '#') {
    const auto eol = text.find('\n', pos);
    pos = eol == std::string::npos ? text.size() : eol + 1;
    ++line;
  }

  while (pos < text.size()) {
    Row row;
    row.line = line;
    std::string field;
    bool in_quotes = false;
    bool done = false;
    while (!done) {
      if (pos >= text.size()) {
        if (in_quotes) throw ValidationError("unterminated quoted field starting on line " + std::to_string(row.line));
        row.fields.push_back(std::move(field));
        done = true;
        break;
      }
      const char c = text[pos];
      if (in_quotes) {
        if (c == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
          } else {
            in_quotes = false;
            ++pos;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++pos;
        }
        continue;
      }
      switch (c) {
        case '"':
          in_quotes = true;
          ++pos;
          break;
        case ',':
          row.fields.push_back(std::move(field));
          field.clear();
          ++pos;
          break;
        case '\r':
          ++pos;
          break;
        case '\n':
          row.fields.push_back(std::move(field));
          ++pos;
          ++line;
          done = true;
          break;
        default:
          field.push_back(c);
          ++pos;
      }
    }
    // Blank lines carry no record.
    if (row.fields.size() == 1 && row.fields.front().empty()) continue;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

void write_row(std::ostream& out, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (auto f : fields) {
    if (!first) out << ',';
    first = false;
    out << escape(f);
  }
  out << '\n';
}

}  // namespace peerreview::csv
