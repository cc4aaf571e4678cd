#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Minimal RFC-4180 reader/writer. Leading lines starting with '#' are treated
// as metadata and skipped by the reader.
namespace peerreview::csv {

struct Row {
  std::size_t line = 0;  // 1-based physical line on which the record starts
  std::vector<std::string> fields;
};

/// Reads every record. Throws ValidationError on an unterminated quote.
std::vector<Row> read(std::istream& in);

std::string escape(std::string_view field);

/// Shortest-ish decimal form with `digits` significant digits ("%.*g").
std::string number(double v, int digits = 12);

void write_row(std::ostream& out, std::span<const std::string> fields);
void write_row(std::ostream& out, std::initializer_list<std::string_view> fields);

}  // namespace peerreview::csv
