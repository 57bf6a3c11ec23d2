#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace medroute::csv {

// RFC-4180 field quoting; fields containing comma, quote or newline are
// quoted with embedded quotes doubled.
std::string escape_field(std::string_view field);

std::string format_row(const std::vector<std::string>& fields);

// Parses a whole CSV document (LF or CRLF). Each returned row carries the
// 1-based line number it started on. Throws Error{Parse} on malformed
// quoting with that line number in the message.
struct Row {
  std::vector<std::string> fields;
  size_t line;
};

std::vector<Row> parse(std::string_view text);

}  // namespace medroute::csv
