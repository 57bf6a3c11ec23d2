#include "core/csv.hpp"

#include "core/error.hpp"

namespace medroute::csv {

std::string escape_field(std::string_view field) {
  bool needs_quote = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quote) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string format_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += escape_field(fields[i]);
  }
  out += '\n';
  return out;
}

std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  size_t i = 0, line = 1;
  while (i < text.size()) {
    Row row;
    row.line = line;
    std::string field;
    bool done_row = false;
    while (!done_row) {
      if (i < text.size() && text[i] == '"') {
        ++i;  // quoted field
        bool closed = false;
        while (i < text.size()) {
          char c = text[i];
          if (c == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field += '"';
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            if (c == '\n') ++line;
            field += c;
            ++i;
          }
        }
        require(closed, ErrorKind::Parse,
                "unterminated quoted field starting at line " +
                    std::to_string(row.line));
        if (i < text.size() && text[i] != ',' && text[i] != '\n' &&
            text[i] != '\r')
          fail(ErrorKind::Parse,
               "garbage after closing quote at line " + std::to_string(line));
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' &&
               text[i] != '\r') {
          require(text[i] != '"', ErrorKind::Parse,
                  "bare quote inside unquoted field at line " +
                      std::to_string(line));
          field += text[i];
          ++i;
        }
      }
      row.fields.push_back(std::move(field));
      field.clear();
      if (i >= text.size()) {
        done_row = true;
      } else if (text[i] == ',') {
        ++i;
      } else {  // \r or \n
        if (text[i] == '\r') ++i;
        if (i < text.size() && text[i] == '\n') ++i;
        ++line;
        done_row = true;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace medroute::csv
