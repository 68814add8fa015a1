#pragma once

/// Minimal CSV support for the bundled parameter tables and report output.
/// Fields never contain commas or quotes in any schema used here, so no
/// quoting rules are implemented. Lines starting with '#' are comments.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "railrisk/error.hpp"

namespace railrisk::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line_no = 0;

  const std::string& at(std::size_t i, const std::string& file) const {
    if (i >= fields.size()) {
      throw ParseError(file + ":" + std::to_string(line_no) +
                       ": expected at least " + std::to_string(i + 1) +
                       " fields, got " + std::to_string(fields.size()));
    }
    return fields[i];
  }
};

inline std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(trim(cur));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

/// Reads all data rows of a CSV file. When `expect_header` is non-empty the
/// first row must match it exactly (after trimming).
inline std::vector<Row> read_file(const std::string& path,
                                  const std::vector<std::string>& expect_header = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = expect_header.empty();
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    Row row{split(t, ','), line_no};
    if (!saw_header) {
      if (row.fields != expect_header) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": unexpected header");
      }
      saw_header = true;
      continue;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double parse_double(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size()) {
    throw ParseError(where + ": not a number: '" + s + "'");
  }
  return v;
}

inline long parse_long(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  long v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size()) {
    throw ParseError(where + ": not an integer: '" + s + "'");
  }
  return v;
}

}  // namespace railrisk::csv
