#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "btrank/errors.hpp"

namespace btrank::detail {

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

// Shortest decimal string that round-trips the exact double.
inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw DataError("double formatting failed");
  return std::string(buf, p);
}

inline double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw DataError(where + ": not a number: '" + std::string(s) + "'");
  return v;
}

inline std::int64_t parse_int(std::string_view s, const std::string& where) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw DataError(where + ": not an integer: '" + std::string(s) + "'");
  return v;
}

// File content split into lines; handles \n and \r\n, drops a final empty
// line. Suitable for JSONL, where records never span lines.
inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// Whole-file CSV reader: quoted fields may contain commas, escaped quotes
// ("") and newlines, so records are parsed from the raw bytes rather than
// per line. Returns one vector of fields per record.
inline std::vector<std::vector<std::string>> parse_csv(
    const std::string& content, const std::string& where) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line_no = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A record that is a single empty field is a blank line; skip it.
    if (record.size() != 1 || !record[0].empty()) records.push_back(record);
    record.clear();
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_started) {
          quoted = true;
          field_started = true;
        } else {
          field += c;  // stray quote inside an unquoted field, keep verbatim
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line_no;
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (quoted)
    throw DataError(where + ": unterminated quoted field (line " +
                    std::to_string(line_no) + ")");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace btrank::detail
