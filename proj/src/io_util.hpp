#pragma once

// Internal CSV / number formatting helpers shared by the loaders and writers.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "ifm/errors.hpp"

namespace ifm::io {

// Shortest decimal form that round-trips through a double, so writing,
// re-loading and writing again is byte-identical.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& file, std::size_t line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw ValidationError(file + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

// Reads a CSV file, checks the exact header, and returns data rows with their
// 1-based line numbers. Blank trailing lines are ignored.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> read_csv(
    const std::string& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  if (strip_cr(line) != header)
    throw ValidationError(path + ":1: expected header '" + header + "', got '" + strip_cr(line) +
                          "'");
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::size_t ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    line = strip_cr(line);
    if (line.empty()) continue;
    rows.emplace_back(ln, split_csv(line));
  }
  return rows;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  return out;
}

}  // namespace ifm::io
