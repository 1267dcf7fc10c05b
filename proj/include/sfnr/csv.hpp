/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sfnr/stream.hpp"

namespace sfnr {

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class FormatError : public std::runtime_error {
public:
  FormatError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

namespace csv_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

inline bool blank(std::string_view s) { return trim(s).empty(); }

}  // namespace csv_detail

/// Parses daily quotes with the header
/// `Date,Open,High,Low,Close,Volume,Adj Close`.
///
/// Features are (Open, High, Low, Volume, Adj Close); the target is Close.
/// Rows are returned in ascending date order whatever the file order.
inline std::vector<Instance> parse_yahoo_csv(std::istream& in) {
  using namespace csv_detail;
  static constexpr std::string_view kHeader[] = {"Date",  "Open",   "High",     "Low",
                                                 "Close", "Volume", "Adj Close"};
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto cells = split(line, ',');
    bool ok = cells.size() == std::size(kHeader);
    for (std::size_t i = 0; ok && i < cells.size(); ++i) ok = cells[i] == kHeader[i];
    if (!ok) throw FormatError("expected header 'Date,Open,High,Low,Close,Volume,Adj Close'", lineno);
    have_header = true;
    break;
  }
  if (!have_header) return {};

  struct Row {
    std::string date;
    Instance inst;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto cells = split(line, ',');
    if (cells.size() != std::size(kHeader))
      throw FormatError("expected 7 fields, got " + std::to_string(cells.size()), lineno);
    const auto date = cells[0];
    const bool iso = date.size() == 10 && date[4] == '-' && date[7] == '-' &&
                     std::all_of(date.begin(), date.end(), [](char c) { return c == '-' || (c >= '0' && c <= '9'); });
    if (!iso) throw FormatError("date '" + std::string(date) + "' is not YYYY-MM-DD", lineno);
    double v[6];
    for (std::size_t i = 0; i < 6; ++i)
      if (!parse_double(cells[i + 1], v[i]))
        throw FormatError("non-numeric " + std::string(kHeader[i + 1]) + " value '" + std::string(cells[i + 1]) + "'",
                          lineno);
    Row row;
    row.date = std::string(date);
    // v = Open, High, Low, Close, Volume, Adj Close
    row.inst.x = {v[0], v[1], v[2], v[4], v[5]};
    row.inst.y = v[3];
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  std::vector<Instance> out;
  out.reserve(rows.size());
  for (auto& r : rows) {
    r.inst.index = out.size();
    out.push_back(std::move(r.inst));
  }
  return out;
}

inline std::vector<Instance> parse_yahoo_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_yahoo_csv(in);
}

/// Target column by header name or 0-based position.
using TargetColumn = std::variant<std::string, std::size_t>;

/// Rectangular numeric CSV with an optional header row. The delimiter is
/// ',' unless the first line only contains ';' (UCI wine files).
inline std::vector<Instance> parse_regression_csv(std::istream& in, const TargetColumn& target) {
  using namespace csv_detail;
  std::string line;
  std::size_t lineno = 0;
  char delim = ',';
  std::size_t width = 0;
  std::size_t target_idx = 0;
  bool first = true;
  std::vector<Instance> out;

  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    if (first) {
      if (line.find(',') == std::string::npos && line.find(';') != std::string::npos) delim = ';';
      const auto cells = split(line, delim);
      width = cells.size();
      double tmp;
      const bool header = std::any_of(cells.begin(), cells.end(), [&](auto c) { return !parse_double(c, tmp); });
      if (const auto* name = std::get_if<std::string>(&target)) {
        if (!header) throw FormatError("target column '" + *name + "' requested but file has no header", lineno);
        const auto it = std::find(cells.begin(), cells.end(), std::string_view(*name));
        if (it == cells.end()) throw FormatError("target column '" + *name + "' not found in header", lineno);
        target_idx = static_cast<std::size_t>(it - cells.begin());
      } else {
        target_idx = std::get<std::size_t>(target);
        if (target_idx >= width)
          throw FormatError("target column " + std::to_string(target_idx) + " out of range (" +
                                std::to_string(width) + " columns)",
                            lineno);
      }
      if (width < 2) throw FormatError("need at least two columns", lineno);
      first = false;
      if (header) continue;
    }
    const auto cells = split(line, delim);
    if (cells.size() != width)
      throw FormatError("expected " + std::to_string(width) + " fields, got " + std::to_string(cells.size()), lineno);
    Instance inst;
    inst.index = out.size();
    inst.x.reserve(width - 1);
    for (std::size_t i = 0; i < width; ++i) {
      double v;
      if (!parse_double(cells[i], v))
        throw FormatError("non-numeric value '" + std::string(cells[i]) + "' in column " + std::to_string(i), lineno);
      if (i == target_idx)
        inst.y = v;
      else
        inst.x.push_back(v);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

inline std::vector<Instance> parse_regression_csv(std::string_view text, const TargetColumn& target) {
  std::istringstream in{std::string(text)};
  return parse_regression_csv(in, target);
}

}  // namespace sfnr
