/*
 Copyright 2026 The hocs Authors

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

// Minimal CSV tables: comma delimiter, header row, '\n' line ends, numbers
// printed with 17 significant digits so they parse back to the same double.

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hocs/errors.hpp"
#include "hocs/recursion.hpp"

namespace hocs {

using Cell = std::optional<double>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error(ErrorCode::Io, "no column '" + name + "'");
  }

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

inline std::string format_number(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

inline std::string to_csv(const CsvTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw Error(ErrorCode::Io, "csv row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (row[i]) out += format_number(*row[i]);
    }
    out += '\n';
  }
  return out;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = l.find(',', start);
      cells.push_back(l.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "empty csv");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw Error(ErrorCode::Io, "csv row width does not match header");
    std::vector<Cell> row;
    for (const auto& c : cells) {
      if (c.empty()) {
        row.emplace_back();
        continue;
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) throw Error(ErrorCode::Io, "bad csv number '" + c + "'");
      row.emplace_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Writes to a sibling temporary and renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename to '" + path.string() + "': " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Schedules

inline CsvTable schedule_table(const Solution& sol) {
  CsvTable t;
  t.header = {"k", "alpha_bar", "alpha", "gamma_bar", "k_mean", "k_dev"};
  const auto& c = sol.coefficients;
  const auto& g = sol.gains;
  const std::size_t n = g.size();
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<Cell> row(6);
    row[0] = static_cast<double>(k);
    row[1] = c.alpha_bar[k];
    if (c.alpha) row[2] = (*c.alpha)[k];
    if (c.gamma_bar) row[3] = (*c.gamma_bar)[k];
    if (k < n) {
      row[4] = g.k_mean[k];
      if (g.k_dev) row[5] = (*g.k_dev)[k];
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Inverse of schedule_table. Class and powers are not stored in the table and
/// are taken from the caller.
inline Solution schedule_from_table(const CsvTable& t, ProblemClass cls, int p, int o) {
  if (t.header != std::vector<std::string>{"k", "alpha_bar", "alpha", "gamma_bar", "k_mean", "k_dev"}) {
    throw Error(ErrorCode::Io, "not a schedule table");
  }
  if (t.rows.size() < 2) throw Error(ErrorCode::Io, "schedule table needs at least two rows");
  Solution s;
  s.coefficients.problem_class = cls;
  s.coefficients.p = p;
  s.coefficients.o = o;
  const std::size_t n = t.rows.size() - 1;
  const bool has_alpha = t.rows[0][2].has_value();
  const bool has_gamma = t.rows[0][3].has_value();
  const bool has_dev = t.rows[0][5].has_value();
  Sequence alpha, gamma, kdev;
  auto need = [](const Cell& c) {
    if (!c) throw Error(ErrorCode::Io, "missing value in schedule table");
    return *c;
  };
  for (std::size_t k = 0; k <= n; ++k) {
    const auto& row = t.rows[k];
    s.coefficients.alpha_bar.push_back(need(row[1]));
    if (has_alpha) alpha.push_back(need(row[2]));
    if (has_gamma) gamma.push_back(need(row[3]));
    if (k < n) {
      s.gains.k_mean.push_back(need(row[4]));
      if (has_dev) kdev.push_back(need(row[5]));
    }
  }
  if (has_alpha) s.coefficients.alpha = std::move(alpha);
  if (has_gamma) s.coefficients.gamma_bar = std::move(gamma);
  if (has_dev) s.gains.k_dev = std::move(kdev);
  return s;
}

}  // namespace hocs
