// Copyright 2026 The nusrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nusrc/csv.hpp"

#include <charconv>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <system_error>

namespace nusrc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

TimedSeries read_csv(std::istream& in) {
  TimedSeries series;
  std::string line;
  std::size_t lineno = 0;
  bool saw_row = false;
  bool two_columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    const std::size_t comma = sv.find(',');
    double a = 0.0;
    double b = 0.0;
    bool ok;
    bool pair = comma != std::string_view::npos;
    if (pair) {
      ok = parse_double(sv.substr(0, comma), a) && parse_double(sv.substr(comma + 1), b);
    } else {
      ok = parse_double(sv, a);
    }
    if (!ok) {
      if (!saw_row) continue;  // header line
      throw std::runtime_error("csv: cannot parse line " + std::to_string(lineno) + ": " + line);
    }
    if (!saw_row) {
      two_columns = pair;
      saw_row = true;
    } else if (pair != two_columns) {
      throw std::runtime_error("csv: inconsistent column count at line " + std::to_string(lineno));
    }
    if (pair) {
      series.times.push_back(a);
      series.values.push_back(b);
    } else {
      series.values.push_back(a);
    }
  }
  return series;
}

TimedSeries read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  return read_csv(in);
}

void write_csv(std::ostream& out, const TimedSeries& series) {
  if (!series.times.empty() && series.times.size() != series.values.size()) {
    throw std::invalid_argument("csv: times and values length mismatch");
  }
  if (series.times.empty()) {
    for (double v : series.values) {
      out << format_double(v) << '\n';
    }
    return;
  }
  out << "t,value\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    out << format_double(series.times[i]) << ',' << format_double(series.values[i]) << '\n';
  }
}

void write_csv_file(const std::string& path, const TimedSeries& series) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_csv(out, series);
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

}  // namespace nusrc
