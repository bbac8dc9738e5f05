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

#ifndef NUSRC_CSV_HPP_
#define NUSRC_CSV_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace nusrc {

/// Samples with optional explicit instants. `times` is either empty
/// (values-only file) or the same length as `values`.
struct TimedSeries {
  std::vector<double> times;
  std::vector<double> values;
};

/// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

/// Reads one- or two-column CSV. Two columns are taken as time,value; one
/// column as values only. A non-numeric first line is treated as a header
/// and skipped.
TimedSeries read_csv(std::istream& in);
TimedSeries read_csv_file(const std::string& path);

/// Writes "t,value" rows (with header) when times are present, otherwise one
/// value per line.
void write_csv(std::ostream& out, const TimedSeries& series);
void write_csv_file(const std::string& path, const TimedSeries& series);

}  // namespace nusrc

#endif  // NUSRC_CSV_HPP_
