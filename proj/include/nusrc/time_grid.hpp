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

#ifndef NUSRC_TIME_GRID_HPP_
#define NUSRC_TIME_GRID_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace nusrc {

enum class GridKind { kUniform, kEpsilon, kOffset, kTimestamps };

/// How a single sampling instant relates to the grid's nominal period.
/// Section engines pick the cheapest correct factor update from this tag.
enum class InstantTag {
  kOnGrid,         // time == index * period exactly
  kScaled,         // time == index * period * eps with eps != 1
  kPatternOffset,  // time == (index + pattern[slot]) * period
  kIrregular,      // no usable relation to a nominal period
};

struct GridInstant {
  std::size_t index = 0;
  double time = 0.0;
  InstantTag tag = InstantTag::kOnGrid;
  double eps = 1.0;  // kScaled only
  int slot = -1;     // kPatternOffset only
};

/// A finite, strictly increasing sequence of sampling instants together with
/// the metadata describing how they were generated (nominal period, per-index
/// scale factors, per-index offsets, or raw timestamps). Streaming growth is
/// supported through the append operations, which revalidate only the last
/// step.
class TimeGrid {
 public:
  /// Instants l * period for l = 0 .. count-1.
  static TimeGrid uniform(double period, std::size_t count);
  /// Instants l * period * factors[l]. factors[0] is irrelevant because
  /// instant 0 sits at time zero either way.
  static TimeGrid from_epsilons(double period, std::vector<double> factors);
  /// Instants (l + offsets[l]) * period. A repeating offset pattern is
  /// detected automatically and exposed through offset_pattern().
  static TimeGrid from_offsets(double period, std::vector<double> offsets);
  /// Raw strictly increasing timestamps with no declared period.
  static TimeGrid from_timestamps(std::vector<double> timestamps);

  GridKind kind() const { return kind_; }
  /// Nominal period; zero for raw-timestamp grids.
  double period() const { return period_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double operator[](std::size_t i) const { return times_[i]; }
  std::span<const double> timestamps() const { return times_; }

  GridInstant instant(std::size_t i) const;

  /// Detected repeating offset pattern (fractions of the period); empty when
  /// the grid is not a periodic-offset grid.
  std::span<const double> offset_pattern() const { return pattern_; }

  void extend_uniform(std::size_t extra);
  void append_epsilon(double factor);
  void append_offset(double offset);
  void append_timestamp(double t);

  /// Diagnostic for epsilon grids: indices l where the sufficient growth
  /// condition factors[l+1] > factors[l] * l / (l+1) fails. Construction
  /// validates the instants themselves, so a violation here is advisory.
  std::vector<std::size_t> epsilon_growth_violations() const;

 private:
  TimeGrid() = default;
  void require_increasing_back() const;
  void detect_pattern();

  GridKind kind_ = GridKind::kTimestamps;
  double period_ = 0.0;
  std::vector<double> times_;
  std::vector<double> factors_;  // kEpsilon
  std::vector<double> offsets_;  // kOffset
  std::vector<double> pattern_;  // kOffset, detected repetition
};

/// Index of the last instant at or before t (inclusive boundary), or nullopt
/// when every instant lies after t.
std::optional<std::size_t> lambda_index(const TimeGrid& grid, double t);

/// Number of grid instants in the half-open window (t_prev, t_cur].
/// lambda_prev must be lambda_index(grid, t_prev).
std::size_t new_term_count(const TimeGrid& grid, double t_prev, double t_cur,
                           std::optional<std::size_t> lambda_prev);

/// Rate ratio split into integer part and fractional remainder.
struct RatioSplit {
  long long whole = 0;
  double frac = 0.0;
};

RatioSplit ratio_decompose(double out_period, double in_period);

}  // namespace nusrc

#endif  // NUSRC_TIME_GRID_HPP_
