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

#ifndef NUSRC_ORACLE_HPP_
#define NUSRC_ORACLE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nusrc/filter_design.hpp"
#include "nusrc/time_grid.hpp"

namespace nusrc {

/// Reference conversion straight from the defining sum
///   y[m] = sum over tau_n <= t_m of x[n] * h(t_m - tau_n),
/// with no recursion, no shared state between outputs, and compensated
/// accumulation per output. Outputs are computed independently, so the result
/// is bitwise identical for any worker count (NUSRC_THREADS caps the pool).
std::vector<double> oracle_convert(std::span<const double> input, const TimeGrid& input_grid,
                                   const TimeGrid& output_grid, const ParallelForm& form);

/// Per-output window bookkeeping computed by plain scanning: lambda[m] is the
/// index of the last input instant at or before t_m (nullopt when none), and
/// terms[m] counts input instants in (t_{m-1}, t_m]. Quadratic in the grid
/// sizes; intended for test-sized grids.
struct WindowCounts {
  std::vector<std::optional<std::size_t>> lambda;
  std::vector<std::size_t> terms;
};

WindowCounts oracle_counts(const TimeGrid& input_grid, const TimeGrid& output_grid);

/// Peak absolute deviation of `actual` from `reference`, scaled by the RMS of
/// `reference`. Falls back to the unscaled peak deviation when the reference
/// is identically zero.
double relative_error_vs_rms(std::span<const double> actual, std::span<const double> reference);

}  // namespace nusrc

#endif  // NUSRC_ORACLE_HPP_
