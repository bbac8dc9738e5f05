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

#ifndef NUSRC_CONVERTER_HPP_
#define NUSRC_CONVERTER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nusrc/filter_design.hpp"
#include "nusrc/sections.hpp"
#include "nusrc/time_grid.hpp"

namespace nusrc {

struct ConvertOptions {
  Ordering ordering = Ordering::kRebased;
  /// Rebased repeated-pole sections shift their polynomial moment origin to
  /// the current output instant every this many steps (0 disables).
  std::uint64_t reanchor_interval = 0;
  /// Raw-mode instant classification: when nonzero, pushed/pulled instants
  /// are related to index * period so the indexed ordering can use cached
  /// powers. Zero means every raw instant is treated as irregular.
  double nominal_input_period = 0.0;
  double nominal_output_period = 0.0;
};

/// Thrown when an output instant is requested before the inputs at or before
/// it are certainly all available.
class underrun_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-output bookkeeping: the number of input terms consumed by the step and
/// the operations it cost (sections plus cross-section combination).
struct StepRecord {
  std::size_t index = 0;
  double time = 0.0;
  std::size_t new_terms = 0;
  OpCounters ops;
};

struct ConversionReport {
  Ordering ordering = Ordering::kRebased;
  std::vector<double> outputs;
  std::vector<StepRecord> steps;
  OpCounters setup;
  OpCounters totals;
  std::size_t terms_min = 0;
  std::size_t terms_max = 0;
  double terms_mean = 0.0;
  /// Filled by verification helpers; peak |y - reference| over the RMS of
  /// the reference.
  std::optional<double> max_relative_error;
};

/// Streaming many-section converter. Inputs arrive through push_input in
/// time order; outputs are requested one instant at a time. Each output
/// consumes the buffered inputs at or before its instant (inclusive
/// boundary) and is the sum of the per-section responses.
///
/// Two construction modes:
///  - grid-backed: both instant sequences are known up front; push/pull take
///    values only and instants come from the grids, which also certify
///    readiness exactly.
///  - raw: the caller supplies instants as it goes. A pull is accepted once
///    a buffered input lies beyond the pull instant or finish_input() was
///    called; before that the converter cannot rule out a late input and
///    throws underrun_error.
class Converter {
 public:
  Converter(const ParallelForm& form, const ConvertOptions& opts = {});
  Converter(const ParallelForm& form, const TimeGrid& input_grid, const TimeGrid& output_grid,
            const ConvertOptions& opts = {});

  /// Grid-backed only: value for the next input grid instant.
  void push_input(double value);
  /// Raw mode: next input sample at a strictly increasing instant. Also
  /// accepted grid-backed when time matches the grid instant exactly.
  void push_input(double value, double time);
  /// Declares the input stream over; pending pulls can then drain freely.
  void finish_input();

  /// Grid-backed only: next output instant per the output grid.
  double pull_output();
  /// Raw mode: output at the given instant. eps relates the instant to the
  /// nominal output period (time == index * period * eps) for the indexed
  /// ordering's cached-power path; leave at 1 to classify from the period.
  double pull_output(double time, double eps = 1.0);

  bool can_pull() const;
  bool can_pull(double time) const;

  std::size_t inputs_pushed() const { return next_input_; }
  std::size_t outputs_pulled() const { return next_output_; }
  std::size_t section_count() const { return engines_.size(); }

  const std::vector<StepRecord>& steps() const { return steps_; }
  OpCounters last_step() const;
  /// One-time construction cost (cached base powers and pattern corrections).
  OpCounters setup() const;
  /// Running cost over all steps, including cross-section combination adds.
  OpCounters totals() const;

 private:
  void init_engines(const ParallelForm& form, const GridProfile& in_profile,
                    const GridProfile& out_profile);
  NewInput classify_input(std::size_t index, double value, double time) const;
  OutputInstant classify_output(std::size_t index, double time, double eps) const;
  void certify(double time) const;
  double step(const OutputInstant& inst);

  ConvertOptions opts_;
  std::vector<SectionEngine> engines_;
  std::optional<TimeGrid> in_grid_;
  std::optional<TimeGrid> out_grid_;
  std::vector<NewInput> pending_;
  std::vector<StepRecord> steps_;
  std::size_t next_input_ = 0;
  std::size_t next_output_ = 0;
  double last_input_time_ = 0.0;
  bool have_input_ = false;
  bool input_finished_ = false;
  double last_output_time_ = 0.0;
  bool have_output_ = false;
  std::uint64_t combination_adds_ = 0;
};

/// Whole-signal conversion through the same streaming path (pushes each
/// input just before the first output at or after it), so streamed and
/// offline runs produce bit-identical outputs and counters.
ConversionReport convert_offline(std::span<const double> input, const TimeGrid& input_grid,
                                 const TimeGrid& output_grid, const ParallelForm& form,
                                 const ConvertOptions& opts = {});

}  // namespace nusrc

#endif  // NUSRC_CONVERTER_HPP_
