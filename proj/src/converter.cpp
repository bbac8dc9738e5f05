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

#include "nusrc/converter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nusrc {

Converter::Converter(const ParallelForm& form, const ConvertOptions& opts) : opts_(opts) {
  validate(form);
  init_engines(form, GridProfile::nominal(opts.nominal_input_period),
               GridProfile::nominal(opts.nominal_output_period));
}

Converter::Converter(const ParallelForm& form, const TimeGrid& input_grid,
                     const TimeGrid& output_grid, const ConvertOptions& opts)
    : opts_(opts), in_grid_(input_grid), out_grid_(output_grid) {
  validate(form);
  init_engines(form, GridProfile::from(input_grid), GridProfile::from(output_grid));
}

void Converter::init_engines(const ParallelForm& form, const GridProfile& in_profile,
                             const GridProfile& out_profile) {
  engines_.reserve(form.sections.size());
  for (const Section& s : form.sections) {
    engines_.emplace_back(s, opts_.ordering, in_profile, out_profile, opts_.reanchor_interval);
  }
}

NewInput Converter::classify_input(std::size_t index, double value, double time) const {
  NewInput s;
  s.index = index;
  s.value = value;
  if (in_grid_) {
    const GridInstant gi = in_grid_->instant(index);
    s.time = gi.time;
    s.tag = gi.tag;
    s.eps = gi.eps;
    s.slot = gi.slot;
    return s;
  }
  s.time = time;
  const double period = opts_.nominal_input_period;
  if (period > 0.0) {
    if (time == static_cast<double>(index) * period) {
      s.tag = InstantTag::kOnGrid;
    } else if (index >= 1) {
      s.tag = InstantTag::kScaled;
      s.eps = time / (static_cast<double>(index) * period);
    } else {
      s.tag = InstantTag::kIrregular;
    }
  } else {
    s.tag = InstantTag::kIrregular;
  }
  return s;
}

OutputInstant Converter::classify_output(std::size_t index, double time, double eps) const {
  OutputInstant o;
  o.index = index;
  o.time = time;
  const double period = opts_.nominal_output_period;
  if (eps != 1.0) {
    if (index >= 1) {
      o.tag = InstantTag::kScaled;
      o.eps = eps;
    } else {
      o.tag = time == 0.0 ? InstantTag::kOnGrid : InstantTag::kIrregular;
    }
  } else if (period > 0.0) {
    if (time == static_cast<double>(index) * period) {
      o.tag = InstantTag::kOnGrid;
    } else if (index >= 1) {
      o.tag = InstantTag::kScaled;
      o.eps = time / (static_cast<double>(index) * period);
    } else {
      o.tag = InstantTag::kIrregular;
    }
  } else {
    o.tag = InstantTag::kIrregular;
  }
  return o;
}

void Converter::push_input(double value) {
  if (!in_grid_) {
    throw std::logic_error("push_input(value) requires a grid-backed converter");
  }
  if (input_finished_) {
    throw std::logic_error("push_input after finish_input");
  }
  if (next_input_ >= in_grid_->size()) {
    throw std::out_of_range("input grid exhausted after " + std::to_string(next_input_) +
                            " samples");
  }
  pending_.push_back(classify_input(next_input_, value, 0.0));
  last_input_time_ = pending_.back().time;
  have_input_ = true;
  ++next_input_;
}

void Converter::push_input(double value, double time) {
  if (in_grid_) {
    if (next_input_ >= in_grid_->size()) {
      throw std::out_of_range("input grid exhausted after " + std::to_string(next_input_) +
                              " samples");
    }
    if (time != (*in_grid_)[next_input_]) {
      throw std::invalid_argument("input time " + std::to_string(time) +
                                  " does not match grid instant " + std::to_string(next_input_));
    }
    push_input(value);
    return;
  }
  if (input_finished_) {
    throw std::logic_error("push_input after finish_input");
  }
  if (!std::isfinite(time)) {
    throw std::invalid_argument("input time must be finite");
  }
  if (have_input_ && !(time > last_input_time_)) {
    throw std::invalid_argument("input times must increase strictly: " + std::to_string(time) +
                                " after " + std::to_string(last_input_time_));
  }
  pending_.push_back(classify_input(next_input_, value, time));
  last_input_time_ = time;
  have_input_ = true;
  ++next_input_;
}

void Converter::finish_input() { input_finished_ = true; }

void Converter::certify(double time) const {
  if (input_finished_) return;
  if (in_grid_) {
    if (next_input_ >= in_grid_->size()) return;
    if ((*in_grid_)[next_input_] > time) return;
    throw underrun_error("input " + std::to_string(next_input_) + " at or before output time " +
                         std::to_string(time) + " has not been pushed");
  }
  if (have_input_ && last_input_time_ > time) return;
  throw underrun_error("cannot certify that all inputs at or before " + std::to_string(time) +
                       " have arrived; push a later input or call finish_input()");
}

bool Converter::can_pull() const {
  if (!out_grid_ || next_output_ >= out_grid_->size()) return false;
  const double t = (*out_grid_)[next_output_];
  if (input_finished_) return true;
  if (next_input_ >= in_grid_->size()) return true;
  return (*in_grid_)[next_input_] > t;
}

bool Converter::can_pull(double time) const {
  if (out_grid_) return false;
  if (have_output_ && !(time > last_output_time_)) return false;
  if (input_finished_) return true;
  return have_input_ && last_input_time_ > time;
}

double Converter::step(const OutputInstant& inst) {
  certify(inst.time);
  std::size_t take = 0;
  while (take < pending_.size() && pending_[take].time <= inst.time) ++take;
  const std::span<const NewInput> batch(pending_.data(), take);

  double y = 0.0;
  for (SectionEngine& e : engines_) y += e.step(inst, batch);

  OpCounters ops;
  for (const SectionEngine& e : engines_) ops += e.last_step();
  if (engines_.size() >= 2) {
    const std::uint64_t comb = engines_.size() - 1;
    ops.adds += comb;
    combination_adds_ += comb;
  }
  steps_.push_back(StepRecord{inst.index, inst.time, take, ops});

  pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(take));
  last_output_time_ = inst.time;
  have_output_ = true;
  ++next_output_;
  return y;
}

double Converter::pull_output() {
  if (!out_grid_) {
    throw std::logic_error("pull_output() requires a grid-backed converter");
  }
  if (next_output_ >= out_grid_->size()) {
    throw std::out_of_range("output grid exhausted after " + std::to_string(next_output_) +
                            " samples");
  }
  const GridInstant gi = out_grid_->instant(next_output_);
  OutputInstant inst;
  inst.index = gi.index;
  inst.time = gi.time;
  inst.tag = gi.tag;
  inst.eps = gi.eps;
  inst.slot = gi.slot;
  return step(inst);
}

double Converter::pull_output(double time, double eps) {
  if (out_grid_) {
    throw std::logic_error("pull_output(time) is for raw converters; use pull_output()");
  }
  if (!std::isfinite(time)) {
    throw std::invalid_argument("output time must be finite");
  }
  return step(classify_output(next_output_, time, eps));
}

OpCounters Converter::last_step() const {
  if (steps_.empty()) {
    throw std::logic_error("no steps taken yet");
  }
  return steps_.back().ops;
}

OpCounters Converter::setup() const {
  OpCounters s;
  for (const SectionEngine& e : engines_) s += e.setup();
  return s;
}

OpCounters Converter::totals() const {
  OpCounters t;
  for (const SectionEngine& e : engines_) t += e.totals();
  t.adds += combination_adds_;
  return t;
}

ConversionReport convert_offline(std::span<const double> input, const TimeGrid& input_grid,
                                 const TimeGrid& output_grid, const ParallelForm& form,
                                 const ConvertOptions& opts) {
  if (input.size() != input_grid.size()) {
    throw std::invalid_argument("input has " + std::to_string(input.size()) +
                                " samples but the grid has " + std::to_string(input_grid.size()) +
                                " instants");
  }
  Converter conv(form, input_grid, output_grid, opts);
  ConversionReport report;
  report.ordering = opts.ordering;
  report.outputs.reserve(output_grid.size());

  std::size_t next_push = 0;
  for (std::size_t m = 0; m < output_grid.size(); ++m) {
    const double t = output_grid[m];
    while (next_push < input.size() && input_grid[next_push] <= t) {
      conv.push_input(input[next_push]);
      ++next_push;
    }
    report.outputs.push_back(conv.pull_output());
  }

  report.steps = conv.steps();
  report.setup = conv.setup();
  report.totals = conv.totals();
  if (!report.steps.empty()) {
    std::size_t lo = report.steps.front().new_terms;
    std::size_t hi = lo;
    double sum = 0.0;
    for (const StepRecord& s : report.steps) {
      lo = std::min(lo, s.new_terms);
      hi = std::max(hi, s.new_terms);
      sum += static_cast<double>(s.new_terms);
    }
    report.terms_min = lo;
    report.terms_max = hi;
    report.terms_mean = sum / static_cast<double>(report.steps.size());
  }
  return report;
}

}  // namespace nusrc
