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

#include "nusrc/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nusrc {

namespace {

void require_positive_period(double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw std::invalid_argument("grid period must be positive and finite, got " +
                                std::to_string(period));
  }
}

[[noreturn]] void throw_not_increasing(std::size_t index, double prev, double cur) {
  throw std::invalid_argument("grid instants not strictly increasing at index " +
                              std::to_string(index) + ": t[" + std::to_string(index) +
                              "]=" + std::to_string(cur) + " <= t[" +
                              std::to_string(index - 1) + "]=" + std::to_string(prev));
}

// Smallest repetition length that explains the whole offset sequence with at
// least two full cycles. Returns 0 when none exists.
std::size_t find_period(const std::vector<double>& v, std::size_t max_period) {
  const std::size_t n = v.size();
  for (std::size_t p = 1; p <= std::min(max_period, n / 2); ++p) {
    bool ok = true;
    for (std::size_t i = p; i < n; ++i) {
      if (v[i] != v[i % p]) {
        ok = false;
        break;
      }
    }
    if (ok) return p;
  }
  return 0;
}

}  // namespace

TimeGrid TimeGrid::uniform(double period, std::size_t count) {
  require_positive_period(period);
  TimeGrid g;
  g.kind_ = GridKind::kUniform;
  g.period_ = period;
  g.times_.reserve(count);
  for (std::size_t l = 0; l < count; ++l) {
    g.times_.push_back(static_cast<double>(l) * period);
  }
  return g;
}

TimeGrid TimeGrid::from_epsilons(double period, std::vector<double> factors) {
  require_positive_period(period);
  TimeGrid g;
  g.kind_ = GridKind::kEpsilon;
  g.period_ = period;
  g.factors_ = std::move(factors);
  g.times_.reserve(g.factors_.size());
  for (std::size_t l = 0; l < g.factors_.size(); ++l) {
    if (!std::isfinite(g.factors_[l])) {
      throw std::invalid_argument("non-finite scale factor at index " + std::to_string(l));
    }
    g.times_.push_back(static_cast<double>(l) * period * g.factors_[l]);
    g.require_increasing_back();
  }
  return g;
}

TimeGrid TimeGrid::from_offsets(double period, std::vector<double> offsets) {
  require_positive_period(period);
  TimeGrid g;
  g.kind_ = GridKind::kOffset;
  g.period_ = period;
  g.offsets_ = std::move(offsets);
  g.times_.reserve(g.offsets_.size());
  for (std::size_t l = 0; l < g.offsets_.size(); ++l) {
    if (!std::isfinite(g.offsets_[l])) {
      throw std::invalid_argument("non-finite offset at index " + std::to_string(l));
    }
    g.times_.push_back((static_cast<double>(l) + g.offsets_[l]) * period);
    g.require_increasing_back();
  }
  g.detect_pattern();
  return g;
}

TimeGrid TimeGrid::from_timestamps(std::vector<double> timestamps) {
  TimeGrid g;
  g.kind_ = GridKind::kTimestamps;
  g.period_ = 0.0;
  g.times_.reserve(timestamps.size());
  for (std::size_t l = 0; l < timestamps.size(); ++l) {
    if (!std::isfinite(timestamps[l])) {
      throw std::invalid_argument("non-finite timestamp at index " + std::to_string(l));
    }
    g.times_.push_back(timestamps[l]);
    g.require_increasing_back();
  }
  return g;
}

void TimeGrid::require_increasing_back() const {
  const std::size_t i = times_.size() - 1;
  if (i == 0) return;
  if (!(times_[i] > times_[i - 1])) {
    throw_not_increasing(i, times_[i - 1], times_[i]);
  }
}

void TimeGrid::detect_pattern() {
  constexpr std::size_t kMaxPattern = 64;
  pattern_.clear();
  const std::size_t p = find_period(offsets_, kMaxPattern);
  if (p > 0) {
    pattern_.assign(offsets_.begin(), offsets_.begin() + static_cast<std::ptrdiff_t>(p));
  }
}

GridInstant TimeGrid::instant(std::size_t i) const {
  if (i >= times_.size()) {
    throw std::out_of_range("grid instant index " + std::to_string(i) + " out of range (size " +
                            std::to_string(times_.size()) + ")");
  }
  GridInstant gi;
  gi.index = i;
  gi.time = times_[i];
  switch (kind_) {
    case GridKind::kUniform:
      gi.tag = InstantTag::kOnGrid;
      break;
    case GridKind::kEpsilon:
      if (i == 0 || factors_[i] == 1.0) {
        gi.tag = InstantTag::kOnGrid;
      } else {
        gi.tag = InstantTag::kScaled;
        gi.eps = factors_[i];
      }
      break;
    case GridKind::kOffset: {
      const double d = offsets_[i];
      if (d == 0.0) {
        gi.tag = InstantTag::kOnGrid;
      } else if (!pattern_.empty()) {
        gi.tag = InstantTag::kPatternOffset;
        gi.slot = static_cast<int>(i % pattern_.size());
      } else if (i >= 1) {
        gi.tag = InstantTag::kScaled;
        gi.eps = 1.0 + d / static_cast<double>(i);
      } else {
        gi.tag = InstantTag::kIrregular;
      }
      break;
    }
    case GridKind::kTimestamps:
      gi.tag = InstantTag::kIrregular;
      break;
  }
  return gi;
}

void TimeGrid::extend_uniform(std::size_t extra) {
  if (kind_ != GridKind::kUniform) {
    throw std::logic_error("extend_uniform requires a uniform grid");
  }
  const std::size_t base = times_.size();
  for (std::size_t l = 0; l < extra; ++l) {
    times_.push_back(static_cast<double>(base + l) * period_);
  }
}

void TimeGrid::append_epsilon(double factor) {
  if (kind_ != GridKind::kEpsilon) {
    throw std::logic_error("append_epsilon requires an epsilon grid");
  }
  if (!std::isfinite(factor)) {
    throw std::invalid_argument("non-finite scale factor at index " +
                                std::to_string(factors_.size()));
  }
  factors_.push_back(factor);
  times_.push_back(static_cast<double>(times_.size()) * period_ * factor);
  require_increasing_back();
}

void TimeGrid::append_offset(double offset) {
  if (kind_ != GridKind::kOffset) {
    throw std::logic_error("append_offset requires an offset grid");
  }
  if (!std::isfinite(offset)) {
    throw std::invalid_argument("non-finite offset at index " + std::to_string(offsets_.size()));
  }
  offsets_.push_back(offset);
  times_.push_back((static_cast<double>(times_.size()) + offset) * period_);
  require_increasing_back();
  // Keep the detected pattern only while the new sample still fits it.
  if (!pattern_.empty() && offset != pattern_[(offsets_.size() - 1) % pattern_.size()]) {
    detect_pattern();
  }
}

void TimeGrid::append_timestamp(double t) {
  if (kind_ != GridKind::kTimestamps) {
    throw std::logic_error("append_timestamp requires a raw-timestamp grid");
  }
  if (!std::isfinite(t)) {
    throw std::invalid_argument("non-finite timestamp at index " + std::to_string(times_.size()));
  }
  times_.push_back(t);
  require_increasing_back();
}

std::vector<std::size_t> TimeGrid::epsilon_growth_violations() const {
  std::vector<std::size_t> out;
  if (kind_ != GridKind::kEpsilon) return out;
  for (std::size_t l = 0; l + 1 < factors_.size(); ++l) {
    const double lhs = factors_[l + 1];
    const double rhs =
        factors_[l] * static_cast<double>(l) / static_cast<double>(l + 1);
    if (!(lhs > rhs)) out.push_back(l);
  }
  return out;
}

std::optional<std::size_t> lambda_index(const TimeGrid& grid, double t) {
  const auto ts = grid.timestamps();
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  if (it == ts.begin()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(ts.begin(), it) - 1);
}

std::size_t new_term_count(const TimeGrid& grid, double t_prev, double t_cur,
                           std::optional<std::size_t> lambda_prev) {
  if (!(t_prev < t_cur)) {
    throw std::invalid_argument("new_term_count requires t_prev < t_cur, got t_prev=" +
                                std::to_string(t_prev) + " t_cur=" + std::to_string(t_cur));
  }
  const auto cur = lambda_index(grid, t_cur);
  const long long prev_i = lambda_prev ? static_cast<long long>(*lambda_prev) : -1;
  const long long cur_i = cur ? static_cast<long long>(*cur) : -1;
  return static_cast<std::size_t>(cur_i - prev_i);
}

RatioSplit ratio_decompose(double out_period, double in_period) {
  require_positive_period(out_period);
  require_positive_period(in_period);
  const double ratio = out_period / in_period;
  RatioSplit split;
  split.whole = static_cast<long long>(std::floor(ratio));
  split.frac = ratio - static_cast<double>(split.whole);
  return split;
}

}  // namespace nusrc
