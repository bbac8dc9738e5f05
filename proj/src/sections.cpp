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

#include "nusrc/sections.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace nusrc {

namespace {

constexpr bool structural_unity(std::size_t index, InstantTag tag) {
  // The only factor that is an exact 1 by construction: instant 0 of an
  // on-grid axis (power zero).
  return index == 0 && tag == InstantTag::kOnGrid;
}

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) {
    b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return b;
}

void require_section_params(double gain, double decay, const char* kind) {
  if (!std::isfinite(gain)) {
    throw std::invalid_argument(std::string(kind) + " section requires a finite gain");
  }
  if (!(decay > 0.0) || !std::isfinite(decay)) {
    throw std::invalid_argument(std::string(kind) + " section requires a positive decay, got " +
                                std::to_string(decay));
  }
}

}  // namespace

double update_power(double prev_power, double base, std::size_t index, double eps,
                    OpCounters& ops) {
  double p;
  if (index == 0) {
    p = 1.0;
  } else if (index == 1) {
    p = base;
  } else {
    p = base * prev_power;
    ops.mults += 1;
  }
  if (eps != 1.0) {
    ops.exps += 1;
    p = std::pow(p, eps);
  }
  return p;
}

std::complex<double> update_power(std::complex<double> prev_power, std::complex<double> base,
                                  std::size_t index, double eps, OpCounters& ops) {
  std::complex<double> p;
  if (index == 0) {
    p = 1.0;
  } else if (index == 1) {
    p = base;
  } else {
    p = base * prev_power;
    ops.mults += 4;
    ops.adds += 2;
  }
  if (eps != 1.0) {
    ops.exps += 1;
    p = std::pow(p, eps);
  }
  return p;
}

GridProfile GridProfile::from(const TimeGrid& grid) {
  GridProfile p;
  p.period = grid.period();
  p.uniform = grid.kind() == GridKind::kUniform;
  const auto pat = grid.offset_pattern();
  p.pattern.assign(pat.begin(), pat.end());
  return p;
}

GridProfile GridProfile::nominal(double period) {
  GridProfile p;
  p.period = period;
  return p;
}

namespace detail {

template <typename Scalar>
PowerTrack<Scalar>::PowerTrack(Scalar rate, double period, std::span<const double> pattern,
                               bool count_adds, OpCounters& setup)
    : rate_(rate), count_adds_(count_adds) {
  if (period > 0.0) {
    has_base_ = true;
    base_ = std::exp(rate_ * period);
    setup.transcendentals += 1;
    corrections_.reserve(pattern.size());
    for (double d : pattern) {
      if (d == 0.0) {
        corrections_.push_back(Scalar(1.0));
      } else {
        corrections_.push_back(std::exp(rate_ * (d * period)));
        setup.transcendentals += 1;
      }
    }
  }
}

template <typename Scalar>
Scalar PowerTrack<Scalar>::factor(std::size_t index, InstantTag tag, double eps, double time,
                                  int slot, OpCounters& ops) {
  constexpr bool kComplex = !std::is_same_v<Scalar, double>;
  if (!has_base_) {
    ops.exps += 1;
    return std::exp(rate_ * time);
  }
  if (!started_) {
    if (index != 0) {
      throw std::logic_error("power track must start at index 0, got " + std::to_string(index));
    }
    started_ = true;
    last_index_ = 0;
    power_ = Scalar(1.0);
  } else {
    if (index != last_index_ + 1) {
      throw std::logic_error("power track index must advance by one, got " +
                             std::to_string(index) + " after " + std::to_string(last_index_));
    }
    last_index_ = index;
    if (index == 1) {
      power_ = base_;
    } else {
      power_ *= base_;
      if constexpr (kComplex) {
        ops.mults += 4;
        if (count_adds_) ops.adds += 2;
      } else {
        ops.mults += 1;
      }
    }
  }
  switch (tag) {
    case InstantTag::kOnGrid:
      return power_;
    case InstantTag::kScaled:
      ops.exps += 1;
      if constexpr (kComplex) {
        // Principal-branch pow wraps the accumulated phase; evaluate from the
        // timestamp instead (same operation count, branch-safe).
        return std::exp(rate_ * time);
      } else {
        return std::pow(power_, eps);
      }
    case InstantTag::kPatternOffset: {
      const Scalar c = corrections_.at(static_cast<std::size_t>(slot));
      if (c == Scalar(1.0)) return power_;
      if constexpr (kComplex) {
        ops.mults += 4;
        if (count_adds_) ops.adds += 2;
      } else {
        ops.mults += 1;
      }
      return power_ * c;
    }
    case InstantTag::kIrregular:
      ops.exps += 1;
      return std::exp(rate_ * time);
  }
  throw std::logic_error("unreachable instant tag");
}

template class PowerTrack<double>;
template class PowerTrack<std::complex<double>>;

void StepSequencer::check(const OutputInstant& out, std::span<const NewInput> inputs) {
  if (have_output) {
    if (!(out.time > t_prev)) {
      throw std::invalid_argument("output instant not increasing: t=" + std::to_string(out.time) +
                                  " after t=" + std::to_string(t_prev));
    }
    if (out.index != next_output) {
      throw std::invalid_argument("output index " + std::to_string(out.index) + ", expected " +
                                  std::to_string(next_output));
    }
  } else if (out.index != 0) {
    throw std::invalid_argument("first output index must be 0, got " + std::to_string(out.index));
  }
  for (const NewInput& s : inputs) {
    if (s.index != next_input) {
      throw std::invalid_argument("duplicate or out-of-order input index " +
                                  std::to_string(s.index) + ", expected " +
                                  std::to_string(next_input));
    }
    if (have_input && !(s.time > last_input_time)) {
      throw std::invalid_argument("input instants not increasing at index " +
                                  std::to_string(s.index));
    }
    if (have_output && !(s.time > t_prev)) {
      throw std::invalid_argument("input " + std::to_string(s.index) +
                                  " belongs to an earlier output window");
    }
    if (!(s.time <= out.time)) {
      throw std::invalid_argument("input " + std::to_string(s.index) +
                                  " lies beyond the output instant");
    }
    last_input_time = s.time;
    have_input = true;
    ++next_input;
  }
  t_prev = out.time;
  have_output = true;
  next_output = out.index + 1;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// First order
// ---------------------------------------------------------------------------

FirstOrderEngine::FirstOrderEngine(const FirstOrderSection& section, Ordering ordering,
                                   const GridProfile& input, const GridProfile& output)
    : gain_(section.gain), decay_(section.decay), ordering_(ordering) {
  require_section_params(gain_, decay_, "first-order");
  if (ordering_ == Ordering::kIndexed) {
    xtrack_ = detail::PowerTrack<double>(+decay_, input.period, input.pattern, true, setup_);
    ytrack_ = detail::PowerTrack<double>(-decay_, output.period, output.pattern, true, setup_);
  }
}

double FirstOrderEngine::step(const OutputInstant& out, std::span<const NewInput> inputs) {
  const bool had_prev = seq_.have_output;
  const double t_prev = seq_.t_prev;
  seq_.check(out, inputs);

  OpCounters ops;
  double y;
  if (ordering_ == Ordering::kIndexed) {
    double q = 0.0;
    for (const NewInput& s : inputs) {
      const double f = xtrack_.factor(s.index, s.tag, s.eps, s.time, s.slot, ops);
      if (!structural_unity(s.index, s.tag)) ops.mults += 1;
      q += s.value * f;
    }
    if (!inputs.empty()) {
      accum_ += q;
      ops.adds += inputs.size();
    }
    const double fy = ytrack_.factor(out.index, out.tag, out.eps, out.time, out.slot, ops);
    if (!structural_unity(out.index, out.tag)) ops.mults += 1;
    if (gain_ != 1.0) ops.mults += 1;
    y = gain_ * fy * accum_;
  } else {
    if (had_prev) {
      const double d = std::exp(-decay_ * (out.time - t_prev));
      ops.transcendentals += 1;
      accum_ *= d;
      ops.mults += 1;
    }
    double q = 0.0;
    for (const NewInput& s : inputs) {
      const double w = std::exp(-decay_ * (out.time - s.time));
      ops.transcendentals += 1;
      q += s.value * w;
      ops.mults += 1;
    }
    if (!inputs.empty()) {
      accum_ += q;
      ops.adds += inputs.size();
    }
    if (gain_ != 1.0) ops.mults += 1;
    y = gain_ * accum_;
  }
  totals_ += ops;
  last_ = ops;
  return y;
}

// ---------------------------------------------------------------------------
// Second order
// ---------------------------------------------------------------------------

SecondOrderEngine::SecondOrderEngine(const SecondOrderSection& section, Ordering ordering,
                                     const GridProfile& input, const GridProfile& output)
    : gain_(section.gain),
      decay_(section.decay),
      omega_(section.omega),
      coeff_(section.gain * std::cos(section.phase), section.gain * std::sin(section.phase)),
      out_rate_(-section.decay, section.omega),
      in_rate_(section.decay, -section.omega),
      ordering_(ordering) {
  require_section_params(gain_, decay_, "second-order");
  if (!(omega_ > 0.0) || !std::isfinite(omega_)) {
    throw std::invalid_argument("second-order section requires a positive omega, got " +
                                std::to_string(omega_));
  }
  if (!std::isfinite(section.phase)) {
    throw std::invalid_argument("second-order section requires a finite phase");
  }
  if (ordering_ == Ordering::kIndexed) {
    xtrack_ = detail::PowerTrack<std::complex<double>>(in_rate_, input.period, input.pattern,
                                                       true, setup_);
    // The recursive output-power update's additions are folded into the
    // output-stage budget, so this track only reports multiplications.
    ytrack_ = detail::PowerTrack<std::complex<double>>(out_rate_, output.period, output.pattern,
                                                       false, setup_);
  }
}

double SecondOrderEngine::step(const OutputInstant& out, std::span<const NewInput> inputs) {
  const bool had_prev = seq_.have_output;
  const double t_prev = seq_.t_prev;
  seq_.check(out, inputs);

  OpCounters ops;
  double y;
  if (ordering_ == Ordering::kIndexed) {
    std::complex<double> q(0.0, 0.0);
    for (const NewInput& s : inputs) {
      const std::complex<double> f = xtrack_.factor(s.index, s.tag, s.eps, s.time, s.slot, ops);
      if (!structural_unity(s.index, s.tag)) ops.mults += 2;  // real times complex
      q += s.value * f;
    }
    if (!inputs.empty()) {
      accum_ += q;
      ops.adds += 2;
    }
    const std::complex<double> fy =
        ytrack_.factor(out.index, out.tag, out.eps, out.time, out.slot, ops);
    std::complex<double> w;
    if (structural_unity(out.index, out.tag)) {
      w = coeff_;
    } else {
      w = coeff_ * fy;
      ops.mults += 4;
      ops.adds += 2;
    }
    y = w.real() * accum_.imag() + w.imag() * accum_.real();
    ops.mults += 2;
    ops.adds += 1;
  } else {
    if (had_prev) {
      const std::complex<double> d = std::exp(out_rate_ * (out.time - t_prev));
      ops.transcendentals += 1;
      accum_ *= d;
      ops.mults += 4;
      ops.adds += 2;
    }
    std::complex<double> q(0.0, 0.0);
    for (const NewInput& s : inputs) {
      const std::complex<double> w = std::exp(out_rate_ * (out.time - s.time));
      ops.transcendentals += 1;
      q += s.value * w;
      ops.mults += 2;
    }
    if (!inputs.empty()) {
      accum_ += q;
      ops.adds += 2 * inputs.size();
    }
    y = coeff_.real() * accum_.imag() + coeff_.imag() * accum_.real();
    ops.mults += 2;
    ops.adds += 1;
  }
  totals_ += ops;
  last_ = ops;
  return y;
}

// ---------------------------------------------------------------------------
// Repeated real pole
// ---------------------------------------------------------------------------

RepeatedPoleEngine::RepeatedPoleEngine(const RepeatedPoleSection& section, Ordering ordering,
                                       const GridProfile& input, const GridProfile& output,
                                       std::uint64_t reanchor_interval)
    : gain_(section.gain),
      decay_(section.decay),
      power_(section.power),
      ordering_(ordering),
      reanchor_interval_(reanchor_interval) {
  require_section_params(gain_, decay_, "repeated-pole");
  if (power_ < 1) {
    throw std::invalid_argument("repeated-pole power must be >= 1, got " +
                                std::to_string(power_));
  }
  const std::size_t channels = static_cast<std::size_t>(power_) + 1;
  binom_.resize(channels);
  for (int k = 0; k <= power_; ++k) binom_[static_cast<std::size_t>(k)] = binom(power_, k);
  accums_.assign(channels, 0.0);
  residual_.assign(channels, 0.0);
  table_.assign(channels, 0.0);
  if (ordering_ == Ordering::kIndexed) {
    xtrack_ = detail::PowerTrack<double>(+decay_, input.period, input.pattern, true, setup_);
    ytrack_ = detail::PowerTrack<double>(-decay_, output.period, output.pattern, true, setup_);
    uniform_mode_ = input.uniform && output.uniform && input.period > 0.0 && output.period > 0.0;
    if (uniform_mode_) {
      beta_.resize(channels);
      for (int k = 0; k <= power_; ++k) {
        beta_[static_cast<std::size_t>(k)] = binom_[static_cast<std::size_t>(k)] *
                                             std::pow(output.period, power_ - k) *
                                             std::pow(-input.period, k);
      }
    }
  }
}

void RepeatedPoleEngine::naive_powers(double v, std::vector<double>& out, OpCounters& ops) {
  // Each exponent is computed independently by repeated multiplication; the
  // table costs power*(power-1)/2 multiplications regardless of the value.
  out[0] = 1.0;
  if (power_ >= 1) out[1] = v;
  for (int e = 2; e <= power_; ++e) {
    double p = v;
    for (int i = 2; i <= e; ++i) {
      p *= v;
      ops.mults += 1;
    }
    out[static_cast<std::size_t>(e)] = p;
  }
}

void RepeatedPoleEngine::reanchor(double to) {
  const double shift = to - origin_;
  for (int k = power_; k >= 0; --k) {
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) {
      acc += binom(k, j) * std::pow(-shift, k - j) * accums_[static_cast<std::size_t>(j)];
    }
    residual_[static_cast<std::size_t>(k)] = acc;
  }
  accums_ = residual_;
  origin_ = to;
}

double RepeatedPoleEngine::step(const OutputInstant& out, std::span<const NewInput> inputs) {
  const bool had_prev = seq_.have_output;
  const double t_prev = seq_.t_prev;
  seq_.check(out, inputs);

  const std::size_t channels = accums_.size();
  OpCounters ops;
  double y;
  if (ordering_ == Ordering::kIndexed) {
    std::fill(residual_.begin(), residual_.end(), 0.0);
    for (const NewInput& s : inputs) {
      const double f = xtrack_.factor(s.index, s.tag, s.eps, s.time, s.slot, ops);
      if (!structural_unity(s.index, s.tag)) ops.mults += 1;
      const double w = s.value * f;
      naive_powers(uniform_mode_ ? static_cast<double>(s.index) : -s.time, table_, ops);
      // Channel deposits share the one power table; the per-channel products
      // are off the counted budget.
      for (std::size_t k = 0; k < channels; ++k) residual_[k] += w * table_[k];
    }
    if (!inputs.empty()) {
      for (std::size_t k = 0; k < channels; ++k) accums_[k] += residual_[k];
      // Residual summation and accumulator update are budgeted once across
      // channels.
      ops.adds += (inputs.size() >= 2 ? inputs.size() - 1 : 0) + 1;
    }
    double combo = 0.0;
    if (uniform_mode_) {
      naive_powers(static_cast<double>(out.index), table_, ops);
      for (int k = 0; k <= power_; ++k) {
        double u = beta_[static_cast<std::size_t>(k)];
        const int e = power_ - k;
        if (e > 0) {
          u *= table_[static_cast<std::size_t>(e)];
          ops.mults += 1;
        }
        combo += u * accums_[static_cast<std::size_t>(k)];
        ops.mults += 1;
      }
    } else {
      naive_powers(out.time, table_, ops);
      for (int k = 0; k <= power_; ++k) {
        const int e = power_ - k;
        double u = e > 0 ? table_[static_cast<std::size_t>(e)] : 1.0;
        if (binom_[static_cast<std::size_t>(k)] != 1.0) {
          u *= binom_[static_cast<std::size_t>(k)];
          ops.mults += 1;
        }
        if (u != 1.0) {
          combo += u * accums_[static_cast<std::size_t>(k)];
          ops.mults += 1;
        } else {
          combo += accums_[static_cast<std::size_t>(k)];
        }
      }
    }
    ops.adds += static_cast<std::uint64_t>(power_);
    // The output power update and the final gain*power scaling sit outside
    // the counted budget for this section kind.
    OpCounters scratch;
    const double fy = ytrack_.factor(out.index, out.tag, out.eps, out.time, out.slot, scratch);
    y = gain_ * fy * combo;
  } else {
    if (had_prev) {
      const double d = std::exp(-decay_ * (out.time - t_prev));
      ops.transcendentals += 1;
      for (std::size_t k = 0; k < channels; ++k) accums_[k] *= d;
      ops.mults += channels;
    }
    for (const NewInput& s : inputs) {
      const double tau = s.time - origin_;
      const double e = std::exp(-decay_ * (out.time - s.time));
      ops.transcendentals += 1;
      const double w = s.value * e;
      ops.mults += 1;
      table_[0] = 1.0;
      if (power_ >= 1) table_[1] = tau;
      for (int k = 2; k <= power_; ++k) {
        table_[static_cast<std::size_t>(k)] = table_[static_cast<std::size_t>(k - 1)] * tau;
        ops.mults += 1;
      }
      accums_[0] += w;
      for (int k = 1; k <= power_; ++k) {
        accums_[static_cast<std::size_t>(k)] += w * table_[static_cast<std::size_t>(k)];
        ops.mults += 1;
      }
      ops.adds += channels;
    }
    const double tout = out.time - origin_;
    table_[0] = 1.0;
    if (power_ >= 1) table_[1] = tout;
    for (int k = 2; k <= power_; ++k) {
      table_[static_cast<std::size_t>(k)] = table_[static_cast<std::size_t>(k - 1)] * tout;
      ops.mults += 1;
    }
    double combo = 0.0;
    for (int k = 0; k <= power_; ++k) {
      const int e = power_ - k;
      double term = accums_[static_cast<std::size_t>(k)];
      if (e > 0) {
        term *= table_[static_cast<std::size_t>(e)];
        ops.mults += 1;
      }
      const double c = binom_[static_cast<std::size_t>(k)] * (k % 2 == 0 ? 1.0 : -1.0);
      if (c == -1.0) {
        term = -term;
      } else if (c != 1.0) {
        term *= c;
        ops.mults += 1;
      }
      combo += term;
    }
    ops.adds += static_cast<std::uint64_t>(power_);
    if (gain_ != 1.0) ops.mults += 1;
    y = gain_ * combo;
    ++steps_since_anchor_;
    if (reanchor_interval_ > 0 && steps_since_anchor_ >= reanchor_interval_) {
      reanchor(out.time);
      steps_since_anchor_ = 0;
    }
  }
  totals_ += ops;
  last_ = ops;
  return y;
}

std::vector<std::complex<double>> RepeatedPoleEngine::accumulators() const {
  std::vector<std::complex<double>> v;
  v.reserve(accums_.size());
  for (double a : accums_) v.emplace_back(a, 0.0);
  return v;
}

std::vector<double> RepeatedPoleEngine::output_factors(double t) const {
  std::vector<double> v(accums_.size());
  const double e = gain_ * std::exp(-decay_ * t);
  for (int k = 0; k <= power_; ++k) {
    v[static_cast<std::size_t>(k)] =
        e * binom_[static_cast<std::size_t>(k)] * std::pow(t, power_ - k);
  }
  return v;
}

std::vector<double> RepeatedPoleEngine::input_factors(double tau) const {
  std::vector<double> v(accums_.size());
  const double e = std::exp(decay_ * tau);
  for (int k = 0; k <= power_; ++k) {
    v[static_cast<std::size_t>(k)] = e * std::pow(-tau, k);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Facade
// ---------------------------------------------------------------------------

namespace {

std::variant<FirstOrderEngine, SecondOrderEngine, RepeatedPoleEngine> make_engine(
    const Section& section, Ordering ordering, const GridProfile& input, const GridProfile& output,
    std::uint64_t reanchor_interval) {
  using V = std::variant<FirstOrderEngine, SecondOrderEngine, RepeatedPoleEngine>;
  return std::visit(
      [&](const auto& s) -> V {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FirstOrderSection>) {
          return FirstOrderEngine(s, ordering, input, output);
        } else if constexpr (std::is_same_v<T, SecondOrderSection>) {
          return SecondOrderEngine(s, ordering, input, output);
        } else {
          return RepeatedPoleEngine(s, ordering, input, output, reanchor_interval);
        }
      },
      section);
}

}  // namespace

SectionEngine::SectionEngine(const Section& section, Ordering ordering, const GridProfile& input,
                             const GridProfile& output, std::uint64_t reanchor_interval)
    : impl_(make_engine(section, ordering, input, output, reanchor_interval)) {}

double SectionEngine::step(const OutputInstant& out, std::span<const NewInput> inputs) {
  return std::visit([&](auto& e) { return e.step(out, inputs); }, impl_);
}

const OpCounters& SectionEngine::totals() const {
  return std::visit([](const auto& e) -> const OpCounters& { return e.totals(); }, impl_);
}

const OpCounters& SectionEngine::setup() const {
  return std::visit([](const auto& e) -> const OpCounters& { return e.setup(); }, impl_);
}

OpCounters SectionEngine::last_step() const {
  return std::visit([](const auto& e) { return e.last_step(); }, impl_);
}

std::vector<std::complex<double>> SectionEngine::accumulators() const {
  return std::visit([](const auto& e) { return e.accumulators(); }, impl_);
}

}  // namespace nusrc
