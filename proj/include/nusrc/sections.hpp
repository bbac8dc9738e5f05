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

#ifndef NUSRC_SECTIONS_HPP_
#define NUSRC_SECTIONS_HPP_

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "nusrc/filter_design.hpp"
#include "nusrc/time_grid.hpp"

namespace nusrc {

/// Two mathematically equivalent evaluation orders for the per-section
/// recursions.
///
/// kIndexed anchors powers to the sample indices (state holds base^index for
/// both axes). It makes the operation budget explicit and cheap to audit, but
/// its intermediates grow like exp(decay * t), so it is only usable while
/// |decay * time| stays within double range (~709).
///
/// kRebased anchors the accumulator to the latest output instant (state holds
/// sums of exp(-decay * (t_now - tau)) terms), keeping every stored magnitude
/// bounded by the accumulated input magnitude. It pays one transcendental
/// evaluation per factor instead of a power update and is the production
/// default.
enum class Ordering { kIndexed, kRebased };

/// Real-operation tally. A complex-by-complex product counts as 4
/// multiplications and 2 additions; multiplying by an exact structural unity
/// or raising to the 0th or 1st power is not counted. `exps` counts
/// raise-to-epsilon operations in the indexed ordering (one per off-grid
/// instant), `transcendentals` counts direct exp() evaluations (the rebased
/// ordering's per-step cost, and cached-correction setup).
struct OpCounters {
  std::uint64_t mults = 0;
  std::uint64_t adds = 0;
  std::uint64_t exps = 0;
  std::uint64_t transcendentals = 0;

  OpCounters& operator+=(const OpCounters& o) {
    mults += o.mults;
    adds += o.adds;
    exps += o.exps;
    transcendentals += o.transcendentals;
    return *this;
  }
  friend OpCounters operator-(OpCounters a, const OpCounters& b) {
    a.mults -= b.mults;
    a.adds -= b.adds;
    a.exps -= b.exps;
    a.transcendentals -= b.transcendentals;
    return a;
  }
  bool operator==(const OpCounters&) const = default;
};

/// Recursive power update along one sampling axis: returns
/// (base * prev_power)^eps where prev_power == base^(index-1). Counts one
/// multiplication for index >= 2 (4 multiplications and 2 additions for the
/// complex overload) plus one exponentiation iff eps != 1.
///
/// The complex raise-to-eps uses the principal branch, which is only faithful
/// while the accumulated phase stays within (-pi, pi]; the section engines
/// therefore evaluate off-grid complex factors directly from the timestamp
/// instead of going through this helper.
double update_power(double prev_power, double base, std::size_t index, double eps,
                    OpCounters& ops);
std::complex<double> update_power(std::complex<double> prev_power, std::complex<double> base,
                                  std::size_t index, double eps, OpCounters& ops);

/// Grid metadata a section engine needs for the indexed ordering: the nominal
/// period (0 when instants are irregular), whether every instant is exactly
/// index * period, and the repeating offset pattern if one was declared.
struct GridProfile {
  double period = 0.0;
  bool uniform = false;
  std::vector<double> pattern;

  static GridProfile from(const TimeGrid& grid);
  static GridProfile irregular() { return {}; }
  static GridProfile nominal(double period);
};

/// One input sample handed to a section step, with its instant metadata.
struct NewInput {
  std::size_t index = 0;
  double value = 0.0;
  double time = 0.0;
  InstantTag tag = InstantTag::kIrregular;
  double eps = 1.0;
  int slot = -1;
};

/// The output instant a section step produces a sample for.
struct OutputInstant {
  std::size_t index = 0;
  double time = 0.0;
  InstantTag tag = InstantTag::kIrregular;
  double eps = 1.0;
  int slot = -1;
};

namespace detail {

/// Maintains base^index along one axis and produces per-instant factors
/// (plain power, raised-to-eps, pattern-corrected, or evaluated directly),
/// counting operations per the documented cost model. `rate` is the exponent
/// coefficient: the irregular-instant factor is exp(rate * time).
template <typename Scalar>
class PowerTrack {
 public:
  PowerTrack() = default;
  PowerTrack(Scalar rate, double period, std::span<const double> pattern, bool count_adds,
             OpCounters& setup);

  Scalar factor(std::size_t index, InstantTag tag, double eps, double time, int slot,
                OpCounters& ops);

 private:
  Scalar rate_{};
  Scalar base_{1.0};
  Scalar power_{1.0};
  std::vector<Scalar> corrections_;
  bool has_base_ = false;
  bool count_adds_ = true;
  bool started_ = false;
  std::size_t last_index_ = 0;
};

/// Shared step bookkeeping: enforces contiguous input indices, strictly
/// increasing instants, and the new-inputs-belong-to-this-window contract.
struct StepSequencer {
  bool have_output = false;
  double t_prev = 0.0;
  std::size_t next_input = 0;
  std::size_t next_output = 0;
  double last_input_time = 0.0;
  bool have_input = false;

  void check(const OutputInstant& out, std::span<const NewInput> inputs);
};

}  // namespace detail

class FirstOrderEngine {
 public:
  FirstOrderEngine(const FirstOrderSection& section, Ordering ordering, const GridProfile& input,
                   const GridProfile& output);

  double step(const OutputInstant& out, std::span<const NewInput> inputs);

  const OpCounters& totals() const { return totals_; }
  const OpCounters& setup() const { return setup_; }
  OpCounters last_step() const { return last_; }
  std::vector<std::complex<double>> accumulators() const { return {{accum_, 0.0}}; }

  // Separable kernel factors: output_factor(t) * input_factor(tau) equals the
  // impulse response at t - tau for t >= tau.
  double output_factor(double t) const { return gain_ * std::exp(-decay_ * t); }
  double input_factor(double tau) const { return std::exp(decay_ * tau); }

 private:
  double gain_;
  double decay_;
  Ordering ordering_;
  detail::PowerTrack<double> xtrack_;
  detail::PowerTrack<double> ytrack_;
  double accum_ = 0.0;
  detail::StepSequencer seq_;
  OpCounters totals_;
  OpCounters setup_;
  OpCounters last_;
};

class SecondOrderEngine {
 public:
  SecondOrderEngine(const SecondOrderSection& section, Ordering ordering, const GridProfile& input,
                    const GridProfile& output);

  double step(const OutputInstant& out, std::span<const NewInput> inputs);

  const OpCounters& totals() const { return totals_; }
  const OpCounters& setup() const { return setup_; }
  OpCounters last_step() const { return last_; }
  std::vector<std::complex<double>> accumulators() const { return {accum_}; }

  std::complex<double> output_factor(double t) const { return coeff_ * std::exp(out_rate_ * t); }
  std::complex<double> input_factor(double tau) const { return std::exp(in_rate_ * tau); }
  // The kernel is the imaginary part of the factor product.
  static double combine(std::complex<double> fo, std::complex<double> fi) {
    return (fo * fi).imag();
  }

 private:
  double gain_;
  double decay_;
  double omega_;
  std::complex<double> coeff_;     // gain * exp(j*phase)
  std::complex<double> out_rate_;  // -decay + j*omega
  std::complex<double> in_rate_;   // +decay - j*omega
  Ordering ordering_;
  detail::PowerTrack<std::complex<double>> xtrack_;
  detail::PowerTrack<std::complex<double>> ytrack_;
  std::complex<double> accum_{0.0, 0.0};
  detail::StepSequencer seq_;
  OpCounters totals_;
  OpCounters setup_;
  OpCounters last_;
};

class RepeatedPoleEngine {
 public:
  RepeatedPoleEngine(const RepeatedPoleSection& section, Ordering ordering,
                     const GridProfile& input, const GridProfile& output,
                     std::uint64_t reanchor_interval = 0);

  double step(const OutputInstant& out, std::span<const NewInput> inputs);

  const OpCounters& totals() const { return totals_; }
  const OpCounters& setup() const { return setup_; }
  OpCounters last_step() const { return last_; }
  std::vector<std::complex<double>> accumulators() const;

  // Channelized separable factors: the kernel at t - tau is the dot product
  // of the two channel vectors.
  std::vector<double> output_factors(double t) const;
  std::vector<double> input_factors(double tau) const;

 private:
  double gain_;
  double decay_;
  int power_;
  Ordering ordering_;
  bool uniform_mode_ = false;  // indexed ordering with both axes purely uniform
  std::vector<double> binom_;  // C(power, k)
  std::vector<double> beta_;   // uniform-mode combination coefficients
  detail::PowerTrack<double> xtrack_;
  detail::PowerTrack<double> ytrack_;
  std::vector<double> accums_;
  std::vector<double> residual_;
  std::vector<double> table_;
  std::uint64_t reanchor_interval_ = 0;
  std::uint64_t steps_since_anchor_ = 0;
  double origin_ = 0.0;
  detail::StepSequencer seq_;
  OpCounters totals_;
  OpCounters setup_;
  OpCounters last_;

  void naive_powers(double v, std::vector<double>& out, OpCounters& ops);
  void reanchor(double to);
};

/// Uniform facade over the three engine kinds.
class SectionEngine {
 public:
  SectionEngine(const Section& section, Ordering ordering, const GridProfile& input,
                const GridProfile& output, std::uint64_t reanchor_interval = 0);

  double step(const OutputInstant& out, std::span<const NewInput> inputs);
  const OpCounters& totals() const;
  const OpCounters& setup() const;
  OpCounters last_step() const;
  std::vector<std::complex<double>> accumulators() const;

 private:
  std::variant<FirstOrderEngine, SecondOrderEngine, RepeatedPoleEngine> impl_;
};

}  // namespace nusrc

#endif  // NUSRC_SECTIONS_HPP_
