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

#ifndef NUSRC_FILTER_DESIGN_HPP_
#define NUSRC_FILTER_DESIGN_HPP_

#include <complex>
#include <variant>
#include <vector>

namespace nusrc {

/// Continuous-time rational transfer function in zero-pole-gain form.
/// Must be strictly proper (more poles than zeros) and stable (all poles in
/// the open left half-plane); non-real zeros and poles must come in exact
/// conjugate pairs so the impulse response is real.
struct RationalTF {
  double gain = 1.0;
  std::vector<std::complex<double>> zeros;
  std::vector<std::complex<double>> poles;

  void validate() const;  // throws std::invalid_argument on violations
};

/// Impulse response gain * exp(-decay * t) for t >= 0.
struct FirstOrderSection {
  double gain = 0.0;
  double decay = 0.0;  // > 0
};

/// Impulse response gain * exp(-decay * t) * sin(omega * t + phase), t >= 0.
/// Canonical form keeps omega > 0 and gain >= 0.
struct SecondOrderSection {
  double gain = 0.0;
  double decay = 0.0;  // > 0
  double omega = 0.0;  // > 0
  double phase = 0.0;
};

/// Impulse response gain * t^power * exp(-decay * t) for t >= 0, power >= 1.
struct RepeatedPoleSection {
  double gain = 0.0;
  double decay = 0.0;  // > 0
  int power = 1;
};

using Section = std::variant<FirstOrderSection, SecondOrderSection, RepeatedPoleSection>;

/// Parallel bank of exponentially decaying sections; the modeled impulse
/// response is the sum of the per-section responses.
struct ParallelForm {
  std::vector<Section> sections;
};

void validate(const ParallelForm& form);  // throws std::invalid_argument

/// Classic lowpass prototype: `order` poles on the left-half circle of radius
/// 2*pi*cutoff_hz, unit DC gain, no zeros, half-power point at the cutoff.
RationalTF butterworth_lowpass(int order, double cutoff_hz);

/// Partial-fraction expansion into parallel sections. Residues are computed
/// by deflation (Taylor series of the deflated function around each pole
/// cluster), never by solving a linear system. Poles within a relative
/// distance of 1e-9 are treated as one repeated pole; repeated non-real pole
/// clusters are out of scope and rejected.
ParallelForm partial_fractions(const RationalTF& tf);

/// H evaluated at s = j*omega.
std::complex<double> frequency_response(const RationalTF& tf, double omega);

/// Section/bank impulse response at time t; zero for t < 0, and the
/// discontinuity at t == 0 takes the right-limit value (the t = 0 sample is
/// included).
double eval_impulse(const Section& section, double t);
double eval_impulse(const ParallelForm& form, double t);

}  // namespace nusrc

#endif  // NUSRC_FILTER_DESIGN_HPP_
