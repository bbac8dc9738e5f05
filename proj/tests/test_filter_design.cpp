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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include "nusrc/filter_design.hpp"
#include "support/ode_oracle.hpp"
#include "support/scenarios.hpp"

using namespace nusrc;
using nusrc_test::random_tf;
using nusrc_test::repeated_pole_tf;

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Laplace transform of one section evaluated at s.
std::complex<double> section_transform(const Section& sec, std::complex<double> s) {
  if (const auto* f = std::get_if<FirstOrderSection>(&sec)) {
    return f->gain / (s + f->decay);
  }
  if (const auto* f = std::get_if<SecondOrderSection>(&sec)) {
    const std::complex<double> sa = s + f->decay;
    return f->gain * (std::sin(f->phase) * sa + f->omega * std::cos(f->phase)) /
           (sa * sa + f->omega * f->omega);
  }
  const auto& f = std::get<RepeatedPoleSection>(sec);
  return f.gain * factorial(f.power) / std::pow(s + f.decay, f.power + 1);
}

std::complex<double> form_transform(const ParallelForm& form, std::complex<double> s) {
  std::complex<double> acc(0.0, 0.0);
  for (const auto& sec : form.sections) acc += section_transform(sec, s);
  return acc;
}

std::complex<double> zpk_transform(const RationalTF& tf, std::complex<double> s) {
  std::complex<double> acc = tf.gain;
  for (const auto& z : tf.zeros) acc *= s - z;
  for (const auto& p : tf.poles) acc /= s - p;
  return acc;
}

}  // namespace

TEST_CASE("first-order lowpass design places one pole at the angular cutoff") {
  const double fc = 1234.5;
  const RationalTF tf = butterworth_lowpass(1, fc);
  REQUIRE(tf.poles.size() == 1);
  CHECK(tf.zeros.empty());
  const double wc = 2.0 * kPi * fc;
  CHECK(tf.poles[0].real() == doctest::Approx(-wc).epsilon(1e-14));
  CHECK(tf.poles[0].imag() == 0.0);
  CHECK(tf.gain == doctest::Approx(wc).epsilon(1e-14));
}

TEST_CASE("third-order 20 kHz design reproduces the reference constants") {
  const RationalTF tf = butterworth_lowpass(3, 20000.0);
  REQUIRE(tf.poles.size() == 3);
  CHECK(tf.zeros.empty());
  CHECK(std::abs(tf.gain - 1984401707539188.5) <= 1e-10 * 1984401707539188.5);

  double real_pole = 0.0;
  std::complex<double> upper(0.0, 0.0);
  for (const auto& p : tf.poles) {
    if (p.imag() == 0.0) real_pole = p.real();
    if (p.imag() > 0.0) upper = p;
  }
  CHECK(std::abs(real_pole - -125663.70614359) <= 1e-10 * 125663.70614359);
  CHECK(std::abs(upper.real() - -62831.8530718) <= 1e-10 * 62831.8530718);
  CHECK(std::abs(upper.imag() - 108827.96185405) <= 1e-10 * 108827.96185405);
  // Conjugate symmetry is exact, not approximate.
  const auto lower = *std::find_if(tf.poles.begin(), tf.poles.end(),
                                   [](const std::complex<double>& p) { return p.imag() < 0.0; });
  CHECK(lower == std::conj(upper));
}

TEST_CASE("lowpass magnitude is 1 at DC and half power at the cutoff") {
  for (const int order : {1, 2, 3, 5, 8}) {
    const RationalTF tf = butterworth_lowpass(order, 20000.0);
    const double dc = std::abs(frequency_response(tf, 0.0));
    CHECK(std::abs(dc - 1.0) <= 1e-12);
    const double wc = 2.0 * kPi * 20000.0;
    const double half = std::norm(frequency_response(tf, wc));
    CHECK(std::abs(half - 0.5) <= 1e-9);
    // Monotone rolloff: an octave above the cutoff is well below half power.
    CHECK(std::norm(frequency_response(tf, 2.0 * wc)) < 0.25);
  }
  CHECK_THROWS_AS(butterworth_lowpass(0, 1000.0), std::invalid_argument);
  CHECK_THROWS_AS(butterworth_lowpass(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(butterworth_lowpass(-2, 1000.0), std::invalid_argument);
}

TEST_CASE("transfer function validation rejects malformed inputs") {
  RationalTF unstable;
  unstable.poles = {{0.5, 0.0}};
  CHECK_THROWS_AS(unstable.validate(), std::invalid_argument);

  RationalTF marginal;
  marginal.poles = {{0.0, 1.0}, {0.0, -1.0}};
  CHECK_THROWS_AS(marginal.validate(), std::invalid_argument);

  RationalTF improper;
  improper.poles = {{-1.0, 0.0}};
  improper.zeros = {{-2.0, 0.0}};
  CHECK_THROWS_AS(improper.validate(), std::invalid_argument);  // equal counts

  RationalTF unpaired;
  unpaired.poles = {{-1.0, 2.0}, {-1.0, 0.0}};
  CHECK_THROWS_AS(unpaired.validate(), std::invalid_argument);

  RationalTF good;
  good.poles = {{-1.0, 2.0}, {-1.0, -2.0}, {-0.5, 0.0}};
  good.zeros = {{-3.0, 0.0}};
  CHECK_NOTHROW(good.validate());
}

TEST_CASE("single-pole expansion is the identity") {
  RationalTF tf;
  tf.gain = 1.0;
  tf.poles = {{-7.25, 0.0}};
  const ParallelForm form = partial_fractions(tf);
  REQUIRE(form.sections.size() == 1);
  const auto& fo = std::get<FirstOrderSection>(form.sections[0]);
  CHECK(fo.gain == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(fo.decay == doctest::Approx(7.25).epsilon(1e-13));
}

TEST_CASE("double real pole expands to a single repeated-pole section") {
  RationalTF tf;
  tf.gain = 1.0;
  tf.poles = {{-3.0, 0.0}, {-3.0, 0.0}};
  const ParallelForm form = partial_fractions(tf);
  // 1/(s+3)^2 has impulse response t e^{-3t}: the ramp section carries the
  // whole response and the simple-pole residue at the cluster is zero.
  double peak_first = 0.0;
  const RepeatedPoleSection* rp = nullptr;
  for (const auto& s : form.sections) {
    if (const auto* f = std::get_if<FirstOrderSection>(&s)) {
      peak_first = std::max(peak_first, std::abs(f->gain));
    }
    if (const auto* f = std::get_if<RepeatedPoleSection>(&s)) rp = f;
  }
  REQUIRE(rp != nullptr);
  CHECK(rp->power == 1);
  CHECK(rp->gain == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rp->decay == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(peak_first <= 1e-12);
}

TEST_CASE("third-order reference design expands to one real and one oscillatory section") {
  const ParallelForm form = partial_fractions(butterworth_lowpass(3, 20000.0));
  REQUIRE(form.sections.size() == 2);
  const auto& fo = std::get<FirstOrderSection>(form.sections[0]);
  const auto& so = std::get<SecondOrderSection>(form.sections[1]);

  const double wc = 2.0 * kPi * 20000.0;
  CHECK(std::abs(fo.gain - 125663.70614360292) <= 1e-10 * 125663.70614360292);
  CHECK(fo.decay == doctest::Approx(wc).epsilon(1e-12));

  // Residue algebra for the conjugate pair gives amplitude 2 wc / sqrt(3),
  // decay wc/2, frequency wc sqrt(3)/2, phase -pi/3.
  CHECK(so.gain == doctest::Approx(2.0 * wc / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(so.decay == doctest::Approx(wc / 2.0).epsilon(1e-12));
  CHECK(so.omega == doctest::Approx(wc * std::sqrt(3.0) / 2.0).epsilon(1e-12));
  CHECK(so.phase == doctest::Approx(-kPi / 3.0).epsilon(1e-12));
}

TEST_CASE("repeated complex pole clusters are rejected") {
  RationalTF tf;
  tf.gain = 1.0;
  tf.poles = {{-1.0, 2.0}, {-1.0, -2.0}, {-1.0, 2.0}, {-1.0, -2.0}};
  CHECK_NOTHROW(tf.validate());
  CHECK_THROWS_AS(partial_fractions(tf), std::invalid_argument);
}

TEST_CASE("impulse response is causal and takes the right-limit value at zero") {
  CHECK(eval_impulse(Section{FirstOrderSection{2.0, 1.0}}, -1e-12) == 0.0);
  CHECK(eval_impulse(Section{FirstOrderSection{2.0, 1.0}}, 0.0) == 2.0);
  CHECK(eval_impulse(Section{SecondOrderSection{1.5, 1.0, 2.0, 0.5}}, 0.0) ==
        doctest::Approx(1.5 * std::sin(0.5)).epsilon(1e-15));
  CHECK(eval_impulse(Section{RepeatedPoleSection{1.0, 1.0, 2}}, 0.0) == 0.0);
  CHECK(eval_impulse(Section{RepeatedPoleSection{1.0, 1.0, 2}}, -0.5) == 0.0);
  const double t = 0.37;
  CHECK(eval_impulse(Section{RepeatedPoleSection{1.3, 0.8, 2}}, t) ==
        doctest::Approx(1.3 * t * t * std::exp(-0.8 * t)).epsilon(1e-14));
}

TEST_CASE("section sum matches an independent differential-equation solution") {
  std::mt19937_64 rng(717);
  for (int rep = 0; rep < 10; ++rep) {
    const int order = 1 + rep % 4;
    RationalTF tf;
    if (rep == 7) {
      tf = repeated_pole_tf(rng, 2, 0.4, 1.2);
    } else {
      tf = random_tf(rng, order, 0.3, 3.0, rep % 3 == 0 && order >= 2 ? 1 : 0);
    }
    const ParallelForm form = partial_fractions(tf);

    double min_alpha = 1e300;
    for (const auto& p : tf.poles) min_alpha = std::min(min_alpha, -p.real());
    const double t_max = 10.0 / min_alpha;

    std::vector<double> ts(1000);
    std::uniform_real_distribution<double> tdist(0.0, t_max);
    for (double& t : ts) t = tdist(rng);
    std::sort(ts.begin(), ts.end());

    nusrc_test::OdeImpulseOracle oracle(tf);
    double scale = 0.0;
    std::vector<double> ref(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      ref[i] = oracle.eval(ts[i]);
      scale = std::max(scale, std::abs(ref[i]));
    }
    REQUIRE(scale > 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      worst = std::max(worst, std::abs(eval_impulse(form, ts[i]) - ref[i]));
    }
    CHECK(worst <= 1e-9 * scale);
  }
}

TEST_CASE("recombining the sections recovers the original rational function") {
  // Two rational functions of bounded degree that agree at enough points are
  // identical, so the round-trip is checked by evaluation on and near the
  // imaginary axis, away from the poles.
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> re(0.0, 3.0);
  std::uniform_real_distribution<double> im(-8.0, 8.0);
  for (int rep = 0; rep < 40; ++rep) {
    const int order = 1 + rep % 6;
    RationalTF tf;
    if (rep % 8 == 5) {
      tf = repeated_pole_tf(rng, 1 + rep % 3, 0.5, 1.5);
    } else {
      tf = random_tf(rng, order, 0.5, 2.0, rep % 4 == 0 && order >= 3 ? 2 : 0);
    }
    const ParallelForm form = partial_fractions(tf);
    validate(form);
    for (int k = 0; k < 4 * (order + 2); ++k) {
      const std::complex<double> s(re(rng), im(rng));
      const std::complex<double> want = zpk_transform(tf, s);
      const std::complex<double> got = form_transform(form, s);
      CHECK(std::abs(got - want) <= 1e-9 * std::abs(want));
    }
  }
}

TEST_CASE("parallel form validation rejects bad section parameters") {
  ParallelForm bad;
  bad.sections.push_back(FirstOrderSection{1.0, -0.5});
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  ParallelForm bad2;
  bad2.sections.push_back(SecondOrderSection{1.0, 0.5, 0.0, 0.0});
  CHECK_THROWS_AS(validate(bad2), std::invalid_argument);

  ParallelForm bad3;
  bad3.sections.push_back(RepeatedPoleSection{1.0, 0.5, 0});
  CHECK_THROWS_AS(validate(bad3), std::invalid_argument);

  ParallelForm ok;
  ok.sections.push_back(FirstOrderSection{1.0, 0.5});
  ok.sections.push_back(SecondOrderSection{1.0, 0.5, 2.0, -0.3});
  ok.sections.push_back(RepeatedPoleSection{1.0, 0.5, 2});
  CHECK_NOTHROW(validate(ok));
}

TEST_CASE("frequency response matches direct pole-zero evaluation") {
  std::mt19937_64 rng(909);
  const RationalTF tf = random_tf(rng, 3, 0.5, 2.0, 1);
  for (double w : {0.0, 0.3, 1.7, 12.0}) {
    const std::complex<double> got = frequency_response(tf, w);
    const std::complex<double> manual = zpk_transform(tf, {0.0, w});
    CHECK(std::abs(got - manual) <= 1e-13 * std::abs(manual));
  }
}
