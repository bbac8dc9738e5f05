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

#include "nusrc/filter_design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nusrc {

namespace {

using cplx = std::complex<double>;

constexpr double kPoleClusterTol = 1e-9;

bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_conjugate_paired(const std::vector<cplx>& roots, const char* what) {
  // Every non-real root must have an exact conjugate partner, with matching
  // multiplicities.
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i] || roots[i].imag() == 0.0) continue;
    bool found = false;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (j == i || used[j]) continue;
      if (roots[j] == std::conj(roots[i])) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument(std::string(what) + " " + std::to_string(i) +
                                  " has no exact conjugate partner");
    }
  }
}

// Polynomial coefficients are stored ascending in u. Multiplies by (u + c).
std::vector<cplx> mul_linear(const std::vector<cplx>& p, cplx c) {
  std::vector<cplx> out(p.size() + 1, cplx(0.0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] += p[i] * c;
    out[i + 1] += p[i];
  }
  return out;
}

std::vector<cplx> series_inverse(const std::vector<cplx>& d, std::size_t terms) {
  std::vector<cplx> inv(terms, cplx(0.0));
  inv[0] = 1.0 / d[0];
  for (std::size_t k = 1; k < terms; ++k) {
    cplx acc(0.0);
    for (std::size_t i = 1; i <= k; ++i) {
      const cplx di = i < d.size() ? d[i] : cplx(0.0);
      acc += di * inv[k - i];
    }
    inv[k] = -acc / d[0];
  }
  return inv;
}

std::vector<cplx> series_mul(const std::vector<cplx>& a, const std::vector<cplx>& b,
                             std::size_t terms) {
  std::vector<cplx> out(terms, cplx(0.0));
  for (std::size_t i = 0; i < std::min(a.size(), terms); ++i) {
    for (std::size_t j = 0; i + j < terms && j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double real_checked(cplx z, const char* what) {
  const double scale = std::max(std::abs(z), 1e-300);
  if (std::abs(z.imag()) > 1e-6 * scale) {
    throw std::runtime_error(std::string("expected real ") + what + ", got imaginary part " +
                             std::to_string(z.imag()));
  }
  return z.real();
}

struct PoleCluster {
  cplx rep;                 // running mean of members
  std::vector<cplx> members;
};

std::vector<PoleCluster> cluster_poles(const std::vector<cplx>& poles) {
  std::vector<PoleCluster> clusters;
  for (const cplx& p : poles) {
    PoleCluster* home = nullptr;
    for (PoleCluster& c : clusters) {
      const double scale = std::max({std::abs(p), std::abs(c.rep), 1e-300});
      if (std::abs(p - c.rep) <= kPoleClusterTol * scale) {
        home = &c;
        break;
      }
    }
    if (home == nullptr) {
      clusters.push_back({p, {p}});
    } else {
      home->members.push_back(p);
      cplx mean(0.0);
      for (const cplx& m : home->members) mean += m;
      home->rep = mean / static_cast<double>(home->members.size());
    }
  }
  std::sort(clusters.begin(), clusters.end(), [](const PoleCluster& a, const PoleCluster& b) {
    if (a.rep.real() != b.rep.real()) return a.rep.real() < b.rep.real();
    if (std::abs(a.rep.imag()) != std::abs(b.rep.imag()))
      return std::abs(a.rep.imag()) < std::abs(b.rep.imag());
    return a.rep.imag() > b.rep.imag();
  });
  return clusters;
}

double wrap_phase(double phi) {
  const double tau = 2.0 * std::numbers::pi;
  return std::remainder(phi, tau);
}

}  // namespace

void RationalTF::validate() const {
  if (!std::isfinite(gain)) {
    throw std::invalid_argument("transfer function gain must be finite");
  }
  if (poles.size() <= zeros.size()) {
    throw std::invalid_argument("transfer function must be strictly proper: " +
                                std::to_string(poles.size()) + " poles vs " +
                                std::to_string(zeros.size()) + " zeros");
  }
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (!is_finite(poles[i])) {
      throw std::invalid_argument("non-finite pole at index " + std::to_string(i));
    }
    if (!(poles[i].real() < 0.0)) {
      throw std::invalid_argument("unstable pole at index " + std::to_string(i) +
                                  " (real part " + std::to_string(poles[i].real()) + ")");
    }
  }
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    if (!is_finite(zeros[i])) {
      throw std::invalid_argument("non-finite zero at index " + std::to_string(i));
    }
  }
  require_conjugate_paired(poles, "pole");
  require_conjugate_paired(zeros, "zero");
}

void validate(const ParallelForm& form) {
  for (std::size_t i = 0; i < form.sections.size(); ++i) {
    const auto check_decay = [&](double decay) {
      if (!(decay > 0.0) || !std::isfinite(decay)) {
        throw std::invalid_argument("section " + std::to_string(i) +
                                    ": decay must be positive, got " + std::to_string(decay));
      }
    };
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if (!std::isfinite(s.gain)) {
            throw std::invalid_argument("section " + std::to_string(i) + ": non-finite gain");
          }
          check_decay(s.decay);
          if constexpr (std::is_same_v<T, SecondOrderSection>) {
            if (!(s.omega > 0.0) || !std::isfinite(s.omega)) {
              throw std::invalid_argument("section " + std::to_string(i) +
                                          ": omega must be positive");
            }
            if (!std::isfinite(s.phase)) {
              throw std::invalid_argument("section " + std::to_string(i) + ": non-finite phase");
            }
          }
          if constexpr (std::is_same_v<T, RepeatedPoleSection>) {
            if (s.power < 1) {
              throw std::invalid_argument("section " + std::to_string(i) +
                                          ": repeated-pole power must be >= 1, got " +
                                          std::to_string(s.power));
            }
          }
        },
        form.sections[i]);
  }
}

RationalTF butterworth_lowpass(int order, double cutoff_hz) {
  if (order < 1) {
    throw std::invalid_argument("filter order must be >= 1, got " + std::to_string(order));
  }
  if (!(cutoff_hz > 0.0) || !std::isfinite(cutoff_hz)) {
    throw std::invalid_argument("cutoff frequency must be positive, got " +
                                std::to_string(cutoff_hz));
  }
  const double wc = 2.0 * std::numbers::pi * cutoff_hz;
  RationalTF tf;
  tf.gain = std::pow(wc, order);
  // Poles sit at wc * exp(j*pi*(2k + order - 1) / (2*order)); build conjugate
  // pairs from one half so partners match exactly, with the odd-order middle
  // pole placed exactly on the real axis.
  for (int k = 1; 2 * k <= order; ++k) {
    const double theta =
        std::numbers::pi * static_cast<double>(2 * k + order - 1) / static_cast<double>(2 * order);
    const cplx p = wc * cplx(std::cos(theta), std::sin(theta));
    tf.poles.push_back(p);
    tf.poles.push_back(std::conj(p));
  }
  if (order % 2 == 1) {
    tf.poles.push_back(cplx(-wc, 0.0));
  }
  return tf;
}

ParallelForm partial_fractions(const RationalTF& tf) {
  tf.validate();
  ParallelForm form;
  const auto clusters = cluster_poles(tf.poles);

  for (const PoleCluster& cluster : clusters) {
    const std::size_t q = cluster.members.size();
    const cplx s0 = cluster.rep;
    const double rep_scale = std::max(std::abs(s0), 1e-300);
    const bool real_cluster = std::abs(s0.imag()) <= kPoleClusterTol * rep_scale;

    if (!real_cluster && q > 1) {
      throw std::invalid_argument(
          "repeated non-real pole cluster near (" + std::to_string(s0.real()) + ", " +
          std::to_string(s0.imag()) + ") is not supported by the parallel section forms");
    }
    if (!real_cluster && s0.imag() < 0.0) {
      continue;  // conjugate partner of an already-emitted section
    }

    // Taylor coefficients of the deflated function around s0: remove this
    // cluster's factors from the denominator and expand the rest in u = s-s0.
    std::vector<cplx> num{cplx(tf.gain)};
    for (const cplx& z : tf.zeros) num = mul_linear(num, s0 - z);
    std::vector<cplx> den{cplx(1.0)};
    for (const PoleCluster& other : clusters) {
      if (&other == &cluster) continue;
      for (const cplx& p : other.members) den = mul_linear(den, s0 - p);
    }
    const auto series = series_mul(num, series_inverse(den, q), q);

    if (real_cluster) {
      const double alpha = -s0.real();
      for (std::size_t j = 1; j <= q; ++j) {
        const double r = real_checked(series[q - j], "residue");
        if (j == 1) {
          form.sections.push_back(FirstOrderSection{r, alpha});
        } else {
          const int power = static_cast<int>(j) - 1;
          form.sections.push_back(RepeatedPoleSection{r / factorial(power), alpha, power});
        }
      }
    } else {
      const cplx r = series[0];
      SecondOrderSection s;
      s.gain = 2.0 * std::abs(r);
      s.decay = -s0.real();
      s.omega = s0.imag();
      s.phase = wrap_phase(std::arg(r) + std::numbers::pi / 2.0);
      form.sections.push_back(s);
    }
  }

  validate(form);
  return form;
}

std::complex<double> frequency_response(const RationalTF& tf, double omega) {
  const cplx s(0.0, omega);
  cplx num(tf.gain);
  for (const cplx& z : tf.zeros) num *= s - z;
  cplx den(1.0);
  for (const cplx& p : tf.poles) den *= s - p;
  return num / den;
}

double eval_impulse(const Section& section, double t) {
  if (t < 0.0) return 0.0;
  return std::visit(
      [t](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FirstOrderSection>) {
          return s.gain * std::exp(-s.decay * t);
        } else if constexpr (std::is_same_v<T, SecondOrderSection>) {
          return s.gain * std::exp(-s.decay * t) * std::sin(s.omega * t + s.phase);
        } else {
          return s.gain * std::pow(t, s.power) * std::exp(-s.decay * t);
        }
      },
      section);
}

double eval_impulse(const ParallelForm& form, double t) {
  if (t < 0.0) return 0.0;
  double acc = 0.0;
  for (const Section& s : form.sections) acc += eval_impulse(s, t);
  return acc;
}

}  // namespace nusrc
