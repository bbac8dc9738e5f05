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

#include "nusrc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "nusrc/stable_sum.hpp"

namespace nusrc {

namespace {

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NUSRC_THREADS")) {
    const unsigned long cap = std::strtoul(env, nullptr, 10);
    if (cap >= 1) n = std::min<std::size_t>(n, cap);
  }
  return std::min(n, std::max<std::size_t>(jobs, 1));
}

}  // namespace

std::vector<double> oracle_convert(std::span<const double> input, const TimeGrid& input_grid,
                                   const TimeGrid& output_grid, const ParallelForm& form) {
  validate(form);
  if (input.size() != input_grid.size()) {
    throw std::invalid_argument("input has " + std::to_string(input.size()) +
                                " samples but the grid has " + std::to_string(input_grid.size()) +
                                " instants");
  }
  const std::size_t m_total = output_grid.size();
  std::vector<double> y(m_total, 0.0);

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      const double t = output_grid[m];
      StableSum acc;
      for (std::size_t n = 0; n < input.size(); ++n) {
        const double tau = input_grid[n];
        if (tau > t) break;
        acc.add(input[n] * eval_impulse(form, t - tau));
      }
      y[m] = acc.value();
    }
  };

  const std::size_t workers = worker_count(m_total);
  if (workers <= 1 || m_total < 2 * workers) {
    run(0, m_total);
    return y;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (m_total + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = std::min(w * chunk, m_total);
    const std::size_t end = std::min(begin + chunk, m_total);
    if (begin < end) pool.emplace_back(run, begin, end);
  }
  run(0, std::min(chunk, m_total));
  for (std::thread& t : pool) t.join();
  return y;
}

WindowCounts oracle_counts(const TimeGrid& input_grid, const TimeGrid& output_grid) {
  WindowCounts wc;
  wc.lambda.resize(output_grid.size());
  wc.terms.resize(output_grid.size());
  for (std::size_t m = 0; m < output_grid.size(); ++m) {
    const double t = output_grid[m];
    std::optional<std::size_t> lam;
    for (std::size_t n = 0; n < input_grid.size(); ++n) {
      if (input_grid[n] <= t) lam = n;
    }
    wc.lambda[m] = lam;
    std::size_t count = 0;
    for (std::size_t n = 0; n < input_grid.size(); ++n) {
      const double tau = input_grid[n];
      const bool after_prev = m == 0 || tau > output_grid[m - 1];
      if (after_prev && tau <= t) ++count;
    }
    wc.terms[m] = count;
  }
  return wc;
}

double relative_error_vs_rms(std::span<const double> actual, std::span<const double> reference) {
  if (actual.size() != reference.size()) {
    throw std::invalid_argument("size mismatch: " + std::to_string(actual.size()) + " vs " +
                                std::to_string(reference.size()));
  }
  if (reference.empty()) return 0.0;
  double peak = 0.0;
  StableSum sq;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    peak = std::max(peak, std::abs(actual[i] - reference[i]));
    sq.add(reference[i] * reference[i]);
  }
  const double rms = std::sqrt(sq.value() / static_cast<double>(reference.size()));
  return rms > 0.0 ? peak / rms : peak;
}

}  // namespace nusrc
