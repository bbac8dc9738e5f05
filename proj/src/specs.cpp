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

#include "nusrc/specs.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

namespace nusrc {

namespace {

using nlohmann::json;

double period_from(const json& spec) {
  const bool has_rate = spec.contains("rate");
  const bool has_period = spec.contains("period");
  if (has_rate == has_period) {
    throw std::invalid_argument("grid spec needs exactly one of \"rate\" or \"period\"");
  }
  if (has_rate) {
    const double rate = spec.at("rate").get<double>();
    if (!(rate > 0.0)) {
      throw std::invalid_argument("grid rate must be positive");
    }
    return 1.0 / rate;
  }
  return spec.at("period").get<double>();
}

std::size_t count_from(const json& spec) {
  if (!spec.contains("count")) {
    throw std::invalid_argument("grid spec needs \"count\"");
  }
  return spec.at("count").get<std::size_t>();
}

void reject_extra_generators(const json& spec, std::initializer_list<const char*> keys,
                             const char* chosen) {
  int present = 0;
  for (const char* k : keys) {
    if (spec.contains(k)) ++present;
  }
  if (present > 1) {
    throw std::invalid_argument(std::string("grid spec mixes generators; keep only \"") + chosen +
                                "\"");
  }
}

std::complex<double> complex_from(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) {
    return {v.at(0).get<double>(), v.at(1).get<double>()};
  }
  throw std::invalid_argument("complex entries must be numbers or [re, im] pairs");
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

}  // namespace

TimeGrid grid_from_spec(const json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "uniform") {
    return TimeGrid::uniform(period_from(spec), count_from(spec));
  }
  if (kind == "epsilon") {
    const double period = period_from(spec);
    reject_extra_generators(spec, {"factors", "drift_ppm"}, "factors");
    if (spec.contains("factors")) {
      return TimeGrid::from_epsilons(period, spec.at("factors").get<std::vector<double>>());
    }
    if (spec.contains("drift_ppm")) {
      const double drift = spec.at("drift_ppm").get<double>();
      std::vector<double> factors(count_from(spec), 1.0 + drift * 1e-6);
      return TimeGrid::from_epsilons(period, std::move(factors));
    }
    throw std::invalid_argument("epsilon grid needs \"factors\" or \"drift_ppm\"");
  }
  if (kind == "offset") {
    const double period = period_from(spec);
    reject_extra_generators(spec, {"offsets", "pattern", "jitter_frac"}, "offsets");
    if (spec.contains("offsets")) {
      return TimeGrid::from_offsets(period, spec.at("offsets").get<std::vector<double>>());
    }
    if (spec.contains("pattern")) {
      const auto pattern = spec.at("pattern").get<std::vector<double>>();
      if (pattern.empty()) {
        throw std::invalid_argument("offset pattern must not be empty");
      }
      const std::size_t count = count_from(spec);
      std::vector<double> offsets(count);
      for (std::size_t i = 0; i < count; ++i) offsets[i] = pattern[i % pattern.size()];
      return TimeGrid::from_offsets(period, std::move(offsets));
    }
    if (spec.contains("jitter_frac")) {
      const double jitter = spec.at("jitter_frac").get<double>();
      if (!(jitter >= 0.0) || jitter >= 0.5) {
        throw std::invalid_argument("jitter_frac must lie in [0, 0.5)");
      }
      const std::uint64_t seed = spec.value("seed", std::uint64_t{1});
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> dist(-jitter, jitter);
      std::vector<double> offsets(count_from(spec));
      for (double& d : offsets) d = dist(rng);
      return TimeGrid::from_offsets(period, std::move(offsets));
    }
    throw std::invalid_argument("offset grid needs \"offsets\", \"pattern\", or \"jitter_frac\"");
  }
  if (kind == "timestamps") {
    return TimeGrid::from_timestamps(spec.at("times").get<std::vector<double>>());
  }
  throw std::invalid_argument("unknown grid kind \"" + kind + "\"");
}

RationalTF tf_from_spec(const json& spec) {
  if (spec.value("type", std::string{}) == "butterworth") {
    return butterworth_lowpass(spec.at("order").get<int>(), spec.at("cutoff_hz").get<double>());
  }
  RationalTF tf;
  tf.gain = spec.value("gain", 1.0);
  for (const json& p : spec.at("poles")) tf.poles.push_back(complex_from(p));
  if (spec.contains("zeros")) {
    for (const json& z : spec.at("zeros")) tf.zeros.push_back(complex_from(z));
  }
  tf.validate();
  return tf;
}

const char* ordering_name(Ordering ordering) {
  return ordering == Ordering::kIndexed ? "indexed" : "rebased";
}

Ordering parse_ordering(const std::string& name) {
  if (name == "indexed") return Ordering::kIndexed;
  if (name == "rebased") return Ordering::kRebased;
  throw std::invalid_argument("unknown ordering \"" + name + "\" (use rebased or indexed)");
}

json counters_json(const OpCounters& c) {
  return json{{"mults", c.mults},
              {"adds", c.adds},
              {"exps", c.exps},
              {"transcendentals", c.transcendentals}};
}

json report_json(const ConversionReport& report) {
  json j{{"ordering", ordering_name(report.ordering)},
         {"output_count", report.outputs.size()},
         {"setup", counters_json(report.setup)},
         {"totals", counters_json(report.totals)},
         {"terms", json{{"min", report.terms_min},
                        {"max", report.terms_max},
                        {"mean", report.terms_mean}}}};
  if (!report.steps.empty()) {
    const double n = static_cast<double>(report.steps.size());
    j["per_step_mean"] = json{{"mults", static_cast<double>(report.totals.mults) / n},
                              {"adds", static_cast<double>(report.totals.adds) / n},
                              {"exps", static_cast<double>(report.totals.exps) / n},
                              {"transcendentals",
                               static_cast<double>(report.totals.transcendentals) / n}};
  }
  if (report.max_relative_error) {
    j["max_relative_error"] = *report.max_relative_error;
  }
  return j;
}

json filter_json(const RationalTF& tf, const ParallelForm& form) {
  json poles = json::array();
  for (const auto& p : tf.poles) poles.push_back(complex_json(p));
  json zeros = json::array();
  for (const auto& z : tf.zeros) zeros.push_back(complex_json(z));
  json sections = json::array();
  for (const Section& s : form.sections) {
    if (const auto* f = std::get_if<FirstOrderSection>(&s)) {
      sections.push_back(json{{"kind", "first_order"}, {"gain", f->gain}, {"decay", f->decay}});
    } else if (const auto* q = std::get_if<SecondOrderSection>(&s)) {
      sections.push_back(json{{"kind", "second_order"},
                              {"gain", q->gain},
                              {"decay", q->decay},
                              {"omega", q->omega},
                              {"phase", q->phase}});
    } else {
      const auto& r = std::get<RepeatedPoleSection>(s);
      sections.push_back(json{{"kind", "repeated_pole"},
                              {"gain", r.gain},
                              {"decay", r.decay},
                              {"power", r.power}});
    }
  }
  return json{{"gain", tf.gain}, {"poles", poles}, {"zeros", zeros}, {"sections", sections}};
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  return json::parse(in);
}

}  // namespace nusrc
