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

#ifndef NUSRC_SPECS_HPP_
#define NUSRC_SPECS_HPP_

#include <string>

#include "json.hpp"
#include "nusrc/converter.hpp"
#include "nusrc/filter_design.hpp"
#include "nusrc/time_grid.hpp"

namespace nusrc {

/// Builds a grid from a JSON description.
///
///   {"kind": "uniform",    "rate": 48000, "count": 1000}
///   {"kind": "epsilon",    "rate": ..., "factors": [...]}
///   {"kind": "epsilon",    "rate": ..., "count": ..., "drift_ppm": 200}
///   {"kind": "offset",     "rate": ..., "offsets": [...]}
///   {"kind": "offset",     "rate": ..., "count": ..., "pattern": [0.25, 0.2]}
///   {"kind": "offset",     "rate": ..., "count": ..., "jitter_frac": 0.3, "seed": 7}
///   {"kind": "timestamps", "times": [...]}
///
/// "period" (seconds) may replace "rate" (Hz). Exactly one generator per
/// kind is accepted.
TimeGrid grid_from_spec(const nlohmann::json& spec);

/// Builds a transfer function from a JSON description: either
///   {"type": "butterworth", "order": 3, "cutoff_hz": 20000}
/// or zero-pole-gain form with [re, im] pairs (bare numbers are real):
///   {"gain": 2.0, "poles": [[-1, 2], [-1, -2], -3], "zeros": []}
RationalTF tf_from_spec(const nlohmann::json& spec);

const char* ordering_name(Ordering ordering);
Ordering parse_ordering(const std::string& name);

nlohmann::json counters_json(const OpCounters& c);
/// Aggregate view of a conversion (no per-step dump).
nlohmann::json report_json(const ConversionReport& report);
nlohmann::json filter_json(const RationalTF& tf, const ParallelForm& form);

nlohmann::json load_json_file(const std::string& path);

}  // namespace nusrc

#endif  // NUSRC_SPECS_HPP_
