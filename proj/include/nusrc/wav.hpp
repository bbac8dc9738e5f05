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

#ifndef NUSRC_WAV_HPP_
#define NUSRC_WAV_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace nusrc {

/// Channel 0 of a PCM WAV file, normalized to [-1, 1).
struct WavData {
  std::uint32_t sample_rate = 0;
  std::vector<double> samples;
};

/// Reads 16- or 24-bit integer PCM; multi-channel files yield channel 0.
WavData read_wav(const std::string& path);

/// Writes mono integer PCM (16 or 24 bits), clamping out-of-range samples.
void write_wav(const std::string& path, const WavData& data, int bits = 16);

}  // namespace nusrc

#endif  // NUSRC_WAV_HPP_
