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

#include "nusrc/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>

namespace nusrc {

namespace {

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  out.write(b, 2);
}

std::string read_tag(std::istream& in) {
  char tag[4];
  in.read(tag, 4);
  return std::string(tag, 4);
}

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  if (read_tag(in) != "RIFF") {
    throw std::runtime_error(path + ": not a RIFF file");
  }
  read_u32(in);
  if (read_tag(in) != "WAVE") {
    throw std::runtime_error(path + ": not a WAVE file");
  }

  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  WavData data;

  while (in) {
    const std::string tag = read_tag(in);
    if (!in) break;
    const std::uint32_t size = read_u32(in);
    if (tag == "fmt ") {
      format = read_u16(in);
      channels = read_u16(in);
      rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) {
        throw std::runtime_error(path + ": data chunk before fmt chunk");
      }
      if (format != 1) {
        throw std::runtime_error(path + ": only integer PCM is supported");
      }
      if (bits != 16 && bits != 24) {
        throw std::runtime_error(path + ": only 16- or 24-bit PCM is supported, got " +
                                 std::to_string(bits) + " bits");
      }
      if (channels == 0) {
        throw std::runtime_error(path + ": zero channels");
      }
      const std::size_t bytes_per = bits / 8;
      const std::size_t frame = bytes_per * channels;
      const std::size_t frames = size / frame;
      data.sample_rate = rate;
      data.samples.reserve(frames);
      std::vector<char> buf(frame);
      for (std::size_t i = 0; i < frames; ++i) {
        in.read(buf.data(), static_cast<std::streamsize>(frame));
        if (!in) break;
        const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
        std::int32_t v;
        if (bits == 16) {
          v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
          data.samples.push_back(static_cast<double>(v) / 32768.0);
        } else {
          v = static_cast<std::int32_t>((p[0] << 8) | (p[1] << 16) |
                                        (static_cast<std::uint32_t>(p[2]) << 24)) >>
              8;
          data.samples.push_back(static_cast<double>(v) / 8388608.0);
        }
      }
      if (size % 2 == 1) in.seekg(1, std::ios::cur);
    } else {
      in.seekg(size + (size % 2), std::ios::cur);
    }
  }
  if (!have_fmt) {
    throw std::runtime_error(path + ": missing fmt chunk");
  }
  return data;
}

void write_wav(const std::string& path, const WavData& data, int bits) {
  if (bits != 16 && bits != 24) {
    throw std::invalid_argument("wav write supports 16 or 24 bits, got " + std::to_string(bits));
  }
  if (data.sample_rate == 0) {
    throw std::invalid_argument("wav write requires a nonzero sample rate");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  const std::uint32_t bytes_per = static_cast<std::uint32_t>(bits) / 8;
  const std::uint32_t data_size = static_cast<std::uint32_t>(data.samples.size()) * bytes_per;

  out.write("RIFF", 4);
  write_u32(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // integer PCM
  write_u16(out, 1);  // mono
  write_u32(out, data.sample_rate);
  write_u32(out, data.sample_rate * bytes_per);
  write_u16(out, static_cast<std::uint16_t>(bytes_per));
  write_u16(out, static_cast<std::uint16_t>(bits));
  out.write("data", 4);
  write_u32(out, data_size);

  const double scale = bits == 16 ? 32768.0 : 8388608.0;
  const double hi = scale - 1.0;
  for (double s : data.samples) {
    double v = std::round(s * scale);
    v = std::clamp(v, -scale, hi);
    const std::int32_t q = static_cast<std::int32_t>(v);
    if (bits == 16) {
      write_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      const char b[3] = {static_cast<char>(q & 0xff), static_cast<char>((q >> 8) & 0xff),
                         static_cast<char>((q >> 16) & 0xff)};
      out.write(b, 3);
    }
  }
  if (data_size % 2 == 1) {
    const char pad = 0;
    out.write(&pad, 1);
  }
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

}  // namespace nusrc
