// corpusforge/wav.hpp
//
// Copyright 2026  The corpus-forge authors
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
//
// Minimal RIFF/WAVE reader: PCM 16-bit and IEEE float 32-bit, any channel
// count (averaged to mono). This is the carrier for source-separated
// accompaniment tracks; compressed codecs are out of scope and rejected with
// the offending format tag.

#ifndef CORPUSFORGE_WAV_HPP_
#define CORPUSFORGE_WAV_HPP_

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "corpusforge/text_util.hpp"

namespace corpusforge {

struct AudioBuffer {
  int sample_rate = 0;
  std::vector<float> samples;  // mono, in [-1, 1]

  double duration_seconds() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / static_cast<double>(sample_rate)
               : 0.0;
  }
};

namespace detail {

inline std::uint32_t read_u32le(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) |
         (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

inline std::uint16_t read_u16le(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<std::uint16_t>(b[off]) |
                                    (static_cast<std::uint16_t>(b[off + 1]) << 8));
}

}  // namespace detail

inline AudioBuffer read_wav(std::span<const std::uint8_t> bytes) {
  using detail::read_u16le;
  using detail::read_u32le;

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw ParseError("wav: not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format_tag = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  AudioBuffer out;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    char chunk_id[5] = {0};
    std::memcpy(chunk_id, bytes.data() + pos, 4);
    const std::uint32_t chunk_size = read_u32le(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size())
      throw ParseError(std::string("wav: truncated '") + chunk_id + "' chunk");

    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw ParseError("wav: fmt chunk too small");
      format_tag = read_u16le(bytes, body);
      channels = read_u16le(bytes, body + 2);
      sample_rate = read_u32le(bytes, body + 4);
      bits = read_u16le(bytes, body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      if (!have_fmt) throw ParseError("wav: data chunk before fmt chunk");
      if (channels == 0 || sample_rate == 0)
        throw ParseError("wav: fmt chunk has zero channels or sample rate");
      const bool pcm16 = (format_tag == 1 && bits == 16);
      const bool float32 = (format_tag == 3 && bits == 32);
      if (!pcm16 && !float32)
        throw ParseError("wav: unsupported codec (format tag " +
                         std::to_string(format_tag) + ", " +
                         std::to_string(bits) + " bits); need PCM16 or float32");
      const std::size_t bytes_per_sample = bits / 8;
      const std::size_t frame_size = bytes_per_sample * channels;
      const std::size_t n_frames = chunk_size / frame_size;
      out.sample_rate = static_cast<int>(sample_rate);
      out.samples.resize(n_frames);
      for (std::size_t f = 0; f < n_frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          const std::size_t off = body + f * frame_size + c * bytes_per_sample;
          if (pcm16) {
            const auto raw = static_cast<std::int16_t>(read_u16le(bytes, off));
            acc += static_cast<double>(raw) / 32768.0;
          } else {
            std::uint32_t u = read_u32le(bytes, off);
            float v;
            std::memcpy(&v, &u, 4);
            acc += static_cast<double>(v);
          }
        }
        out.samples[f] = static_cast<float>(acc / channels);
      }
      return out;
    }
    // unknown chunks (LIST, fact, ...) are skipped; sizes are word-aligned
    pos = body + chunk_size + (chunk_size & 1u);
  }
  throw ParseError("wav: no data chunk found");
}

inline AudioBuffer read_wav(const std::string& bytes) {
  return read_wav(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_WAV_HPP_
