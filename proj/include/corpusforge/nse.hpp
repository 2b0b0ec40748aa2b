// corpusforge/nse.hpp
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
// Non-speech audio event detection from the energy of a source-separated
// instrumental accompaniment track: framed RMS (200 ms window, 100 ms hop),
// median smoothing (size 11), then thresholding at 5% of the document
// maximum. Source separation itself is external; the accompaniment arrives
// as a WAV file.

#ifndef CORPUSFORGE_NSE_HPP_
#define CORPUSFORGE_NSE_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "corpusforge/timeline.hpp"
#include "corpusforge/wav.hpp"

namespace corpusforge {

/// Framed RMS energy values. values[i] is the frame starting at
/// origin + i * hop.
struct EnergyTrack {
  double window = 0.0;  // seconds
  double hop = 0.0;     // seconds
  std::vector<double> values;
  TimePoint origin;

  double frame_start_seconds(std::size_t i) const {
    return origin.seconds() + static_cast<double>(i) * hop;
  }
};

/// How the detection threshold is anchored. Relative-to-maximum makes the
/// detector invariant to recording gain, which matters across decades of
/// archive material with wildly different levels; absolute full scale is
/// kept as a comparison mode.
enum class ThresholdMode { relative_to_max, absolute_full_scale };

struct NseConfig {
  double window = 0.200;            // seconds
  double hop = 0.100;               // seconds
  int median_size = 11;             // odd
  double threshold_fraction = 0.05; // in (0,1)
  ThresholdMode mode = ThresholdMode::relative_to_max;

  void validate() const {
    if (!(hop > 0.0) || !(window >= hop))
      throw std::invalid_argument("NseConfig: need window >= hop > 0");
    if (median_size < 1 || median_size % 2 == 0)
      throw std::invalid_argument("NseConfig: median_size must be odd and >= 1");
    if (!(threshold_fraction > 0.0) || !(threshold_fraction < 1.0))
      throw std::invalid_argument("NseConfig: threshold_fraction must be in (0,1)");
  }
};

/// Frame count is ceil((duration - window)/hop) + 1 with a minimum of one
/// frame; the final window is computed over however many samples remain.
inline EnergyTrack rms_energy(const AudioBuffer& audio, double window, double hop) {
  if (audio.samples.empty() || audio.sample_rate <= 0)
    throw std::invalid_argument("rms_energy: empty audio");
  if (!(hop > 0.0) || !(window >= hop))
    throw std::invalid_argument("rms_energy: need window >= hop > 0");

  const auto n = static_cast<std::int64_t>(audio.samples.size());
  const auto win_n = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::llround(window * audio.sample_rate)));
  const auto hop_n = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::llround(hop * audio.sample_rate)));

  std::int64_t frames = 1;
  if (n > win_n) frames = (n - win_n + hop_n - 1) / hop_n + 1;

  EnergyTrack track;
  track.window = window;
  track.hop = hop;
  track.values.reserve(static_cast<std::size_t>(frames));
  for (std::int64_t i = 0; i < frames; ++i) {
    const std::int64_t begin = i * hop_n;
    const std::int64_t end = std::min(begin + win_n, n);
    double sq = 0.0;
    for (std::int64_t s = begin; s < end; ++s) {
      const double v = audio.samples[static_cast<std::size_t>(s)];
      sq += v * v;
    }
    track.values.push_back(std::sqrt(sq / static_cast<double>(end - begin)));
  }
  return track;
}

/// Centered median with edge-value padding, so output length equals input
/// length and boundary frames do not produce spurious events.
inline std::vector<double> median_filter(const std::vector<double>& values, int size) {
  if (size < 1 || size % 2 == 0)
    throw std::invalid_argument("median_filter: size must be odd and >= 1");
  if (values.empty()) return {};

  const int half = size / 2;
  const auto n = static_cast<std::int64_t>(values.size());
  std::vector<double> out(values.size());
  std::vector<double> win(static_cast<std::size_t>(size));
  for (std::int64_t i = 0; i < n; ++i) {
    for (int k = -half; k <= half; ++k) {
      const std::int64_t j = std::clamp<std::int64_t>(i + k, 0, n - 1);
      win[static_cast<std::size_t>(k + half)] = values[static_cast<std::size_t>(j)];
    }
    auto mid = win.begin() + half;
    std::nth_element(win.begin(), mid, win.end());
    out[static_cast<std::size_t>(i)] = *mid;
  }
  return out;
}

/// Frames whose value exceeds the threshold become hop-long active spans,
/// merged by normalization. An all-silent track yields an empty timeline.
inline Timeline detect_events(const EnergyTrack& track, double threshold_fraction,
                              ThresholdMode mode = ThresholdMode::relative_to_max) {
  if (track.values.empty())
    throw std::invalid_argument("detect_events: empty track");

  double reference = 1.0;
  if (mode == ThresholdMode::relative_to_max)
    reference = *std::max_element(track.values.begin(), track.values.end());
  const double threshold = threshold_fraction * reference;

  const auto origin_ms = track.origin.millis();
  const auto hop_ms = static_cast<std::int64_t>(std::llround(track.hop * 1000.0));
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < track.values.size(); ++i) {
    if (!(track.values[i] > threshold)) continue;
    const std::int64_t begin = origin_ms + static_cast<std::int64_t>(i) * hop_ms;
    segs.push_back(Segment::from_millis(begin, begin + hop_ms));
  }
  return Timeline(std::move(segs));
}

/// The full detector: RMS -> median filter -> threshold, clipped to the
/// document extent.
inline Timeline detect_nse(const AudioBuffer& accompaniment, const NseConfig& cfg) {
  cfg.validate();
  EnergyTrack track = rms_energy(accompaniment, cfg.window, cfg.hop);
  track.values = median_filter(track.values, cfg.median_size);
  Timeline events = detect_events(track, cfg.threshold_fraction, cfg.mode);
  const auto doc_ms =
      static_cast<std::int64_t>(std::llround(accompaniment.duration_seconds() * 1000.0));
  if (doc_ms <= 0) return Timeline();
  return intersect(events, Timeline({Segment::from_millis(0, doc_ms)}));
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_NSE_HPP_
