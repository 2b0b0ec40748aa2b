// corpusforge/synth.hpp
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
// Seeded fixture generators and brute-force oracles. The corpora behind the
// published figures are licensed or internal, so verification runs on
// synthetic data: generated diarizations checked against a grid-discretized
// exhaustive-mapping DER, generated trials against exhaustive threshold
// sweeps, generated embeddings against known cluster structure. Generators
// are pure functions of the seed. Boundaries land on the SynthSpec quantum
// (default 10 ms) so the grid oracle is exact on generated data.

#ifndef CORPUSFORGE_SYNTH_HPP_
#define CORPUSFORGE_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "corpusforge/embeddings.hpp"
#include "corpusforge/metrics.hpp"
#include "corpusforge/rng.hpp"
#include "corpusforge/timeline.hpp"

namespace corpusforge {

struct SynthSpec {
  int n_speakers = 3;
  double doc_length = 60.0;  // seconds
  double min_turn = 1.0;     // uniform turn length bounds, seconds
  double max_turn = 6.0;
  double gap_prob = 0.2;     // chance of a pause after a turn
  double max_gap = 2.0;
  double overlap_prob = 0.0;  // chance of a second simultaneous speaker
  // hypothesis perturbations
  double boundary_jitter = 0.0;  // max +/- seconds on each boundary
  double relabel_prob = 0.0;
  double delete_prob = 0.0;
  double insert_prob = 0.0;  // chance of a spurious hypothesis segment per turn
  std::uint64_t seed = 1;
  double quantum = 0.010;  // all boundaries snap to this grid, seconds
};

namespace detail {

inline std::int64_t quantize_ms(double seconds, double quantum) {
  const auto q_ms = std::max<std::int64_t>(1, std::llround(quantum * 1000.0));
  const auto ms = std::llround(seconds * 1000.0);
  return (ms + q_ms / 2) / q_ms * q_ms;
}

}  // namespace detail

/// Reference diarization plus a perturbed copy of it. With all perturbation
/// probabilities at zero the hypothesis equals the reference.
inline std::pair<Annotation, Annotation> gen_diarization(const SynthSpec& spec) {
  if (spec.n_speakers < 1 || spec.doc_length <= 0.0 || spec.min_turn <= 0.0 ||
      spec.max_turn < spec.min_turn)
    throw std::invalid_argument("gen_diarization: bad spec");

  Rng rng(spec.seed);
  const auto doc_ms = detail::quantize_ms(spec.doc_length, spec.quantum);
  const auto speaker_name = [](int i) { return "spk" + std::to_string(i); };

  Annotation reference;
  std::int64_t cursor = 0;
  int prev_speaker = -1;
  while (cursor < doc_ms) {
    int spk = static_cast<int>(rng.uniform_int(spec.n_speakers));
    if (spec.n_speakers > 1 && spk == prev_speaker)
      spk = (spk + 1) % spec.n_speakers;
    prev_speaker = spk;
    const auto len =
        detail::quantize_ms(rng.uniform(spec.min_turn, spec.max_turn), spec.quantum);
    const auto end = std::min(cursor + std::max<std::int64_t>(len, 10), doc_ms);
    if (end > cursor) {
      reference.add(Segment::from_millis(cursor, end), speaker_name(spk));
      if (spec.n_speakers > 1 && rng.bernoulli(spec.overlap_prob)) {
        int other = static_cast<int>(rng.uniform_int(spec.n_speakers));
        if (other == spk) other = (other + 1) % spec.n_speakers;
        const auto o_start =
            cursor + detail::quantize_ms(rng.uniform(0.0, (end - cursor) / 2000.0),
                                         spec.quantum);
        const auto o_end = std::min(
            o_start + detail::quantize_ms(rng.uniform(spec.min_turn, spec.max_turn),
                                          spec.quantum),
            doc_ms);
        if (o_end > o_start)
          reference.add(Segment::from_millis(o_start, o_end), speaker_name(other));
      }
    }
    cursor = end;
    if (rng.bernoulli(spec.gap_prob))
      cursor += detail::quantize_ms(rng.uniform(0.0, spec.max_gap), spec.quantum);
  }
  if (reference.empty())
    reference.add(Segment::from_millis(0, std::max<std::int64_t>(doc_ms, 10)),
                  speaker_name(0));

  Annotation hypothesis;
  for (const auto& e : reference.entries()) {
    if (rng.bernoulli(spec.delete_prob)) continue;
    std::string label = e.label;
    if (spec.n_speakers > 1 && rng.bernoulli(spec.relabel_prob)) {
      int other = static_cast<int>(rng.uniform_int(spec.n_speakers));
      label = speaker_name(other);
    }
    std::int64_t start = e.segment.start.millis();
    std::int64_t end = e.segment.end.millis();
    if (spec.boundary_jitter > 0.0) {
      start += detail::quantize_ms(
          rng.uniform(-spec.boundary_jitter, spec.boundary_jitter), spec.quantum);
      end += detail::quantize_ms(
          rng.uniform(-spec.boundary_jitter, spec.boundary_jitter), spec.quantum);
    }
    start = std::max<std::int64_t>(0, start);
    if (end > start) hypothesis.add(Segment::from_millis(start, end), label);
    if (rng.bernoulli(spec.insert_prob)) {
      const auto i_start = detail::quantize_ms(
          rng.uniform(0.0, static_cast<double>(doc_ms) / 1000.0), spec.quantum);
      const auto i_len =
          detail::quantize_ms(rng.uniform(spec.min_turn, spec.max_turn), spec.quantum);
      if (i_len > 0)
        hypothesis.add(Segment::from_millis(i_start, i_start + i_len),
                       speaker_name(static_cast<int>(rng.uniform_int(spec.n_speakers))));
    }
  }
  return {std::move(reference), std::move(hypothesis)};
}

/// Independent DER check: discretizes time to a fixed grid (cell membership
/// sampled at cell centers), enumerates every injective speaker mapping
/// (feasible up to ~6 speakers per side) and keeps the one maximizing
/// correctly attributed cells. Shares no code with the exact sweep in
/// metrics.hpp.
inline DerBreakdown oracle_der(const Annotation& reference, const Annotation& hypothesis,
                               double collar_seconds = 0.0, double grid = 0.010) {
  if (reference.empty())
    throw std::invalid_argument("oracle_der: empty reference");
  if (!(grid > 0.0))
    throw std::invalid_argument("oracle_der: grid must be > 0");

  const auto ref_map = reference.label_timelines();
  const auto hyp_map = hypothesis.label_timelines();
  if (ref_map.size() > 6 || hyp_map.size() > 6)
    throw std::invalid_argument("oracle_der: exhaustive mapping limited to 6 speakers");

  // Scoring span: joint extent, minus collar zones around reference
  // boundaries, all tested at cell centers.
  std::int64_t lo_ms = std::numeric_limits<std::int64_t>::max(), hi_ms = 0;
  for (const auto& e : reference.entries()) {
    lo_ms = std::min(lo_ms, e.segment.start.millis());
    hi_ms = std::max(hi_ms, e.segment.end.millis());
  }
  for (const auto& e : hypothesis.entries()) {
    lo_ms = std::min(lo_ms, e.segment.start.millis());
    hi_ms = std::max(hi_ms, e.segment.end.millis());
  }

  const double collar_ms = collar_seconds * 1000.0;
  std::vector<std::pair<double, double>> collar_zones;
  if (collar_seconds > 0.0)
    for (const auto& e : reference.entries()) {
      collar_zones.emplace_back(e.segment.start.millis() - collar_ms,
                                e.segment.start.millis() + collar_ms);
      collar_zones.emplace_back(e.segment.end.millis() - collar_ms,
                                e.segment.end.millis() + collar_ms);
    }

  const double grid_ms = grid * 1000.0;
  const auto first_cell = static_cast<std::int64_t>(std::floor(lo_ms / grid_ms));
  const auto last_cell = static_cast<std::int64_t>(std::ceil(hi_ms / grid_ms));
  const auto n_cells = static_cast<std::size_t>(std::max<std::int64_t>(0, last_cell - first_cell));

  std::vector<char> scored(n_cells, 1);
  for (std::size_t k = 0; k < n_cells; ++k) {
    const double center = (static_cast<double>(first_cell) + static_cast<double>(k) + 0.5) * grid_ms;
    for (const auto& [zlo, zhi] : collar_zones)
      if (center > zlo && center < zhi) {
        scored[k] = 0;
        break;
      }
  }

  const auto activity = [&](const Timeline& tl) {
    std::vector<char> active(n_cells, 0);
    for (std::size_t k = 0; k < n_cells; ++k) {
      if (!scored[k]) continue;
      const double center =
          (static_cast<double>(first_cell) + static_cast<double>(k) + 0.5) * grid_ms;
      const auto t = TimePoint::from_millis(static_cast<std::int64_t>(center));
      active[k] = tl.contains(t) ? 1 : 0;
    }
    return active;
  };

  std::vector<std::vector<char>> ref_act, hyp_act;
  for (const auto& [label, tl] : ref_map) ref_act.push_back(activity(tl));
  for (const auto& [label, tl] : hyp_map) hyp_act.push_back(activity(tl));

  const std::size_t nr = ref_act.size(), nh = hyp_act.size();
  std::vector<std::vector<std::int64_t>> pair_cells(nr, std::vector<std::int64_t>(nh, 0));
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t h = 0; h < nh; ++h)
      for (std::size_t k = 0; k < n_cells; ++k)
        pair_cells[r][h] += (ref_act[r][k] && hyp_act[h][k]) ? 1 : 0;

  // Exhaustive search over injective ref -> hyp (or none) assignments.
  std::vector<int> assign(nr, -1), best_assign(nr, -1);
  std::vector<char> used(nh, 0);
  std::int64_t best_correct = -1;
  const auto search = [&](auto&& self, std::size_t r, std::int64_t correct) -> void {
    if (r == nr) {
      if (correct > best_correct) {
        best_correct = correct;
        best_assign = assign;
      }
      return;
    }
    self(self, r + 1, correct);  // leave r unmapped
    for (std::size_t h = 0; h < nh; ++h) {
      if (used[h]) continue;
      used[h] = 1;
      assign[r] = static_cast<int>(h);
      self(self, r + 1, correct + pair_cells[r][h]);
      assign[r] = -1;
      used[h] = 0;
    }
  };
  search(search, 0, 0);

  std::int64_t missed = 0, fa = 0, conf = 0, scored_cells = 0;
  for (std::size_t k = 0; k < n_cells; ++k) {
    if (!scored[k]) continue;
    int r_on = 0, h_on = 0, correct = 0;
    for (std::size_t r = 0; r < nr; ++r) r_on += ref_act[r][k];
    for (std::size_t h = 0; h < nh; ++h) h_on += hyp_act[h][k];
    for (std::size_t r = 0; r < nr; ++r)
      if (best_assign[r] >= 0 && ref_act[r][k] &&
          hyp_act[static_cast<std::size_t>(best_assign[r])][k])
        ++correct;
    missed += std::max(0, r_on - h_on);
    fa += std::max(0, h_on - r_on);
    conf += std::min(r_on, h_on) - correct;
    scored_cells += r_on;
  }
  if (scored_cells == 0)
    throw std::invalid_argument("oracle_der: no scored reference speech");

  DerBreakdown out;
  out.missed = static_cast<double>(missed) * grid;
  out.false_alarm = static_cast<double>(fa) * grid;
  out.confusion = static_cast<double>(conf) * grid;
  out.scored_speech = static_cast<double>(scored_cells) * grid;
  out.der = static_cast<double>(missed + fa + conf) / static_cast<double>(scored_cells);
  return out;
}

/// Target and non-target score samples with gaussian spread around the two
/// means; disjoint means with small spread give EER 0, equal means give 0.5.
inline std::vector<ScoredTrial> gen_trials(int n_targets, int n_nontargets,
                                           double target_mean, double nontarget_mean,
                                           double spread, std::uint64_t seed) {
  if (n_targets < 0 || n_nontargets < 0)
    throw std::invalid_argument("gen_trials: negative count");
  Rng rng(seed);
  std::vector<ScoredTrial> out;
  out.reserve(static_cast<std::size_t>(n_targets + n_nontargets));
  for (int i = 0; i < n_targets; ++i)
    out.push_back({rng.normal(target_mean, spread), true});
  for (int i = 0; i < n_nontargets; ++i)
    out.push_back({rng.normal(nontarget_mean, spread), false});
  return out;
}

struct SyntheticEmbeddings {
  EmbeddingSet set;
  std::vector<int> labels;  // ground-truth cluster per record
};

/// Clusters around mutually orthogonal centers (the first n_clusters basis
/// directions), each vector within within_angle_deg of its center, so the
/// true partition is known by construction.
inline SyntheticEmbeddings gen_embeddings(int n_clusters, int per_cluster,
                                          double within_angle_deg, std::uint64_t seed,
                                          int dim = 16) {
  if (n_clusters < 1 || per_cluster < 1)
    throw std::invalid_argument("gen_embeddings: need >= 1 cluster and >= 1 per cluster");
  if (dim < n_clusters)
    throw std::invalid_argument("gen_embeddings: dim must be >= n_clusters");
  if (within_angle_deg < 0.0 || within_angle_deg >= 90.0)
    throw std::invalid_argument("gen_embeddings: within_angle_deg must be in [0, 90)");

  Rng rng(seed);
  const double max_angle = within_angle_deg * 3.14159265358979323846 / 180.0;
  SyntheticEmbeddings out;
  std::int64_t t_ms = 0;
  for (int c = 0; c < n_clusters; ++c) {
    for (int i = 0; i < per_cluster; ++i) {
      // random unit direction orthogonal to the center e_c
      std::vector<double> w(static_cast<std::size_t>(dim));
      double norm = 0.0;
      do {
        norm = 0.0;
        for (auto& x : w) x = rng.normal();
        w[static_cast<std::size_t>(c)] = 0.0;
        for (double x : w) norm += x * x;
      } while (!(norm > 1e-12));
      norm = std::sqrt(norm);

      const double theta = max_angle * rng.uniform();
      std::vector<double> v(static_cast<std::size_t>(dim));
      for (int d = 0; d < dim; ++d)
        v[static_cast<std::size_t>(d)] =
            std::sin(theta) * w[static_cast<std::size_t>(d)] / norm;
      v[static_cast<std::size_t>(c)] += std::cos(theta);

      out.set.add(EmbeddingRecord{
          "synth", Segment::from_millis(t_ms, t_ms + 1500), std::move(v)});
      out.labels.push_back(c);
      t_ms += 2000;
    }
  }
  return out;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_SYNTH_HPP_
