// corpusforge/metrics.hpp
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
// Scoring mathematics: diarization error rate with collar and optimal
// speaker mapping, segment-based detection recall, equal error rate,
// precision/recall threshold sweeps, and histogram overlap between score
// distributions. All time arithmetic is exact in milliseconds.

#ifndef CORPUSFORGE_METRICS_HPP_
#define CORPUSFORGE_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/text_util.hpp"
#include "corpusforge/timeline.hpp"

namespace corpusforge {

namespace detail {

/// Maximum-weight one-to-one assignment (Hungarian algorithm with
/// potentials, O(n^3)). weights[r][c] >= 0; returns the assigned column for
/// each row, or -1 for rows matched only to padding.
inline std::vector<int> max_weight_assignment(
    const std::vector<std::vector<std::int64_t>>& weights) {
  const int nr = static_cast<int>(weights.size());
  const int nc = nr > 0 ? static_cast<int>(weights[0].size()) : 0;
  if (nr == 0 || nc == 0) return std::vector<int>(static_cast<std::size_t>(nr), -1);

  const int n = std::max(nr, nc);
  std::int64_t max_w = 0;
  for (const auto& row : weights)
    for (std::int64_t w : row) max_w = std::max(max_w, w);

  // Minimization on cost = max_w - weight, square-padded with cost max_w.
  const auto cost = [&](int i, int j) -> std::int64_t {
    if (i < nr && j < nc) return max_w - weights[static_cast<std::size_t>(i)]
                                               [static_cast<std::size_t>(j)];
    return max_w;
  };

  const std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::int64_t> v(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<std::int64_t> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      std::int64_t delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const std::int64_t cur =
            cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(static_cast<std::size_t>(nr), -1);
  for (int j = 1; j <= n; ++j) {
    const int i = p[static_cast<std::size_t>(j)];
    if (i >= 1 && i <= nr && j <= nc) assignment[static_cast<std::size_t>(i - 1)] = j - 1;
  }
  return assignment;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Diarization error rate
// ---------------------------------------------------------------------------

struct DerBreakdown {
  double missed = 0.0;         // seconds
  double false_alarm = 0.0;    // seconds
  double confusion = 0.0;      // seconds
  double scored_speech = 0.0;  // seconds of reference speaker time scored
  double der = 0.0;            // (missed + false_alarm + confusion) / scored_speech
};

/// DER with the NIST collar convention: a no-score zone of +/- collar
/// seconds around every reference segment boundary is excluded, the speaker
/// mapping is the one-to-one assignment maximizing correctly attributed
/// time inside the scoring region, and overlap regions are scored
/// speaker-by-speaker (r reference speakers vs h hypothesis speakers gives
/// max(0,r-h) missed, max(0,h-r) false alarm, min(r,h)-correct confusion).
inline DerBreakdown der(const Annotation& reference, const Annotation& hypothesis,
                        double collar_seconds = 0.0,
                        const std::optional<Timeline>& uem = std::nullopt) {
  if (reference.empty())
    throw std::invalid_argument("der: empty reference");
  if (collar_seconds < 0.0)
    throw std::invalid_argument("der: collar must be >= 0");

  // Scoring region: UEM if given, else the joint extent of both annotations.
  Timeline scoring;
  if (uem) {
    scoring = *uem;
  } else {
    Timeline support = union_of(reference.support(), hypothesis.support());
    scoring = Timeline({support.extent()});
  }
  if (collar_seconds > 0.0) {
    const std::int64_t collar_ms =
        static_cast<std::int64_t>(std::llround(collar_seconds * 1000.0));
    std::vector<Segment> zones;
    for (const auto& e : reference.entries()) {
      for (std::int64_t b : {e.segment.start.millis(), e.segment.end.millis()}) {
        const std::int64_t lo = std::max<std::int64_t>(0, b - collar_ms);
        zones.push_back(Segment::from_millis(lo, b + collar_ms));
      }
    }
    scoring = subtract(scoring, Timeline(std::move(zones)));
  }

  // Per-speaker timelines restricted to the scoring region.
  std::vector<Timeline> ref_tl, hyp_tl;
  for (const auto& [label, tl] : reference.label_timelines())
    ref_tl.push_back(intersect(tl, scoring));
  for (const auto& [label, tl] : hypothesis.label_timelines())
    hyp_tl.push_back(intersect(tl, scoring));

  std::int64_t scored_ms = 0;
  for (const auto& tl : ref_tl) scored_ms += tl.total_duration_millis();
  if (scored_ms == 0)
    throw std::invalid_argument("der: no scored reference speech (after collar/UEM)");

  // Optimal mapping on the overlap-duration matrix.
  std::vector<std::vector<std::int64_t>> weights(
      ref_tl.size(), std::vector<std::int64_t>(hyp_tl.size(), 0));
  for (std::size_t r = 0; r < ref_tl.size(); ++r)
    for (std::size_t h = 0; h < hyp_tl.size(); ++h)
      weights[r][h] = intersect(ref_tl[r], hyp_tl[h]).total_duration_millis();
  const std::vector<int> mapped = detail::max_weight_assignment(weights);

  // Elementary slices between consecutive boundaries; speaker activity is
  // constant inside each slice.
  std::vector<std::int64_t> bounds;
  for (const auto& tl : ref_tl)
    for (const auto& s : tl.segments()) {
      bounds.push_back(s.start.millis());
      bounds.push_back(s.end.millis());
    }
  for (const auto& tl : hyp_tl)
    for (const auto& s : tl.segments()) {
      bounds.push_back(s.start.millis());
      bounds.push_back(s.end.millis());
    }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  const auto slice_count = bounds.size() > 1 ? bounds.size() - 1 : 0;
  const auto mark_active = [&](const Timeline& tl, std::vector<char>& active) {
    active.assign(slice_count, 0);
    for (const auto& s : tl.segments()) {
      const auto lo = static_cast<std::size_t>(
          std::lower_bound(bounds.begin(), bounds.end(), s.start.millis()) - bounds.begin());
      const auto hi = static_cast<std::size_t>(
          std::lower_bound(bounds.begin(), bounds.end(), s.end.millis()) - bounds.begin());
      for (std::size_t k = lo; k < hi; ++k) active[k] = 1;
    }
  };

  std::vector<std::vector<char>> ref_active(ref_tl.size()), hyp_active(hyp_tl.size());
  for (std::size_t r = 0; r < ref_tl.size(); ++r) mark_active(ref_tl[r], ref_active[r]);
  for (std::size_t h = 0; h < hyp_tl.size(); ++h) mark_active(hyp_tl[h], hyp_active[h]);

  std::int64_t missed_ms = 0, fa_ms = 0, conf_ms = 0;
  for (std::size_t k = 0; k < slice_count; ++k) {
    const std::int64_t dt = bounds[k + 1] - bounds[k];
    int r = 0, h = 0, correct = 0;
    for (const auto& a : ref_active) r += a[k];
    for (const auto& a : hyp_active) h += a[k];
    for (std::size_t i = 0; i < ref_tl.size(); ++i)
      if (mapped[i] >= 0 && ref_active[i][k] &&
          hyp_active[static_cast<std::size_t>(mapped[i])][k])
        ++correct;
    missed_ms += std::max(0, r - h) * dt;
    fa_ms += std::max(0, h - r) * dt;
    conf_ms += (std::min(r, h) - correct) * dt;
  }

  DerBreakdown out;
  out.missed = static_cast<double>(missed_ms) / 1000.0;
  out.false_alarm = static_cast<double>(fa_ms) / 1000.0;
  out.confusion = static_cast<double>(conf_ms) / 1000.0;
  out.scored_speech = static_cast<double>(scored_ms) / 1000.0;
  out.der = static_cast<double>(missed_ms + fa_ms + conf_ms) / static_cast<double>(scored_ms);
  return out;
}

// ---------------------------------------------------------------------------
// Segment-based detection recall
// ---------------------------------------------------------------------------

/// The time axis is cut into consecutive grid segments of segment_length
/// (default 1 s); a grid segment counts as active when its overlap with the
/// event timeline is positive. Recall is the fraction of reference-active
/// grid segments that are also hypothesis-active.
inline double segment_recall(const Timeline& ref_events, const Timeline& hyp_events,
                             double segment_length = 1.0) {
  if (ref_events.empty())
    throw std::invalid_argument("segment_recall: empty reference");
  if (!(segment_length > 0.0))
    throw std::invalid_argument("segment_recall: segment_length must be > 0");

  const auto cell_ms = static_cast<std::int64_t>(std::llround(segment_length * 1000.0));
  const auto active_cells = [&](const Timeline& tl) {
    std::vector<std::int64_t> cells;
    for (const auto& s : tl.segments()) {
      const std::int64_t first = s.start.millis() / cell_ms;
      const std::int64_t last = (s.end.millis() - 1) / cell_ms;
      for (std::int64_t c = first; c <= last; ++c) cells.push_back(c);
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
  };

  const auto ref_cells = active_cells(ref_events);
  const auto hyp_cells = active_cells(hyp_events);
  std::vector<std::int64_t> both;
  std::set_intersection(ref_cells.begin(), ref_cells.end(), hyp_cells.begin(),
                        hyp_cells.end(), std::back_inserter(both));
  return static_cast<double>(both.size()) / static_cast<double>(ref_cells.size());
}

/// Per-class recall for class-labeled reference events (e.g. music levels);
/// one recall value per class, same grid rule as segment_recall.
inline std::map<std::string, double> segment_recall_by_class(
    const std::map<std::string, Timeline>& ref_by_class, const Timeline& hyp_events,
    double segment_length = 1.0) {
  std::map<std::string, double> out;
  for (const auto& [cls, ref] : ref_by_class)
    out[cls] = segment_recall(ref, hyp_events, segment_length);
  return out;
}

// ---------------------------------------------------------------------------
// Verification trials: EER and precision/recall sweeps
// ---------------------------------------------------------------------------

struct ScoredTrial {
  double score = 0.0;
  bool is_target = false;

  friend bool operator==(const ScoredTrial&, const ScoredTrial&) = default;
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// Equal error rate. Decisions accept at score >= threshold. Thresholds
/// sweep the sorted distinct scores (plus a sentinel above the maximum);
/// the (FAR, FRR) crossing is linearly interpolated between the two
/// adjacent achievable operating points.
inline EerResult eer(std::span<const ScoredTrial> trials) {
  std::vector<double> targets, nontargets;
  for (const auto& t : trials) (t.is_target ? targets : nontargets).push_back(t.score);
  if (targets.empty() || nontargets.empty())
    throw std::invalid_argument("eer: need at least one target and one non-target trial");
  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());

  std::vector<double> thresholds;
  thresholds.reserve(trials.size() + 1);
  thresholds.insert(thresholds.end(), targets.begin(), targets.end());
  thresholds.insert(thresholds.end(), nontargets.begin(), nontargets.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(thresholds.back() + 1.0);  // nothing accepted

  const auto far_at = [&](double t) {
    const auto n = nontargets.end() -
                   std::lower_bound(nontargets.begin(), nontargets.end(), t);
    return static_cast<double>(n) / static_cast<double>(nontargets.size());
  };
  const auto frr_at = [&](double t) {
    const auto n = std::lower_bound(targets.begin(), targets.end(), t) - targets.begin();
    return static_cast<double>(n) / static_cast<double>(targets.size());
  };

  double prev_t = thresholds.front();
  double prev_far = far_at(prev_t), prev_frr = frr_at(prev_t);
  for (double t : thresholds) {
    const double far = far_at(t), frr = frr_at(t);
    const double d = far - frr;
    if (d <= 0.0) {
      const double d_prev = prev_far - prev_frr;
      if (d_prev <= 0.0) return {std::max(far, frr), t};  // already crossed at the start
      const double alpha = d_prev / (d_prev - d);
      return {prev_far + alpha * (far - prev_far), prev_t + alpha * (t - prev_t)};
    }
    prev_t = t;
    prev_far = far;
    prev_frr = frr;
  }
  return {prev_far, prev_t};  // unreachable: the sentinel has d = -1
}

struct OperatingPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

/// One operating point per distinct score, ascending by threshold.
/// Decisions accept at score >= threshold.
inline std::vector<OperatingPoint> pr_sweep(std::span<const ScoredTrial> trials) {
  std::vector<double> targets, nontargets;
  for (const auto& t : trials) (t.is_target ? targets : nontargets).push_back(t.score);
  if (targets.empty())
    throw std::invalid_argument("pr_sweep: need at least one target trial");
  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());

  std::vector<double> thresholds;
  thresholds.insert(thresholds.end(), targets.begin(), targets.end());
  thresholds.insert(thresholds.end(), nontargets.begin(), nontargets.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<OperatingPoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto tp = targets.end() - std::lower_bound(targets.begin(), targets.end(), t);
    const auto fp = nontargets.end() -
                    std::lower_bound(nontargets.begin(), nontargets.end(), t);
    const auto fn = static_cast<std::ptrdiff_t>(targets.size()) - tp;
    OperatingPoint pt;
    pt.threshold = t;
    pt.precision = (tp + fp) > 0
                       ? static_cast<double>(tp) / static_cast<double>(tp + fp)
                       : 1.0;
    pt.recall = static_cast<double>(tp) / static_cast<double>(targets.size());
    pt.far = nontargets.empty()
                 ? 0.0
                 : static_cast<double>(fp) / static_cast<double>(nontargets.size());
    pt.frr = static_cast<double>(fn) / static_cast<double>(targets.size());
    out.push_back(pt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Score-distribution overlap
// ---------------------------------------------------------------------------

/// Histogram overlap coefficient: shared equal-width bins over the joint
/// range, overlap = sum over bins of min(p_a, p_b) of the relative
/// frequencies. 1.0 for identical samples, 0.0 for disjoint supports.
inline double distribution_overlap(std::span<const double> a, std::span<const double> b,
                                   int bins = 100) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("distribution_overlap: empty input");
  if (bins < 1)
    throw std::invalid_argument("distribution_overlap: bins must be >= 1");

  double lo = a[0], hi = a[0];
  for (double x : a) { lo = std::min(lo, x); hi = std::max(hi, x); }
  for (double x : b) { lo = std::min(lo, x); hi = std::max(hi, x); }
  if (!(hi > lo)) return 1.0;  // all mass in one degenerate bin

  const double width = (hi - lo) / bins;
  std::vector<double> pa(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> pb(static_cast<std::size_t>(bins), 0.0);
  const auto bin_of = [&](double x) {
    const auto k = static_cast<std::int64_t>((x - lo) / width);
    return static_cast<std::size_t>(std::clamp<std::int64_t>(k, 0, bins - 1));
  };
  for (double x : a) pa[bin_of(x)] += 1.0 / static_cast<double>(a.size());
  for (double x : b) pb[bin_of(x)] += 1.0 / static_cast<double>(b.size());

  double overlap = 0.0;
  for (int k = 0; k < bins; ++k)
    overlap += std::min(pa[static_cast<std::size_t>(k)], pb[static_cast<std::size_t>(k)]);
  return overlap;
}

// ---------------------------------------------------------------------------
// Trial CSV ("score,is_target")
// ---------------------------------------------------------------------------

inline std::vector<ScoredTrial> parse_trials_csv(std::string_view textbuf) {
  std::vector<ScoredTrial> out;
  text::for_each_line(textbuf, [&](std::string_view line, int line_no) {
    const std::string context = "trials line " + std::to_string(line_no);
    std::string_view stripped = text::trim(line);
    if (stripped.empty() || stripped[0] == '#') return;
    if (line_no == 1 && stripped.substr(0, 5) == "score") return;  // header
    const auto fields = text::split_csv(stripped);
    if (fields.size() != 2)
      throw ParseError(context + ": expected 'score,is_target'");
    ScoredTrial t;
    t.score = text::parse_double(text::trim(fields[0]), context);
    const std::string flag = std::string(text::trim(fields[1]));
    if (flag == "1" || flag == "target") t.is_target = true;
    else if (flag == "0" || flag == "nontarget") t.is_target = false;
    else throw ParseError(context + ": is_target must be 0/1/target/nontarget");
    if (!std::isfinite(t.score)) throw ParseError(context + ": score must be finite");
    out.push_back(t);
  });
  return out;
}

inline std::string write_trials_csv(std::span<const ScoredTrial> trials) {
  std::string out = "score,is_target\n";
  for (const auto& t : trials)
    out += text::sig9(t.score) + std::string(t.is_target ? ",1\n" : ",0\n");
  return out;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_METRICS_HPP_
