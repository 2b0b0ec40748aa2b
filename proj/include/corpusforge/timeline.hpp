// corpusforge/timeline.hpp
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

#ifndef CORPUSFORGE_TIMELINE_HPP_
#define CORPUSFORGE_TIMELINE_HPP_

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace corpusforge {

/// Time values are kept as an integer count of milliseconds so that the
/// interval set-algebra below is exact. Segment files carry centisecond or
/// millisecond precision; accumulating doubles instead would break identities
/// such as dur(a∪b) = dur(a∖b) + dur(b∖a) + dur(a∩b).
class TimePoint {
 public:
  constexpr TimePoint() = default;

  static TimePoint from_seconds(double seconds) {
    if (!std::isfinite(seconds) || seconds < 0.0)
      throw std::invalid_argument("TimePoint: seconds must be finite and >= 0");
    if (seconds > 4.0e15)  // keeps the millisecond count inside int64
      throw std::invalid_argument("TimePoint: seconds out of range");
    return TimePoint(static_cast<std::int64_t>(std::llround(seconds * 1000.0)));
  }

  static constexpr TimePoint from_millis(std::int64_t ms) {
    if (ms < 0) throw std::invalid_argument("TimePoint: millis must be >= 0");
    return TimePoint(ms);
  }

  constexpr std::int64_t millis() const { return ms_; }
  constexpr double seconds() const { return static_cast<double>(ms_) / 1000.0; }

  friend constexpr auto operator<=>(TimePoint, TimePoint) = default;

 private:
  explicit constexpr TimePoint(std::int64_t ms) : ms_(ms) {}
  std::int64_t ms_ = 0;
};

/// Half-open time interval [start, end). Zero-length segments are invalid.
struct Segment {
  Segment(TimePoint s, TimePoint e) : start(s), end(e) {
    if (!(start < end))
      throw std::invalid_argument("Segment: start must be < end");
  }

  static Segment from_seconds(double start, double end) {
    return Segment(TimePoint::from_seconds(start), TimePoint::from_seconds(end));
  }
  static Segment from_millis(std::int64_t start, std::int64_t end) {
    return Segment(TimePoint::from_millis(start), TimePoint::from_millis(end));
  }

  std::int64_t duration_millis() const { return end.millis() - start.millis(); }
  double duration_seconds() const { return static_cast<double>(duration_millis()) / 1000.0; }

  bool overlaps(const Segment& other) const {
    return start < other.end && other.start < end;
  }

  friend auto operator<=>(const Segment&, const Segment&) = default;

  TimePoint start;
  TimePoint end;
};

/// An unlabeled set of time intervals, always held in normalized form:
/// sorted by start, pairwise disjoint, touching segments merged. The
/// closed-open semantics make [0,1) and [1,2) merge into [0,2).
class Timeline {
 public:
  Timeline() = default;

  explicit Timeline(std::vector<Segment> segments) : segments_(std::move(segments)) {
    normalize_inplace();
  }

  static Timeline from_seconds(std::initializer_list<std::pair<double, double>> spans) {
    std::vector<Segment> segs;
    segs.reserve(spans.size());
    for (const auto& [s, e] : spans) segs.push_back(Segment::from_seconds(s, e));
    return Timeline(std::move(segs));
  }

  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  std::size_t size() const { return segments_.size(); }

  std::int64_t total_duration_millis() const {
    std::int64_t total = 0;
    for (const auto& s : segments_) total += s.duration_millis();
    return total;
  }
  double total_duration_seconds() const {
    return static_cast<double>(total_duration_millis()) / 1000.0;
  }

  /// Smallest segment covering the whole timeline; throws when empty.
  Segment extent() const {
    if (segments_.empty()) throw std::logic_error("Timeline::extent: empty timeline");
    return Segment(segments_.front().start, segments_.back().end);
  }

  bool contains(TimePoint t) const {
    for (const auto& s : segments_)
      if (s.start <= t && t < s.end) return true;
    return false;
  }

  friend bool operator==(const Timeline&, const Timeline&) = default;

 private:
  void normalize_inplace() {
    std::sort(segments_.begin(), segments_.end());
    std::vector<Segment> merged;
    merged.reserve(segments_.size());
    for (const auto& s : segments_) {
      if (!merged.empty() && s.start <= merged.back().end) {
        if (s.end > merged.back().end) merged.back().end = s.end;
      } else {
        merged.push_back(s);
      }
    }
    segments_ = std::move(merged);
  }

  std::vector<Segment> segments_;
};

/// Set union of covered time.
inline Timeline union_of(const Timeline& a, const Timeline& b) {
  std::vector<Segment> segs;
  segs.reserve(a.size() + b.size());
  segs.insert(segs.end(), a.segments().begin(), a.segments().end());
  segs.insert(segs.end(), b.segments().begin(), b.segments().end());
  return Timeline(std::move(segs));
}

/// Set intersection of covered time.
inline Timeline intersect(const Timeline& a, const Timeline& b) {
  std::vector<Segment> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const Segment& sa = a.segments()[i];
    const Segment& sb = b.segments()[j];
    TimePoint lo = std::max(sa.start, sb.start);
    TimePoint hi = std::min(sa.end, sb.end);
    if (lo < hi) out.push_back(Segment(lo, hi));
    if (sa.end < sb.end) ++i; else ++j;
  }
  return Timeline(std::move(out));
}

/// Set difference a ∖ b.
inline Timeline subtract(const Timeline& a, const Timeline& b) {
  std::vector<Segment> out;
  std::size_t j = 0;
  for (const auto& sa : a.segments()) {
    TimePoint cursor = sa.start;
    while (j < b.size() && b.segments()[j].end <= cursor) ++j;
    std::size_t k = j;
    while (k < b.size() && b.segments()[k].start < sa.end) {
      const Segment& sb = b.segments()[k];
      if (cursor < sb.start) out.push_back(Segment(cursor, std::min(sb.start, sa.end)));
      if (sb.end > cursor) cursor = sb.end;
      if (cursor >= sa.end) break;
      ++k;
    }
    if (cursor < sa.end) out.push_back(Segment(cursor, sa.end));
  }
  return Timeline(std::move(out));
}

/// Keeps segments with duration >= min. A segment of exactly the minimum
/// duration survives ("shorter than" is rejected, equal is not).
inline Timeline filter_min_duration(const Timeline& tl, TimePoint min) {
  std::vector<Segment> out;
  for (const auto& s : tl.segments())
    if (s.duration_millis() >= min.millis()) out.push_back(s);
  return Timeline(std::move(out));
}

inline Timeline filter_min_duration(const Timeline& tl, double min_seconds) {
  return filter_min_duration(tl, TimePoint::from_seconds(min_seconds));
}

/// Raw duration ratio dur(hyp)/dur(ref). This is a reporting convention:
/// for coverage against a reference annotation the caller may instead want
/// dur(hyp ∩ ref)/dur(ref); reports should state which was used.
inline double coverage_ratio(const Timeline& hyp, const Timeline& ref) {
  std::int64_t denom = ref.total_duration_millis();
  if (denom == 0)
    throw std::invalid_argument("coverage_ratio: reference has zero duration");
  return static_cast<double>(hyp.total_duration_millis()) / static_cast<double>(denom);
}

/// Speaker-labeled interval set. Entries are kept sorted by (start, end,
/// label) so that downstream artifacts (RTTM lines, EAF tiers) are
/// reproducible regardless of insertion order.
class Annotation {
 public:
  struct Entry {
    Segment segment;
    std::string label;
    friend auto operator<=>(const Entry&, const Entry&) = default;
  };

  Annotation() = default;

  explicit Annotation(std::vector<Entry> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) check_label(e.label);
    std::sort(entries_.begin(), entries_.end());
  }

  void add(Segment segment, std::string label) {
    check_label(label);
    Entry e{segment, std::move(label)};
    entries_.insert(std::upper_bound(entries_.begin(), entries_.end(), e), std::move(e));
  }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  /// Distinct labels ordered by first segment start (entries are sorted).
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
      if (std::find(out.begin(), out.end(), e.label) == out.end())
        out.push_back(e.label);
    return out;
  }

  Timeline label_timeline(const std::string& label) const {
    std::vector<Segment> segs;
    for (const auto& e : entries_)
      if (e.label == label) segs.push_back(e.segment);
    return Timeline(std::move(segs));
  }

  std::map<std::string, Timeline> label_timelines() const {
    std::map<std::string, std::vector<Segment>> grouped;
    for (const auto& e : entries_) grouped[e.label].push_back(e.segment);
    std::map<std::string, Timeline> out;
    for (auto& [label, segs] : grouped) out.emplace(label, Timeline(std::move(segs)));
    return out;
  }

  /// Union of all entry segments regardless of label.
  Timeline support() const {
    std::vector<Segment> segs;
    segs.reserve(entries_.size());
    for (const auto& e : entries_) segs.push_back(e.segment);
    return Timeline(std::move(segs));
  }

  friend bool operator==(const Annotation&, const Annotation&) = default;

 private:
  static void check_label(const std::string& label) {
    if (label.empty())
      throw std::invalid_argument("Annotation: labels must be non-empty");
  }

  std::vector<Entry> entries_;
};

}  // namespace corpusforge

#endif  // CORPUSFORGE_TIMELINE_HPP_
