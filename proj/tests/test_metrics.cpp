// tests/test_metrics.cpp
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corpusforge/metrics.hpp"
#include "corpusforge/rng.hpp"
#include "corpusforge/synth.hpp"
#include "test_support.hpp"

using namespace corpusforge;

namespace {

Annotation ann(std::initializer_list<std::tuple<double, double, const char*>> entries) {
  Annotation out;
  for (const auto& [s, e, label] : entries)
    out.add(Segment::from_seconds(s, e), label);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// DER
// ---------------------------------------------------------------------------

TEST_CASE("der: 20% confusion hand case") {
  const auto breakdown = der(ann({{0, 10, "A"}}), ann({{0, 8, "1"}, {8, 10, "2"}}), 0.0);
  CHECK(breakdown.missed == 0.0);
  CHECK(breakdown.false_alarm == 0.0);
  CHECK(breakdown.confusion == 2.0);
  CHECK(breakdown.scored_speech == 10.0);
  CHECK(breakdown.der == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("der: identical diarization under any labels scores zero") {
  const auto reference = ann({{0, 5, "A"}, {5, 9, "B"}, {12, 20, "A"}});
  const auto hypothesis = ann({{0, 5, "x"}, {5, 9, "y"}, {12, 20, "x"}});
  for (double collar : {0.0, 0.25, 1.0}) {
    const auto breakdown = der(reference, hypothesis, collar);
    CHECK(breakdown.der == 0.0);
    CHECK(breakdown.missed == 0.0);
    CHECK(breakdown.false_alarm == 0.0);
    CHECK(breakdown.confusion == 0.0);
  }
}

TEST_CASE("der: empty hypothesis is all miss, DER 100%") {
  const auto breakdown = der(ann({{0, 6, "A"}, {2, 4, "B"}}), Annotation{}, 0.0);
  CHECK(breakdown.missed == breakdown.scored_speech);
  CHECK(breakdown.scored_speech == 8.0);  // overlap counts per speaker
  CHECK(breakdown.der == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("der: false alarms outside reference speech push DER above 1") {
  const auto breakdown = der(ann({{0, 2, "A"}}), ann({{0, 2, "1"}, {2, 10, "2"}}), 0.0);
  CHECK(breakdown.false_alarm == 8.0);
  CHECK(breakdown.scored_speech == 2.0);
  CHECK(breakdown.der == doctest::Approx(4.0));
}

TEST_CASE("der: relabeling the hypothesis never changes the result") {
  Rng rng(9);
  for (int round = 0; round < 20; ++round) {
    SynthSpec spec;
    spec.seed = 1000 + static_cast<std::uint64_t>(round);
    spec.n_speakers = 3;
    spec.doc_length = 30.0;
    spec.relabel_prob = 0.2;
    spec.boundary_jitter = 0.3;
    auto [reference, hypothesis] = gen_diarization(spec);

    Annotation renamed;
    for (const auto& e : hypothesis.entries()) renamed.add(e.segment, "z_" + e.label);

    const auto a = der(reference, hypothesis, 0.25);
    const auto b = der(reference, renamed, 0.25);
    CHECK(a.der == doctest::Approx(b.der).epsilon(1e-12));
    CHECK(a.confusion == doctest::Approx(b.confusion).epsilon(1e-12));
  }
}

TEST_CASE("der: widening the collar never increases scored speech") {
  SynthSpec spec;
  spec.seed = 77;
  spec.doc_length = 40.0;
  auto [reference, hypothesis] = gen_diarization(spec);
  double prev = 1e300;
  for (double collar : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    const auto breakdown = der(reference, hypothesis, collar);
    CHECK(breakdown.scored_speech <= prev);
    prev = breakdown.scored_speech;
  }
}

TEST_CASE("der: UEM restricts scoring") {
  const auto reference = ann({{0, 10, "A"}, {20, 30, "B"}});
  const auto hypothesis = ann({{0, 10, "1"}});  // B entirely missed
  const auto full = der(reference, hypothesis, 0.0);
  CHECK(full.missed == 10.0);
  CHECK(full.der == doctest::Approx(0.5));
  // restrict scoring to the first region: nothing is missed there
  const auto uem = Timeline::from_seconds({{0, 15}});
  const auto restricted = der(reference, hypothesis, 0.0, uem);
  CHECK(restricted.missed == 0.0);
  CHECK(restricted.der == 0.0);
  CHECK(restricted.scored_speech == 10.0);
}

TEST_CASE("der: optimal mapping picks the majority assignment") {
  // hyp "1" covers A for 6 s and B for 4 s; mapping must prefer A
  const auto reference = ann({{0, 6, "A"}, {6, 10, "B"}});
  const auto hypothesis = ann({{0, 10, "1"}});
  const auto breakdown = der(reference, hypothesis, 0.0);
  CHECK(breakdown.confusion == 4.0);
  CHECK(breakdown.der == doctest::Approx(0.4));
}

TEST_CASE("der: preconditions") {
  CHECK_THROWS_AS(der(Annotation{}, ann({{0, 1, "x"}}), 0.0), std::invalid_argument);
  // collar swallows the whole reference
  CHECK_THROWS_AS(der(ann({{0, 0.2, "A"}}), ann({{0, 0.2, "1"}}), 0.25),
                  std::invalid_argument);
}

TEST_CASE("der agrees with the grid oracle on random documents") {
  for (int round = 0; round < 40; ++round) {
    SynthSpec spec;
    spec.seed = 31000 + static_cast<std::uint64_t>(round);
    spec.n_speakers = 1 + round % 4;
    spec.doc_length = 45.0;
    spec.overlap_prob = 0.2;
    spec.boundary_jitter = 0.4;
    spec.relabel_prob = 0.1;
    spec.delete_prob = 0.1;
    spec.insert_prob = 0.1;
    auto [reference, hypothesis] = gen_diarization(spec);
    for (double collar : {0.0, 0.25}) {
      const auto exact = der(reference, hypothesis, collar);
      const auto oracle = oracle_der(reference, hypothesis, collar, 0.010);
      CHECK(std::abs(exact.der - oracle.der) <= 0.001);
    }
  }
}

// ---------------------------------------------------------------------------
// Segment-based recall
// ---------------------------------------------------------------------------

TEST_CASE("segment_recall: identity and empty hypothesis") {
  const Timeline events = Timeline::from_seconds({{1.2, 3.7}, {10, 12}});
  CHECK(segment_recall(events, events) == doctest::Approx(1.0));
  CHECK(segment_recall(events, Timeline{}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(segment_recall(Timeline{}, events), std::invalid_argument);
}

TEST_CASE("segment_recall: grid cells {2,3,4} vs {3,4,5} give 2/3") {
  const Timeline ref = Timeline::from_seconds({{2.0, 5.0}});
  const Timeline hyp = Timeline::from_seconds({{3.0, 6.0}});
  CHECK(segment_recall(ref, hyp, 1.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("segment_recall: adding hypothesis events never lowers recall") {
  Rng rng(4242);
  for (int round = 0; round < 50; ++round) {
    const Timeline ref = testsupport::random_timeline(rng, 8, 30000);
    const Timeline extra = testsupport::random_timeline(rng, 8, 30000);
    if (ref.empty()) continue;
    const double base = segment_recall(ref, ref);
    const double more = segment_recall(ref, union_of(ref, extra));
    CHECK(base == doctest::Approx(1.0));
    CHECK(more == doctest::Approx(1.0));
  }
}

TEST_CASE("segment_recall_by_class reports one recall per class") {
  std::map<std::string, Timeline> ref;
  ref["bg"] = Timeline::from_seconds({{0, 2}});
  ref["fg"] = Timeline::from_seconds({{10, 14}});
  const Timeline hyp = Timeline::from_seconds({{0, 2}, {10, 12}});
  const auto recalls = segment_recall_by_class(ref, hyp, 1.0);
  CHECK(recalls.at("bg") == doctest::Approx(1.0));
  CHECK(recalls.at("fg") == doctest::Approx(0.5));
}

// ---------------------------------------------------------------------------
// EER
// ---------------------------------------------------------------------------

namespace {

std::vector<ScoredTrial> trials_of(std::initializer_list<double> targets,
                                   std::initializer_list<double> nontargets) {
  std::vector<ScoredTrial> out;
  for (double s : targets) out.push_back({s, true});
  for (double s : nontargets) out.push_back({s, false});
  return out;
}

/// Exhaustive sweep: returns the bracket [lo, hi] that must contain the
/// interpolated EER, scanning every achievable operating point.
std::pair<double, double> eer_bracket(const std::vector<ScoredTrial>& trials) {
  std::vector<double> targets, nontargets;
  for (const auto& t : trials) (t.is_target ? targets : nontargets).push_back(t.score);
  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());
  std::vector<double> candidates;
  candidates.insert(candidates.end(), targets.begin(), targets.end());
  candidates.insert(candidates.end(), nontargets.begin(), nontargets.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  candidates.push_back(candidates.back() + 1.0);

  double prev_far = 1.0, prev_frr = 0.0;
  for (double t : candidates) {
    const double far =
        static_cast<double>(nontargets.end() -
                            std::lower_bound(nontargets.begin(), nontargets.end(), t)) /
        static_cast<double>(nontargets.size());
    const double frr =
        static_cast<double>(std::lower_bound(targets.begin(), targets.end(), t) -
                            targets.begin()) /
        static_cast<double>(targets.size());
    if (far <= frr) {
      const double lo = std::max(far, prev_frr);
      const double hi = std::min(prev_far, frr);
      return {std::min(lo, hi), std::max(lo, hi)};
    }
    prev_far = far;
    prev_frr = frr;
  }
  return {prev_far, prev_far};
}

}  // namespace

TEST_CASE("eer: perfectly separable scores give zero") {
  const auto result = eer(trials_of({0.8, 0.9}, {0.1, 0.2}));
  CHECK(result.eer == doctest::Approx(0.0));
  CHECK(result.threshold > 0.2);
  CHECK(result.threshold <= 0.8);
}

TEST_CASE("eer: identical multisets give one half") {
  const auto result = eer(trials_of({0.1, 0.5, 0.9}, {0.1, 0.5, 0.9}));
  CHECK(result.eer == doctest::Approx(0.5));
}

TEST_CASE("eer: crafted set crosses at exactly 1/3") {
  const auto result = eer(trials_of({0.6, 0.7, 0.9}, {0.3, 0.65, 0.8}));
  CHECK(result.eer == doctest::Approx(1.0 / 3.0));
  CHECK(result.threshold == doctest::Approx(0.7));
}

TEST_CASE("eer: single-class input is an error") {
  CHECK_THROWS_AS(eer(trials_of({0.5}, {})), std::invalid_argument);
  CHECK_THROWS_AS(eer(trials_of({}, {0.5})), std::invalid_argument);
}

TEST_CASE("eer: random trials stay inside the exhaustive-sweep bracket") {
  Rng rng(606);
  for (int round = 0; round < 500; ++round) {
    std::vector<ScoredTrial> trials;
    const auto n_t = 1 + rng.uniform_int(20);
    const auto n_n = 1 + rng.uniform_int(20);
    for (std::int64_t i = 0; i < n_t; ++i)
      trials.push_back({rng.normal(0.6, 0.3), true});
    for (std::int64_t i = 0; i < n_n; ++i)
      trials.push_back({rng.normal(0.4, 0.3), false});
    const auto result = eer(trials);
    const auto [lo, hi] = eer_bracket(trials);
    CHECK(result.eer >= lo - 1e-12);
    CHECK(result.eer <= hi + 1e-12);
  }
}

TEST_CASE("eer: identical distributions give about one half") {
  const auto trials = gen_trials(5000, 5000, 0.5, 0.5, 0.2, 808);
  const auto result = eer(trials);
  CHECK(result.eer == doctest::Approx(0.5).epsilon(0.04));
  CHECK(result.eer <= 0.5 + 0.02);
  CHECK(result.eer >= 0.5 - 0.02);
}

// ---------------------------------------------------------------------------
// PR sweep
// ---------------------------------------------------------------------------

TEST_CASE("pr_sweep: separable data reaches precision 1 recall 1") {
  const auto points = pr_sweep(trials_of({0.8, 0.9}, {0.1, 0.2}));
  bool perfect = false;
  for (const auto& p : points)
    if (p.precision == 1.0 && p.recall == 1.0) perfect = true;
  CHECK(perfect);
}

TEST_CASE("pr_sweep: threshold at the minimum accepts everything") {
  const auto trials = trials_of({0.6, 0.7}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.55});
  const auto points = pr_sweep(trials);
  const auto& lowest = points.front();
  CHECK(lowest.recall == doctest::Approx(1.0));
  CHECK(lowest.precision == doctest::Approx(2.0 / 8.0));  // target prevalence
}

TEST_CASE("pr_sweep: recall is monotone non-increasing in the threshold") {
  const auto trials = gen_trials(300, 300, 0.7, 0.3, 0.25, 1212);
  const auto points = pr_sweep(trials);
  for (std::size_t i = 1; i < points.size(); ++i) {
    CHECK(points[i].threshold > points[i - 1].threshold);
    CHECK(points[i].recall <= points[i - 1].recall + 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Distribution overlap
// ---------------------------------------------------------------------------

TEST_CASE("distribution_overlap: identical, disjoint, and the 2-bin case") {
  const std::vector<double> a = {0, 0, 1, 1};
  const std::vector<double> b = {1, 1, 2, 2};
  CHECK(distribution_overlap(a, a) == doctest::Approx(1.0));
  const std::vector<double> lo = {0.0, 0.1}, hi = {5.0, 5.1};
  CHECK(distribution_overlap(lo, hi) == doctest::Approx(0.0));
  CHECK(distribution_overlap(a, b, 2) == doctest::Approx(0.5));
  CHECK_THROWS_AS(distribution_overlap({}, a), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Trial CSV
// ---------------------------------------------------------------------------

TEST_CASE("trial csv round-trip") {
  const auto trials = gen_trials(10, 10, 0.8, 0.2, 0.1, 5);
  const std::string once = write_trials_csv(trials);
  const auto parsed = parse_trials_csv(once);
  REQUIRE(parsed.size() == trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    CHECK(parsed[i].is_target == trials[i].is_target);
    CHECK(parsed[i].score == doctest::Approx(trials[i].score).epsilon(1e-8));
  }
  CHECK_THROWS_AS(parse_trials_csv("score,is_target\n0.5,maybe\n"), ParseError);
}
