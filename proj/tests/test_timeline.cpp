// tests/test_timeline.cpp
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

#include "corpusforge/timeline.hpp"
#include "corpusforge/rng.hpp"
#include "test_support.hpp"

using namespace corpusforge;

TEST_CASE("TimePoint is exact at millisecond resolution") {
  CHECK(TimePoint::from_seconds(1.2345).millis() == 1235);  // round to nearest
  CHECK(TimePoint::from_seconds(0.0).millis() == 0);
  CHECK(TimePoint::from_millis(42).seconds() == doctest::Approx(0.042));
  CHECK_THROWS_AS(TimePoint::from_seconds(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(TimePoint::from_seconds(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(TimePoint::from_millis(-1), std::invalid_argument);
}

TEST_CASE("Segment rejects zero or negative length") {
  CHECK_THROWS_AS(Segment::from_seconds(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Segment::from_seconds(2.0, 1.0), std::invalid_argument);
  CHECK(Segment::from_seconds(0.5, 2.5).duration_seconds() == doctest::Approx(2.0));
}

TEST_CASE("normalization merges overlap and adjacency, sorts") {
  CHECK(Timeline::from_seconds({{0, 2}, {1, 3}}) == Timeline::from_seconds({{0, 3}}));
  CHECK(Timeline::from_seconds({{0, 1}, {1, 2}}) == Timeline::from_seconds({{0, 2}}));
  const Timeline sorted = Timeline::from_seconds({{5, 6}, {0, 1}});
  REQUIRE(sorted.size() == 2);
  CHECK(sorted.segments()[0].start.millis() == 0);
  CHECK(sorted.segments()[1].start.millis() == 5000);
}

TEST_CASE("normalize is idempotent") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const Timeline tl = testsupport::random_timeline(rng, 12, 30000);
    CHECK(Timeline(tl.segments()) == tl);
  }
}

TEST_CASE("union examples") {
  CHECK(union_of(Timeline::from_seconds({{0, 1}}), Timeline::from_seconds({{2, 3}})) ==
        Timeline::from_seconds({{0, 1}, {2, 3}}));
  CHECK(union_of(Timeline::from_seconds({{0, 2}}), Timeline::from_seconds({{1, 3}})) ==
        Timeline::from_seconds({{0, 3}}));
  const Timeline x = Timeline::from_seconds({{1, 4}, {6, 9}});
  CHECK(union_of(Timeline(), x) == x);
}

TEST_CASE("intersect examples") {
  CHECK(intersect(Timeline::from_seconds({{0, 2}}), Timeline::from_seconds({{1, 3}})) ==
        Timeline::from_seconds({{1, 2}}));
  CHECK(intersect(Timeline::from_seconds({{0, 1}}), Timeline::from_seconds({{2, 3}}))
            .empty());
  const Timeline x = Timeline::from_seconds({{0, 2}, {5, 6}});
  CHECK(intersect(x, x) == x);
}

TEST_CASE("subtract examples") {
  CHECK(subtract(Timeline::from_seconds({{0, 10}}), Timeline::from_seconds({{4, 6}})) ==
        Timeline::from_seconds({{0, 4}, {6, 10}}));
  CHECK(subtract(Timeline::from_seconds({{0, 10}}), Timeline::from_seconds({{0, 10}}))
            .empty());
  CHECK(subtract(Timeline::from_seconds({{0, 5}}), Timeline::from_seconds({{5, 9}})) ==
        Timeline::from_seconds({{0, 5}}));
}

TEST_CASE("filter_min_duration keeps the boundary case") {
  CHECK(filter_min_duration(Timeline::from_seconds({{0, 1.9}, {3, 6}}), 2.0) ==
        Timeline::from_seconds({{3, 6}}));
  CHECK(filter_min_duration(Timeline::from_seconds({{0, 2}}), 2.0) ==
        Timeline::from_seconds({{0, 2}}));
  const Timeline any = Timeline::from_seconds({{0, 2}, {1, 3}, {7, 8}});
  CHECK(filter_min_duration(any, 0.0) == any);
}

TEST_CASE("total_duration") {
  CHECK(Timeline::from_seconds({{0, 2}, {1, 3}}).total_duration_seconds() ==
        doctest::Approx(3.0));
  CHECK(Timeline().total_duration_seconds() == 0.0);
  CHECK(Timeline::from_seconds({{0, 1}, {2, 4}}).total_duration_seconds() ==
        doctest::Approx(3.0));
}

TEST_CASE("coverage_ratio") {
  const Timeline ref = Timeline::from_seconds({{0, 10}});
  CHECK(coverage_ratio(ref, ref) == doctest::Approx(1.0));
  CHECK(coverage_ratio(Timeline(), ref) == doctest::Approx(0.0));
  CHECK_THROWS_AS(coverage_ratio(ref, Timeline()), std::invalid_argument);
  // the published aggregate: 23980 s of 72311 s is 33.2%
  const Timeline csd = Timeline::from_seconds({{0.0, 23980.0}});
  const Timeline dev = Timeline::from_seconds({{0.0, 72311.0}});
  CHECK(coverage_ratio(csd, dev) * 100.0 == doctest::Approx(33.2).epsilon(0.002));
}

TEST_CASE("set operations agree with the 1 ms boolean-array model") {
  Rng rng(1234);
  constexpr std::int64_t kSpan = 20000;  // 20 s
  for (int i = 0; i < 300; ++i) {
    const Timeline a = testsupport::random_timeline(rng, 10, kSpan);
    const Timeline b = testsupport::random_timeline(rng, 10, kSpan);
    const auto ga = testsupport::to_grid(a, kSpan);
    const auto gb = testsupport::to_grid(b, kSpan);

    std::vector<char> g_union(ga.size()), g_inter(ga.size()), g_diff(ga.size());
    for (std::size_t t = 0; t < ga.size(); ++t) {
      g_union[t] = ga[t] | gb[t];
      g_inter[t] = ga[t] & gb[t];
      g_diff[t] = ga[t] & static_cast<char>(!gb[t]);
    }
    CHECK(union_of(a, b) == testsupport::from_grid(g_union));
    CHECK(intersect(a, b) == testsupport::from_grid(g_inter));
    CHECK(subtract(a, b) == testsupport::from_grid(g_diff));
  }
}

TEST_CASE("inclusion-exclusion duration identity holds exactly") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const Timeline a = testsupport::random_timeline(rng, 10, 60000);
    const Timeline b = testsupport::random_timeline(rng, 10, 60000);
    const auto u = union_of(a, b).total_duration_millis();
    const auto parts = subtract(a, b).total_duration_millis() +
                       subtract(b, a).total_duration_millis() +
                       intersect(a, b).total_duration_millis();
    CHECK(u == parts);
  }
}

TEST_CASE("Annotation keeps entries sorted and projects per label") {
  Annotation ann;
  ann.add(Segment::from_seconds(5, 6), "b");
  ann.add(Segment::from_seconds(0, 2), "a");
  ann.add(Segment::from_seconds(1, 3), "a");
  CHECK(ann.entries().front().label == "a");
  CHECK(ann.labels() == std::vector<std::string>{"a", "b"});
  CHECK(ann.label_timeline("a") == Timeline::from_seconds({{0, 3}}));
  CHECK(ann.label_timeline("b") == Timeline::from_seconds({{5, 6}}));
  CHECK(ann.support() == Timeline::from_seconds({{0, 3}, {5, 6}}));
  CHECK_THROWS_AS(ann.add(Segment::from_seconds(0, 1), ""), std::invalid_argument);
}
