// tests/test_synth.cpp
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

#include <map>
#include <set>

#include "corpusforge/diarizer.hpp"
#include "corpusforge/synth.hpp"

using namespace corpusforge;

namespace {

std::size_t partition_size(const std::vector<std::string>& labels) {
  return std::set<std::string>(labels.begin(), labels.end()).size();
}

}  // namespace

TEST_CASE("gen_diarization: pure function of the seed") {
  SynthSpec spec;
  spec.seed = 12345;
  spec.boundary_jitter = 0.5;
  spec.relabel_prob = 0.2;
  const auto a = gen_diarization(spec);
  const auto b = gen_diarization(spec);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  spec.seed = 12346;
  const auto c = gen_diarization(spec);
  CHECK(a.first != c.first);
}

TEST_CASE("gen_diarization: zero perturbation gives DER 0") {
  SynthSpec spec;
  spec.seed = 5;
  auto [reference, hypothesis] = gen_diarization(spec);
  CHECK(reference == hypothesis);
  CHECK(der(reference, hypothesis, 0.0).der == 0.0);
  CHECK(oracle_der(reference, hypothesis, 0.0).der == 0.0);
}

TEST_CASE("gen_diarization: full deletion gives DER 100%") {
  SynthSpec spec;
  spec.seed = 6;
  spec.delete_prob = 1.0;
  auto [reference, hypothesis] = gen_diarization(spec);
  CHECK(hypothesis.empty());
  const auto breakdown = der(reference, hypothesis, 0.0);
  CHECK(breakdown.der == doctest::Approx(1.0));
  CHECK(breakdown.missed == breakdown.scored_speech);
}

TEST_CASE("gen_diarization: boundaries land on the quantum") {
  SynthSpec spec;
  spec.seed = 7;
  spec.boundary_jitter = 0.333;
  spec.overlap_prob = 0.3;
  spec.insert_prob = 0.2;
  auto [reference, hypothesis] = gen_diarization(spec);
  for (const Annotation* ann : {&reference, &hypothesis})
    for (const auto& e : ann->entries()) {
      CHECK(e.segment.start.millis() % 10 == 0);
      CHECK(e.segment.end.millis() % 10 == 0);
    }
}

TEST_CASE("oracle_der: relabeled 2 s turn in a 10 s document scores 20%") {
  Annotation reference;
  reference.add(Segment::from_seconds(0, 8), "spk0");
  reference.add(Segment::from_seconds(8, 10), "spk1");
  Annotation hypothesis;
  hypothesis.add(Segment::from_seconds(0, 8), "spk0");
  hypothesis.add(Segment::from_seconds(8, 10), "spk0");  // relabeled
  const auto oracle = oracle_der(reference, hypothesis, 0.0);
  CHECK(oracle.confusion == doctest::Approx(2.0));
  CHECK(oracle.der == doctest::Approx(0.2));
  const auto exact = der(reference, hypothesis, 0.0);
  CHECK(exact.der == doctest::Approx(oracle.der));
}

TEST_CASE("oracle_der: rejects more than 6 speakers") {
  Annotation reference, hypothesis;
  for (int i = 0; i < 7; ++i)
    reference.add(Segment::from_seconds(i, i + 1), "spk" + std::to_string(i));
  hypothesis.add(Segment::from_seconds(0, 1), "x");
  CHECK_THROWS_AS(oracle_der(reference, hypothesis, 0.0), std::invalid_argument);
}

TEST_CASE("gen_trials: separable means give EER 0, equal means 0.5-ish") {
  const auto separable = gen_trials(200, 200, 0.9, 0.1, 0.01, 11);
  CHECK(eer(separable).eer == doctest::Approx(0.0));
  const auto mixed = gen_trials(5000, 5000, 0.5, 0.5, 0.15, 12);
  CHECK(eer(mixed).eer == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("gen_trials: deterministic per seed") {
  CHECK(gen_trials(50, 50, 0.7, 0.3, 0.1, 99) == gen_trials(50, 50, 0.7, 0.3, 0.1, 99));
  CHECK(gen_trials(50, 50, 0.7, 0.3, 0.1, 99) != gen_trials(50, 50, 0.7, 0.3, 0.1, 98));
}

TEST_CASE("gen_embeddings: tight clusters are recovered exactly by AHC") {
  const auto data = gen_embeddings(2, 12, 5.0, 21, 8);
  REQUIRE(data.set.size() == 24);
  const auto labels = ahc_cluster(data.set, ClusteringConfig{});
  // the partition must match the ground truth exactly
  std::map<std::string, std::set<int>> found;
  for (std::size_t i = 0; i < labels.size(); ++i)
    found[labels[i]].insert(data.labels[i]);
  CHECK(found.size() == 2);
  for (const auto& [name, truths] : found) CHECK(truths.size() == 1);
}

TEST_CASE("gen_embeddings: one cluster collapses, singletons stay apart") {
  const auto one = gen_embeddings(1, 10, 5.0, 31, 8);
  CHECK(partition_size(ahc_cluster(one.set, ClusteringConfig{})) == 1);

  const auto singles = gen_embeddings(4, 1, 0.0, 41, 8);
  ClusteringConfig tight;
  tight.stop_distance = 0.1;
  CHECK(partition_size(ahc_cluster(singles.set, tight)) == 4);
}

TEST_CASE("gen_embeddings: vectors stay within the requested angle") {
  const double angle_deg = 20.0;
  const auto data = gen_embeddings(3, 30, angle_deg, 51, 8);
  for (std::size_t i = 0; i < data.set.size(); ++i) {
    std::vector<double> center(8, 0.0);
    center[static_cast<std::size_t>(data.labels[i])] = 1.0;
    const double cosine = cosine_similarity(center, data.set[i].vector);
    CHECK(cosine >= std::cos(angle_deg * 3.14159265358979323846 / 180.0) - 1e-9);
  }
}
