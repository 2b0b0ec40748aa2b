// tests/test_diarizer.cpp
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

#include <set>

#include "corpusforge/diarizer.hpp"
#include "corpusforge/rng.hpp"

using namespace corpusforge;

namespace {

EmbeddingSet set_from_vectors(const std::vector<std::vector<double>>& vectors) {
  EmbeddingSet set;
  for (std::size_t i = 0; i < vectors.size(); ++i)
    set.add(EmbeddingRecord{"doc",
                            Segment::from_millis(static_cast<std::int64_t>(i) * 2000,
                                                 static_cast<std::int64_t>(i) * 2000 + 1500),
                            vectors[i]});
  return set;
}

/// Canonical partition (set of sorted member-index sets) from per-record
/// label strings.
std::set<std::vector<std::size_t>> partition_of(const std::vector<std::string>& labels) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  std::set<std::vector<std::size_t>> out;
  for (auto& [label, members] : groups) out.insert(members);
  return out;
}

/// Reference clusterer: recomputes every cluster-pair linkage from the
/// original pairwise distance matrix at each step (by the set definition of
/// the linkage), instead of Lance-Williams updates. Usable for small n.
std::set<std::vector<std::size_t>> brute_force_ahc(
    const std::vector<std::vector<double>>& vectors, Linkage linkage,
    double stop_distance) {
  const std::size_t n = vectors.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d[i][j] = cosine_distance(vectors[i], vectors[j]);

  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});

  const auto linkage_of = [&](const std::vector<std::size_t>& a,
                              const std::vector<std::size_t>& b) {
    double best = linkage == Linkage::single ? 1e300 : -1e300;
    double sum = 0.0;
    for (std::size_t x : a)
      for (std::size_t y : b) {
        sum += d[x][y];
        if (linkage == Linkage::single) best = std::min(best, d[x][y]);
        if (linkage == Linkage::complete) best = std::max(best, d[x][y]);
      }
    if (linkage == Linkage::average)
      return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    return best;
  };

  while (clusters.size() > 1) {
    double best = 1e300;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i + 1 < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double link = linkage_of(clusters[i], clusters[j]);
        if (link < best) {
          best = link;
          bi = i;
          bj = j;
        }
      }
    if (best > stop_distance) break;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  std::set<std::vector<std::size_t>> out;
  for (auto& c : clusters) {
    std::sort(c.begin(), c.end());
    out.insert(c);
  }
  return out;
}

std::vector<std::vector<double>> random_vectors(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<std::vector<double>> out(n, std::vector<double>(dim));
  for (auto& v : out)
    for (auto& x : v) x = rng.normal();
  return out;
}

}  // namespace

TEST_CASE("cosine_similarity basic values") {
  const std::vector<double> ex = {1, 0}, ey = {0, 1}, diag = {1, 1};
  const std::vector<double> three = {1, 0, 0};
  CHECK(cosine_similarity(ex, ex) == doctest::Approx(1.0));
  CHECK(cosine_similarity(ex, ey) == doctest::Approx(0.0));
  CHECK(cosine_similarity(diag, ex) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK_THROWS_AS(cosine_similarity(ex, three), std::invalid_argument);
}

TEST_CASE("cosine_similarity rejects zero norm") {
  const std::vector<double> zero = {0, 0}, ex = {1, 0};
  CHECK_THROWS_AS(cosine_similarity(zero, ex), std::invalid_argument);
}

TEST_CASE("ahc: two tight bundles give two clusters at stop 0.48") {
  Rng rng(3);
  std::vector<std::vector<double>> vectors;
  for (int i = 0; i < 6; ++i)
    vectors.push_back({1.0, 0.02 * rng.normal()});
  for (int i = 0; i < 5; ++i)
    vectors.push_back({0.02 * rng.normal(), 1.0});
  const auto labels = ahc_cluster(set_from_vectors(vectors), ClusteringConfig{});
  const auto partition = partition_of(labels);
  REQUIRE(partition.size() == 2);
  // canonical names assigned by first segment start: record 0 is cluster_0
  CHECK(labels[0] == "cluster_0");
  CHECK(labels[6] == "cluster_1");
}

TEST_CASE("ahc: single embedding is one cluster") {
  const auto labels = ahc_cluster(set_from_vectors({{1, 0}}), ClusteringConfig{});
  CHECK(labels == std::vector<std::string>{"cluster_0"});
}

TEST_CASE("ahc: stop distance 2 merges everything") {
  Rng rng(17);
  const auto vectors = random_vectors(rng, 10, 8);
  ClusteringConfig cfg;
  cfg.stop_distance = 2.0;
  const auto labels = ahc_cluster(set_from_vectors(vectors), cfg);
  CHECK(partition_of(labels).size() == 1);
}

TEST_CASE("ahc agrees with the brute-force dendrogram for n <= 8") {
  Rng rng(2026);
  for (Linkage linkage : {Linkage::average, Linkage::complete, Linkage::single}) {
    for (int round = 0; round < 60; ++round) {
      const auto n = static_cast<std::size_t>(2 + rng.uniform_int(7));
      const auto vectors = random_vectors(rng, n, 4);
      ClusteringConfig cfg;
      cfg.linkage = linkage;
      cfg.stop_distance = rng.uniform(0.0, 1.5);
      const auto labels = ahc_cluster(set_from_vectors(vectors), cfg);
      CHECK(partition_of(labels) == brute_force_ahc(vectors, linkage, cfg.stop_distance));
    }
  }
}

TEST_CASE("ahc: permuting input order never changes the partition") {
  Rng rng(555);
  for (int round = 0; round < 30; ++round) {
    const auto n = static_cast<std::size_t>(3 + rng.uniform_int(8));
    const auto vectors = random_vectors(rng, n, 6);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);

    // permuted set, but segments keep their original positions so canonical
    // names stay comparable
    EmbeddingSet original = set_from_vectors(vectors);
    EmbeddingSet permuted;
    for (std::size_t i = 0; i < n; ++i) {
      const auto src = perm[i];
      permuted.add(EmbeddingRecord{"doc", original[src].segment, vectors[src]});
    }

    const auto labels_a = ahc_cluster(original, ClusteringConfig{});
    const auto labels_b = ahc_cluster(permuted, ClusteringConfig{});
    for (std::size_t i = 0; i < n; ++i) CHECK(labels_b[i] == labels_a[perm[i]]);
  }
}

TEST_CASE("ahc: positive rescaling of vectors changes nothing") {
  Rng rng(777);
  const auto vectors = random_vectors(rng, 9, 5);
  auto scaled = vectors;
  for (std::size_t i = 0; i < scaled.size(); ++i)
    for (auto& x : scaled[i]) x *= 0.1 + static_cast<double>(i);
  CHECK(ahc_cluster(set_from_vectors(vectors), ClusteringConfig{}) ==
        ahc_cluster(set_from_vectors(scaled), ClusteringConfig{}));
}

TEST_CASE("to_annotation") {
  const auto set = set_from_vectors({{1, 0}, {0, 1}});
  const Annotation one = to_annotation(set, {"cluster_0", "cluster_0"});
  CHECK(one.labels() == std::vector<std::string>{"cluster_0"});
  const Annotation two = to_annotation(set, {"cluster_0", "cluster_1"});
  CHECK(two.labels().size() == 2);
  CHECK_THROWS_AS(to_annotation(set, {"cluster_0"}), std::invalid_argument);
  CHECK_THROWS_AS(to_annotation(EmbeddingSet{}, {}), std::invalid_argument);
}
