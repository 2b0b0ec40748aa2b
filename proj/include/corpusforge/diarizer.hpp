// corpusforge/diarizer.hpp
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
// Cluster assignment for clean-speech segments from per-segment embeddings:
// agglomerative clustering on cosine distance with a configurable linkage
// and stop distance. Externally produced diarizations can be imported as
// RTTM instead, so heavier clustering back ends remain usable.

#ifndef CORPUSFORGE_DIARIZER_HPP_
#define CORPUSFORGE_DIARIZER_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "corpusforge/embeddings.hpp"
#include "corpusforge/timeline.hpp"

namespace corpusforge {

inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty())
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (!(nu > 0.0) || !(nv > 0.0))
    throw std::invalid_argument("cosine_similarity: zero-norm vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

inline double cosine_distance(std::span<const double> u, std::span<const double> v) {
  return 1.0 - cosine_similarity(u, v);
}

enum class Linkage { average, complete, single };

inline Linkage linkage_from_string(const std::string& name) {
  if (name == "average") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  if (name == "single") return Linkage::single;
  throw std::invalid_argument("unknown linkage '" + name + "'");
}

struct ClusteringConfig {
  Linkage linkage = Linkage::average;
  // Cosine distance at which merging stops; 0.48 mirrors the 0.52
  // identification similarity operating point.
  double stop_distance = 0.48;

  void validate() const {
    if (!(stop_distance >= 0.0) || !(stop_distance <= 2.0))
      throw std::invalid_argument("ClusteringConfig: stop_distance must be in [0,2]");
  }
};

/// Deterministic bottom-up merge: repeatedly joins the closest active pair
/// (ties broken by the lexicographically smallest active-position pair)
/// while the minimum linkage distance does not exceed stop_distance.
/// Returns one canonical label per input record, "cluster_0" ... named in
/// order of each cluster's earliest segment start.
inline std::vector<std::string> ahc_cluster(const EmbeddingSet& set,
                                            const ClusteringConfig& cfg) {
  cfg.validate();
  if (set.empty())
    throw std::invalid_argument("ahc_cluster: need at least one embedding");

  const std::size_t n = set.size();
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist[i][j] = dist[j][i] = cosine_distance(set[i].vector, set[j].vector);

  // active[k] indexes members/dist; merges keep the earlier slot.
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;

  while (active.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t a = 0; a + 1 < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double d = dist[active[a]][active[b]];
        if (d < best) {
          best = d;
          bi = a;
          bj = b;
        }
      }
    }
    if (best > cfg.stop_distance) break;

    const std::size_t ci = active[bi], cj = active[bj];
    const auto si = static_cast<double>(members[ci].size());
    const auto sj = static_cast<double>(members[cj].size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t ck = active[a];
      if (ck == ci || ck == cj) continue;
      double d = 0.0;
      switch (cfg.linkage) {
        case Linkage::average:
          d = (si * dist[ck][ci] + sj * dist[ck][cj]) / (si + sj);
          break;
        case Linkage::complete:
          d = std::max(dist[ck][ci], dist[ck][cj]);
          break;
        case Linkage::single:
          d = std::min(dist[ck][ci], dist[ck][cj]);
          break;
      }
      dist[ck][ci] = dist[ci][ck] = d;
    }
    members[ci].insert(members[ci].end(), members[cj].begin(), members[cj].end());
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  // Canonical names in order of earliest segment start.
  using SortKey = std::tuple<std::int64_t, std::int64_t, std::size_t>;
  std::vector<std::pair<SortKey, std::size_t>> order;
  order.reserve(active.size());
  for (std::size_t c : active) {
    SortKey key{std::numeric_limits<std::int64_t>::max(),
                std::numeric_limits<std::int64_t>::max(), 0};
    for (std::size_t m : members[c]) {
      SortKey k{set[m].segment.start.millis(), set[m].segment.end.millis(), m};
      key = std::min(key, k);
    }
    order.emplace_back(key, c);
  }
  std::sort(order.begin(), order.end());

  std::vector<std::string> labels(n);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::string name = "cluster_" + std::to_string(rank);
    for (std::size_t m : members[order[rank].second]) labels[m] = name;
  }
  return labels;
}

/// Builds the Annotation handed to the EAF exporter: one labeled entry per
/// embedded segment. labels must parallel set.records().
inline Annotation to_annotation(const EmbeddingSet& set,
                                const std::vector<std::string>& labels) {
  if (set.empty())
    throw std::invalid_argument("to_annotation: empty embedding set");
  if (labels.size() != set.size())
    throw std::invalid_argument("to_annotation: one label per segment required");
  Annotation out;
  for (std::size_t i = 0; i < set.size(); ++i) out.add(set[i].segment, labels[i]);
  return out;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_DIARIZER_HPP_
