// corpusforge/speaker_id.hpp
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
// Cross-show target-speaker identification: each candidate segment is
// scored by its mean cosine similarity against the known embeddings of the
// target, and accepted per segment against a similarity threshold.
// Decisions are per segment, not per cluster, trading recall for precision.

#ifndef CORPUSFORGE_SPEAKER_ID_HPP_
#define CORPUSFORGE_SPEAKER_ID_HPP_

#include <string>
#include <utility>
#include <vector>

#include "corpusforge/diarizer.hpp"
#include "corpusforge/embeddings.hpp"
#include "corpusforge/metrics.hpp"
#include "corpusforge/rng.hpp"
#include "corpusforge/timeline.hpp"

namespace corpusforge {

struct IdentificationConfig {
  double threshold = 0.52;        // similarity; >= accepts
  double min_total_speech = 180.0;  // seconds required per speaker

  void validate() const {
    if (!(threshold >= -1.0) || !(threshold <= 1.0))
      throw std::invalid_argument("IdentificationConfig: threshold must be in [-1,1]");
    if (min_total_speech < 0.0)
      throw std::invalid_argument("IdentificationConfig: min_total_speech must be >= 0");
  }
};

struct SegmentScore {
  Segment segment;
  double score = 0.0;
};

/// Mean cosine similarity of each candidate vector to all known vectors.
inline std::vector<SegmentScore> segment_scores(const EmbeddingSet& known,
                                                const EmbeddingSet& candidates) {
  if (known.empty())
    throw std::invalid_argument("segment_scores: empty known set");
  if (candidates.empty())
    throw std::invalid_argument("segment_scores: empty candidate set");
  if (known.dim() != candidates.dim())
    throw std::invalid_argument("segment_scores: dimension mismatch (" +
                                std::to_string(known.dim()) + " vs " +
                                std::to_string(candidates.dim()) + ")");
  std::vector<SegmentScore> out;
  out.reserve(candidates.size());
  for (const auto& cand : candidates.records()) {
    double sum = 0.0;
    for (const auto& ref : known.records())
      sum += cosine_similarity(ref.vector, cand.vector);
    out.push_back({cand.segment, sum / static_cast<double>(known.size())});
  }
  return out;
}

struct IdentificationResult {
  std::vector<SegmentScore> accepted;
  std::vector<SegmentScore> rejected;
  bool target_present = false;
  double accepted_duration = 0.0;  // seconds
};

/// A segment is accepted iff its score >= threshold (closed comparison, so
/// a published operating point is attainable exactly). When nothing is
/// accepted the target is considered absent from the document.
inline IdentificationResult identify(const EmbeddingSet& known,
                                     const EmbeddingSet& candidates,
                                     const IdentificationConfig& cfg = {}) {
  cfg.validate();
  IdentificationResult result;
  std::vector<Segment> accepted_segs;
  for (const auto& scored : segment_scores(known, candidates)) {
    if (scored.score >= cfg.threshold) {
      result.accepted.push_back(scored);
      accepted_segs.push_back(scored.segment);
    } else {
      result.rejected.push_back(scored);
    }
  }
  result.target_present = !result.accepted.empty();
  result.accepted_duration = Timeline(std::move(accepted_segs)).total_duration_seconds();
  return result;
}

struct SpeechBudget {
  double new_total = 0.0;  // seconds
  bool satisfied = false;  // new_total >= min_total_speech
};

/// Rolls newly accepted speech into a speaker's running total and checks
/// the three-minute goal (boundary inclusive).
inline SpeechBudget speech_budget(double prior_seconds, const IdentificationResult& result,
                                  const IdentificationConfig& cfg = {}) {
  cfg.validate();
  SpeechBudget budget;
  budget.new_total = prior_seconds + result.accepted_duration;
  budget.satisfied = budget.new_total >= cfg.min_total_speech;
  return budget;
}

// ---------------------------------------------------------------------------
// Verification-trial pairing (same speaker / same gender / cross gender)
// ---------------------------------------------------------------------------

enum class Gender { female, male };

/// One speaker with per-recording-session embeddings (at least two sessions
/// so a same-speaker pair exists).
struct SpeakerSessions {
  std::string speaker_id;
  Gender gender = Gender::female;
  std::vector<std::vector<double>> sessions;
};

/// Builds one trial of each pair type per speaker: same speaker across two
/// sessions (target), two speakers of the same gender, and two speakers of
/// different gender (both non-target). Partner choice is a seeded
/// derangement so the protocol is reproducible.
inline std::vector<ScoredTrial> make_verification_trials(
    const std::vector<SpeakerSessions>& speakers, std::uint64_t seed) {
  std::vector<std::size_t> females, males;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    if (speakers[i].sessions.size() < 2)
      throw std::invalid_argument("make_verification_trials: speaker " +
                                  speakers[i].speaker_id + " needs >= 2 sessions");
    (speakers[i].gender == Gender::female ? females : males).push_back(i);
  }
  if (females.size() < 2 || males.size() < 2)
    throw std::invalid_argument(
        "make_verification_trials: need >= 2 speakers of each gender");

  Rng rng(seed);
  const auto partner_map = [&](std::vector<std::size_t> pool) {
    // shift by a random non-zero offset: everyone gets a partner != self
    std::vector<std::size_t> shuffled = pool;
    rng.shuffle(shuffled);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < shuffled.size(); ++k)
      pairs.emplace_back(shuffled[k], shuffled[(k + 1) % shuffled.size()]);
    return pairs;
  };

  std::vector<ScoredTrial> trials;
  for (const auto& spk : speakers)
    trials.push_back({cosine_similarity(spk.sessions[0], spk.sessions[1]), true});
  for (const auto& pool : {females, males})
    for (const auto& [a, b] : partner_map(pool))
      trials.push_back(
          {cosine_similarity(speakers[a].sessions[0], speakers[b].sessions[1]), false});
  {
    // one cross-gender pair per speaker, partners drawn cyclically from a
    // seeded shuffle of the other gender
    std::vector<std::size_t> f = females, m = males;
    rng.shuffle(f);
    rng.shuffle(m);
    for (std::size_t k = 0; k < f.size(); ++k)
      trials.push_back({cosine_similarity(speakers[f[k]].sessions[0],
                                          speakers[m[k % m.size()]].sessions[1]),
                        false});
    for (std::size_t k = 0; k < m.size(); ++k)
      trials.push_back({cosine_similarity(speakers[m[k]].sessions[0],
                                          speakers[f[k % f.size()]].sessions[1]),
                        false});
  }
  return trials;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_SPEAKER_ID_HPP_
