// corpusforge/agreement.hpp
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
// Perceptual-quality evaluation: seeded sampling of extracts for listening,
// majority-vote aggregation of per-annotator problem flags, Fleiss' kappa
// (classic and the rater-marginal "exact" variant), and per-category
// problem-rate tables.

#ifndef CORPUSFORGE_AGREEMENT_HPP_
#define CORPUSFORGE_AGREEMENT_HPP_

#include <array>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "corpusforge/perceptual.hpp"
#include "corpusforge/planner.hpp"
#include "corpusforge/rng.hpp"
#include "corpusforge/text_util.hpp"

namespace corpusforge {

// ---------------------------------------------------------------------------
// Fleiss' kappa
// ---------------------------------------------------------------------------

/// Subjects x categories rating counts from a fixed number of raters.
struct RatingMatrix {
  int n_raters = 0;
  std::vector<std::vector<int>> counts;  // counts[subject][category]

  void validate() const {
    if (n_raters < 2) throw std::invalid_argument("RatingMatrix: need >= 2 raters");
    if (counts.empty()) throw std::invalid_argument("RatingMatrix: need >= 1 subject");
    const std::size_t k = counts.front().size();
    if (k < 2) throw std::invalid_argument("RatingMatrix: need >= 2 categories");
    for (const auto& row : counts) {
      if (row.size() != k)
        throw std::invalid_argument("RatingMatrix: ragged category counts");
      int sum = 0;
      for (int c : row) {
        if (c < 0) throw std::invalid_argument("RatingMatrix: negative count");
        sum += c;
      }
      if (sum != n_raters)
        throw std::invalid_argument("RatingMatrix: row does not sum to n_raters");
    }
  }
};

/// Classic Fleiss (1971) statistic: chance agreement from pooled category
/// marginals, kappa = (P̄ - P̄e) / (1 - P̄e). Throws when every rater used a
/// single category (P̄e = 1, kappa undefined).
inline double fleiss_kappa(const RatingMatrix& m) {
  m.validate();
  const auto n_subjects = static_cast<double>(m.counts.size());
  const auto n_raters = static_cast<double>(m.n_raters);
  const std::size_t k = m.counts.front().size();

  double mean_agreement = 0.0;
  std::vector<double> pooled(k, 0.0);
  for (const auto& row : m.counts) {
    double sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      sq += static_cast<double>(row[j]) * static_cast<double>(row[j]);
      pooled[j] += static_cast<double>(row[j]);
    }
    mean_agreement += (sq - n_raters) / (n_raters * (n_raters - 1.0));
  }
  mean_agreement /= n_subjects;

  double chance = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double pj = pooled[j] / (n_subjects * n_raters);
    chance += pj * pj;
  }
  if (chance >= 1.0)
    throw std::domain_error("fleiss_kappa: all ratings in one category, kappa undefined");
  return (mean_agreement - chance) / (1.0 - chance);
}

/// Full per-rater assignment table: ratings[subject][rater] = category index
/// in [0, n_categories). Needed by the exact variant, which uses per-rater
/// marginals.
struct RaterMatrix {
  int n_categories = 0;
  std::vector<std::vector<int>> ratings;

  void validate() const {
    if (n_categories < 2) throw std::invalid_argument("RaterMatrix: need >= 2 categories");
    if (ratings.empty()) throw std::invalid_argument("RaterMatrix: need >= 1 subject");
    const std::size_t n_raters = ratings.front().size();
    if (n_raters < 2) throw std::invalid_argument("RaterMatrix: need >= 2 raters");
    for (const auto& row : ratings) {
      if (row.size() != n_raters)
        throw std::invalid_argument("RaterMatrix: ragged rater assignments");
      for (int c : row)
        if (c < 0 || c >= n_categories)
          throw std::invalid_argument("RaterMatrix: category index out of range");
    }
  }

  RatingMatrix to_counts() const {
    validate();
    RatingMatrix m;
    m.n_raters = static_cast<int>(ratings.front().size());
    m.counts.reserve(ratings.size());
    for (const auto& row : ratings) {
      std::vector<int> counts(static_cast<std::size_t>(n_categories), 0);
      for (int c : row) ++counts[static_cast<std::size_t>(c)];
      m.counts.push_back(std::move(counts));
    }
    return m;
  }
};

/// "Exact" Fleiss' kappa in the sense of the irr toolkit: Conger-style
/// chance agreement averaging products of per-rater category marginals over
/// rater pairs, instead of squaring the pooled marginal.
inline double fleiss_kappa_exact(const RaterMatrix& m) {
  m.validate();
  const RatingMatrix counts = m.to_counts();

  const auto n_subjects = static_cast<double>(m.ratings.size());
  const auto n_raters = static_cast<double>(counts.n_raters);
  const auto k = static_cast<std::size_t>(m.n_categories);

  double mean_agreement = 0.0;
  for (const auto& row : counts.counts) {
    double sq = 0.0;
    for (int c : row) sq += static_cast<double>(c) * static_cast<double>(c);
    mean_agreement += (sq - n_raters) / (n_raters * (n_raters - 1.0));
  }
  mean_agreement /= n_subjects;

  // marginal[r][j]: fraction of subjects rater r assigned to category j
  std::vector<std::vector<double>> marginal(
      static_cast<std::size_t>(counts.n_raters), std::vector<double>(k, 0.0));
  for (const auto& row : m.ratings)
    for (std::size_t r = 0; r < row.size(); ++r)
      marginal[r][static_cast<std::size_t>(row[r])] += 1.0 / n_subjects;

  double chance = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double col_sum = 0.0, col_sq = 0.0;
    for (std::size_t r = 0; r < marginal.size(); ++r) {
      col_sum += marginal[r][j];
      col_sq += marginal[r][j] * marginal[r][j];
    }
    chance += col_sum * col_sum - col_sq;
  }
  chance /= n_raters * (n_raters - 1.0);

  if (chance >= 1.0)
    throw std::domain_error("fleiss_kappa_exact: all ratings in one category, kappa undefined");
  return (mean_agreement - chance) / (1.0 - chance);
}

// ---------------------------------------------------------------------------
// Sampling for perceptual annotation
// ---------------------------------------------------------------------------

struct SpeakerExtractPool {
  std::string speaker_id;
  CategoryKey category;
  std::vector<std::string> extract_ids;  // candidate extracts for this speaker
};

/// Selects at most per_category_cap speakers per demographic category and
/// one random extract per selected speaker. Fully deterministic for a given
/// seed; a category with fewer speakers than the cap contributes all of
/// them (the 309-out-of-320 situation).
inline std::vector<std::string> sample_extracts(
    const std::vector<SpeakerExtractPool>& speakers, int per_category_cap,
    std::uint64_t seed) {
  if (per_category_cap < 0)
    throw std::invalid_argument("sample_extracts: negative cap");

  std::map<CategoryKey, std::vector<const SpeakerExtractPool*>> by_category;
  std::set<std::string> seen;
  for (const auto& spk : speakers) {
    if (!seen.insert(spk.speaker_id).second)
      throw std::invalid_argument("sample_extracts: duplicate speaker '" +
                                  spk.speaker_id + "'");
    if (!spk.extract_ids.empty()) by_category[spk.category].push_back(&spk);
  }

  Rng rng(seed);
  std::vector<std::string> out;
  for (auto& [category, pool] : by_category) {
    std::sort(pool.begin(), pool.end(),
              [](const SpeakerExtractPool* a, const SpeakerExtractPool* b) {
                return a->speaker_id < b->speaker_id;
              });
    rng.shuffle(pool);
    const auto take = std::min<std::size_t>(pool.size(),
                                            static_cast<std::size_t>(per_category_cap));
    for (std::size_t i = 0; i < take; ++i) {
      const auto& ids = pool[i]->extract_ids;
      out.push_back(ids[static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(ids.size())))]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Majority vote and problem rates
// ---------------------------------------------------------------------------

struct AggregatedFlags {
  std::string extract_id;
  std::array<bool, kNumProblemFlags> flags{};
  int n_annotators = 0;

  bool any() const {
    for (bool f : flags)
      if (f) return true;
    return false;
  }
};

/// Aggregates the records of one extract: with several annotators a flag
/// must be reported by at least two of them; a singly-annotated extract
/// keeps its one judgment.
inline AggregatedFlags majority_vote(std::span<const PerceptualAnnotation> records) {
  if (records.empty())
    throw std::invalid_argument("majority_vote: no records");
  if (records.size() > 3)
    throw std::invalid_argument("majority_vote: more than 3 annotators for extract '" +
                                records.front().extract_id + "'");
  std::set<std::string> annotators;
  for (const auto& r : records) {
    if (r.extract_id != records.front().extract_id)
      throw std::invalid_argument("majority_vote: mixed extract ids");
    if (!annotators.insert(r.annotator_id).second)
      throw std::invalid_argument("majority_vote: duplicate annotator '" +
                                  r.annotator_id + "' for extract '" +
                                  r.extract_id + "'");
  }

  AggregatedFlags out;
  out.extract_id = records.front().extract_id;
  out.n_annotators = static_cast<int>(records.size());
  for (int f = 0; f < kNumProblemFlags; ++f) {
    int votes = 0;
    for (const auto& r : records) votes += r.flags[static_cast<std::size_t>(f)] ? 1 : 0;
    out.flags[static_cast<std::size_t>(f)] =
        records.size() == 1 ? votes == 1 : votes >= 2;
  }
  return out;
}

/// Groups a flat record list by extract id and majority-votes each group.
inline std::vector<AggregatedFlags> aggregate_annotations(
    std::span<const PerceptualAnnotation> records) {
  std::map<std::string, std::vector<PerceptualAnnotation>> grouped;
  for (const auto& r : records) grouped[r.extract_id].push_back(r);
  std::vector<AggregatedFlags> out;
  out.reserve(grouped.size());
  for (const auto& [id, recs] : grouped) out.push_back(majority_vote(recs));
  return out;
}

struct ExtractJudgment {
  AggregatedFlags flags;
  CategoryKey category;
};

struct ProblemRateRow {
  std::string group;
  int n_extracts = 0;
  std::array<double, kNumProblemFlags> rates{};  // percentages
  double any_rate = 0.0;                         // percentage
};

/// Percentage of extracts carrying each problem flag (and at least one,
/// "Any"): globally, then by period, gender and age band, matching the
/// layout of the per-category problem table.
inline std::vector<ProblemRateRow> problem_rates(std::span<const ExtractJudgment> judgments) {
  const auto rate_row = [&](const std::string& group, auto&& predicate) {
    ProblemRateRow row;
    row.group = group;
    std::array<int, kNumProblemFlags> counts{};
    int any = 0;
    for (const auto& j : judgments) {
      if (!predicate(j)) continue;
      ++row.n_extracts;
      for (int f = 0; f < kNumProblemFlags; ++f)
        counts[static_cast<std::size_t>(f)] += j.flags.flags[static_cast<std::size_t>(f)];
      any += j.flags.any() ? 1 : 0;
    }
    if (row.n_extracts > 0) {
      for (int f = 0; f < kNumProblemFlags; ++f)
        row.rates[static_cast<std::size_t>(f)] =
            100.0 * counts[static_cast<std::size_t>(f)] / row.n_extracts;
      row.any_rate = 100.0 * any / row.n_extracts;
    }
    return row;
  };

  std::vector<ProblemRateRow> rows;
  rows.push_back(rate_row("Globally", [](const ExtractJudgment&) { return true; }));
  for (Period p : kPeriods)
    rows.push_back(rate_row(to_string(p),
                            [p](const ExtractJudgment& j) { return j.category.period == p; }));
  for (Gender g : {Gender::female, Gender::male}) {
    std::string name = to_string(g);
    name[0] = static_cast<char>(name[0] - 'a' + 'A');
    rows.push_back(rate_row(name,
                            [g](const ExtractJudgment& j) { return j.category.gender == g; }));
  }
  for (AgeBand b : kAgeBands)
    rows.push_back(rate_row(to_string(b),
                            [b](const ExtractJudgment& j) { return j.category.age_band == b; }));
  return rows;
}

inline std::string format_problem_rates_text(std::span<const ProblemRateRow> rows) {
  std::string out = "Group      Backchannel  SeveralSpk  Music    Noise    Any      N\n";
  for (const auto& row : rows) {
    std::string line = row.group;
    line.resize(11, ' ');
    for (double r : row.rates) {
      std::string cell = text::fixed(r, 1);
      cell.resize(9, ' ');
      line += cell;
    }
    {
      std::string cell = text::fixed(row.any_rate, 1);
      cell.resize(9, ' ');
      line += cell;
    }
    line += std::to_string(row.n_extracts);
    out += line + "\n";
  }
  return out;
}

inline std::string format_problem_rates_csv(std::span<const ProblemRateRow> rows) {
  std::string out = "group,backchannel,several_speakers,music,noise,any,n_extracts\n";
  for (const auto& row : rows) {
    out += row.group;
    for (double r : row.rates) out += "," + text::fixed(r, 3);
    out += "," + text::fixed(row.any_rate, 3) + "," + std::to_string(row.n_extracts) + "\n";
  }
  return out;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_AGREEMENT_HPP_
