// corpusforge/planner.hpp
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
// Corpus definition bookkeeping: 32 demographic categories (2 genders x 4
// age bands x 4 broadcast periods), 30 speakers required per category, 180
// seconds of accepted speech per speaker. Each speaker belongs to exactly
// one category. The ledger persists as CSV so long runs are resumable.

#ifndef CORPUSFORGE_PLANNER_HPP_
#define CORPUSFORGE_PLANNER_HPP_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/speaker_id.hpp"  // Gender
#include "corpusforge/text_util.hpp"

namespace corpusforge {

/// Integer age bands as used by the quota table: [20,35], [36,50], [51,65],
/// 66 and over. The bands partition ages >= 20.
enum class AgeBand { age_20_35, age_36_50, age_51_65, over_65 };

/// The four two-year broadcast windows.
enum class Period { p1955_56, p1975_76, p1995_96, p2015_16 };

inline constexpr std::array<AgeBand, 4> kAgeBands = {
    AgeBand::age_20_35, AgeBand::age_36_50, AgeBand::age_51_65, AgeBand::over_65};
inline constexpr std::array<Period, 4> kPeriods = {
    Period::p1955_56, Period::p1975_76, Period::p1995_96, Period::p2015_16};

inline const char* to_string(AgeBand band) {
  switch (band) {
    case AgeBand::age_20_35: return "20-35";
    case AgeBand::age_36_50: return "36-50";
    case AgeBand::age_51_65: return "51-65";
    case AgeBand::over_65: return "over-65";
  }
  return "?";
}

inline const char* to_string(Period period) {
  switch (period) {
    case Period::p1955_56: return "1955-56";
    case Period::p1975_76: return "1975-76";
    case Period::p1995_96: return "1995-96";
    case Period::p2015_16: return "2015-16";
  }
  return "?";
}

inline const char* to_string(Gender gender) {
  return gender == Gender::female ? "female" : "male";
}

inline Gender gender_from_string(std::string_view s) {
  if (s == "female" || s == "F" || s == "f") return Gender::female;
  if (s == "male" || s == "M" || s == "m") return Gender::male;
  throw std::invalid_argument("unknown gender '" + std::string(s) + "'");
}

struct CategoryKey {
  Gender gender = Gender::female;
  AgeBand age_band = AgeBand::age_20_35;
  Period period = Period::p1955_56;

  friend auto operator<=>(const CategoryKey&, const CategoryKey&) = default;
};

inline std::string to_string(const CategoryKey& key) {
  return std::string(to_string(key.gender)) + "/" + to_string(key.age_band) + "/" +
         to_string(key.period);
}

inline CategoryKey category_from_string(std::string_view s) {
  const auto parts = text::split_char(s, '/');
  if (parts.size() != 3)
    throw std::invalid_argument("category must be gender/age-band/period, got '" +
                                std::string(s) + "'");
  CategoryKey key;
  key.gender = gender_from_string(parts[0]);
  bool found = false;
  for (AgeBand band : kAgeBands)
    if (parts[1] == to_string(band)) { key.age_band = band; found = true; }
  if (!found) throw std::invalid_argument("unknown age band '" + std::string(parts[1]) + "'");
  found = false;
  for (Period period : kPeriods)
    if (parts[2] == to_string(period)) { key.period = period; found = true; }
  if (!found) throw std::invalid_argument("unknown period '" + std::string(parts[2]) + "'");
  return key;
}

inline std::optional<Period> period_of_year(int year) {
  switch (year) {
    case 1955: case 1956: return Period::p1955_56;
    case 1975: case 1976: return Period::p1975_76;
    case 1995: case 1996: return Period::p1995_96;
    case 2015: case 2016: return Period::p2015_16;
    default: return std::nullopt;
  }
}

/// Assigns a speaker to a category from integer year arithmetic (the
/// thesaurus extract has no month precision). Returns nullopt when the
/// broadcast year falls outside every period or the age at broadcast is
/// under 20. Throws on implausible years.
inline std::optional<CategoryKey> categorize(Gender gender, int birth_year,
                                             int broadcast_year) {
  if (birth_year < 1850 || birth_year > 2100 || broadcast_year < 1850 ||
      broadcast_year > 2100)
    throw std::invalid_argument("categorize: implausible year");
  const auto period = period_of_year(broadcast_year);
  if (!period) return std::nullopt;
  const int age = broadcast_year - birth_year;
  if (age < 20) return std::nullopt;
  CategoryKey key;
  key.gender = gender;
  key.period = *period;
  if (age <= 35) key.age_band = AgeBand::age_20_35;
  else if (age <= 50) key.age_band = AgeBand::age_36_50;
  else if (age <= 65) key.age_band = AgeBand::age_51_65;
  else key.age_band = AgeBand::over_65;
  return key;
}

struct SpeakerRecord {
  std::string id;
  std::string name;
  Gender gender = Gender::female;
  int birth_year = 0;
  std::vector<std::pair<std::string, int>> documents;  // (doc_id, broadcast_year)
  double accepted_speech = 0.0;                        // seconds
};

/// Per-category progress toward the 30-speaker / 3-minute goals. A speaker
/// is registered in exactly one category; registering the same id twice is
/// an error.
class QuotaLedger {
 public:
  struct Entry {
    CategoryKey category;
    double accepted_speech = 0.0;
  };

  explicit QuotaLedger(int required_per_category = 30, double min_speech_seconds = 180.0)
      : required_(required_per_category), min_speech_(min_speech_seconds) {}

  void register_speaker(const SpeakerRecord& speaker, const CategoryKey& category) {
    if (speakers_.count(speaker.id))
      throw std::invalid_argument("QuotaLedger: speaker '" + speaker.id +
                                  "' already registered");
    speakers_[speaker.id] = Entry{category, speaker.accepted_speech};
  }

  void credit_speech(const std::string& speaker_id, double seconds) {
    auto it = speakers_.find(speaker_id);
    if (it == speakers_.end())
      throw std::invalid_argument("QuotaLedger: unknown speaker '" + speaker_id + "'");
    if (seconds < 0.0)
      throw std::invalid_argument("QuotaLedger: negative speech credit");
    it->second.accepted_speech += seconds;
  }

  bool has_speaker(const std::string& speaker_id) const {
    return speakers_.count(speaker_id) > 0;
  }

  int identified(const CategoryKey& key) const {
    int n = 0;
    for (const auto& [id, e] : speakers_) n += (e.category == key) ? 1 : 0;
    return n;
  }

  int satisfied(const CategoryKey& key) const {
    int n = 0;
    for (const auto& [id, e] : speakers_)
      n += (e.category == key && e.accepted_speech >= min_speech_) ? 1 : 0;
    return n;
  }

  int total_identified() const { return static_cast<int>(speakers_.size()); }

  int required_per_category() const { return required_; }
  double min_speech_seconds() const { return min_speech_; }

  const std::map<std::string, Entry>& entries() const { return speakers_; }

 private:
  int required_;
  double min_speech_;
  std::map<std::string, Entry> speakers_;
};

/// Table-5-style grid: one row per period, one column per age band, each
/// cell "F/M" counts of speakers with sufficient data; counts below the
/// per-category requirement are flagged with '*'. Totals per gender close
/// the report.
inline std::string quota_report(const QuotaLedger& ledger) {
  std::string out;
  out += "Speakers with sufficient data (female/male), '*' marks categories below " +
         std::to_string(ledger.required_per_category()) + "\n\n";
  std::string header = "Period   ";
  for (AgeBand band : kAgeBands) {
    std::string cell = to_string(band);
    cell.resize(10, ' ');
    header += " | " + cell;
  }
  out += header + "\n";
  out += std::string(header.size(), '-') + "\n";

  int total_female = 0, total_male = 0;
  for (Period period : kPeriods) {
    std::string line = to_string(period);
    line.resize(9, ' ');
    for (AgeBand band : kAgeBands) {
      const int nf = ledger.satisfied({Gender::female, band, period});
      const int nm = ledger.satisfied({Gender::male, band, period});
      total_female += nf;
      total_male += nm;
      const auto mark = [&](int n) {
        return std::to_string(n) + (n < ledger.required_per_category() ? "*" : "");
      };
      std::string cell = mark(nf) + "/" + mark(nm);
      cell.resize(10, ' ');
      line += " | " + cell;
    }
    out += line + "\n";
  }
  out += "\nTotals: " + std::to_string(total_female) + " female, " +
         std::to_string(total_male) + " male, " +
         std::to_string(total_female + total_male) + " speakers\n";
  return out;
}

// ---------------------------------------------------------------------------
// Roster and ledger CSV
// ---------------------------------------------------------------------------

/// Roster rows: id,name,gender,birth_year,doc_id,broadcast_year. A speaker
/// appearing in several documents repeats the id across rows; name, gender
/// and birth year must agree.
inline std::vector<SpeakerRecord> parse_roster_csv(std::string_view textbuf) {
  std::map<std::string, SpeakerRecord> by_id;
  std::vector<std::string> order;
  bool have_header = false;
  text::for_each_line(textbuf, [&](std::string_view line, int line_no) {
    const std::string context = "roster line " + std::to_string(line_no);
    if (text::trim(line).empty()) return;
    const auto fields = text::split_csv(line);
    if (!have_header) {
      if (fields.size() < 6 || text::trim(fields[0]) != "id")
        throw ParseError(context +
                         ": header must be id,name,gender,birth_year,doc_id,broadcast_year");
      have_header = true;
      return;
    }
    if (fields.size() < 6) throw ParseError(context + ": expected 6 fields");
    const std::string id = std::string(text::trim(fields[0]));
    if (id.empty()) throw ParseError(context + ": empty id");
    SpeakerRecord rec;
    rec.id = id;
    rec.name = fields[1];
    try {
      rec.gender = gender_from_string(text::trim(fields[2]));
    } catch (const std::invalid_argument& e) {
      throw ParseError(context + ": " + std::string(e.what()));
    }
    rec.birth_year = static_cast<int>(text::parse_int(text::trim(fields[3]), context));
    const std::string doc_id = std::string(text::trim(fields[4]));
    const int year = static_cast<int>(text::parse_int(text::trim(fields[5]), context));
    auto [it, inserted] = by_id.emplace(id, rec);
    if (inserted) {
      order.push_back(id);
    } else if (it->second.gender != rec.gender || it->second.birth_year != rec.birth_year) {
      throw ParseError(context + ": speaker '" + id +
                       "' repeats with different gender or birth year");
    }
    it->second.documents.emplace_back(doc_id, year);
  });
  if (!have_header) throw ParseError("roster csv: empty input");
  std::vector<SpeakerRecord> out;
  out.reserve(order.size());
  for (const auto& id : order) out.push_back(by_id.at(id));
  return out;
}

inline std::string write_ledger_csv(const QuotaLedger& ledger) {
  std::string out = "speaker_id,category,identified,accepted_seconds\n";
  for (const auto& [id, e] : ledger.entries())
    out += text::csv_escape(id) + "," + to_string(e.category) + ",1," +
           text::fixed(e.accepted_speech, 3) + "\n";
  return out;
}

inline QuotaLedger parse_ledger_csv(std::string_view textbuf, int required_per_category = 30,
                                    double min_speech_seconds = 180.0) {
  QuotaLedger ledger(required_per_category, min_speech_seconds);
  bool have_header = false;
  text::for_each_line(textbuf, [&](std::string_view line, int line_no) {
    const std::string context = "ledger line " + std::to_string(line_no);
    if (text::trim(line).empty()) return;
    const auto fields = text::split_csv(line);
    if (!have_header) {
      if (fields.size() < 4 || text::trim(fields[0]) != "speaker_id")
        throw ParseError(context +
                         ": header must be speaker_id,category,identified,accepted_seconds");
      have_header = true;
      return;
    }
    if (fields.size() < 4) throw ParseError(context + ": expected 4 fields");
    SpeakerRecord rec;
    rec.id = std::string(text::trim(fields[0]));
    rec.accepted_speech = text::parse_double(text::trim(fields[3]), context);
    try {
      ledger.register_speaker(rec, category_from_string(text::trim(fields[1])));
    } catch (const std::invalid_argument& e) {
      throw ParseError(context + ": " + std::string(e.what()));
    }
  });
  if (!have_header) throw ParseError("ledger csv: empty input");
  return ledger;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_PLANNER_HPP_
