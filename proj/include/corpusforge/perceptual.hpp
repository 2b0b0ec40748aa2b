// corpusforge/perceptual.hpp
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
// Perceptual-annotation records: per extract and per annotator, four boolean
// problem flags (backchannel, several speakers, music, noise) plus a free
// comment. Stored as CSV; annotations are produced by listening sessions
// outside this toolkit.

#ifndef CORPUSFORGE_PERCEPTUAL_HPP_
#define CORPUSFORGE_PERCEPTUAL_HPP_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/text_util.hpp"

namespace corpusforge {

inline constexpr int kNumProblemFlags = 4;
inline constexpr std::array<const char*, kNumProblemFlags> kProblemFlagNames = {
    "backchannel", "several_speakers", "music", "noise"};

struct PerceptualAnnotation {
  std::string extract_id;
  std::string annotator_id;
  std::array<bool, kNumProblemFlags> flags{};  // indexed per kProblemFlagNames
  std::string comment;

  bool backchannel() const { return flags[0]; }
  bool several_speakers() const { return flags[1]; }
  bool music() const { return flags[2]; }
  bool noise() const { return flags[3]; }

  friend bool operator==(const PerceptualAnnotation&, const PerceptualAnnotation&) = default;
};

/// Header must name at least extract_id, annotator_id and the four flag
/// columns; a trailing "comment" column is optional.
inline std::vector<PerceptualAnnotation> parse_perceptual_csv(std::string_view textbuf) {
  std::vector<PerceptualAnnotation> out;
  int id_col = -1, annot_col = -1, comment_col = -1;
  std::array<int, kNumProblemFlags> flag_cols;
  flag_cols.fill(-1);
  bool have_header = false;

  text::for_each_line(textbuf, [&](std::string_view line, int line_no) {
    const std::string context = "perceptual csv line " + std::to_string(line_no);
    if (text::trim(line).empty()) return;
    const auto fields = text::split_csv(line);
    if (!have_header) {
      for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
        const std::string name = std::string(text::trim(fields[i]));
        if (name == "extract_id") id_col = i;
        else if (name == "annotator_id") annot_col = i;
        else if (name == "comment") comment_col = i;
        else {
          for (int f = 0; f < kNumProblemFlags; ++f)
            if (name == kProblemFlagNames[f]) flag_cols[f] = i;
        }
      }
      if (id_col < 0 || annot_col < 0)
        throw ParseError(context + ": header must name extract_id and annotator_id");
      for (int f = 0; f < kNumProblemFlags; ++f)
        if (flag_cols[f] < 0)
          throw ParseError(context + ": header missing column '" +
                           std::string(kProblemFlagNames[f]) + "'");
      have_header = true;
      return;
    }
    PerceptualAnnotation rec;
    const auto get = [&](int col) -> std::string {
      if (col < 0 || col >= static_cast<int>(fields.size()))
        throw ParseError(context + ": too few fields");
      return fields[static_cast<std::size_t>(col)];
    };
    rec.extract_id = std::string(text::trim(get(id_col)));
    rec.annotator_id = std::string(text::trim(get(annot_col)));
    if (rec.extract_id.empty() || rec.annotator_id.empty())
      throw ParseError(context + ": empty extract_id or annotator_id");
    for (int f = 0; f < kNumProblemFlags; ++f) {
      const std::string v = std::string(text::trim(get(flag_cols[f])));
      if (v == "0") rec.flags[f] = false;
      else if (v == "1") rec.flags[f] = true;
      else throw ParseError(context + ": flag '" + std::string(kProblemFlagNames[f]) +
                            "' must be 0 or 1, got '" + v + "'");
    }
    if (comment_col >= 0 && comment_col < static_cast<int>(fields.size()))
      rec.comment = fields[static_cast<std::size_t>(comment_col)];
    out.push_back(std::move(rec));
  });
  if (!have_header) throw ParseError("perceptual csv: empty input");
  return out;
}

inline std::string write_perceptual_csv(const std::vector<PerceptualAnnotation>& records) {
  std::string out = "extract_id,annotator_id,backchannel,several_speakers,music,noise,comment\n";
  for (const auto& rec : records) {
    out += text::csv_escape(rec.extract_id) + "," + text::csv_escape(rec.annotator_id);
    for (int f = 0; f < kNumProblemFlags; ++f) out += rec.flags[f] ? ",1" : ",0";
    out += "," + text::csv_escape(rec.comment) + "\n";
  }
  return out;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_PERCEPTUAL_HPP_
