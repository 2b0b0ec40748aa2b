// corpusforge/rttm.hpp
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
// NIST RTTM v1.3 "SPEAKER" records and UEM scoring-region files. Both are
// line-oriented interchange formats used to move diarization segments in and
// out of the pipeline. Onsets and durations are written with 3 decimals,
// matching the millisecond internal resolution.

#ifndef CORPUSFORGE_RTTM_HPP_
#define CORPUSFORGE_RTTM_HPP_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/text_util.hpp"
#include "corpusforge/timeline.hpp"

namespace corpusforge {

struct RttmRecord {
  std::string file_id;
  int channel = 1;
  double onset = 0.0;     // seconds
  double duration = 0.0;  // seconds, > 0
  std::string speaker;

  Segment segment() const {
    return Segment(TimePoint::from_seconds(onset),
                   TimePoint::from_seconds(onset + duration));
  }

  friend bool operator==(const RttmRecord&, const RttmRecord&) = default;
};

struct RttmParseResult {
  std::vector<RttmRecord> records;
  int skipped_records = 0;  // non-SPEAKER record types
};

namespace detail {

inline void check_field_has_no_ws(std::string_view field, const std::string& context) {
  if (field.find_first_of(" \t") != std::string_view::npos)
    throw ParseError(context + ": whitespace inside field");
}

}  // namespace detail

/// Parses RTTM text. Lines starting with ";;" are comments. Record types
/// other than SPEAKER are counted and skipped. Malformed lines throw a
/// ParseError naming the line.
inline RttmParseResult parse_rttm(std::string_view textbuf) {
  RttmParseResult result;
  text::for_each_line(textbuf, [&](std::string_view line, int line_no) {
    const std::string context = "rttm line " + std::to_string(line_no);
    std::string_view stripped = text::trim(line);
    if (stripped.empty() || stripped.substr(0, 2) == ";;") return;
    const auto fields = text::split_ws(stripped);
    if (fields.size() < 9)
      throw ParseError(context + ": expected >= 9 fields, got " +
                       std::to_string(fields.size()));
    if (fields[0] != "SPEAKER") {
      ++result.skipped_records;
      return;
    }
    RttmRecord rec;
    rec.file_id = std::string(fields[1]);
    rec.channel = static_cast<int>(text::parse_int(fields[2], context));
    rec.onset = text::parse_double(fields[3], context);
    rec.duration = text::parse_double(fields[4], context);
    rec.speaker = std::string(fields[7]);
    if (rec.onset < 0.0)
      throw ParseError(context + ": negative onset");
    if (rec.duration <= 0.0)
      throw ParseError(context + ": non-positive duration");
    if (rec.onset + rec.duration > 4.0e15)
      throw ParseError(context + ": time out of range");
    if (rec.speaker.empty() || rec.speaker == "<NA>")
      throw ParseError(context + ": missing speaker name");
    result.records.push_back(std::move(rec));
  });
  return result;
}

inline std::string write_rttm(const std::vector<RttmRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    detail::check_field_has_no_ws(rec.file_id, "rttm write");
    detail::check_field_has_no_ws(rec.speaker, "rttm write");
    if (rec.duration <= 0.0)
      throw std::invalid_argument("write_rttm: non-positive duration");
    out += "SPEAKER " + rec.file_id + " " + std::to_string(rec.channel) + " " +
           text::fixed(rec.onset, 3) + " " + text::fixed(rec.duration, 3) +
           " <NA> <NA> " + rec.speaker + " <NA> <NA>\n";
  }
  return out;
}

/// Groups SPEAKER records into one Annotation per file id.
inline std::map<std::string, Annotation> to_annotations(const std::vector<RttmRecord>& records) {
  std::map<std::string, std::vector<Annotation::Entry>> grouped;
  for (const auto& rec : records)
    grouped[rec.file_id].push_back({rec.segment(), rec.speaker});
  std::map<std::string, Annotation> out;
  for (auto& [file_id, entries] : grouped)
    out.emplace(file_id, Annotation(std::move(entries)));
  return out;
}

inline std::vector<RttmRecord> to_rttm_records(const std::string& file_id,
                                               const Annotation& annotation,
                                               int channel = 1) {
  std::vector<RttmRecord> out;
  out.reserve(annotation.size());
  for (const auto& e : annotation.entries()) {
    RttmRecord rec;
    rec.file_id = file_id;
    rec.channel = channel;
    rec.onset = e.segment.start.seconds();
    rec.duration = e.segment.duration_seconds();
    rec.speaker = e.label;
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<RttmRecord> to_rttm_records(const std::string& file_id,
                                               const Timeline& timeline,
                                               const std::string& label,
                                               int channel = 1) {
  Annotation ann;
  for (const auto& s : timeline.segments()) ann.add(s, label);
  return to_rttm_records(file_id, ann, channel);
}

// ---------------------------------------------------------------------------
// UEM: "file_id channel onset offset" scoring regions.
// ---------------------------------------------------------------------------

/// Parses UEM text into one normalized Timeline per file id.
inline std::map<std::string, Timeline> parse_uem(std::string_view textbuf) {
  std::map<std::string, std::vector<Segment>> grouped;
  text::for_each_line(textbuf, [&](std::string_view line, int line_no) {
    const std::string context = "uem line " + std::to_string(line_no);
    std::string_view stripped = text::trim(line);
    if (stripped.empty() || stripped.substr(0, 2) == ";;") return;
    const auto fields = text::split_ws(stripped);
    if (fields.size() != 4)
      throw ParseError(context + ": expected 4 fields, got " +
                       std::to_string(fields.size()));
    const double onset = text::parse_double(fields[2], context);
    const double offset = text::parse_double(fields[3], context);
    if (onset < 0.0 || offset <= onset)
      throw ParseError(context + ": need 0 <= onset < offset");
    try {
      grouped[std::string(fields[0])].push_back(Segment::from_seconds(onset, offset));
    } catch (const std::invalid_argument& e) {
      throw ParseError(context + ": " + std::string(e.what()));
    }
  });
  std::map<std::string, Timeline> out;
  for (auto& [file_id, segs] : grouped) out.emplace(file_id, Timeline(std::move(segs)));
  return out;
}

inline std::string write_uem(const std::map<std::string, Timeline>& regions,
                             int channel = 1) {
  std::string out;
  for (const auto& [file_id, tl] : regions) {
    detail::check_field_has_no_ws(file_id, "uem write");
    for (const auto& s : tl.segments())
      out += file_id + " " + std::to_string(channel) + " " +
             text::fixed(s.start.seconds(), 3) + " " +
             text::fixed(s.end.seconds(), 3) + "\n";
  }
  return out;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_RTTM_HPP_
