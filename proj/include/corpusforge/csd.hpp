// corpusforge/csd.hpp
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
// Clean Speech Detection: speech (VAD) minus overlapped speech (OVL) minus
// non-speech audio events (NSE), with short leftovers dropped. The stage
// report mirrors the standard coverage-accounting layout, one row per
// pre-processing combination.

#ifndef CORPUSFORGE_CSD_HPP_
#define CORPUSFORGE_CSD_HPP_

#include <optional>
#include <string>
#include <vector>

#include "corpusforge/text_util.hpp"
#include "corpusforge/timeline.hpp"

namespace corpusforge {

struct CsdInputs {
  Timeline vad;
  Timeline ovl;
  Timeline nse;
  double min_duration = 2.0;  // seconds
};

/// filter_min_duration((vad \ ovl) \ nse, min_duration). The minimum-duration
/// filter runs last: a long VAD segment whittled below the minimum by the
/// subtractions is dropped.
inline Timeline clean_speech(const CsdInputs& inputs) {
  if (inputs.min_duration < 0.0)
    throw std::invalid_argument("clean_speech: min_duration must be >= 0");
  const Timeline no_overlap = subtract(inputs.vad, inputs.ovl);
  const Timeline no_events = subtract(no_overlap, inputs.nse);
  return filter_min_duration(no_events, inputs.min_duration);
}

struct StageRow {
  std::string name;
  double duration_seconds = 0.0;
  std::optional<double> coverage;  // fraction of reference duration
};

struct StageReport {
  std::vector<StageRow> rows;
  bool has_reference = false;
};

/// One row per pre-processing stage, with duration and (when a reference is
/// given) coverage as the raw duration ratio against the reference. The
/// ratio convention is stated in the rendered header because coverage could
/// equally be computed on the intersection with the reference.
inline StageReport stage_report(const std::optional<Timeline>& ref, const Timeline& vad,
                                const Timeline& ovl, const Timeline& nse,
                                double min_duration = 2.0) {
  StageReport report;
  report.has_reference = ref.has_value();

  const auto add_row = [&](const std::string& name, const Timeline& tl) {
    StageRow row;
    row.name = name;
    row.duration_seconds = tl.total_duration_seconds();
    if (ref && ref->total_duration_millis() > 0) row.coverage = coverage_ratio(tl, *ref);
    report.rows.push_back(std::move(row));
  };

  if (ref) {
    add_row("Reference", *ref);
    add_row("Ref+OVL", subtract(*ref, ovl));
    add_row("Ref+NSE", subtract(*ref, nse));
  }
  const Timeline vad_ovl = subtract(vad, ovl);
  const Timeline vad_nse = subtract(vad, nse);
  const Timeline vad_ovl_nse = subtract(vad_ovl, nse);
  add_row("VAD", vad);
  add_row("VAD+OVL", vad_ovl);
  add_row("VAD+NSE", vad_nse);
  add_row("VAD+OVL+NSE", vad_ovl_nse);
  add_row("CSD", filter_min_duration(vad_ovl_nse, min_duration));
  return report;
}

inline std::string format_stage_report_text(const StageReport& report) {
  std::string out;
  out += "Stage          Duration (s)   Coverage\n";
  if (report.has_reference)
    out += "(coverage = stage duration / reference duration)\n";
  for (const auto& row : report.rows) {
    std::string line = row.name;
    line.resize(15, ' ');
    std::string dur = text::fixed(row.duration_seconds, 3);
    line += std::string(dur.size() < 13 ? 13 - dur.size() : 0, ' ') + dur;
    if (row.coverage)
      line += "   " + text::fixed(*row.coverage * 100.0, 1) + "%";
    out += line + "\n";
  }
  return out;
}

inline std::string format_stage_report_csv(const StageReport& report) {
  std::string out = "stage,duration_seconds,coverage\n";
  for (const auto& row : report.rows) {
    out += row.name + "," + text::fixed(row.duration_seconds, 3) + ",";
    if (row.coverage) out += text::fixed(*row.coverage, 6);
    out += "\n";
  }
  return out;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_CSD_HPP_
