// corpusforge/eaf.hpp
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
// Minimal ELAN EAF 3.0 export: one tier per diarization cluster, alignable
// annotations over a shared TIME_ORDER (millisecond time slots), and the
// target-speaker list embedded as a controlled vocabulary so annotators can
// map cluster ids to identities from a dropdown. Export only; annotator
// decisions come back as a cluster-to-speaker mapping CSV, not as EAF.

#ifndef CORPUSFORGE_EAF_HPP_
#define CORPUSFORGE_EAF_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corpusforge/timeline.hpp"

namespace corpusforge {

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Writes a minimal EAF 3.0 document for the given cluster annotation.
/// The DATE attribute is fixed so re-exports of identical inputs are
/// byte-identical. Throws std::invalid_argument on an empty annotation.
inline std::string write_eaf(const Annotation& annotation,
                             const std::string& media_ref,
                             const std::vector<std::string>& target_speakers) {
  using detail::xml_escape;

  if (annotation.empty())
    throw std::invalid_argument("write_eaf: empty annotation");

  // One time slot per distinct boundary value, ordered.
  std::map<std::int64_t, std::string> slot_ids;
  for (const auto& e : annotation.entries()) {
    slot_ids[e.segment.start.millis()];
    slot_ids[e.segment.end.millis()];
  }
  int next_slot = 1;
  for (auto& [ms, id] : slot_ids) id = "ts" + std::to_string(next_slot++);

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out +=
      "<ANNOTATION_DOCUMENT AUTHOR=\"corpus-forge\" "
      "DATE=\"1970-01-01T00:00:00+00:00\" FORMAT=\"3.0\" VERSION=\"3.0\" "
      "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
      "xsi:noNamespaceSchemaLocation=\"http://www.mpi.nl/tools/elan/EAFv3.0.xsd\">\n";
  out += "  <HEADER MEDIA_FILE=\"\" TIME_UNITS=\"milliseconds\">\n";
  out += "    <MEDIA_DESCRIPTOR MEDIA_URL=\"" + xml_escape(media_ref) +
         "\" MIME_TYPE=\"audio/x-wav\"/>\n";
  out += "  </HEADER>\n";

  out += "  <TIME_ORDER>\n";
  for (const auto& [ms, id] : slot_ids)
    out += "    <TIME_SLOT TIME_SLOT_ID=\"" + id + "\" TIME_VALUE=\"" +
           std::to_string(ms) + "\"/>\n";
  out += "  </TIME_ORDER>\n";

  int next_annotation = 1;
  for (const auto& label : annotation.labels()) {
    out += "  <TIER LINGUISTIC_TYPE_REF=\"speaker-cv\" TIER_ID=\"" +
           xml_escape(label) + "\">\n";
    for (const auto& e : annotation.entries()) {
      if (e.label != label) continue;
      out += "    <ANNOTATION>\n";
      out += "      <ALIGNABLE_ANNOTATION ANNOTATION_ID=\"a" +
             std::to_string(next_annotation++) + "\" TIME_SLOT_REF1=\"" +
             slot_ids.at(e.segment.start.millis()) + "\" TIME_SLOT_REF2=\"" +
             slot_ids.at(e.segment.end.millis()) + "\">\n";
      // Value left empty: the annotator fills it from the controlled
      // vocabulary when mapping the cluster to a target speaker.
      out += "        <ANNOTATION_VALUE></ANNOTATION_VALUE>\n";
      out += "      </ALIGNABLE_ANNOTATION>\n";
      out += "    </ANNOTATION>\n";
    }
    out += "  </TIER>\n";
  }

  out +=
      "  <LINGUISTIC_TYPE GRAPHIC_REFERENCES=\"false\" "
      "LINGUISTIC_TYPE_ID=\"speaker-cv\" TIME_ALIGNABLE=\"true\" "
      "CONTROLLED_VOCABULARY_REF=\"target_speakers\"/>\n";

  out += "  <CONTROLLED_VOCABULARY CV_ID=\"target_speakers\">\n";
  out += "    <DESCRIPTION LANG_REF=\"und\">Target speakers for this document</DESCRIPTION>\n";
  int next_entry = 0;
  for (const auto& name : target_speakers) {
    out += "    <CV_ENTRY_ML CVE_ID=\"cve" + std::to_string(next_entry++) + "\">\n";
    out += "      <CVE_VALUE LANG_REF=\"und\">" + xml_escape(name) + "</CVE_VALUE>\n";
    out += "    </CV_ENTRY_ML>\n";
  }
  out += "  </CONTROLLED_VOCABULARY>\n";
  out += "</ANNOTATION_DOCUMENT>\n";
  return out;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_EAF_HPP_
