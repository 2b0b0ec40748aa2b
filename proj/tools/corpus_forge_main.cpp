// tools/corpus_forge_main.cpp
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
// The corpus-forge command line: every pipeline stage as a subcommand.
// Outputs are written atomically (temp file + rename) and every run leaves
// a JSON manifest (tool version, config hash, input/output digests) next to
// its artifact so re-runs can be verified byte for byte. Exit codes: 0 ok,
// 1 runtime failure (single "error: ..." line on stderr), 2 usage.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corpusforge/agreement.hpp"
#include "corpusforge/csd.hpp"
#include "corpusforge/diarizer.hpp"
#include "corpusforge/eaf.hpp"
#include "corpusforge/embeddings.hpp"
#include "corpusforge/metrics.hpp"
#include "corpusforge/nse.hpp"
#include "corpusforge/perceptual.hpp"
#include "corpusforge/planner.hpp"
#include "corpusforge/rttm.hpp"
#include "corpusforge/sha256.hpp"
#include "corpusforge/speaker_id.hpp"
#include "corpusforge/synth.hpp"
#include "corpusforge/text_util.hpp"
#include "corpusforge/timeline.hpp"
#include "corpusforge/version.hpp"
#include "corpusforge/wav.hpp"

namespace fs = std::filesystem;
using namespace corpusforge;

namespace {

// ---------------------------------------------------------------------------
// File plumbing
// ---------------------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

/// Collects the effective parameters of a run; their canonical dump is
/// hashed into the manifest so two runs can be compared without replaying
/// them.
class RunManifest {
 public:
  RunManifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  template <typename T>
  void param(const std::string& key, const T& value) {
    std::ostringstream os;
    os << value;
    params_[key] = os.str();
  }

  void input(const fs::path& path, const std::string& content) {
    inputs_[path.filename().string()] = Sha256::of(content);
  }

  void output(const fs::path& path, const std::string& content) {
    outputs_[path.filename().string()] = Sha256::of(content);
  }

  std::string config_hash() const {
    std::string canon = subcommand_ + "\n";
    for (const auto& [k, v] : params_) canon += k + "=" + v + "\n";
    return Sha256::of(canon);
  }

  /// Written next to the primary artifact as <artifact>.manifest.json.
  void write(const fs::path& artifact_path) const {
    nlohmann::json doc;
    doc["tool"] = kToolName;
    doc["version"] = kVersion;
    doc["subcommand"] = subcommand_;
    doc["config_hash"] = config_hash();
    doc["parameters"] = params_;
    doc["inputs"] = inputs_;
    doc["outputs"] = outputs_;
    write_file_atomic(artifact_path.string() + ".manifest.json", doc.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  std::map<std::string, std::string> params_;  // ordered -> canonical
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
};

/// Runs fn(i) for i in [0, n) on up to jobs threads. Exceptions are
/// re-thrown on the caller thread; workers only compute, callers write.
void parallel_for(int jobs, std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(jobs, static_cast<int>(n));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::map<std::string, Timeline> timelines_by_file(const std::vector<RttmRecord>& records) {
  std::map<std::string, std::vector<Segment>> grouped;
  for (const auto& rec : records) grouped[rec.file_id].push_back(rec.segment());
  std::map<std::string, Timeline> out;
  for (auto& [file_id, segs] : grouped) out.emplace(file_id, Timeline(std::move(segs)));
  return out;
}

/// Reads and parses an RTTM input, recording its digest and surfacing the
/// skipped-record count as a note.
std::vector<RttmRecord> read_rttm_input(const fs::path& path, RunManifest* manifest) {
  const std::string text = read_file(path);
  if (manifest) manifest->input(path, text);
  auto result = parse_rttm(text);
  if (result.skipped_records > 0)
    std::fprintf(stderr, "note: %s: skipped %d non-SPEAKER record(s)\n",
                 path.string().c_str(), result.skipped_records);
  return std::move(result.records);
}

std::string file_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

// ---------------------------------------------------------------------------
// nse
// ---------------------------------------------------------------------------

struct NseArgs {
  std::string accompaniment;
  std::string out;
  std::string file_id;
  NseConfig cfg;
  bool absolute = false;
};

void run_nse(const NseArgs& args) {
  NseConfig cfg = args.cfg;
  cfg.mode = args.absolute ? ThresholdMode::absolute_full_scale
                           : ThresholdMode::relative_to_max;
  cfg.validate();

  const std::string file_id =
      args.file_id.empty() ? file_stem(args.accompaniment) : args.file_id;

  RunManifest manifest("nse");
  manifest.param("window", cfg.window);
  manifest.param("hop", cfg.hop);
  manifest.param("median", cfg.median_size);
  manifest.param("threshold", cfg.threshold_fraction);
  manifest.param("mode", args.absolute ? "absolute" : "relative");
  manifest.param("file_id", file_id);

  const std::string wav_bytes = read_file(args.accompaniment);
  manifest.input(args.accompaniment, wav_bytes);
  const AudioBuffer audio = read_wav(wav_bytes);
  const Timeline events = detect_nse(audio, cfg);

  std::string content;
  if (fs::path(args.out).extension() == ".lab") {
    for (const auto& s : events.segments())
      content += text::fixed(s.start.seconds(), 3) + "\t" +
                 text::fixed(s.end.seconds(), 3) + "\tnse\n";
  } else {
    content = write_rttm(to_rttm_records(file_id, events, "nse"));
  }
  write_file_atomic(args.out, content);
  manifest.output(args.out, content);
  manifest.write(args.out);
  std::printf("nse: %zu event segment(s), %.3f s total\n", events.size(),
              events.total_duration_seconds());
}

// ---------------------------------------------------------------------------
// csd
// ---------------------------------------------------------------------------

struct CsdArgs {
  std::string vad;
  std::string ovl;
  std::string nse;
  std::string ref;
  std::string out;
  std::string report_csv;
  double min_dur = 2.0;
  bool report = false;
  int jobs = 1;
};

void run_csd(const CsdArgs& args) {
  RunManifest manifest("csd");
  manifest.param("min_dur", args.min_dur);

  auto vad_by_file = timelines_by_file(read_rttm_input(args.vad, &manifest));

  std::map<std::string, Timeline> ovl_by_file, nse_by_file, ref_by_file;
  if (!args.ovl.empty())
    ovl_by_file = timelines_by_file(read_rttm_input(args.ovl, &manifest));
  if (!args.nse.empty())
    nse_by_file = timelines_by_file(read_rttm_input(args.nse, &manifest));
  if (!args.ref.empty())
    ref_by_file = timelines_by_file(read_rttm_input(args.ref, &manifest));

  std::vector<std::string> file_ids;
  for (const auto& [file_id, tl] : vad_by_file) file_ids.push_back(file_id);
  std::vector<Timeline> clean(file_ids.size());
  std::vector<StageReport> reports(file_ids.size());

  const auto lookup = [](const std::map<std::string, Timeline>& m,
                         const std::string& key) {
    const auto it = m.find(key);
    return it == m.end() ? Timeline() : it->second;
  };

  parallel_for(args.jobs, file_ids.size(), [&](std::size_t i) {
    const std::string& file_id = file_ids[i];
    CsdInputs inputs;
    inputs.vad = vad_by_file.at(file_id);
    inputs.ovl = lookup(ovl_by_file, file_id);
    inputs.nse = lookup(nse_by_file, file_id);
    inputs.min_duration = args.min_dur;
    clean[i] = clean_speech(inputs);
    std::optional<Timeline> ref;
    if (ref_by_file.count(file_id)) ref = ref_by_file.at(file_id);
    reports[i] = stage_report(ref, inputs.vad, inputs.ovl, inputs.nse, args.min_dur);
  });

  std::vector<RttmRecord> out_records;
  for (std::size_t i = 0; i < file_ids.size(); ++i) {
    const auto recs = to_rttm_records(file_ids[i], clean[i], "clean");
    out_records.insert(out_records.end(), recs.begin(), recs.end());
  }
  const std::string content = write_rttm(out_records);
  write_file_atomic(args.out, content);
  manifest.output(args.out, content);

  // Aggregate the per-document reports by stage (durations add; coverage is
  // recomputed from the summed reference).
  StageReport total;
  if (!reports.empty()) {
    total.has_reference = reports.front().has_reference;
    total.rows = reports.front().rows;
    for (std::size_t i = 1; i < reports.size(); ++i)
      for (std::size_t r = 0; r < total.rows.size(); ++r)
        total.rows[r].duration_seconds += reports[i].rows[r].duration_seconds;
    if (total.has_reference) {
      const double ref_total = total.rows.front().duration_seconds;
      for (auto& row : total.rows)
        row.coverage = ref_total > 0 ? std::optional<double>(row.duration_seconds / ref_total)
                                     : std::nullopt;
    }
  }
  if (args.report) std::fputs(format_stage_report_text(total).c_str(), stdout);
  if (!args.report_csv.empty()) {
    const std::string csv = format_stage_report_csv(total);
    write_file_atomic(args.report_csv, csv);
    manifest.output(args.report_csv, csv);
  }
  manifest.write(args.out);
}

// ---------------------------------------------------------------------------
// diarize
// ---------------------------------------------------------------------------

struct DiarizeArgs {
  std::string embeddings;
  std::string segments;
  std::string out;
  double stop = 0.48;
  std::string linkage = "average";
};

void run_diarize(const DiarizeArgs& args) {
  RunManifest manifest("diarize");
  manifest.param("stop", args.stop);
  manifest.param("linkage", args.linkage);

  const std::string emb_text = read_file(args.embeddings);
  manifest.input(args.embeddings, emb_text);
  const EmbeddingSet all = read_embeddings(emb_text);

  const auto segment_records = read_rttm_input(args.segments, &manifest);

  // embeddings participate when their (file_id, segment) is listed
  std::set<std::pair<std::string, std::pair<std::int64_t, std::int64_t>>> wanted;
  for (const auto& rec : segment_records)
    wanted.insert({rec.file_id,
                   {rec.segment().start.millis(), rec.segment().end.millis()}});

  std::map<std::string, EmbeddingSet> by_file;
  for (const auto& rec : all.records()) {
    const auto key = std::make_pair(
        rec.file_id, std::make_pair(rec.segment.start.millis(), rec.segment.end.millis()));
    if (wanted.count(key)) {
      by_file[rec.file_id].add(rec);
      wanted.erase(key);
    }
  }
  if (!wanted.empty()) {
    const auto& missing = *wanted.begin();
    throw std::runtime_error(
        "segment without embedding: " + missing.first + " [" +
        text::fixed(static_cast<double>(missing.second.first) / 1000.0, 3) + ", " +
        text::fixed(static_cast<double>(missing.second.second) / 1000.0, 3) + ")");
  }

  ClusteringConfig cfg;
  cfg.stop_distance = args.stop;
  cfg.linkage = linkage_from_string(args.linkage);
  cfg.validate();

  std::vector<RttmRecord> out_records;
  for (const auto& [file_id, set] : by_file) {
    const auto labels = ahc_cluster(set, cfg);
    const Annotation ann = to_annotation(set, labels);
    const auto recs = to_rttm_records(file_id, ann);
    out_records.insert(out_records.end(), recs.begin(), recs.end());
  }
  const std::string content = write_rttm(out_records);
  write_file_atomic(args.out, content);
  manifest.output(args.out, content);
  manifest.write(args.out);
}

// ---------------------------------------------------------------------------
// export-eaf
// ---------------------------------------------------------------------------

struct ExportEafArgs {
  std::string rttm;
  std::string media;
  std::string targets;
  std::string out;
  std::string file_id;
};

void run_export_eaf(const ExportEafArgs& args) {
  RunManifest manifest("export-eaf");
  manifest.param("media", args.media);

  const auto annotations = to_annotations(read_rttm_input(args.rttm, &manifest));
  if (annotations.empty()) throw std::runtime_error("no SPEAKER records in input");

  std::string file_id = args.file_id;
  if (file_id.empty()) {
    if (annotations.size() > 1)
      throw std::runtime_error("input covers " + std::to_string(annotations.size()) +
                               " documents; choose one with --file-id");
    file_id = annotations.begin()->first;
  }
  if (!annotations.count(file_id))
    throw std::runtime_error("file id '" + file_id + "' not present in input");
  manifest.param("file_id", file_id);

  std::vector<std::string> targets;
  if (!args.targets.empty()) {
    const std::string targets_text = read_file(args.targets);
    manifest.input(args.targets, targets_text);
    text::for_each_line(targets_text, [&](std::string_view line, int) {
      const auto name = text::trim(line);
      if (!name.empty()) targets.emplace_back(name);
    });
  }

  const std::string xml = write_eaf(annotations.at(file_id), args.media, targets);
  write_file_atomic(args.out, xml);
  manifest.output(args.out, xml);
  manifest.write(args.out);
}

// ---------------------------------------------------------------------------
// identify
// ---------------------------------------------------------------------------

struct IdentifyArgs {
  std::string known;
  std::string candidates;
  std::string out;
  std::string decisions;
  std::string speaker = "target";
  double threshold = 0.52;
};

void run_identify(const IdentifyArgs& args) {
  RunManifest manifest("identify");
  manifest.param("threshold", args.threshold);
  manifest.param("speaker", args.speaker);

  const std::string known_text = read_file(args.known);
  manifest.input(args.known, known_text);
  const EmbeddingSet known = read_embeddings(known_text);

  const std::string cand_text = read_file(args.candidates);
  manifest.input(args.candidates, cand_text);
  const EmbeddingSet all_candidates = read_embeddings(cand_text);

  std::map<std::string, EmbeddingSet> by_file;
  for (const auto& rec : all_candidates.records()) by_file[rec.file_id].add(rec);

  IdentificationConfig cfg;
  cfg.threshold = args.threshold;
  cfg.validate();

  std::vector<RttmRecord> out_records;
  std::string decisions_csv = "file_id,start,end,score,accepted\n";
  double total_accepted = 0.0;
  for (const auto& [file_id, candidates] : by_file) {
    const auto result = identify(known, candidates, cfg);
    total_accepted += result.accepted_duration;
    Timeline accepted_tl;
    {
      std::vector<Segment> segs;
      for (const auto& scored : result.accepted) segs.push_back(scored.segment);
      accepted_tl = Timeline(std::move(segs));
    }
    const auto recs = to_rttm_records(file_id, accepted_tl, args.speaker);
    out_records.insert(out_records.end(), recs.begin(), recs.end());

    std::vector<std::pair<SegmentScore, bool>> decisions;
    for (const auto& scored : result.accepted) decisions.push_back({scored, true});
    for (const auto& scored : result.rejected) decisions.push_back({scored, false});
    std::sort(decisions.begin(), decisions.end(),
              [](const auto& a, const auto& b) {
                return a.first.segment < b.first.segment;
              });
    for (const auto& [scored, accepted] : decisions)
      decisions_csv += file_id + "," + text::fixed(scored.segment.start.seconds(), 3) +
                       "," + text::fixed(scored.segment.end.seconds(), 3) + "," +
                       text::sig9(scored.score) + (accepted ? ",1\n" : ",0\n");
  }

  const std::string content = write_rttm(out_records);
  write_file_atomic(args.out, content);
  manifest.output(args.out, content);
  if (!args.decisions.empty()) {
    write_file_atomic(args.decisions, decisions_csv);
    manifest.output(args.decisions, decisions_csv);
  }
  manifest.write(args.out);
  std::printf("identify: %s, accepted %.3f s across %zu document(s)\n",
              out_records.empty() ? "target absent" : "target present",
              total_accepted, by_file.size());
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

struct PlanArgs {
  std::string roster;
  std::string ledger;
  std::string accepted;
  int required = 30;
  double min_speech = 180.0;
  bool report = false;
};

void run_plan(const PlanArgs& args) {
  RunManifest manifest("plan");
  manifest.param("required", args.required);
  manifest.param("min_speech", args.min_speech);

  QuotaLedger ledger(args.required, args.min_speech);
  if (fs::exists(args.ledger)) {
    const std::string ledger_text = read_file(args.ledger);
    manifest.input(args.ledger, ledger_text);
    ledger = parse_ledger_csv(ledger_text, args.required, args.min_speech);
  }

  int unassignable = 0;
  if (!args.roster.empty()) {
    const std::string roster_text = read_file(args.roster);
    manifest.input(args.roster, roster_text);
    for (const auto& speaker : parse_roster_csv(roster_text)) {
      if (ledger.has_speaker(speaker.id)) continue;
      // first document year that yields a category (the roster may list
      // several broadcasts per speaker)
      std::optional<CategoryKey> category;
      for (const auto& [doc_id, year] : speaker.documents) {
        category = categorize(speaker.gender, speaker.birth_year, year);
        if (category) break;
      }
      if (!category) {
        ++unassignable;
        continue;
      }
      ledger.register_speaker(speaker, *category);
    }
  }

  if (!args.accepted.empty()) {
    const std::string accepted_text = read_file(args.accepted);
    manifest.input(args.accepted, accepted_text);
    bool header = true;
    text::for_each_line(accepted_text, [&](std::string_view line, int line_no) {
      if (text::trim(line).empty()) return;
      if (header) {
        header = false;
        return;
      }
      const auto fields = text::split_csv(line);
      if (fields.size() < 2)
        throw ParseError("accepted csv line " + std::to_string(line_no) +
                         ": expected speaker_id,seconds");
      ledger.credit_speech(std::string(text::trim(fields[0])),
                           text::parse_double(text::trim(fields[1]),
                                              "accepted csv line " +
                                                  std::to_string(line_no)));
    });
  }

  const std::string ledger_csv = write_ledger_csv(ledger);
  write_file_atomic(args.ledger, ledger_csv);
  manifest.output(args.ledger, ledger_csv);
  manifest.write(args.ledger);

  if (unassignable > 0)
    std::fprintf(stderr, "note: %d roster speaker(s) fit no category (age/period)\n",
                 unassignable);
  if (args.report) std::fputs(quota_report(ledger).c_str(), stdout);
}

// ---------------------------------------------------------------------------
// perceptual
// ---------------------------------------------------------------------------

struct PerceptualArgs {
  std::string annotations;
  std::string speakers;
  std::string out_csv;
  bool classic = false;
  bool report = false;
};

/// Extract metadata: extract_id,speaker_id,gender,birth_year,broadcast_year.
std::map<std::string, CategoryKey> parse_extract_categories(std::string_view textbuf) {
  std::map<std::string, CategoryKey> out;
  bool header = true;
  text::for_each_line(textbuf, [&](std::string_view line, int line_no) {
    const std::string context = "speakers csv line " + std::to_string(line_no);
    if (text::trim(line).empty()) return;
    const auto fields = text::split_csv(line);
    if (header) {
      if (fields.size() < 5 || text::trim(fields[0]) != "extract_id")
        throw ParseError(context +
                         ": header must be extract_id,speaker_id,gender,birth_year,"
                         "broadcast_year");
      header = false;
      return;
    }
    if (fields.size() < 5) throw ParseError(context + ": expected 5 fields");
    try {
      const auto category = categorize(
          gender_from_string(text::trim(fields[2])),
          static_cast<int>(text::parse_int(text::trim(fields[3]), context)),
          static_cast<int>(text::parse_int(text::trim(fields[4]), context)));
      if (!category)
        throw ParseError(context + ": speaker fits no category (age/period)");
      out[std::string(text::trim(fields[0]))] = *category;
    } catch (const std::invalid_argument& e) {
      throw ParseError(context + ": " + std::string(e.what()));
    }
  });
  if (header) throw ParseError("speakers csv: empty input");
  return out;
}

void run_perceptual(const PerceptualArgs& args) {
  RunManifest manifest("perceptual");
  manifest.param("variant", args.classic ? "classic" : "exact");

  const std::string ann_text = read_file(args.annotations);
  manifest.input(args.annotations, ann_text);
  const auto records = parse_perceptual_csv(ann_text);

  const std::string spk_text = read_file(args.speakers);
  manifest.input(args.speakers, spk_text);
  const auto categories = parse_extract_categories(spk_text);

  // Group per extract; the triple-annotated subset carries the kappa.
  std::map<std::string, std::vector<PerceptualAnnotation>> by_extract;
  for (const auto& rec : records) by_extract[rec.extract_id].push_back(rec);

  std::vector<std::string> common;
  for (const auto& [extract_id, recs] : by_extract)
    if (recs.size() == 3) common.push_back(extract_id);

  std::string report;
  report += "Perceptual annotation report: " + std::to_string(by_extract.size()) +
            " extract(s), " + std::to_string(common.size()) +
            " in the 3-annotator common subset\n";
  report += std::string("kappa variant: ") +
            (args.classic ? "classic Fleiss (pooled marginals)"
                          : "exact (per-rater marginals)") +
            "\n";

  if (!common.empty()) {
    report += "Fleiss' kappa on the common subset:\n";
    std::array<double, kNumProblemFlags + 1> kappas{};
    for (int f = 0; f <= kNumProblemFlags; ++f) {
      RaterMatrix rm;
      rm.n_categories = 2;
      for (const auto& extract_id : common) {
        auto recs = by_extract.at(extract_id);
        std::sort(recs.begin(), recs.end(),
                  [](const PerceptualAnnotation& a, const PerceptualAnnotation& b) {
                    return a.annotator_id < b.annotator_id;
                  });
        std::vector<int> row;
        for (const auto& rec : recs) {
          bool value = false;
          if (f < kNumProblemFlags) {
            value = rec.flags[static_cast<std::size_t>(f)];
          } else {
            for (bool flag : rec.flags) value = value || flag;
          }
          row.push_back(value ? 1 : 0);
        }
        rm.ratings.push_back(std::move(row));
      }
      double kappa = std::numeric_limits<double>::quiet_NaN();
      try {
        kappa = args.classic ? fleiss_kappa(rm.to_counts()) : fleiss_kappa_exact(rm);
      } catch (const std::domain_error&) {
        // all raters constant on this flag: undefined, reported as nan
      }
      kappas[static_cast<std::size_t>(f)] = kappa;
      const std::string name =
          f < kNumProblemFlags ? kProblemFlagNames[static_cast<std::size_t>(f)] : "any";
      std::string line = "  " + name;
      line.resize(20, ' ');
      report += line + text::fixed(kappa, 3) + "\n";
    }
  }

  // Majority vote + per-category rates over everything with metadata.
  const auto aggregated = aggregate_annotations(records);
  std::vector<ExtractJudgment> judgments;
  int without_metadata = 0;
  for (const auto& agg : aggregated) {
    const auto it = categories.find(agg.extract_id);
    if (it == categories.end()) {
      ++without_metadata;
      continue;
    }
    judgments.push_back({agg, it->second});
  }
  const auto rows = problem_rates(judgments);
  report += "Problem rates (% of extracts, majority-voted):\n";
  report += format_problem_rates_text(rows);
  if (without_metadata > 0)
    report += "note: " + std::to_string(without_metadata) +
              " extract(s) lacked speaker metadata and were excluded\n";

  if (args.report) std::fputs(report.c_str(), stdout);
  if (!args.out_csv.empty()) {
    const std::string csv = format_problem_rates_csv(rows);
    write_file_atomic(args.out_csv, csv);
    manifest.output(args.out_csv, csv);
    manifest.write(args.out_csv);
  }
}

// ---------------------------------------------------------------------------
// eval der / recall / eer / pr
// ---------------------------------------------------------------------------

struct EvalDerArgs {
  std::string ref;
  std::string hyp;
  std::string uem;
  double collar = 0.25;
  int jobs = 1;
};

void run_eval_der(const EvalDerArgs& args) {
  const auto ref_annotations = to_annotations(read_rttm_input(args.ref, nullptr));
  const auto hyp_annotations = to_annotations(read_rttm_input(args.hyp, nullptr));
  std::map<std::string, Timeline> uem_regions;
  if (!args.uem.empty()) uem_regions = parse_uem(read_file(args.uem));

  std::vector<std::string> file_ids;
  for (const auto& [file_id, ann] : ref_annotations) file_ids.push_back(file_id);
  for (const auto& [file_id, ann] : hyp_annotations)
    if (!ref_annotations.count(file_id))
      std::fprintf(stderr, "note: hypothesis file '%s' has no reference, skipped\n",
                   file_id.c_str());

  std::vector<DerBreakdown> results(file_ids.size());
  parallel_for(args.jobs, file_ids.size(), [&](std::size_t i) {
    const std::string& file_id = file_ids[i];
    const auto hyp_it = hyp_annotations.find(file_id);
    const Annotation hyp = hyp_it == hyp_annotations.end() ? Annotation() : hyp_it->second;
    std::optional<Timeline> uem;
    if (uem_regions.count(file_id)) uem = uem_regions.at(file_id);
    results[i] = der(ref_annotations.at(file_id), hyp, args.collar, uem);
  });

  double missed = 0, fa = 0, conf = 0, scored = 0;
  std::printf("file_id              DER%%   missed  falarm  confusion  scored\n");
  for (std::size_t i = 0; i < file_ids.size(); ++i) {
    const auto& r = results[i];
    missed += r.missed;
    fa += r.false_alarm;
    conf += r.confusion;
    scored += r.scored_speech;
    std::printf("%-20s %6.2f %8.3f %7.3f %10.3f %7.3f\n", file_ids[i].c_str(),
                100.0 * r.der, r.missed, r.false_alarm, r.confusion, r.scored_speech);
  }
  if (scored > 0)
    std::printf("OVERALL              %6.2f %8.3f %7.3f %10.3f %7.3f\n",
                100.0 * (missed + fa + conf) / scored, missed, fa, conf, scored);
}

struct EvalRecallArgs {
  std::string ref;
  std::string hyp;
  double grid = 1.0;
  bool by_class = false;
};

void run_eval_recall(const EvalRecallArgs& args) {
  const auto ref_records = read_rttm_input(args.ref, nullptr);
  const auto ref_by_file = timelines_by_file(ref_records);
  const auto hyp_by_file = timelines_by_file(read_rttm_input(args.hyp, nullptr));
  if (ref_by_file.empty()) throw std::runtime_error("empty reference");

  if (args.by_class) {
    // the reference speaker field carries the event class (e.g. music level)
    std::map<std::string, std::vector<Segment>> per_class;
    Timeline all_hyp;
    for (const auto& [file_id, tl] : hyp_by_file) all_hyp = union_of(all_hyp, tl);
    for (const auto& rec : ref_records) per_class[rec.speaker].push_back(rec.segment());
    std::map<std::string, Timeline> ref_by_class;
    for (auto& [cls, segs] : per_class) ref_by_class.emplace(cls, Timeline(std::move(segs)));
    for (const auto& [cls, recall] : segment_recall_by_class(ref_by_class, all_hyp, args.grid))
      std::printf("class %-14s recall %.4f\n", cls.c_str(), recall);
    if (ref_by_file.size() > 1)
      std::fprintf(stderr,
                   "note: --by-class pools all documents; class labels must not "
                   "collide across files\n");
    return;
  }

  double weighted = 0.0, total_ref_cells = 0.0;
  const auto cell_ms = std::llround(args.grid * 1000.0);
  for (const auto& [file_id, ref_tl] : ref_by_file) {
    const auto hyp_it = hyp_by_file.find(file_id);
    const Timeline hyp_tl = hyp_it == hyp_by_file.end() ? Timeline() : hyp_it->second;
    const double recall = segment_recall(ref_tl, hyp_tl, args.grid);
    // weight by the number of distinct reference-active grid cells
    std::set<std::int64_t> cells;
    for (const auto& s : ref_tl.segments())
      for (std::int64_t c = s.start.millis() / cell_ms;
           c <= (s.end.millis() - 1) / cell_ms; ++c)
        cells.insert(c);
    std::printf("%-20s recall %.4f\n", file_id.c_str(), recall);
    weighted += recall * static_cast<double>(cells.size());
    total_ref_cells += static_cast<double>(cells.size());
  }
  if (total_ref_cells > 0)
    std::printf("OVERALL              recall %.4f\n", weighted / total_ref_cells);
}

struct EvalTrialArgs {
  std::string trials;
  std::string out;
  double threshold = 0.52;
};

void run_eval_eer(const EvalTrialArgs& args) {
  const auto trials = parse_trials_csv(read_file(args.trials));
  const auto result = eer(trials);
  std::printf("EER %.4f%% at threshold %.6f (%zu trials)\n", 100.0 * result.eer,
              result.threshold, trials.size());
}

void run_eval_pr(const EvalTrialArgs& args) {
  const auto trials = parse_trials_csv(read_file(args.trials));
  const auto points = pr_sweep(trials);

  // the report line for the configured operating point
  std::size_t n_targets = 0, tp = 0, fp = 0;
  for (const auto& t : trials) {
    if (t.is_target) ++n_targets;
    if (t.score >= args.threshold) (t.is_target ? tp : fp) += 1;
  }
  if (n_targets == 0) throw std::runtime_error("no target trials");
  const double precision =
      (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  const double recall = static_cast<double>(tp) / static_cast<double>(n_targets);
  std::printf("threshold %.4f: precision %.4f recall %.4f (%zu operating points)\n",
              args.threshold, precision, recall, points.size());

  if (!args.out.empty()) {
    std::string csv = "threshold,precision,recall,far,frr\n";
    for (const auto& p : points)
      csv += text::sig9(p.threshold) + "," + text::fixed(p.precision, 6) + "," +
             text::fixed(p.recall, 6) + "," + text::fixed(p.far, 6) + "," +
             text::fixed(p.frr, 6) + "\n";
    write_file_atomic(args.out, csv);
    RunManifest manifest("eval-pr");
    manifest.param("threshold", args.threshold);
    manifest.input(args.trials, read_file(args.trials));
    manifest.output(args.out, csv);
    manifest.write(args.out);
  }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string out_dir;
  SynthSpec spec;
  int trial_count = 500;
};

void run_simulate(const SimulateArgs& args) {
  RunManifest manifest("simulate");
  manifest.param("seed", args.spec.seed);
  manifest.param("speakers", args.spec.n_speakers);
  manifest.param("length", args.spec.doc_length);
  manifest.param("jitter", args.spec.boundary_jitter);
  manifest.param("relabel", args.spec.relabel_prob);
  manifest.param("delete", args.spec.delete_prob);
  manifest.param("trials", args.trial_count);

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);

  auto [reference, hypothesis] = gen_diarization(args.spec);
  const std::string ref_text = write_rttm(to_rttm_records("synthdoc", reference));
  const std::string hyp_text = write_rttm(to_rttm_records("synthdoc", hypothesis));
  write_file_atomic(dir / "reference.rttm", ref_text);
  write_file_atomic(dir / "hypothesis.rttm", hyp_text);
  manifest.output(dir / "reference.rttm", ref_text);
  manifest.output(dir / "hypothesis.rttm", hyp_text);

  const auto embeddings =
      gen_embeddings(args.spec.n_speakers, 10, 10.0, args.spec.seed, 16);
  const std::string emb_text = write_embeddings(embeddings.set);
  write_file_atomic(dir / "embeddings.tsv", emb_text);
  manifest.output(dir / "embeddings.tsv", emb_text);

  const auto trials = gen_trials(args.trial_count, args.trial_count, 0.7, 0.3, 0.12,
                                 args.spec.seed);
  const std::string trials_text = write_trials_csv(trials);
  write_file_atomic(dir / "trials.csv", trials_text);
  manifest.output(dir / "trials.csv", trials_text);

  manifest.write(dir / "fixtures");
  std::printf("simulate: wrote reference.rttm hypothesis.rttm embeddings.tsv "
              "trials.csv to %s\n", args.out_dir.c_str());
}

}  // namespace

// ---------------------------------------------------------------------------
// main
// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) +
               ": semi-automatic speaker-corpus construction toolkit"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.set_config("--config")
      ->envname("CORPUS_FORGE_CONFIG")
      ->description("TOML-style config file; flags override config values");
  app.require_subcommand(1);

  NseArgs nse_args;
  auto* nse_cmd = app.add_subcommand("nse", "Detect non-speech audio events from an "
                                            "accompaniment track");
  nse_cmd->add_option("--accompaniment", nse_args.accompaniment,
                      "Separated accompaniment WAV")->required();
  nse_cmd->add_option("--out", nse_args.out, "Output (.rttm or .lab)")->required();
  nse_cmd->add_option("--file-id", nse_args.file_id,
                      "Document id for RTTM output (default: WAV stem)");
  nse_cmd->add_option("--window", nse_args.cfg.window, "RMS window, seconds")
      ->capture_default_str();
  nse_cmd->add_option("--hop", nse_args.cfg.hop, "RMS hop, seconds")
      ->capture_default_str();
  nse_cmd->add_option("--median", nse_args.cfg.median_size, "Median filter size (odd)")
      ->capture_default_str();
  nse_cmd->add_option("--threshold", nse_args.cfg.threshold_fraction,
                      "Activity threshold fraction")->capture_default_str();
  nse_cmd->add_flag("--absolute", nse_args.absolute,
                    "Threshold against digital full scale instead of the document max");
  nse_cmd->callback([&] { run_nse(nse_args); });

  CsdArgs csd_args;
  auto* csd_cmd = app.add_subcommand("csd", "Compose VAD/OVL/NSE into clean speech");
  csd_cmd->add_option("--vad", csd_args.vad, "VAD RTTM")->required();
  csd_cmd->add_option("--ovl", csd_args.ovl, "Overlapped-speech RTTM");
  csd_cmd->add_option("--nse", csd_args.nse, "Non-speech-event RTTM");
  csd_cmd->add_option("--ref", csd_args.ref, "Reference RTTM for coverage reporting");
  csd_cmd->add_option("--out", csd_args.out, "Clean-speech RTTM out")->required();
  csd_cmd->add_option("--min-dur", csd_args.min_dur, "Minimum segment duration, seconds")
      ->capture_default_str();
  csd_cmd->add_flag("--report", csd_args.report, "Print the stage report");
  csd_cmd->add_option("--report-csv", csd_args.report_csv, "Also write the report as CSV");
  csd_cmd->add_option("--jobs", csd_args.jobs, "Parallel documents")
      ->capture_default_str();
  csd_cmd->callback([&] { run_csd(csd_args); });

  DiarizeArgs diarize_args;
  auto* diarize_cmd =
      app.add_subcommand("diarize", "Cluster per-segment embeddings into speakers");
  diarize_cmd->add_option("--embeddings", diarize_args.embeddings, "Embedding file")
      ->required();
  diarize_cmd->add_option("--segments", diarize_args.segments,
                          "Clean-speech RTTM naming the segments to cluster")
      ->required();
  diarize_cmd->add_option("--out", diarize_args.out, "Cluster RTTM out")->required();
  diarize_cmd->add_option("--stop", diarize_args.stop, "AHC stop distance (cosine)")
      ->capture_default_str();
  diarize_cmd->add_option("--linkage", diarize_args.linkage,
                          "average | complete | single")->capture_default_str();
  diarize_cmd->callback([&] { run_diarize(diarize_args); });

  ExportEafArgs eaf_args;
  auto* eaf_cmd = app.add_subcommand(
      "export-eaf", "Export a cluster RTTM as an ELAN EAF for manual identification");
  eaf_cmd->add_option("--rttm", eaf_args.rttm, "Cluster RTTM")->required();
  eaf_cmd->add_option("--media", eaf_args.media, "Media URL/path stored in the EAF")
      ->required();
  eaf_cmd->add_option("--targets", eaf_args.targets,
                      "Text file with one target speaker name per line");
  eaf_cmd->add_option("--out", eaf_args.out, "EAF out")->required();
  eaf_cmd->add_option("--file-id", eaf_args.file_id,
                      "Document to export when the RTTM covers several");
  eaf_cmd->callback([&] { run_export_eaf(eaf_args); });

  IdentifyArgs identify_args;
  auto* identify_cmd = app.add_subcommand(
      "identify", "Score candidate segments against a target's known embeddings");
  identify_cmd->add_option("--known", identify_args.known, "Known (enrolled) embeddings")
      ->required();
  identify_cmd->add_option("--candidates", identify_args.candidates,
                           "Candidate embeddings")->required();
  identify_cmd->add_option("--out", identify_args.out, "Accepted-segment RTTM out")
      ->required();
  identify_cmd->add_option("--decisions", identify_args.decisions,
                           "Per-segment decision CSV out");
  identify_cmd->add_option("--speaker", identify_args.speaker,
                           "Speaker label for accepted segments")
      ->capture_default_str();
  identify_cmd->add_option("--threshold", identify_args.threshold,
                           "Acceptance similarity threshold")->capture_default_str();
  identify_cmd->callback([&] { run_identify(identify_args); });

  PlanArgs plan_args;
  auto* plan_cmd = app.add_subcommand(
      "plan", "Maintain the speaker quota ledger over the 32 categories");
  plan_cmd->add_option("--roster", plan_args.roster,
                       "Roster CSV (id,name,gender,birth_year,doc_id,broadcast_year)");
  plan_cmd->add_option("--ledger", plan_args.ledger, "Ledger CSV (state, read+written)")
      ->required();
  plan_cmd->add_option("--accepted", plan_args.accepted,
                       "CSV crediting accepted speech (speaker_id,seconds)");
  plan_cmd->add_option("--required", plan_args.required, "Speakers required per category")
      ->capture_default_str();
  plan_cmd->add_option("--min-speech", plan_args.min_speech,
                       "Seconds of accepted speech per speaker")->capture_default_str();
  plan_cmd->add_flag("--report", plan_args.report, "Print the quota grid");
  plan_cmd->callback([&] { run_plan(plan_args); });

  PerceptualArgs perceptual_args;
  auto* perceptual_cmd = app.add_subcommand(
      "perceptual", "Inter-annotator agreement and problem rates from listening tests");
  perceptual_cmd->add_option("--annotations", perceptual_args.annotations,
                             "Perceptual annotation CSV")->required();
  perceptual_cmd->add_option("--speakers", perceptual_args.speakers,
                             "Extract metadata CSV (extract_id,speaker_id,gender,"
                             "birth_year,broadcast_year)")->required();
  perceptual_cmd->add_option("--out-csv", perceptual_args.out_csv,
                             "Write problem rates as CSV");
  auto* exact_flag = perceptual_cmd->add_flag(
      "--exact", "Rater-marginal exact kappa (the default)");
  perceptual_cmd
      ->add_flag("--classic", perceptual_args.classic,
                 "Classic pooled-marginal Fleiss instead of the exact variant")
      ->excludes(exact_flag);
  perceptual_cmd->add_flag("--report", perceptual_args.report, "Print the report");
  perceptual_cmd->callback([&] { run_perceptual(perceptual_args); });

  auto* eval_cmd = app.add_subcommand("eval", "Scoring tools");
  eval_cmd->require_subcommand(1);

  EvalDerArgs der_args;
  auto* der_cmd = eval_cmd->add_subcommand("der", "Diarization error rate");
  der_cmd->add_option("--ref", der_args.ref, "Reference RTTM")->required();
  der_cmd->add_option("--hyp", der_args.hyp, "Hypothesis RTTM")->required();
  der_cmd->add_option("--uem", der_args.uem, "Scoring regions (UEM)");
  der_cmd->add_option("--collar", der_args.collar, "No-score collar, seconds")
      ->capture_default_str();
  der_cmd->add_option("--jobs", der_args.jobs, "Parallel documents")
      ->capture_default_str();
  der_cmd->callback([&] { run_eval_der(der_args); });

  EvalRecallArgs recall_args;
  auto* recall_cmd =
      eval_cmd->add_subcommand("recall", "Segment-based detection recall");
  recall_cmd->add_option("--ref", recall_args.ref, "Reference event RTTM")->required();
  recall_cmd->add_option("--hyp", recall_args.hyp, "Detected event RTTM")->required();
  recall_cmd->add_option("--grid", recall_args.grid, "Grid segment length, seconds")
      ->capture_default_str();
  recall_cmd->add_flag("--by-class", recall_args.by_class,
                       "Report per class, reading the reference speaker field as "
                       "the event class");
  recall_cmd->callback([&] { run_eval_recall(recall_args); });

  EvalTrialArgs eer_args;
  auto* eer_cmd = eval_cmd->add_subcommand("eer", "Equal error rate from a trial CSV");
  eer_cmd->add_option("--trials", eer_args.trials, "CSV: score,is_target")->required();
  eer_cmd->callback([&] { run_eval_eer(eer_args); });

  EvalTrialArgs pr_args;
  auto* pr_cmd =
      eval_cmd->add_subcommand("pr", "Precision/recall sweep from a trial CSV");
  pr_cmd->add_option("--trials", pr_args.trials, "CSV: score,is_target")->required();
  pr_cmd->add_option("--threshold", pr_args.threshold, "Operating point to report")
      ->capture_default_str();
  pr_cmd->add_option("--out", pr_args.out, "Write the full sweep as CSV");
  pr_cmd->callback([&] { run_eval_pr(pr_args); });

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Emit seeded synthetic fixtures (RTTM, embeddings, trials)");
  sim_cmd->add_option("--out-dir", sim_args.out_dir, "Output directory")->required();
  sim_cmd->add_option("--seed", sim_args.spec.seed, "Generator seed")
      ->capture_default_str();
  sim_cmd->add_option("--speakers", sim_args.spec.n_speakers, "Speakers per document")
      ->capture_default_str();
  sim_cmd->add_option("--length", sim_args.spec.doc_length, "Document length, seconds")
      ->capture_default_str();
  sim_cmd->add_option("--jitter", sim_args.spec.boundary_jitter,
                      "Hypothesis boundary jitter, seconds")->capture_default_str();
  sim_cmd->add_option("--relabel", sim_args.spec.relabel_prob,
                      "Hypothesis relabel probability")->capture_default_str();
  sim_cmd->add_option("--delete", sim_args.spec.delete_prob,
                      "Hypothesis deletion probability")->capture_default_str();
  sim_cmd->add_option("--trials", sim_args.trial_count, "Trials per class")
      ->capture_default_str();
  sim_cmd->callback([&] { run_simulate(sim_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message and usage hint
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
