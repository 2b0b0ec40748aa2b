// corpusforge/embeddings.hpp
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
// Per-segment speaker-embedding exchange format. One record per line,
// tab-separated: file_id, start, end, then D decimal floats; a "#dim D"
// header pins the dimension. Any x-vector extractor can produce this with a
// few lines of scripting, and the files diff cleanly.

#ifndef CORPUSFORGE_EMBEDDINGS_HPP_
#define CORPUSFORGE_EMBEDDINGS_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/text_util.hpp"
#include "corpusforge/timeline.hpp"

namespace corpusforge {

struct EmbeddingRecord {
  std::string file_id;
  Segment segment;
  std::vector<double> vector;

  friend bool operator==(const EmbeddingRecord&, const EmbeddingRecord&) = default;
};

/// A set of fixed-dimension embeddings. All records share one dimension and
/// every vector has positive norm (cosine scoring needs both).
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  explicit EmbeddingSet(std::size_t dim) : dim_(dim) {}

  void add(EmbeddingRecord rec) {
    if (dim_ == 0) dim_ = rec.vector.size();
    if (rec.vector.size() != dim_)
      throw std::invalid_argument("EmbeddingSet: record for " + rec.file_id +
                                  " has dimension " + std::to_string(rec.vector.size()) +
                                  ", set has " + std::to_string(dim_));
    double sq = 0.0;
    for (double v : rec.vector) sq += v * v;
    if (!(sq > 0.0))
      throw std::invalid_argument("EmbeddingSet: zero-norm vector for " + rec.file_id);
    records_.push_back(std::move(rec));
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<EmbeddingRecord>& records() const { return records_; }
  const EmbeddingRecord& operator[](std::size_t i) const { return records_[i]; }

  friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<EmbeddingRecord> records_;
};

inline EmbeddingSet read_embeddings(std::string_view textbuf) {
  EmbeddingSet set;
  std::size_t declared_dim = 0;
  text::for_each_line(textbuf, [&](std::string_view line, int line_no) {
    const std::string context = "embeddings line " + std::to_string(line_no);
    std::string_view stripped = text::trim(line);
    if (stripped.empty()) return;
    if (stripped[0] == '#') {
      const auto fields = text::split_ws(stripped);
      if (fields.size() == 2 && fields[0] == "#dim") {
        const long long d = text::parse_int(fields[1], context);
        if (d <= 0) throw ParseError(context + ": dimension must be > 0");
        declared_dim = static_cast<std::size_t>(d);
      }
      return;
    }
    const auto fields = text::split_char(stripped, '\t');
    if (fields.size() < 4)
      throw ParseError(context + ": expected file_id, start, end and at least one value");
    try {
      EmbeddingRecord rec{std::string(text::trim(fields[0])),
                          Segment::from_seconds(
                              text::parse_double(text::trim(fields[1]), context),
                              text::parse_double(text::trim(fields[2]), context)),
                          {}};
      if (rec.file_id.empty()) throw ParseError(context + ": empty file_id");
      rec.vector.reserve(fields.size() - 3);
      for (std::size_t i = 3; i < fields.size(); ++i)
        rec.vector.push_back(text::parse_double(text::trim(fields[i]), context));
      if (declared_dim != 0 && rec.vector.size() != declared_dim)
        throw ParseError(context + ": record '" + rec.file_id + " " +
                         text::fixed(rec.segment.start.seconds(), 3) +
                         "' has dimension " + std::to_string(rec.vector.size()) +
                         ", header declares " + std::to_string(declared_dim));
      set.add(std::move(rec));
    } catch (const ParseError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ParseError(context + ": " + std::string(e.what()));
    }
  });
  return set;
}

/// Values are written with 9 significant digits, which is what the
/// round-trip guarantee is stated at.
inline std::string write_embeddings(const EmbeddingSet& set) {
  std::string out = "#dim " + std::to_string(set.dim()) + "\n";
  for (const auto& rec : set.records()) {
    out += rec.file_id + "\t" + text::fixed(rec.segment.start.seconds(), 3) +
           "\t" + text::fixed(rec.segment.end.seconds(), 3);
    for (double v : rec.vector) {
      out += '\t';
      out += text::sig9(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace corpusforge

#endif  // CORPUSFORGE_EMBEDDINGS_HPP_
