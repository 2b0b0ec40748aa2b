// corpusforge/text_util.hpp
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

#ifndef CORPUSFORGE_TEXT_UTIL_HPP_
#define CORPUSFORGE_TEXT_UTIL_HPP_

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace corpusforge {

/// Thrown by all text-format parsers. Messages carry the line number so a
/// malformed file can be fixed without guesswork, and so fuzzed input always
/// surfaces as a catchable error rather than a crash.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace text {

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split_char(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == delim) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

/// CSV field split with minimal double-quote support (a quoted field may
/// contain commas and doubled quotes).
inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline double parse_double(std::string_view token, const std::string& context) {
  std::string buf(token);
  if (buf.empty())
    throw ParseError(context + ": empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno == ERANGE)
    throw ParseError(context + ": bad numeric field '" + buf + "'");
  return value;
}

inline long long parse_int(std::string_view token, const std::string& context) {
  std::string buf(token);
  if (buf.empty())
    throw ParseError(context + ": empty integer field");
  errno = 0;
  char* end = nullptr;
  const long long value = std::strtoll(buf.c_str(), &end, 10);
  if (end != buf.c_str() + buf.size() || errno == ERANGE)
    throw ParseError(context + ": bad integer field '" + buf + "'");
  return value;
}

/// Fixed-precision decimal, e.g. fixed(1.5, 3) -> "1.500".
inline std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

/// Shortest representation that survives a round-trip at 9 significant
/// digits; used by the embedding exchange format.
inline std::string sig9(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

/// Calls fn(line, line_number) for each newline-delimited line; line numbers
/// start at 1 and the trailing '\n' is not part of the line.
template <typename Fn>
void for_each_line(std::string_view textbuf, Fn&& fn) {
  int line_no = 0;
  std::size_t start = 0;
  while (start <= textbuf.size()) {
    if (start == textbuf.size()) {
      break;
    }
    std::size_t nl = textbuf.find('\n', start);
    if (nl == std::string_view::npos) nl = textbuf.size();
    ++line_no;
    fn(textbuf.substr(start, nl - start), line_no);
    start = nl + 1;
  }
}

}  // namespace text
}  // namespace corpusforge

#endif  // CORPUSFORGE_TEXT_UTIL_HPP_
