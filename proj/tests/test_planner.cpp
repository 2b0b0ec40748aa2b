// tests/test_planner.cpp
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "corpusforge/planner.hpp"

using namespace corpusforge;

TEST_CASE("categorize: hand cases") {
  // age 25 in 1975
  auto key = categorize(Gender::male, 1950, 1975);
  REQUIRE(key);
  CHECK(key->age_band == AgeBand::age_20_35);
  CHECK(key->period == Period::p1975_76);
  // age 66 in 1956
  key = categorize(Gender::female, 1890, 1956);
  REQUIRE(key);
  CHECK(key->age_band == AgeBand::over_65);
  CHECK(key->period == Period::p1955_56);
  // broadcast outside every period
  CHECK(!categorize(Gender::male, 1950, 1980));
  // under 20 at broadcast
  CHECK(!categorize(Gender::male, 1940, 1955));
  CHECK_THROWS_AS(categorize(Gender::male, 1700, 1955), std::invalid_argument);
  CHECK_THROWS_AS(categorize(Gender::male, 1950, 2500), std::invalid_argument);
}

TEST_CASE("categorize: band boundaries") {
  CHECK(categorize(Gender::male, 1960, 1995)->age_band == AgeBand::age_20_35);  // 35
  CHECK(categorize(Gender::male, 1959, 1995)->age_band == AgeBand::age_36_50);  // 36
  CHECK(categorize(Gender::male, 1945, 1995)->age_band == AgeBand::age_36_50);  // 50
  CHECK(categorize(Gender::male, 1944, 1995)->age_band == AgeBand::age_51_65);  // 51
  CHECK(categorize(Gender::male, 1930, 1995)->age_band == AgeBand::age_51_65);  // 65
  CHECK(categorize(Gender::male, 1929, 1995)->age_band == AgeBand::over_65);    // 66
}

TEST_CASE("categorize: exhaustive sweep maps into exactly 32 categories") {
  std::set<CategoryKey> produced;
  for (int birth = 1850; birth <= 2000; ++birth)
    for (int year : {1955, 1956, 1975, 1976, 1995, 1996, 2015, 2016})
      for (Gender g : {Gender::female, Gender::male}) {
        const auto key = categorize(g, birth, year);
        if (key) produced.insert(*key);
      }
  CHECK(produced.size() == 32);  // every category reachable, none extra
  // key space is exactly 2 x 4 x 4
  std::set<CategoryKey> all;
  for (Gender g : {Gender::female, Gender::male})
    for (AgeBand b : kAgeBands)
      for (Period p : kPeriods) all.insert({g, b, p});
  CHECK(all.size() == 32);
}

TEST_CASE("register: duplicate speaker is rejected") {
  QuotaLedger ledger;
  SpeakerRecord alice;
  alice.id = "a";
  alice.accepted_speech = 200.0;
  const CategoryKey cat{Gender::female, AgeBand::age_20_35, Period::p1995_96};
  ledger.register_speaker(alice, cat);
  CHECK(ledger.identified(cat) == 1);
  CHECK(ledger.satisfied(cat) == 1);

  SpeakerRecord bob;
  bob.id = "b";  // registered but below the speech goal
  ledger.register_speaker(bob, cat);
  CHECK(ledger.identified(cat) == 2);
  CHECK(ledger.satisfied(cat) == 1);

  CHECK_THROWS_AS(ledger.register_speaker(alice, cat), std::invalid_argument);
  const CategoryKey other{Gender::female, AgeBand::age_36_50, Period::p1995_96};
  CHECK_THROWS_AS(ledger.register_speaker(alice, other), std::invalid_argument);
}

TEST_CASE("credit_speech moves a speaker over the goal") {
  QuotaLedger ledger;
  SpeakerRecord s;
  s.id = "s";
  const CategoryKey cat{Gender::male, AgeBand::age_51_65, Period::p2015_16};
  ledger.register_speaker(s, cat);
  CHECK(ledger.satisfied(cat) == 0);
  ledger.credit_speech("s", 120.0);
  CHECK(ledger.satisfied(cat) == 0);
  ledger.credit_speech("s", 60.0);
  CHECK(ledger.satisfied(cat) == 1);
  CHECK_THROWS_AS(ledger.credit_speech("unknown", 1.0), std::invalid_argument);
}

namespace {

/// Counts published in the quota table: rows are periods, columns age
/// bands, females then males.
const int kTable5Female[4][4] = {{13, 17, 5, 17},
                                 {16, 18, 11, 4},
                                 {30, 32, 29, 29},
                                 {31, 29, 30, 30}};
const int kTable5Male[4][4] = {{34, 61, 19, 10},
                               {14, 37, 31, 11},
                               {27, 47, 48, 35},
                               {30, 51, 48, 30}};

QuotaLedger ledger_from_table5() {
  QuotaLedger ledger;
  int next_id = 0;
  for (int p = 0; p < 4; ++p)
    for (int b = 0; b < 4; ++b) {
      for (int i = 0; i < kTable5Female[p][b]; ++i) {
        SpeakerRecord s;
        s.id = "f" + std::to_string(next_id++);
        s.accepted_speech = 200.0;
        ledger.register_speaker(
            s, {Gender::female, kAgeBands[static_cast<std::size_t>(b)],
                kPeriods[static_cast<std::size_t>(p)]});
      }
      for (int i = 0; i < kTable5Male[p][b]; ++i) {
        SpeakerRecord s;
        s.id = "m" + std::to_string(next_id++);
        s.accepted_speech = 200.0;
        ledger.register_speaker(
            s, {Gender::male, kAgeBands[static_cast<std::size_t>(b)],
                kPeriods[static_cast<std::size_t>(p)]});
      }
    }
  return ledger;
}

}  // namespace

TEST_CASE("quota report reproduces the published totals") {
  const QuotaLedger ledger = ledger_from_table5();
  CHECK(ledger.total_identified() == 874);
  const std::string report = quota_report(ledger);
  // the 1995-96 / 20-35 cell: 30 females (goal met), 27 males (flagged)
  CHECK(report.find("30/27*") != std::string::npos);
  CHECK(report.find("341 female") != std::string::npos);
  CHECK(report.find("533 male") != std::string::npos);
  CHECK(report.find("874 speakers") != std::string::npos);
}

TEST_CASE("quota report on an empty ledger flags everything") {
  const std::string report = quota_report(QuotaLedger{});
  CHECK(report.find("0*/0*") != std::string::npos);
  CHECK(report.find("0 female, 0 male, 0 speakers") != std::string::npos);
}

TEST_CASE("ledger totals equal the sum of per-category counts") {
  const QuotaLedger ledger = ledger_from_table5();
  int sum = 0;
  for (Gender g : {Gender::female, Gender::male})
    for (AgeBand b : kAgeBands)
      for (Period p : kPeriods) sum += ledger.identified({g, b, p});
  CHECK(sum == ledger.total_identified());
}

TEST_CASE("roster csv: grouping and validation") {
  const std::string csv =
      "id,name,gender,birth_year,doc_id,broadcast_year\n"
      "s1,Alice,female,1950,doc1,1975\n"
      "s1,Alice,female,1950,doc2,1976\n"
      "s2,Bob,male,1940,doc1,1975\n";
  const auto roster = parse_roster_csv(csv);
  REQUIRE(roster.size() == 2);
  CHECK(roster[0].id == "s1");
  CHECK(roster[0].documents.size() == 2);
  CHECK(roster[1].gender == Gender::male);

  CHECK_THROWS_AS(parse_roster_csv("id,name\n"), ParseError);
  const std::string conflicting =
      "id,name,gender,birth_year,doc_id,broadcast_year\n"
      "s1,Alice,female,1950,doc1,1975\n"
      "s1,Alice,male,1950,doc2,1976\n";
  CHECK_THROWS_AS(parse_roster_csv(conflicting), ParseError);
}

TEST_CASE("ledger csv round-trip") {
  QuotaLedger ledger;
  SpeakerRecord s1, s2;
  s1.id = "s1";
  s1.accepted_speech = 200.5;
  s2.id = "s2";
  ledger.register_speaker(s1, {Gender::female, AgeBand::age_36_50, Period::p1975_76});
  ledger.register_speaker(s2, {Gender::male, AgeBand::over_65, Period::p1955_56});

  const std::string csv = write_ledger_csv(ledger);
  const QuotaLedger parsed = parse_ledger_csv(csv);
  CHECK(parsed.total_identified() == 2);
  CHECK(parsed.satisfied({Gender::female, AgeBand::age_36_50, Period::p1975_76}) == 1);
  CHECK(parsed.satisfied({Gender::male, AgeBand::over_65, Period::p1955_56}) == 0);
  CHECK(write_ledger_csv(parsed) == csv);
}
