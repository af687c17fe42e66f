// Copyright 2026 The Concet Authors
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
// Shared test fixtures: a small KB with the documented hawks/kings type
// scores and corpora engineered to reproduce them.

#ifndef CONCET_TESTS_FIXTURES_HPP_
#define CONCET_TESTS_FIXTURES_HPP_

#include <string>
#include <vector>

#include "concet/kb.hpp"

namespace concet {
namespace testfix {

// hawks: Sports_Team 0.88, Animal 0.11, City 0.01
// kings: Sports_Team 0.54, Movie_Name 0.44, City 0.02
// tom_hanks: no stored scores (uniform fallback)
inline Kb scored_kb() {
  Kb kb;
  const auto& inv = kb.inventory();

  EntityRecord hawks;
  hawks.id = "hawks";
  hawks.forms = {"Hawks", "the Hawks"};
  hawks.types = {inv.require("Sports_Team"), inv.require("Animal"),
                 inv.require("City")};
  hawks.rank = 1;
  hawks.scores = {{inv.require("Sports_Team"), 0.88},
                  {inv.require("Animal"), 0.11},
                  {inv.require("City"), 0.01}};
  kb.add(hawks);

  EntityRecord kings;
  kings.id = "kings";
  kings.forms = {"Kings", "the Kings"};
  kings.types = {inv.require("Sports_Team"), inv.require("Movie_Name"),
                 inv.require("City")};
  kings.rank = 2;
  kings.scores = {{inv.require("Sports_Team"), 0.54},
                  {inv.require("Movie_Name"), 0.44},
                  {inv.require("City"), 0.02}};
  kb.add(kings);

  EntityRecord hanks;
  hanks.id = "tom_hanks";
  hanks.forms = {"Tom Hanks", "Hanks"};
  hanks.types = {inv.require("Celebrities"), inv.require("Actors")};
  hanks.rank = 3;
  kb.add(hanks);
  return kb;
}

// Same KB without stored scores.
inline Kb unscored_kb() {
  Kb kb = scored_kb();
  for (size_t i = 0; i < kb.size(); ++i) kb.mutable_record(i).scores.clear();
  return kb;
}

// 100 documents mentioning "hawks": 88 with "sports team", 11 with
// "animal", 1 with "city"; plus the same construction for "kings" with
// 54/44/2 over sports team / movie name / city.
inline std::vector<std::string> hawks_kings_corpus() {
  std::vector<std::string> docs;
  auto repeat = [&docs](const std::string& doc, int n) {
    for (int i = 0; i < n; ++i) docs.push_back(doc);
  };
  repeat("the hawks sports team won again tonight", 88);
  repeat("a hawks is a hunting animal of the sky", 11);
  repeat("hawks city hosts the festival", 1);
  repeat("the kings sports team lost the series", 54);
  repeat("kings is a movie name worth watching", 44);
  repeat("kings city built a new bridge", 2);
  return docs;
}

}  // namespace testfix
}  // namespace concet

#endif  // CONCET_TESTS_FIXTURES_HPP_
