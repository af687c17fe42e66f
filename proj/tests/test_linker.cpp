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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "concet/linker.hpp"
#include "concet/text.hpp"
#include "fixtures.hpp"

using namespace concet;

namespace {

double prob_of(const EntityMention& m, const Kb& kb, const char* type) {
  int idx = kb.inventory().require(type);
  for (const auto& [t, p] : m.types)
    if (t == idx) return p;
  return 0.0;
}

}  // namespace

TEST_CASE("spot counts follow the span formula") {
  std::vector<std::string> seven = {"a", "b", "c", "d", "e", "f", "g"};
  CHECK(spot(seven, 5).size() == 25);  // 7+6+5+4+3
  CHECK(spot_count(7, 5) == 25);

  CHECK(spot({}, 5).empty());
  CHECK(spot_count(0, 5) == 0);

  std::vector<std::string> three = {"x", "y", "z"};
  auto spans = spot(three, 5);
  CHECK(spans.size() == 6);
  CHECK(spot_count(3, 5) == 6);

  // Exhaustive enumeration oracle.
  std::set<std::pair<size_t, size_t>> expected;
  for (size_t start = 0; start < 3; ++start)
    for (size_t end = start + 1; end <= 3 && end - start <= 5; ++end)
      expected.insert({start, end});
  std::set<std::pair<size_t, size_t>> got;
  for (const auto& s : spans) got.insert({s.start, s.end});
  CHECK(got == expected);
}

TEST_CASE("spot emits normalized n-gram strings") {
  auto spans = spot({"the", "hawks"}, 5);
  REQUIRE(spans.size() == 3);
  CHECK(spans[0].ngram == "the");
  CHECK(spans[1].ngram == "hawks");
  CHECK(spans[2].ngram == "the hawks");
}

TEST_CASE("link reproduces the documented hawks and kings mentions") {
  Kb kb = testfix::scored_kb();
  NGramIndex index = build_index(kb, 5);

  auto mentions = link("who won the Hawks and Kings game", kb, index);
  REQUIRE(mentions.size() == 2);

  // "the hawks" is one unit (longest match), covering tokens 2..4.
  CHECK(mentions[0].canonical_id == "hawks");
  CHECK(mentions[0].start == 2);
  CHECK(mentions[0].end == 4);
  CHECK(mentions[0].surface == "the hawks");
  CHECK(prob_of(mentions[0], kb, "Sports_Team") == doctest::Approx(0.88));
  CHECK(prob_of(mentions[0], kb, "Animal") == doctest::Approx(0.11));
  CHECK(prob_of(mentions[0], kb, "City") == doctest::Approx(0.01));

  CHECK(mentions[1].canonical_id == "kings");
  CHECK(mentions[1].start == 5);
  CHECK(mentions[1].end == 6);
  CHECK(prob_of(mentions[1], kb, "Sports_Team") == doctest::Approx(0.54));
  CHECK(prob_of(mentions[1], kb, "Movie_Name") == doctest::Approx(0.44));
  CHECK(prob_of(mentions[1], kb, "City") == doctest::Approx(0.02));
}

TEST_CASE("linking an empty utterance yields nothing") {
  Kb kb = testfix::scored_kb();
  NGramIndex index = build_index(kb, 5);
  CHECK(link("", kb, index).empty());
  CHECK(link("nothing matches here", kb, index).empty());
}

TEST_CASE("longest span wins over its sub-spans") {
  Kb kb;
  const auto& inv = kb.inventory();
  EntityRecord ny;
  ny.id = "new_york";
  ny.forms = {"new york"};
  ny.types = {inv.require("City")};
  kb.add(ny);
  EntityRecord nyc;
  nyc.id = "new_york_city";
  nyc.forms = {"new york city"};
  nyc.types = {inv.require("City")};
  kb.add(nyc);

  NGramIndex index = build_index(kb, 5);
  auto tokens = tokenize("i love new york city");

  // Oracle: enumerate all matching spans directly, then apply the stated
  // rule (longer first, then leftmost, no overlap).
  struct Match {
    size_t start, end;
  };
  std::vector<Match> all;
  for (size_t start = 0; start < tokens.size(); ++start) {
    for (size_t end = start + 1; end <= tokens.size(); ++end) {
      std::string gram;
      for (size_t i = start; i < end; ++i) {
        if (i > start) gram += " ";
        gram += tokens[i];
      }
      for (const auto& rec : kb.records())
        for (const auto& form : rec.forms)
          if (normalize_ngram(form) == gram) all.push_back({start, end});
    }
  }
  std::sort(all.begin(), all.end(), [](const Match& a, const Match& b) {
    if (a.end - a.start != b.end - b.start)
      return a.end - a.start > b.end - b.start;
    return a.start < b.start;
  });
  std::vector<Match> oracle;
  for (const auto& m : all) {
    bool clash = false;
    for (const auto& o : oracle)
      if (m.start < o.end && o.start < m.end) clash = true;
    if (!clash) oracle.push_back(m);
  }

  auto mentions = link_tokens(tokens, kb, index);
  REQUIRE(mentions.size() == oracle.size());
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].canonical_id == "new_york_city");
  CHECK(mentions[0].start == oracle[0].start);
  CHECK(mentions[0].end == oracle[0].end);
}

TEST_CASE("lookup count equals the spot count") {
  Kb kb = testfix::scored_kb();
  NGramIndex index = build_index(kb, 5);

  for (const char* utt :
       {"who won the Hawks and Kings game", "short one", "",
        "a much longer utterance with many tokens to enumerate fully ok"}) {
    auto tokens = tokenize(utt);
    index.reset_lookup_count();
    link_tokens(tokens, kb, index);
    CHECK(index.lookup_count() == spot_count(tokens.size(), index.max_gram()));
  }
}

TEST_CASE("mentions never overlap and cover the stream consistently") {
  Kb kb = testfix::scored_kb();
  NGramIndex index = build_index(kb, 5);
  auto tokens = tokenize("the Hawks faced the Kings while Tom Hanks watched");
  auto mentions = link_tokens(tokens, kb, index);
  REQUIRE(mentions.size() == 3);

  for (size_t i = 1; i < mentions.size(); ++i)
    CHECK(mentions[i - 1].end <= mentions[i].start);

  // Substituting mention surfaces back into the gaps reconstructs the
  // normalized token stream.
  std::vector<std::string> rebuilt;
  size_t pos = 0;
  for (const auto& m : mentions) {
    for (; pos < m.start; ++pos) {
      std::string n = normalize_ngram(tokens[pos]);
      if (!n.empty()) rebuilt.push_back(n);
    }
    std::string word;
    for (char c : m.surface) {
      if (c == ' ') {
        rebuilt.push_back(word);
        word.clear();
      } else {
        word.push_back(c);
      }
    }
    rebuilt.push_back(word);
    pos = m.end;
  }
  for (; pos < tokens.size(); ++pos) {
    std::string n = normalize_ngram(tokens[pos]);
    if (!n.empty()) rebuilt.push_back(n);
  }

  std::vector<std::string> reference;
  for (const auto& t : tokens) {
    std::string n = normalize_ngram(t);
    if (!n.empty()) reference.push_back(n);
  }
  CHECK(rebuilt == reference);
}

TEST_CASE("shared surface form resolves by popularity rank then id") {
  Kb kb;
  const auto& inv = kb.inventory();
  EntityRecord a;
  a.id = "band_phoenix";
  a.forms = {"Phoenix"};
  a.types = {inv.require("Bands")};
  a.rank = 5;
  kb.add(a);
  EntityRecord b;
  b.id = "city_phoenix";
  b.forms = {"Phoenix"};
  b.types = {inv.require("City")};
  b.rank = 2;
  kb.add(b);
  EntityRecord c;
  c.id = "animal_phoenix";
  c.forms = {"Phoenix"};
  c.types = {inv.require("Animal")};
  c.rank = 2;
  kb.add(c);

  NGramIndex index = build_index(kb, 5);
  auto mentions = link("visit phoenix", kb, index);
  REQUIRE(mentions.size() == 1);
  // rank 2 beats rank 5; "animal_phoenix" < "city_phoenix" breaks the tie.
  CHECK(mentions[0].canonical_id == "animal_phoenix");
}

TEST_CASE("mentions without stored scores fall back to uniform") {
  Kb kb = testfix::scored_kb();
  NGramIndex index = build_index(kb, 5);
  auto mentions = link("chat about Tom Hanks", kb, index);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].canonical_id == "tom_hanks");
  REQUIRE(mentions[0].types.size() == 2);
  CHECK(mentions[0].types[0].second == doctest::Approx(0.5));
  CHECK(mentions[0].types[1].second == doctest::Approx(0.5));
}

TEST_CASE("punctuation-extended spans do not become mentions") {
  Kb kb = testfix::scored_kb();
  NGramIndex index = build_index(kb, 5);
  auto mentions = link("who won, the Hawks?", kb, index);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].surface == "the hawks");
  // Tokens: who won , the hawks ? — the mention must cover exactly the two
  // word tokens, not the trailing question mark.
  CHECK(mentions[0].start == 3);
  CHECK(mentions[0].end == 5);
}
