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

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "concet/pmi.hpp"
#include "concet/rng.hpp"
#include "concet/text.hpp"
#include "fixtures.hpp"

using namespace concet;

namespace {

// Independent containment check: pad the normalized token streams with
// sentinel spaces and use plain substring search.
bool oracle_contains(const std::string& doc, const std::string& phrase) {
  std::string stream = " ";
  for (const auto& tok : tokenize(doc)) {
    std::string n = normalize_ngram(tok);
    if (!n.empty()) stream += n + " ";
  }
  std::string needle = " " + normalize_ngram(phrase) + " ";
  return stream.find(needle) != std::string::npos;
}

long long oracle_count(const std::vector<std::string>& docs,
                       const std::string& phrase) {
  long long c = 0;
  for (const auto& d : docs)
    if (oracle_contains(d, phrase)) ++c;
  return c;
}

}  // namespace

TEST_CASE("count_docs uses set semantics per document") {
  std::vector<std::string> docs = {"cat cat cat and more cat", "dog only"};
  CHECK(count_docs(docs, "cat") == 1);
  CHECK(count_docs(docs, "zebra") == 0);
  CHECK(count_docs(docs, "more cat") == 1);
  CHECK(count_docs(docs, "dog") == 1);
}

TEST_CASE("count_docs equals a brute-force scan on a toy corpus") {
  std::vector<std::string> docs;
  const char* pool[] = {"red fox", "lazy dog", "red dog", "fox den",
                        "the quick red fox", "dog park"};
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    std::string d;
    size_t parts = 1 + rng.uniform_int(3);
    for (size_t p = 0; p < parts; ++p) {
      if (p) d += " ";
      d += pool[rng.uniform_int(6)];
    }
    docs.push_back(d);
  }
  for (const char* phrase : {"red fox", "dog", "fox", "quick red", "absent"})
    CHECK(count_docs(docs, phrase) == oracle_count(docs, phrase));
}

TEST_CASE("type_score is the plain co-occurrence ratio") {
  std::vector<std::string> docs;
  for (int i = 0; i < 54; ++i) docs.push_back("kings sports team game");
  for (int i = 0; i < 46; ++i) docs.push_back("kings on tour");
  AliasTable aliases = AliasTable::defaults(TypeInventory::standard());
  CorpusStats stats = build_corpus_stats(docs, {"kings"}, aliases);

  CHECK(stats.docs_with("kings") == 100);
  CHECK(type_score(stats, "kings", "Sports_Team") == doctest::Approx(0.54));
  CHECK(type_score(stats, "kings", "Movie_Name") == 0.0);
  CHECK_THROWS_AS(type_score(stats, "never seen", "Sports_Team"),
                  NoOccurrenceError);
}

TEST_CASE("kings distribution matches the documented worked example") {
  auto docs = testfix::hawks_kings_corpus();
  AliasTable aliases = AliasTable::defaults(TypeInventory::standard());
  CorpusStats stats = build_corpus_stats(docs, {"hawks", "kings"}, aliases);

  auto kings = type_distribution(stats, "kings",
                                 {"Sports_Team", "Movie_Name", "City"});
  CHECK(kings.prob("Sports_Team") == doctest::Approx(0.54).epsilon(1e-9));
  CHECK(kings.prob("Movie_Name") == doctest::Approx(0.44).epsilon(1e-9));
  CHECK(kings.prob("City") == doctest::Approx(0.02).epsilon(1e-9));

  auto hawks =
      type_distribution(stats, "hawks", {"Sports_Team", "Animal", "City"});
  CHECK(hawks.prob("Sports_Team") == doctest::Approx(0.88).epsilon(1e-9));
  CHECK(hawks.prob("Animal") == doctest::Approx(0.11).epsilon(1e-9));
  CHECK(hawks.prob("City") == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("single candidate and all-zero fallback") {
  std::vector<std::string> docs = {"plain mention here"};
  AliasTable aliases = AliasTable::defaults(TypeInventory::standard());
  CorpusStats stats = build_corpus_stats(docs, {"mention"}, aliases);

  auto single = type_distribution(stats, "mention", {"Food"});
  REQUIRE(single.entries.size() == 1);
  CHECK(single.entries[0].second == 1.0);

  auto uniform = type_distribution(stats, "mention", {"Food", "City", "Animal"});
  for (const auto& [t, p] : uniform.entries)
    CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("random corpora match the naive oracle to 1e-12") {
  const std::vector<std::string> types = {"Food", "City", "Animal"};
  const std::vector<std::string> fillers = {"hello", "there", "from", "test"};
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<std::string> docs;
    for (int d = 0; d < 50; ++d) {
      std::string doc;
      if (rng.uniform() < 0.6) doc += "target ";
      for (const auto& t : types)
        if (rng.uniform() < 0.3) {
          std::string alias = t;
          for (auto& c : alias) c = static_cast<char>(tolower(c));
          doc += alias + " ";
        }
      doc += fillers[rng.uniform_int(fillers.size())];
      docs.push_back(doc);
    }
    AliasTable aliases = AliasTable::defaults(TypeInventory::standard());
    CorpusStats stats = build_corpus_stats(docs, {"target"}, aliases);
    long long m = oracle_count(docs, "target");
    if (m == 0) continue;

    // Oracle: per-document scan, count pairs, normalize.
    std::map<std::string, long long> pair;
    for (const auto& d : docs) {
      if (!oracle_contains(d, "target")) continue;
      for (const auto& t : types) {
        std::string alias = t;
        for (auto& c : alias) c = static_cast<char>(tolower(c));
        if (oracle_contains(d, alias)) ++pair[t];
      }
    }
    double total = 0.0;
    for (const auto& t : types) total += static_cast<double>(pair[t]) / m;

    auto dist = type_distribution(stats, "target", types);
    for (const auto& t : types) {
      double expect = total > 0 ? (static_cast<double>(pair[t]) / m) / total
                                : 1.0 / types.size();
      CHECK(dist.prob(t) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(dist.sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("indexed stats equal the brute-force oracle exactly") {
  auto docs = testfix::hawks_kings_corpus();
  AliasTable aliases = AliasTable::defaults(TypeInventory::standard());
  CorpusStats stats =
      build_corpus_stats(docs, {"hawks", "kings", "sports team"}, aliases);
  CHECK(stats.doc_count == static_cast<long long>(docs.size()));
  for (const char* phrase : {"hawks", "kings", "sports team"})
    CHECK(stats.docs_with(phrase) == oracle_count(docs, phrase));
  // Pair counts against a per-document double scan.
  long long both = 0;
  for (const auto& d : docs)
    if (oracle_contains(d, "hawks") && oracle_contains(d, "sports team"))
      ++both;
  CHECK(stats.docs_with_pair("hawks", "Sports_Team") == both);
}

TEST_CASE("adding a co-occurrence document never decreases the score") {
  std::vector<std::string> docs = {"star food market", "star rising", "food"};
  AliasTable aliases = AliasTable::defaults(TypeInventory::standard());
  CorpusStats before = build_corpus_stats(docs, {"star"}, aliases);
  long long pair_before = before.docs_with_pair("star", "Food");

  docs.push_back("star food festival");
  CorpusStats after = build_corpus_stats(docs, {"star"}, aliases);
  CHECK(after.docs_with_pair("star", "Food") == pair_before + 1);
  CHECK(after.docs_with("star") == before.docs_with("star") + 1);
}

TEST_CASE("parallel stats build equals the serial reference") {
  auto docs = testfix::hawks_kings_corpus();
  docs.push_back("unrelated filler line");
  AliasTable aliases = AliasTable::defaults(TypeInventory::standard());
  std::vector<std::string> phrases = {"hawks", "kings", "sports team"};

  CorpusStats serial = build_corpus_stats_serial(docs, phrases, aliases);
  for (int jobs : {1, 2, 3, 8}) {
    CorpusStats par = build_corpus_stats(docs, phrases, aliases, jobs);
    CHECK(par.doc_count == serial.doc_count);
    CHECK(par.phrase_docs == serial.phrase_docs);
    CHECK(par.pair_docs == serial.pair_docs);
  }
}

TEST_CASE("alias table defaults and file overrides") {
  TypeInventory inv = TypeInventory::standard();
  AliasTable table = AliasTable::defaults(inv);
  CHECK(table.aliases("Sports_Team") == std::vector<std::string>{"sports team"});
  CHECK(table.aliases("Animal") == std::vector<std::string>{"animal"});
  CHECK_THROWS_AS(table.aliases("Bogus"), DataError);

  std::string path = "alias_test.jsonl";
  {
    std::ofstream out(path);
    out << R"({"type":"Sports_Team","aliases":["sports team","team","franchise"]})"
        << "\n";
  }
  AliasTable loaded = AliasTable::load(path, inv);
  CHECK(loaded.aliases("Sports_Team").size() == 3);
  CHECK(loaded.aliases("Animal") == std::vector<std::string>{"animal"});
  std::remove(path.c_str());

  std::string bad = "alias_bad.jsonl";
  {
    std::ofstream out(bad);
    out << R"({"type":"NotAType","aliases":["x"]})" << "\n";
  }
  CHECK_THROWS_AS(AliasTable::load(bad, inv), DataError);
  std::remove(bad.c_str());
}

TEST_CASE("apply_pmi_scores fills records from the corpus") {
  Kb kb = testfix::unscored_kb();
  auto docs = testfix::hawks_kings_corpus();
  AliasTable aliases = AliasTable::defaults(kb.inventory());
  std::vector<std::string> phrases;
  for (const auto& rec : kb.records())
    for (const auto& f : rec.forms) phrases.push_back(f);

  CorpusStats stats = build_corpus_stats(docs, phrases, aliases);
  size_t scored = apply_pmi_scores(kb, stats);
  CHECK(scored == 2);  // tom_hanks never appears in the corpus

  const auto& inv = kb.inventory();
  const auto& hawks = kb.record(static_cast<size_t>(kb.find("hawks")));
  CHECK(hawks.score_for(inv.require("Sports_Team")) ==
        doctest::Approx(0.88).epsilon(1e-9));
  CHECK(hawks.score_for(inv.require("Animal")) ==
        doctest::Approx(0.11).epsilon(1e-9));
  CHECK(hawks.score_for(inv.require("City")) ==
        doctest::Approx(0.01).epsilon(1e-9));

  const auto& hanks = kb.record(static_cast<size_t>(kb.find("tom_hanks")));
  CHECK_FALSE(hanks.has_scores());
}

TEST_CASE("load_corpus accepts plain lines and JSON lines") {
  std::string path = "corpus_test.txt";
  {
    std::ofstream out(path);
    out << "plain document one\n";
    out << R"({"text":"json document two"})" << "\n";
    out << "\n";
    out << "{not json at all\n";
  }
  auto docs = load_corpus(path);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0] == "plain document one");
  CHECK(docs[1] == "json document two");
  CHECK(docs[2] == "{not json at all");
  std::remove(path.c_str());
}
