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
#include <sstream>

#include "concet/rng.hpp"
#include "concet/text.hpp"

using namespace concet;

TEST_CASE("tokenize detaches terminal punctuation and lowercases") {
  CHECK(tokenize("Who won?") == std::vector<std::string>{"who", "won", "?"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("   ") == std::vector<std::string>{});
  CHECK(tokenize("Hello!!") == std::vector<std::string>{"hello", "!", "!"});
  CHECK(tokenize("don't stop") == std::vector<std::string>{"don't", "stop"});
  CHECK(tokenize("A  B\tC") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize("?!") == std::vector<std::string>{"?", "!"});
}

TEST_CASE("tokenize is idempotent on its own joined output") {
  const char* samples[] = {
      "Who won the Hawks and Kings game?",
      "Tell me about Tom Hanks!!",
      "PLAY some jazz music, please...",
      "what's up",
      "\"quoted\" start",
      "mixed CASE with 123 numbers?!",
  };
  for (const char* s : samples) {
    auto once = tokenize(s);
    auto twice = tokenize(join_tokens(once));
    CHECK(once == twice);
  }
}

TEST_CASE("tokenize matches constructed reference on 200 utterances") {
  // Build inputs whose tokenization is known by construction: join clean
  // tokens with varied spacing, uppercase some, and append punctuation that
  // must detach.
  const std::vector<std::string> words = {
      "play",  "music", "who",   "game", "score", "tell",  "me",
      "about", "movie", "team",  "the",  "a",     "book",  "travel",
      "news",  "funny", "jokes", "best", "city",  "hotel"};
  Rng rng(7);
  int checked = 0;
  for (int u = 0; u < 200; ++u) {
    size_t len = 1 + rng.uniform_int(8);
    std::vector<std::string> expect;
    std::string input;
    for (size_t i = 0; i < len; ++i) {
      std::string w = words[rng.uniform_int(words.size())];
      expect.push_back(w);
      if (rng.uniform() < 0.3) {
        for (auto& c : w) c = static_cast<char>(toupper(c));
      }
      if (!input.empty()) input += rng.uniform() < 0.2 ? "  " : " ";
      input += w;
    }
    if (rng.uniform() < 0.5) {
      const char* punct[] = {"?", "!", ".", "?!"};
      std::string p = punct[rng.uniform_int(4)];
      input += p;
      for (char c : p) expect.push_back(std::string(1, c));
    }
    CHECK(tokenize(input) == expect);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("normalize_ngram canonicalizes surface forms") {
  CHECK(normalize_ngram("Tom Hanks") == "tom hanks");
  CHECK(normalize_ngram("  The   Hawks  ") == "the hawks");
  CHECK(normalize_ngram("\"Kings\"") == "kings");
  CHECK(normalize_ngram("hawks") == "hawks");
  CHECK(normalize_ngram("...") == "");
  CHECK(normalize_ngram("") == "");
}

TEST_CASE("pos_tag covers the documented examples") {
  auto tags = pos_tag({"the", "dog", "runs"});
  REQUIRE(tags.size() == 3);
  CHECK(tags[0] == PosTag::kDet);
  CHECK(tags[1] == PosTag::kNoun);
  CHECK(tags[2] == PosTag::kVerb);

  CHECK(pos_tag({}).empty());
  CHECK(pos_tag({"flibber"}) == std::vector<PosTag>{PosTag::kNoun});
}

TEST_CASE("pos_tag length always equals token length") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> tokens;
    size_t len = rng.uniform_int(12);
    for (size_t i = 0; i < len; ++i) {
      std::string t;
      size_t tl = 1 + rng.uniform_int(9);
      for (size_t j = 0; j < tl; ++j)
        t.push_back(static_cast<char>('a' + rng.uniform_int(26)));
      tokens.push_back(t);
    }
    CHECK(pos_tag(tokens).size() == tokens.size());
  }
}

TEST_CASE("tagger basics: punctuation, numbers, suffixes") {
  Tagger tagger;
  CHECK(tagger.tag("?") == PosTag::kPunct);
  CHECK(tagger.tag("42") == PosTag::kNum);
  CHECK(tagger.tag("3.5") == PosTag::kNum);
  CHECK(tagger.tag("quickly") == PosTag::kAdv);
  CHECK(tagger.tag("jumping") == PosTag::kVerb);
  CHECK(tagger.tag("station") == PosTag::kNoun);
  CHECK(tagger.tag("$") == PosTag::kSym);
}

TEST_CASE("tagger loads lexicon files") {
  std::string path = "tagger_lex_test.txt";
  {
    std::ofstream out(path);
    out << "# test lexicon\n";
    out << "the DET\n";
    out << "dog NOUN\n";
    out << "runs VERB\n";
    out << "zorp INTJ\n";
  }
  Tagger tagger;
  tagger.load_lexicon(path);
  CHECK(tagger.tag("zorp") == PosTag::kIntj);
  auto tags = tagger.tag_all({"the", "dog", "runs"});
  CHECK(tags == std::vector<PosTag>{PosTag::kDet, PosTag::kNoun, PosTag::kVerb});
  std::remove(path.c_str());
}

TEST_CASE("pos tag names round-trip") {
  for (int i = 0; i < kNumPosTags; ++i) {
    PosTag t = static_cast<PosTag>(i);
    CHECK(parse_pos_tag(pos_tag_name(t)) == t);
  }
  CHECK_THROWS_AS(parse_pos_tag("BOGUS"), DataError);
}

TEST_CASE("char_grid pads and truncates to k") {
  Vocab v = Vocab::build({{"ab", "abcdef"}}, 1);
  auto grid = char_grid({"ab"}, 4, v);
  REQUIRE(grid.size() == 1);
  CHECK(grid[0] == std::vector<int>{v.char_id('a'), v.char_id('b'), Vocab::kPad,
                                    Vocab::kPad});

  auto grid2 = char_grid({"abcdef"}, 4, v);
  CHECK(grid2[0] == std::vector<int>{v.char_id('a'), v.char_id('b'),
                                     v.char_id('c'), v.char_id('d')});

  auto grid3 = char_grid({"ab", "abcdef", "a"}, 7, v);
  CHECK(grid3.size() == 3);
  for (const auto& row : grid3) CHECK(row.size() == 7);
}

TEST_CASE("build_vocab respects min_count") {
  Vocab v = Vocab::build({{"a", "a", "b"}}, 2);
  CHECK(v.has_token("a"));
  CHECK_FALSE(v.has_token("b"));
  CHECK(v.token_count() == 3);  // PAD, OOV, "a"
  CHECK(v.token_id("b") == Vocab::kOov);
  CHECK(v.token_id("a") == 2);

  Vocab v2 = Vocab::build({{"x", "y", "z"}}, 1);
  CHECK(v2.token_count() == 5);
}

TEST_CASE("build_vocab frequency order matches a brute-force counter") {
  // 1k-line corpus from a small word pool; the oracle counts with a plain
  // map and replays the documented ordering rule.
  const std::vector<std::string> pool = {"alpha", "beta",  "gamma", "delta",
                                         "eps",   "zeta",  "eta",   "theta",
                                         "iota",  "kappa"};
  Rng rng(13);
  std::vector<std::vector<std::string>> corpus;
  std::map<std::string, long long> oracle;
  for (int line = 0; line < 1000; ++line) {
    std::vector<std::string> toks;
    size_t len = 1 + rng.uniform_int(6);
    for (size_t i = 0; i < len; ++i) {
      std::string w = pool[rng.uniform_int(pool.size())];
      ++oracle[w];
      toks.push_back(w);
    }
    corpus.push_back(toks);
  }
  Vocab v = Vocab::build(corpus, 1);
  CHECK(v.token_count() == 2 + oracle.size());

  std::vector<std::pair<std::string, long long>> order(oracle.begin(),
                                                       oracle.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (size_t i = 0; i < order.size(); ++i)
    CHECK(v.token_id(order[i].first) == static_cast<int>(2 + i));
}

TEST_CASE("vocab round-trips through serialization") {
  Vocab v = Vocab::build({{"play", "some", "music"}, {"play", "a", "game"}}, 1);
  std::stringstream ss;
  v.save(ss);
  Vocab loaded = Vocab::load(ss);
  CHECK(loaded == v);
  CHECK(loaded.token_id("play") == v.token_id("play"));
  CHECK(loaded.char_id('p') == v.char_id('p'));
  CHECK(loaded.token_id("absent") == Vocab::kOov);
}
