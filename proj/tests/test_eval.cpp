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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "concet/error.hpp"
#include "concet/eval.hpp"
#include "concet/rng.hpp"

using namespace concet;

namespace {

// Independent per-instance counting, no confusion matrix involved.
struct NaiveMetrics {
  double accuracy = 0.0;
  std::map<std::string, double> precision, recall, f1;
  double macro = 0.0;
  double weighted = 0.0;
};

NaiveMetrics naive_metrics(const std::vector<std::string>& pred,
                           const std::vector<std::string>& gold,
                           const std::vector<std::string>& labels) {
  NaiveMetrics m;
  long long hit = 0;
  for (size_t i = 0; i < gold.size(); ++i)
    if (pred[i] == gold[i]) ++hit;
  m.accuracy = static_cast<double>(hit) / static_cast<double>(gold.size());
  double f1_sum = 0.0, weighted_sum = 0.0;
  for (const auto& c : labels) {
    long long tp = 0, fp = 0, fn = 0, support = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
      if (gold[i] == c) ++support;
      if (pred[i] == c && gold[i] == c) ++tp;
      if (pred[i] == c && gold[i] != c) ++fp;
      if (pred[i] != c && gold[i] == c) ++fn;
    }
    double p = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
    double r = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
    double f = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    m.precision[c] = p;
    m.recall[c] = r;
    m.f1[c] = f;
    f1_sum += f;
    weighted_sum += static_cast<double>(support) * f;
  }
  m.macro = f1_sum / static_cast<double>(labels.size());
  m.weighted = weighted_sum / static_cast<double>(gold.size());
  return m;
}

std::vector<Example> tiny_two_class(int per_class) {
  const std::vector<std::string> films = {"inception", "avatar", "titanic"};
  const std::vector<std::string> dishes = {"pizza", "sushi", "pasta"};
  std::vector<Example> out;
  for (int i = 0; i < per_class; ++i) {
    out.push_back({"play the movie " + films[static_cast<size_t>(i) % 3],
                   "movies"});
    out.push_back({"order some " + dishes[static_cast<size_t>(i) % 3] + " now",
                   "food"});
  }
  return out;
}

ModelConfig micro_config() {
  ModelConfig mc;
  mc.word_dim = 4;
  mc.char_dim = 2;
  mc.pos_dim = 2;
  mc.ent_dim = 2;
  mc.conv_channels = 2;
  mc.lstm_hidden = 2;
  mc.char_k = 2;
  mc.max_len = 6;
  return mc;
}

}  // namespace

TEST_CASE("perfect predictions score one everywhere") {
  std::vector<std::string> gold = {"a", "b", "c", "a", "b"};
  auto r = evaluate(gold, gold);
  CHECK(r.micro_accuracy == 1.0);
  CHECK(r.micro_f1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.macro_f1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.weighted_f1 == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& m : r.per_class) {
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (size_t g = 0; g < r.labels.size(); ++g)
    for (size_t p = 0; p < r.labels.size(); ++p)
      CHECK(r.confusion[g][p] == (g == p ? (r.labels[g] == "a"   ? 2
                                            : r.labels[g] == "b" ? 2
                                                                 : 1)
                                         : 0));
}

TEST_CASE("three class fixture matches hand-computed metrics") {
  std::vector<std::string> gold = {"a", "a", "a", "a", "b", "b",
                                   "b", "c", "c", "c", "c", "c"};
  std::vector<std::string> pred = {"a", "a", "b", "c", "b", "b",
                                   "a", "c", "c", "c", "a", "b"};
  auto r = evaluate(pred, gold);
  REQUIRE(r.labels == std::vector<std::string>{"a", "b", "c"});

  // Confusion rows (gold a, b, c):
  //   a: 2 1 1
  //   b: 1 2 0
  //   c: 1 1 3
  CHECK(r.confusion[0] == std::vector<long long>{2, 1, 1});
  CHECK(r.confusion[1] == std::vector<long long>{1, 2, 0});
  CHECK(r.confusion[2] == std::vector<long long>{1, 1, 3});
  CHECK(r.total == 12);
  CHECK(r.correct == 7);
  CHECK(r.micro_accuracy == doctest::Approx(7.0 / 12.0).epsilon(1e-12));
  CHECK(r.micro_f1 == doctest::Approx(7.0 / 12.0).epsilon(1e-12));

  // a: P=2/4 R=2/4 F1=1/2; b: P=2/4 R=2/3 F1=4/7; c: P=3/4 R=3/5 F1=2/3
  CHECK(r.per_class[0].precision == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.per_class[0].recall == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.per_class[0].f1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.per_class[1].precision == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.per_class[1].recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.per_class[1].f1 == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
  CHECK(r.per_class[2].precision == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.per_class[2].recall == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.per_class[2].f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK(r.macro_f1 == doctest::Approx(73.0 / 126.0).epsilon(1e-12));
  CHECK(r.weighted_f1 == doctest::Approx(37.0 / 63.0).epsilon(1e-12));
  CHECK(r.per_class[0].support == 4);
  CHECK(r.per_class[1].support == 3);
  CHECK(r.per_class[2].support == 5);
}

TEST_CASE("metrics match a naive counting oracle on random data") {
  std::vector<std::string> labels = {"w", "x", "y", "z"};
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> gold, pred;
    for (int i = 0; i < 60; ++i) {
      gold.push_back(labels[rng.uniform_int(labels.size())]);
      pred.push_back(labels[rng.uniform_int(labels.size())]);
    }
    auto r = evaluate(pred, gold, labels);
    auto n = naive_metrics(pred, gold, labels);

    CHECK(std::fabs(r.micro_accuracy - n.accuracy) < 1e-12);
    CHECK(std::fabs(r.micro_f1 - r.micro_accuracy) < 1e-12);  // identity
    CHECK(std::fabs(r.macro_f1 - n.macro) < 1e-12);
    CHECK(std::fabs(r.weighted_f1 - n.weighted) < 1e-12);
    double lo = 1.0, hi = 0.0;
    for (const auto& m : r.per_class) {
      CHECK(std::fabs(m.precision - n.precision[m.label]) < 1e-12);
      CHECK(std::fabs(m.recall - n.recall[m.label]) < 1e-12);
      CHECK(std::fabs(m.f1 - n.f1[m.label]) < 1e-12);
      lo = std::min(lo, m.f1);
      hi = std::max(hi, m.f1);
    }
    CHECK(r.macro_f1 >= lo - 1e-12);
    CHECK(r.macro_f1 <= hi + 1e-12);

    // Confusion rows resum to gold counts.
    for (size_t c = 0; c < labels.size(); ++c) {
      long long row = 0;
      for (long long v : r.confusion[c]) row += v;
      long long count = 0;
      for (const auto& g : gold)
        if (g == labels[c]) ++count;
      CHECK(row == count);
    }
  }
}

TEST_CASE("label handling and error cases") {
  CHECK_THROWS_AS(evaluate({"a"}, {"a", "b"}), UsageError);
  CHECK_THROWS_AS(evaluate({"a"}, {"zzz"}, {"a", "b"}), DataError);
  CHECK_THROWS_AS(evaluate({"zzz"}, {"a"}, {"a", "b"}), DataError);

  // Explicit label lists keep their order and zero-support entries.
  auto r = evaluate({"b", "b"}, {"b", "b"}, {"b", "a", "ghost"});
  CHECK(r.labels == std::vector<std::string>{"b", "a", "ghost"});
  CHECK(r.per_class[0].f1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.per_class[2].support == 0);
  CHECK(r.per_class[2].f1 == 0.0);
  CHECK(r.macro_f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.weighted_f1 == doctest::Approx(1.0).epsilon(1e-12));

  auto empty = evaluate({}, {});
  CHECK(empty.total == 0);
  CHECK(empty.micro_accuracy == 0.0);
}

TEST_CASE("dataset hashes pin content and order") {
  std::vector<Example> a = {{"play a song", "music"}, {"hawks game", "sports"}};
  std::vector<Example> b = a;
  CHECK(dataset_hash(a) == dataset_hash(b));
  b[0].text = "play a sonG";
  CHECK(dataset_hash(a) != dataset_hash(b));
  std::vector<Example> swapped = {a[1], a[0]};
  CHECK(dataset_hash(a) != dataset_hash(swapped));
  // Field boundaries count: text|label splits differently here.
  std::vector<Example> shifted = {{"play a song hawks", "music game sports"}};
  CHECK(dataset_hash(a) != dataset_hash(shifted));
}

TEST_CASE("ablation names parse to switches and back") {
  auto full = parse_ablation("Utt2Vec+Ent2Vec+TypeDist+TopicDist");
  CHECK(full.use_char);
  CHECK(full.use_pos);
  CHECK(full.use_entity_seq);
  CHECK(full.use_type_dist);
  CHECK(full.use_topic_features);

  auto text_only = parse_ablation("Utt2Vec");
  CHECK(text_only.use_char);
  CHECK(text_only.use_pos);
  CHECK_FALSE(text_only.use_entity_seq);
  CHECK_FALSE(text_only.use_type_dist);
  CHECK_FALSE(text_only.use_topic_features);

  auto ent = parse_ablation("Ent2Vec");
  CHECK_FALSE(ent.use_char);
  CHECK_FALSE(ent.use_pos);
  CHECK(ent.use_entity_seq);

  CHECK_THROWS_AS(parse_ablation("Utt2Vec+Warp"), UsageError);
  CHECK_THROWS_AS(parse_ablation(""), UsageError);
  CHECK_THROWS_AS(parse_ablation("Utt2Vec++TypeDist"), UsageError);

  CHECK(ablation_name(parse_ablation("TypeDist+Utt2Vec")) ==
        "Utt2Vec+TypeDist");
  CHECK(ablation_name(parse_ablation("TopicDist+Ent2Vec")) ==
        "Ent2Vec+TopicDist");
  AblationSwitches none;
  none.use_entity_seq = none.use_type_dist = none.use_topic_features = false;
  none.use_char = none.use_pos = false;
  CHECK(ablation_name(none) == "WordCnn");
}

TEST_CASE("ablation runs are ordered, labeled, and reproducible") {
  auto train = tiny_two_class(10);
  auto test = tiny_two_class(4);
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 8;

  CHECK(run_ablation({}, train, test, micro_config(), tc, {1}, nullptr,
                     nullptr)
            .empty());

  auto runs = run_ablation({"Utt2Vec", "Utt2Vec+TypeDist"}, train, test,
                           micro_config(), tc, {5, 5}, nullptr, nullptr);
  REQUIRE(runs.size() == 4);
  CHECK(runs[0].name == "Utt2Vec");
  CHECK(runs[1].name == "Utt2Vec");
  CHECK(runs[2].name == "Utt2Vec+TypeDist");
  CHECK(runs[3].name == "Utt2Vec+TypeDist");
  CHECK(runs[0].seed == 5);
  CHECK(runs[0].report.config == "Utt2Vec");
  CHECK(runs[0].report.dataset_hash == dataset_hash(test));

  // The same seed twice gives byte-identical results.
  CHECK(runs[0].report.micro_accuracy == runs[1].report.micro_accuracy);
  CHECK(runs[0].report.confusion == runs[1].report.confusion);
  REQUIRE(runs[0].history.size() == runs[1].history.size());
  for (size_t i = 0; i < runs[0].history.size(); ++i)
    CHECK(runs[0].history[i].train_loss == runs[1].history[i].train_loss);

  CHECK_THROWS_AS(run_ablation({"Bogus"}, train, test, micro_config(), tc,
                               {1}, nullptr, nullptr),
                  UsageError);

  std::string table = format_ablation_table(runs);
  CHECK(table.find("configuration") != std::string::npos);
  CHECK(table.find("Utt2Vec+TypeDist") != std::string::npos);
  size_t lines = static_cast<size_t>(
      std::count(table.begin(), table.end(), '\n'));
  CHECK(lines == runs.size() + 1);
}

TEST_CASE("reports serialize to json, text, and csv") {
  std::vector<std::string> gold = {"a", "a", "b", "c"};
  std::vector<std::string> pred = {"a", "b", "b", "c"};
  auto r = evaluate(pred, gold);
  r.seed = 42;
  r.config = "Utt2Vec";
  r.dataset_hash = 0xdeadbeefULL;

  auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["labels"].get<std::vector<std::string>>() ==
        std::vector<std::string>{"a", "b", "c"});
  CHECK(j["total"].get<long long>() == 4);
  CHECK(j["correct"].get<long long>() == 3);
  CHECK(j["micro_accuracy"].get<double>() == doctest::Approx(0.75));
  CHECK(j["per_class"].size() == 3);
  CHECK(j["seed"].get<uint64_t>() == 42);
  CHECK(j["config"].get<std::string>() == "Utt2Vec");
  CHECK(j["dataset_hash"].get<std::string>() == "0x00000000deadbeef");
  CHECK(j["confusion"][0][0].get<long long>() == 1);

  std::string text = format_report(r);
  CHECK(text.find("micro accuracy: 0.7500") != std::string::npos);
  CHECK(text.find("config: Utt2Vec") != std::string::npos);
  for (const char* label : {"a", "b", "c"})
    CHECK(text.find(label) != std::string::npos);

  std::string csv = confusion_csv(r);
  CHECK(csv == "gold\\predicted,a,b,c\na,1,1,0\nb,0,1,0\nc,0,0,1\n");
}
