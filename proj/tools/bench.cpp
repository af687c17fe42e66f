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
// Compares the serial reference kernels against the OpenMP variants and
// reports wall times plus a bitwise equality check for each pair.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "concet/kb.hpp"
#include "concet/kernels.hpp"
#include "concet/linker.hpp"
#include "concet/model.hpp"
#include "concet/pmi.hpp"
#include "concet/rng.hpp"

using namespace concet;

namespace {

template <typename F>
double timed(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

void fill_random(std::vector<double>& v, Rng& rng) {
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
}

void row(const char* name, double serial_s, double parallel_s, bool equal) {
  std::printf("%-22s serial %8.4fs  parallel %8.4fs  speedup %5.2fx  %s\n",
              name, serial_s, parallel_s,
              parallel_s > 0 ? serial_s / parallel_s : 0.0,
              equal ? "bitwise equal" : "MISMATCH");
}

void bench_matmul(int jobs, int reps, size_t m, size_t k, size_t n) {
  Rng rng(11);
  std::vector<double> a(m * k), b(k * n), c1(m * n), c2(m * n);
  fill_random(a, rng);
  fill_random(b, rng);
  double ts = timed([&] {
    for (int r = 0; r < reps; ++r)
      matmul_serial(a.data(), b.data(), c1.data(), m, k, n);
  });
  double tp = timed([&] {
    for (int r = 0; r < reps; ++r)
      matmul_omp(a.data(), b.data(), c2.data(), m, k, n, jobs);
  });
  row("matmul", ts, tp,
      std::memcmp(c1.data(), c2.data(), c1.size() * sizeof(double)) == 0);
}

void bench_matvec(int jobs, int reps, size_t m, size_t n) {
  Rng rng(12);
  std::vector<double> a(m * n), x(n), y1(m), y2(m);
  fill_random(a, rng);
  fill_random(x, rng);
  double ts = timed([&] {
    for (int r = 0; r < reps; ++r)
      matvec_serial(a.data(), x.data(), y1.data(), m, n);
  });
  double tp = timed([&] {
    for (int r = 0; r < reps; ++r)
      matvec_omp(a.data(), x.data(), y2.data(), m, n, jobs);
  });
  row("matvec", ts, tp,
      std::memcmp(y1.data(), y2.data(), y1.size() * sizeof(double)) == 0);
}

Kb bench_kb(int entities) {
  Kb kb;
  const auto& inv = kb.inventory();
  Rng rng(13);
  for (int i = 0; i < entities; ++i) {
    std::string id = "entity" + std::to_string(i);
    int type = static_cast<int>(rng.uniform_int(inv.size()));
    kb.add({id, {id}, {type}, static_cast<int>(rng.uniform_int(50)) + 1, {}});
  }
  return kb;
}

void bench_pmi(int jobs, int docs_n) {
  Kb kb = bench_kb(200);
  std::vector<std::string> phrases;
  for (const auto& rec : kb.records()) phrases.push_back(rec.forms[0]);
  Rng rng(14);
  std::vector<std::string> docs;
  docs.reserve(static_cast<size_t>(docs_n));
  for (int d = 0; d < docs_n; ++d) {
    std::string doc;
    for (int w = 0; w < 24; ++w) {
      if (w > 0) doc += ' ';
      if (rng.uniform() < 0.3) {
        doc += phrases[rng.uniform_int(phrases.size())];
      } else {
        doc += "word" + std::to_string(rng.uniform_int(500));
      }
    }
    docs.push_back(doc);
  }
  AliasTable aliases = AliasTable::defaults(kb.inventory());
  CorpusStats s1, s2;
  double ts =
      timed([&] { s1 = build_corpus_stats_serial(docs, phrases, aliases); });
  double tp =
      timed([&] { s2 = build_corpus_stats(docs, phrases, aliases, jobs); });
  bool equal = s1.doc_count == s2.doc_count && s1.phrase_docs == s2.phrase_docs &&
               s1.pair_docs == s2.pair_docs;
  row("pmi corpus stats", ts, tp, equal);
}

void bench_link(int utterances) {
  Kb kb = bench_kb(5000);
  NGramIndex index = build_index(kb);
  Rng rng(15);
  std::vector<std::string> lines;
  for (int i = 0; i < utterances; ++i)
    lines.push_back("tell me about entity" +
                    std::to_string(rng.uniform_int(5000)) + " and entity" +
                    std::to_string(rng.uniform_int(5000)));
  size_t mentions = 0;
  double t = timed([&] {
    for (const auto& line : lines) mentions += link(line, kb, index).size();
  });
  std::printf("%-22s %d utterances in %8.4fs (%.3f ms each, %zu mentions)\n",
              "link", utterances, t, 1e3 * t / utterances, mentions);
}

void bench_train(int jobs, int per_class, int epochs) {
  const std::vector<std::string> films = {"inception", "avatar", "titanic"};
  const std::vector<std::string> dishes = {"pizza", "sushi", "pasta"};
  std::vector<Example> train;
  for (int i = 0; i < per_class; ++i) {
    train.push_back({"play the movie " + films[static_cast<size_t>(i) % 3],
                     "movies"});
    train.push_back({"order some " + dishes[static_cast<size_t>(i) % 3] +
                         " right now",
                     "food"});
  }
  ModelConfig mc;
  mc.word_dim = 16;
  mc.char_dim = 4;
  mc.pos_dim = 4;
  mc.ent_dim = 4;
  mc.conv_channels = 8;
  mc.lstm_hidden = 8;
  mc.char_k = 4;
  mc.max_len = 8;
  TrainConfig tc;
  tc.epochs = epochs;
  tc.batch_size = 16;
  tc.seed = 5;

  TrainResult serial, parallel;
  double ts = timed([&] {
    TrainConfig c = tc;
    c.jobs = 1;
    serial = train_pipeline(train, {}, mc, c, nullptr, nullptr);
  });
  double tp = timed([&] {
    TrainConfig c = tc;
    c.jobs = jobs;
    parallel = train_pipeline(train, {}, mc, c, nullptr, nullptr);
  });
  bool equal = true;
  for (size_t i = 0; i < serial.history.size(); ++i)
    equal = equal && serial.history[i].train_loss ==
                         parallel.history[i].train_loss;
  for (const auto& [name, t] : serial.model.params) {
    const Tensor& other = parallel.model.param(name);
    equal = equal && t.size() == other.size() &&
            std::memcmp(t.data(), other.data(),
                        t.size() * sizeof(double)) == 0;
  }
  row("train epoch", ts, tp, equal);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial versus parallel kernel comparison"};
  int jobs = 2;
  int scale = 1;
  app.add_option("--jobs", jobs, "parallel worker count (default 2)");
  app.add_option("--scale", scale,
                 "problem size multiplier (default 1, CI-friendly)");
  CLI11_PARSE(app, argc, argv);

  std::printf("jobs=%d scale=%d\n", jobs, scale);
  bench_matmul(jobs, 4 * scale, 192, 192, 192);
  bench_matvec(jobs, 400 * scale, 512, 512);
  bench_pmi(jobs, 400 * scale);
  bench_link(200 * scale);
  bench_train(jobs, 24, 2 * scale);
  return 0;
}
