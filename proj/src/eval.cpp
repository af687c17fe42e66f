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

#include "concet/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "concet/error.hpp"
#include "concet/rng.hpp"

namespace concet {

namespace {

using nlohmann::json;

double ratio(long long num, long long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double precision, double recall) {
  double s = precision + recall;
  return s == 0.0 ? 0.0 : 2.0 * precision * recall / s;
}

std::string hex64(uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setfill('0') << std::setw(16) << v;
  return os.str();
}

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

void pad_to(std::string& s, size_t width) {
  while (s.size() < width) s.push_back(' ');
}

}  // namespace

uint64_t dataset_hash(const std::vector<Example>& examples) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s, char sep) {
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= static_cast<unsigned char>(sep);
    h *= 0x100000001b3ULL;
  };
  for (const auto& ex : examples) {
    mix(ex.text, '\x1f');
    mix(ex.label, '\x1e');
  }
  return h;
}

EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& gold,
                    const std::vector<std::string>& labels) {
  if (predictions.size() != gold.size())
    throw UsageError("evaluate: " + std::to_string(predictions.size()) +
                     " predictions against " + std::to_string(gold.size()) +
                     " gold labels");

  EvalReport r;
  if (labels.empty()) {
    std::set<std::string> seen(predictions.begin(), predictions.end());
    seen.insert(gold.begin(), gold.end());
    r.labels.assign(seen.begin(), seen.end());
  } else {
    r.labels = labels;
  }
  std::map<std::string, size_t> at;
  for (size_t i = 0; i < r.labels.size(); ++i) at[r.labels[i]] = i;
  auto index_of = [&at](const std::string& label) {
    auto it = at.find(label);
    if (it == at.end()) throw DataError("label outside the set: " + label);
    return it->second;
  };

  const size_t k = r.labels.size();
  r.confusion.assign(k, std::vector<long long>(k, 0));
  r.total = static_cast<long long>(gold.size());
  for (size_t i = 0; i < gold.size(); ++i) {
    size_t g = index_of(gold[i]);
    size_t p = index_of(predictions[i]);
    ++r.confusion[g][p];
    if (g == p) ++r.correct;
  }
  r.micro_accuracy = ratio(r.correct, r.total);

  // Micro precision and recall coincide for single-label data: every
  // instance contributes exactly one prediction and one gold label.
  long long micro_tp = r.correct;
  double micro_p = ratio(micro_tp, r.total);
  double micro_r = ratio(micro_tp, r.total);
  r.micro_f1 = f1_of(micro_p, micro_r);

  double f1_sum = 0.0;
  double weighted_sum = 0.0;
  for (size_t c = 0; c < k; ++c) {
    long long tp = r.confusion[c][c];
    long long row = 0, col = 0;
    for (size_t j = 0; j < k; ++j) {
      row += r.confusion[c][j];
      col += r.confusion[j][c];
    }
    ClassMetrics m;
    m.label = r.labels[c];
    m.support = row;
    m.precision = ratio(tp, col);
    m.recall = ratio(tp, row);
    m.f1 = f1_of(m.precision, m.recall);
    f1_sum += m.f1;
    weighted_sum += static_cast<double>(m.support) * m.f1;
    r.per_class.push_back(std::move(m));
  }
  r.macro_f1 = k == 0 ? 0.0 : f1_sum / static_cast<double>(k);
  r.weighted_f1 = r.total == 0 ? 0.0 : weighted_sum / static_cast<double>(r.total);
  return r;
}

std::vector<std::string> predict_labels(const ConcetModel& model,
                                        const std::vector<Example>& examples,
                                        const Kb* kb, const NGramIndex* index) {
  std::vector<std::string> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    auto p = model.predict(model.featurize(ex.text, kb, index));
    size_t best = 0;
    for (size_t i = 1; i < p.size(); ++i)
      if (p[i] > p[best]) best = i;
    out.push_back(model.labels[best]);
  }
  return out;
}

AblationSwitches parse_ablation(const std::string& name) {
  AblationSwitches ab;
  ab.use_entity_seq = false;
  ab.use_type_dist = false;
  ab.use_topic_features = false;
  ab.use_char = false;
  ab.use_pos = false;

  size_t pos = 0;
  while (pos <= name.size()) {
    size_t plus = name.find('+', pos);
    if (plus == std::string::npos) plus = name.size();
    std::string tok = name.substr(pos, plus - pos);
    if (tok == "Utt2Vec") {
      ab.use_char = true;
      ab.use_pos = true;
    } else if (tok == "Ent2Vec") {
      ab.use_entity_seq = true;
    } else if (tok == "TypeDist") {
      ab.use_type_dist = true;
    } else if (tok == "TopicDist") {
      ab.use_topic_features = true;
    } else {
      throw UsageError("unknown ablation component: '" + tok + "'");
    }
    pos = plus + 1;
  }
  return ab;
}

std::string ablation_name(const AblationSwitches& ablation) {
  std::vector<std::string> parts;
  if (ablation.use_char || ablation.use_pos) parts.push_back("Utt2Vec");
  if (ablation.use_entity_seq) parts.push_back("Ent2Vec");
  if (ablation.use_type_dist) parts.push_back("TypeDist");
  if (ablation.use_topic_features) parts.push_back("TopicDist");
  if (parts.empty()) return "WordCnn";  // bare word branch
  std::string out = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) out += "+" + parts[i];
  return out;
}

std::vector<AblationRun> run_ablation(const std::vector<std::string>& suite,
                                      const std::vector<Example>& train,
                                      const std::vector<Example>& test,
                                      const ModelConfig& mc,
                                      const TrainConfig& tc,
                                      const std::vector<uint64_t>& seeds,
                                      const Kb* kb, const NGramIndex* index) {
  std::vector<AblationRun> runs;
  std::vector<std::string> gold;
  gold.reserve(test.size());
  for (const auto& ex : test) gold.push_back(ex.label);
  uint64_t test_hash = dataset_hash(test);

  for (const auto& name : suite) {
    AblationSwitches ab = parse_ablation(name);  // validates before training
    for (uint64_t seed : seeds) {
      TrainConfig run_tc = tc;
      run_tc.seed = seed;
      run_tc.ablation = ab;
      TrainResult result = train_pipeline(train, {}, mc, run_tc, kb, index);
      AblationRun run;
      run.name = name;
      run.seed = seed;
      run.history = result.history;
      run.report = evaluate(predict_labels(result.model, test, kb, index),
                            gold);
      run.report.seed = seed;
      run.report.config = name;
      run.report.dataset_hash = test_hash;
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

std::string report_to_json(const EvalReport& report) {
  json j;
  j["labels"] = report.labels;
  j["confusion"] = report.confusion;
  j["total"] = report.total;
  j["correct"] = report.correct;
  j["micro_accuracy"] = report.micro_accuracy;
  j["micro_f1"] = report.micro_f1;
  j["macro_f1"] = report.macro_f1;
  j["weighted_f1"] = report.weighted_f1;
  json classes = json::array();
  for (const auto& m : report.per_class) {
    classes.push_back({{"label", m.label},
                       {"support", m.support},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1}});
  }
  j["per_class"] = classes;
  j["seed"] = report.seed;
  j["config"] = report.config;
  j["dataset_hash"] = hex64(report.dataset_hash);
  return j.dump(2) + "\n";
}

std::string format_report(const EvalReport& report) {
  std::ostringstream os;
  os << "examples: " << report.total << "  correct: " << report.correct
     << "\n";
  os << "micro accuracy: " << fixed4(report.micro_accuracy)
     << "  micro F1: " << fixed4(report.micro_f1)
     << "  macro F1: " << fixed4(report.macro_f1)
     << "  weighted F1: " << fixed4(report.weighted_f1) << "\n";
  if (!report.config.empty())
    os << "config: " << report.config << "  seed: " << report.seed << "\n";
  os << "dataset: " << hex64(report.dataset_hash) << "\n";

  size_t w = 5;
  for (const auto& m : report.per_class) w = std::max(w, m.label.size());
  std::string head = "label";
  pad_to(head, w);
  os << "\n" << head << "  support  precision  recall  f1\n";
  for (const auto& m : report.per_class) {
    std::string row = m.label;
    pad_to(row, w);
    std::string support = std::to_string(m.support);
    pad_to(support, 7);
    os << row << "  " << support << "  " << fixed4(m.precision) << "     "
       << fixed4(m.recall) << "  " << fixed4(m.f1) << "\n";
  }
  return os.str();
}

std::string confusion_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "gold\\predicted";
  for (const auto& label : report.labels) os << "," << label;
  os << "\n";
  for (size_t g = 0; g < report.labels.size(); ++g) {
    os << report.labels[g];
    for (size_t p = 0; p < report.labels.size(); ++p)
      os << "," << report.confusion[g][p];
    os << "\n";
  }
  return os.str();
}

std::string format_ablation_table(const std::vector<AblationRun>& runs) {
  size_t w = 13;
  for (const auto& run : runs) w = std::max(w, run.name.size());
  std::ostringstream os;
  std::string head = "configuration";
  pad_to(head, w);
  os << head << "  seed  accuracy  micro-F1  macro-F1  weighted-F1\n";
  for (const auto& run : runs) {
    std::string name = run.name;
    pad_to(name, w);
    std::string seed = std::to_string(run.seed);
    pad_to(seed, 4);
    os << name << "  " << seed << "  " << fixed4(run.report.micro_accuracy)
       << "    " << fixed4(run.report.micro_f1) << "    "
       << fixed4(run.report.macro_f1) << "    "
       << fixed4(run.report.weighted_f1) << "\n";
  }
  return os.str();
}

}  // namespace concet
