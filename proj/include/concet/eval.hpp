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
// Classification metrics, confusion matrices, and scripted ablation runs.
// Micro, macro, and support-weighted F1 are reported side by side because
// they answer different questions; for single-label data micro F1 always
// equals accuracy, and the report keeps both so that identity stays
// checkable.

#ifndef CONCET_EVAL_HPP_
#define CONCET_EVAL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "concet/model.hpp"

namespace concet {

struct ClassMetrics {
  std::string label;
  long long support = 0;  // gold count
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::vector<std::string> labels;
  // Row = gold label, column = predicted label, indexed like `labels`.
  std::vector<std::vector<long long>> confusion;
  long long total = 0;
  long long correct = 0;
  double micro_accuracy = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  // Run metadata, filled by the caller or by run_ablation.
  uint64_t seed = 0;
  std::string config;
  uint64_t dataset_hash = 0;
};

// FNV-1a over every record's text and label; pins a report to its data.
uint64_t dataset_hash(const std::vector<Example>& examples);

// Computes every metric over parallel prediction/gold vectors.  When
// `labels` is empty the label set is the sorted union of both vectors;
// otherwise every prediction and gold label must be a member (DataError).
// Mismatched lengths throw UsageError.  Per-class precision, recall, and
// F1 fall back to 0 when their denominators are empty.
EvalReport evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& gold,
                    const std::vector<std::string>& labels = {});

// Argmax labels for a dataset; ties resolve to the first maximum.
std::vector<std::string> predict_labels(const ConcetModel& model,
                                        const std::vector<Example>& examples,
                                        const Kb* kb, const NGramIndex* index);

// Configuration names are '+'-joined subsets of {Utt2Vec, Ent2Vec,
// TypeDist, TopicDist}.  Utt2Vec turns on the char and tag encoders (the
// word CNN always runs); the other three map to their switches.  Unknown
// names throw UsageError.
AblationSwitches parse_ablation(const std::string& name);
std::string ablation_name(const AblationSwitches& ablation);

struct AblationRun {
  std::string name;
  uint64_t seed = 0;
  EvalReport report;
  std::vector<EpochStats> history;
};

// Trains and evaluates every configuration with every seed, in order.
// Training uses no validation split; the test set only scores the final
// parameters.  An empty suite yields an empty table.
std::vector<AblationRun> run_ablation(const std::vector<std::string>& suite,
                                      const std::vector<Example>& train,
                                      const std::vector<Example>& test,
                                      const ModelConfig& mc,
                                      const TrainConfig& tc,
                                      const std::vector<uint64_t>& seeds,
                                      const Kb* kb, const NGramIndex* index);

// Serialization: structured JSON, an aligned plain-text table, and a CSV
// confusion matrix with gold rows and predicted columns.
std::string report_to_json(const EvalReport& report);
std::string format_report(const EvalReport& report);
std::string confusion_csv(const EvalReport& report);
std::string format_ablation_table(const std::vector<AblationRun>& runs);

}  // namespace concet

#endif  // CONCET_EVAL_HPP_
