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
// The fused topic classifier.  An utterance encoder (word CNN plus
// character and POS BiLSTMs with attention) and an entity encoder
// (type-sequence BiLSTM plus the type distribution) meet in fixed-width
// heads; their outputs and the cosine between them feed the softmax layer.

#ifndef CONCET_MODEL_HPP_
#define CONCET_MODEL_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "concet/adam.hpp"
#include "concet/kb.hpp"
#include "concet/tape.hpp"
#include "concet/text.hpp"
#include "concet/topics.hpp"

namespace concet {

// Head widths are part of the fusion contract and never vary: the utterance
// head emits 256, the entity and text heads 100 each, and the merged vector
// is 100 + 100 + 1 when entity input is enabled.
inline constexpr int kUttOut = 256;
inline constexpr int kEntOut = 100;
inline constexpr int kTextOut = 100;

// Branch widths are tunable; defaults follow the reference setup.
struct ModelConfig {
  int word_dim = 300;
  int char_dim = 16;
  int pos_dim = 16;
  int ent_dim = 16;
  int conv_channels = 64;  // all three stacked conv layers
  int lstm_hidden = 64;    // per direction
  int char_k = 16;         // chars kept per token
  int max_len = 32;        // token positions for the word CNN
  double dropout = 0.5;
};

// Widths of the stacked convolutions, applied in order.
inline constexpr int kConvWidths[3] = {3, 4, 5};

struct AblationSwitches {
  bool use_entity_seq = true;
  bool use_type_dist = true;
  bool use_topic_features = true;
  bool use_char = true;
  bool use_pos = true;
};

struct TrainConfig {
  int epochs = 10;
  int batch_size = 32;
  double lr = 0.001;
  uint64_t seed = 1;
  int jobs = 1;
  AblationSwitches ablation;
};

struct Example {
  std::string text;
  std::string label;
};

// JSONL with one {"text": ..., "label": ...} object per line.
std::vector<Example> load_examples(const std::string& path);
void save_examples(const std::vector<Example>& examples,
                   const std::string& path);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
};

class ConcetModel {
 public:
  ModelConfig config;
  AblationSwitches ablation;
  std::vector<std::string> labels;
  Vocab vocab;
  TypeInventory inventory;
  LdaModel lda;  // topics() == 0 when topic features are off
  LsaModel lsa;
  NamedTensors params;

  // Allocates and initializes every parameter the current switches need.
  // Each tensor draws from its own name-derived stream, so shared branches
  // initialize identically across ablations.
  void init_params(uint64_t seed);

  int label_id(const std::string& label) const;  // throws DataError
  int topic_dim() const;
  int utt_concat_dim() const;
  int ent_concat_dim() const;  // 0 when both entity inputs are off
  int merged_dim() const;

  // Tokenizes, looks up ids, links entities when a KB is given, and attaches
  // topic features when the model carries topic models.  Empty input turns
  // into a single OOV token.
  FeaturizedUtterance featurize(const std::string& text, const Kb* kb,
                                const NGramIndex* index) const;

  // Builds the whole graph for one utterance and returns the logit vector.
  // With `grads`, parameter leaves accumulate their gradients there.  Every
  // stage's width is checked against the config; a mismatch throws
  // ShapeError.
  Var forward(Tape& tape, const FeaturizedUtterance& fu, bool training,
              uint64_t dropout_seed, GradMap* grads) const;

  // Softmax distribution over labels. Deterministic.
  std::vector<double> predict(const FeaturizedUtterance& fu) const;

  // Overwrites word-embedding rows from a text file with one
  // "token v1 v2 ... v<word_dim>" line per vector.  Tokens outside the
  // vocabulary are skipped; returns the number of rows replaced.  A row of
  // the wrong width or a malformed number throws ParseError.
  std::size_t load_pretrained_words(const std::string& path);

  // Checkpoint directory: manifest.json, weights.bin, vocab.txt, topics.bin.
  void save(const std::string& dir) const;
  static ConcetModel load(const std::string& dir);

  const Tensor& param(const std::string& name) const;

 private:
  Var leaf_param(Tape& tape, const std::string& name, GradMap* grads) const;
  Var attention(Tape& tape, Var h, const std::string& prefix,
                GradMap* grads) const;
  Var bilstm(Tape& tape, Var x, const std::string& prefix,
             GradMap* grads) const;
};

// Per-epoch history; the model keeps the parameters of the epoch with the
// best validation accuracy (last epoch when `val` is empty).  Identical
// inputs and seed give a bitwise-identical history independent of `jobs`.
std::vector<EpochStats> train_model(ConcetModel& model,
                                    const std::vector<Example>& train,
                                    const std::vector<Example>& val,
                                    const TrainConfig& tc, const Kb* kb,
                                    const NGramIndex* index);

// Assembles labels, vocabulary, and topic models from the training set,
// initializes parameters, and trains.
struct TrainResult {
  ConcetModel model;
  std::vector<EpochStats> history;
};
TrainResult train_pipeline(const std::vector<Example>& train,
                           const std::vector<Example>& val,
                           const ModelConfig& mc, const TrainConfig& tc,
                           const Kb* kb, const NGramIndex* index);

double accuracy(const ConcetModel& model, const std::vector<Example>& examples,
                const Kb* kb, const NGramIndex* index);

}  // namespace concet

#endif  // CONCET_MODEL_HPP_
