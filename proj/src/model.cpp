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

#include "concet/model.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "concet/entity_features.hpp"
#include "concet/error.hpp"
#include "concet/io.hpp"
#include "concet/linker.hpp"
#include "concet/log.hpp"
#include "concet/rng.hpp"

namespace concet {

namespace {

using nlohmann::json;

constexpr char kWeightsMagic[4] = {'C', 'C', 'K', 'P'};
constexpr uint32_t kCheckpointVersion = 1;

uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t s = a ^ (0x9e3779b97f4a7c15ULL + (b << 1) + (b >> 3));
  return splitmix64(s);
}

Tensor zeros_like(const Tensor& t) {
  return t.rank() == 1 ? Tensor(t.rows()) : Tensor(t.rows(), t.cols());
}

Tensor uniform_init(size_t rows, size_t cols, double limit, Rng& rng) {
  Tensor t(rows, cols);
  for (size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-limit, limit);
  return t;
}

Tensor xavier_init(size_t rows, size_t cols, Rng& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return uniform_init(rows, cols, limit, rng);
}

Tensor lstm_bias(size_t h) {
  Tensor b(4 * h);
  for (size_t j = h; j < 2 * h; ++j) b[j] = 1.0;  // open forget gates
  return b;
}

int argmax_index(const Tensor& v) {
  int best = 0;
  for (size_t i = 1; i < v.rows(); ++i)
    if (v[i] > v[static_cast<size_t>(best)]) best = static_cast<int>(i);
  return best;
}

}  // namespace

std::vector<Example> load_examples(const std::string& path) {
  std::vector<Example> out;
  std::istringstream is(io::read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string() ||
        !j.contains("label") || !j["label"].is_string())
      throw ParseError(path, line_no, "expected {\"text\": ..., \"label\": ...}");
    out.push_back({j["text"].get<std::string>(), j["label"].get<std::string>()});
  }
  return out;
}

void save_examples(const std::vector<Example>& examples,
                   const std::string& path) {
  std::ostringstream os;
  for (const auto& ex : examples) {
    json j;
    j["label"] = ex.label;
    j["text"] = ex.text;
    os << j.dump() << "\n";
  }
  io::write_file(path, os.str());
}

int ConcetModel::label_id(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw DataError("unknown label: " + label);
  return static_cast<int>(it - labels.begin());
}

int ConcetModel::topic_dim() const {
  if (!ablation.use_topic_features) return 0;
  return lda.topics() + lsa.topics();
}

int ConcetModel::utt_concat_dim() const {
  int d = config.conv_channels;
  if (ablation.use_char) d += 2 * config.lstm_hidden;
  if (ablation.use_pos) d += 2 * config.lstm_hidden;
  return d;
}

int ConcetModel::ent_concat_dim() const {
  int d = 0;
  if (ablation.use_entity_seq) d += 2 * config.lstm_hidden;
  if (ablation.use_type_dist) d += static_cast<int>(inventory.size());
  return d;
}

int ConcetModel::merged_dim() const {
  return ent_concat_dim() > 0 ? kEntOut + kTextOut + 1 : kTextOut;
}

void ConcetModel::init_params(uint64_t seed) {
  if (labels.empty()) throw DataError("model has no labels");
  params.clear();
  size_t h = static_cast<size_t>(config.lstm_hidden);
  auto add = [&](const std::string& name, auto make) {
    Rng rng(seed ^ fnv1a(name.data(), name.size()));
    params.emplace_back(name, make(rng));
  };
  auto emb = [&](size_t rows, size_t cols) {
    return [rows, cols](Rng& rng) { return uniform_init(rows, cols, 0.05, rng); };
  };
  auto xavier = [&](size_t rows, size_t cols) {
    return [rows, cols](Rng& rng) { return xavier_init(rows, cols, rng); };
  };
  auto zeros = [&](size_t n) {
    return [n](Rng&) { return Tensor(n); };
  };
  auto lstm_b = [&]() {
    return [h](Rng&) { return lstm_bias(h); };
  };
  auto xavier_vec = [&](size_t len, size_t fan_sum) {
    return [len, fan_sum](Rng& rng) {
      double limit = std::sqrt(6.0 / static_cast<double>(fan_sum));
      std::vector<double> v(len);
      for (auto& x : v) x = rng.uniform(-limit, limit);
      return Tensor::vector(std::move(v));
    };
  };
  auto lstm_block = [&](const std::string& prefix, size_t in_dim) {
    for (const char* dir : {"fw", "bw"}) {
      std::string p = prefix + "." + dir;
      add(p + ".wx", xavier(in_dim, 4 * h));
      add(p + ".wh", xavier(h, 4 * h));
      add(p + ".b", lstm_b());
    }
  };
  auto attn_block = [&](const std::string& prefix) {
    add(prefix + ".m", xavier(2 * h, 2 * h));
    add(prefix + ".c", xavier_vec(2 * h, 2 * h + 1));
    add(prefix + ".b", zeros(2 * h));
  };

  add("emb.word", emb(vocab.token_count(), config.word_dim));
  if (ablation.use_char)
    add("emb.char", emb(vocab.char_count(), config.char_dim));
  if (ablation.use_pos) add("emb.pos", emb(vocab.pos_count(), config.pos_dim));
  if (ablation.use_entity_seq)
    add("emb.ent", emb(inventory.size() + 1, config.ent_dim));

  size_t cc = static_cast<size_t>(config.conv_channels);
  size_t in_ch = static_cast<size_t>(config.word_dim);
  for (int i = 0; i < 3; ++i) {
    std::string p = "conv." + std::to_string(i + 1);
    add(p + ".w", xavier(static_cast<size_t>(kConvWidths[i]) * in_ch, cc));
    add(p + ".b", zeros(cc));
    in_ch = cc;
  }

  if (ablation.use_char) {
    lstm_block("lstm.char",
               static_cast<size_t>(config.char_k) * config.char_dim);
    attn_block("attn.char");
  }
  if (ablation.use_pos) {
    lstm_block("lstm.pos", static_cast<size_t>(config.pos_dim));
    attn_block("attn.pos");
  }
  if (ablation.use_entity_seq) {
    lstm_block("lstm.ent", static_cast<size_t>(config.ent_dim));
    attn_block("attn.ent");
  }

  add("head.utt.w", xavier(static_cast<size_t>(utt_concat_dim()), kUttOut));
  add("head.utt.b", zeros(kUttOut));
  if (ent_concat_dim() > 0) {
    add("head.ent.w", xavier(static_cast<size_t>(ent_concat_dim()), kEntOut));
    add("head.ent.b", zeros(kEntOut));
  }
  add("head.text.w", xavier(static_cast<size_t>(kUttOut + topic_dim()), kTextOut));
  add("head.text.b", zeros(kTextOut));
  add("head.out.w", xavier(static_cast<size_t>(merged_dim()), labels.size()));
  add("head.out.b", zeros(labels.size()));
}

const Tensor& ConcetModel::param(const std::string& name) const {
  for (const auto& [n, t] : params)
    if (n == name) return t;
  throw DataError("unknown parameter: " + name);
}

std::size_t ConcetModel::load_pretrained_words(const std::string& path) {
  Tensor* table = nullptr;
  for (auto& [n, t] : params)
    if (n == "emb.word") table = &t;
  if (table == nullptr)
    throw UsageError("load_pretrained_words needs initialized parameters");

  std::istringstream in(io::read_file(path));
  std::string line;
  int line_no = 0;
  std::size_t applied = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    row.clear();
    double v = 0.0;
    while (fields >> v) row.push_back(v);
    if (!fields.eof())
      throw ParseError(path, line_no, "malformed vector component");
    if (row.size() != static_cast<std::size_t>(config.word_dim))
      throw ParseError(path, line_no,
                       "expected " + std::to_string(config.word_dim) +
                           " components, got " + std::to_string(row.size()));
    if (!vocab.has_token(token)) continue;
    const int id = vocab.token_id(token);
    for (int j = 0; j < config.word_dim; ++j)
      table->at(static_cast<size_t>(id), static_cast<size_t>(j)) = row[j];
    ++applied;
  }
  CONCET_LOG(kInfo) << "pretrained vectors: " << applied
                    << " vocabulary rows replaced from " << path;
  return applied;
}

Var ConcetModel::leaf_param(Tape& tape, const std::string& name,
                            GradMap* grads) const {
  for (const auto& [n, t] : params) {
    if (n != name) continue;
    Tensor* sink = nullptr;
    if (grads != nullptr) {
      auto it = grads->find(name);
      if (it == grads->end())
        it = grads->emplace(name, zeros_like(t)).first;
      sink = &it->second;
    }
    return tape.leaf(t, sink);
  }
  throw DataError("unknown parameter: " + name);
}

Var ConcetModel::bilstm(Tape& tape, Var x, const std::string& prefix,
                        GradMap* grads) const {
  Var fw = tape.lstm(x, leaf_param(tape, prefix + ".fw.wx", grads),
                     leaf_param(tape, prefix + ".fw.wh", grads),
                     leaf_param(tape, prefix + ".fw.b", grads), false);
  Var bw = tape.lstm(x, leaf_param(tape, prefix + ".bw.wx", grads),
                     leaf_param(tape, prefix + ".bw.wh", grads),
                     leaf_param(tape, prefix + ".bw.b", grads), true);
  return tape.concat_cols(fw, bw);
}

Var ConcetModel::attention(Tape& tape, Var h, const std::string& prefix,
                           GradMap* grads) const {
  Var m = leaf_param(tape, prefix + ".m", grads);
  Var b = leaf_param(tape, prefix + ".b", grads);
  Var c = leaf_param(tape, prefix + ".c", grads);
  Var s = tape.tanh_op(tape.add_row(tape.matmul_op(h, m), b));
  Var alpha = tape.softmax_op(tape.matvec_op(s, c));
  return tape.weighted_sum_rows(h, alpha);
}

Var ConcetModel::forward(Tape& tape, const FeaturizedUtterance& fu,
                         bool training, uint64_t dropout_seed,
                         GradMap* grads) const {
  size_t n = fu.token_ids.size();
  if (n == 0) throw ShapeError("forward: empty utterance features");
  size_t h2 = 2 * static_cast<size_t>(config.lstm_hidden);
  auto expect = [&](Var v, size_t dim, const char* what) {
    if (tape.val(v).rank() != 1 || tape.val(v).rows() != dim)
      throw ShapeError(std::string("forward: ") + what + " width mismatch");
  };

  // Word CNN over a fixed window.
  std::vector<int> padded(static_cast<size_t>(config.max_len), Vocab::kPad);
  for (size_t i = 0; i < n && i < padded.size(); ++i)
    padded[i] = fu.token_ids[i];
  Var x = tape.gather_rows(leaf_param(tape, "emb.word", grads), padded,
                           Vocab::kPad);
  for (int i = 0; i < 3; ++i) {
    std::string p = "conv." + std::to_string(i + 1);
    x = tape.relu(tape.conv1d(x, leaf_param(tape, p + ".w", grads),
                              leaf_param(tape, p + ".b", grads),
                              kConvWidths[i]));
  }
  std::vector<Var> utt_parts = {tape.max_over_time(x)};

  if (ablation.use_char) {
    if (fu.chars.size() != n) throw ShapeError("forward: char grid rows");
    std::vector<int> flat;
    flat.reserve(n * static_cast<size_t>(config.char_k));
    for (const auto& row : fu.chars) {
      if (row.size() != static_cast<size_t>(config.char_k))
        throw ShapeError("forward: char grid width");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    Var emb = tape.gather_rows(leaf_param(tape, "emb.char", grads), flat,
                               Vocab::kPad);
    Var xc = tape.reshape(
        emb, n, static_cast<size_t>(config.char_k) * config.char_dim);
    utt_parts.push_back(
        attention(tape, bilstm(tape, xc, "lstm.char", grads), "attn.char",
                  grads));
    expect(utt_parts.back(), h2, "char attention");
  }
  if (ablation.use_pos) {
    if (fu.pos_ids.size() != n) throw ShapeError("forward: pos id rows");
    Var emb = tape.gather_rows(leaf_param(tape, "emb.pos", grads), fu.pos_ids,
                               Vocab::kPad);
    utt_parts.push_back(attention(
        tape, bilstm(tape, emb, "lstm.pos", grads), "attn.pos", grads));
    expect(utt_parts.back(), h2, "pos attention");
  }

  Var utt_cat = utt_parts.size() == 1 ? utt_parts[0] : tape.concat(utt_parts);
  expect(utt_cat, static_cast<size_t>(utt_concat_dim()), "utterance concat");
  Var utt = tape.relu(tape.affine(utt_cat, leaf_param(tape, "head.utt.w", grads),
                                  leaf_param(tape, "head.utt.b", grads)));
  uint64_t seed_state = dropout_seed;
  uint64_t drop_utt = splitmix64(seed_state);
  uint64_t drop_ent = splitmix64(seed_state);
  if (training) utt = tape.dropout(utt, config.dropout, drop_utt);
  expect(utt, kUttOut, "utterance head");

  Var ent{-1};
  bool ent_on = ent_concat_dim() > 0;
  if (ent_on) {
    std::vector<Var> ent_parts;
    if (ablation.use_entity_seq) {
      if (fu.type_seq.size() != n) throw ShapeError("forward: type seq rows");
      std::vector<int> ids(n);
      for (size_t i = 0; i < n; ++i) {
        int t = fu.type_seq[i];
        if (t < kNoType || t >= static_cast<int>(inventory.size()))
          throw ShapeError("forward: type id out of range");
        ids[i] = t + 1;  // O occupies row 0
      }
      Var emb = tape.gather_rows(leaf_param(tape, "emb.ent", grads), ids, -1);
      ent_parts.push_back(attention(
          tape, bilstm(tape, emb, "lstm.ent", grads), "attn.ent", grads));
      expect(ent_parts.back(), h2, "entity attention");
    }
    if (ablation.use_type_dist) {
      std::vector<double> dist = fu.type_dist;
      if (dist.empty()) dist.assign(inventory.size(), 0.0);
      if (dist.size() != inventory.size())
        throw ShapeError("forward: type distribution width");
      ent_parts.push_back(tape.constant(Tensor::vector(std::move(dist))));
    }
    Var ecat = ent_parts.size() == 1 ? ent_parts[0] : tape.concat(ent_parts);
    expect(ecat, static_cast<size_t>(ent_concat_dim()), "entity concat");
    ent = tape.relu(tape.affine(ecat, leaf_param(tape, "head.ent.w", grads),
                                leaf_param(tape, "head.ent.b", grads)));
    if (training) ent = tape.dropout(ent, config.dropout, drop_ent);
    expect(ent, kEntOut, "entity head");
  }

  std::vector<Var> text_parts = {utt};
  if (topic_dim() > 0) {
    std::vector<double> tv = fu.topic_vec;
    if (tv.empty()) tv.assign(static_cast<size_t>(topic_dim()), 0.0);
    if (tv.size() != static_cast<size_t>(topic_dim()))
      throw ShapeError("forward: topic feature width");
    text_parts.push_back(tape.constant(Tensor::vector(std::move(tv))));
  }
  Var tcat = text_parts.size() == 1 ? text_parts[0] : tape.concat(text_parts);
  Var text = tape.relu(tape.affine(tcat, leaf_param(tape, "head.text.w", grads),
                                   leaf_param(tape, "head.text.b", grads)));
  expect(text, kTextOut, "text head");

  Var merged = ent_on ? tape.concat({ent, text, tape.cosine(ent, text)}) : text;
  expect(merged, static_cast<size_t>(merged_dim()), "merged vector");
  Var logits = tape.affine(merged, leaf_param(tape, "head.out.w", grads),
                           leaf_param(tape, "head.out.b", grads));
  expect(logits, labels.size(), "logits");
  return logits;
}

FeaturizedUtterance ConcetModel::featurize(const std::string& text,
                                           const Kb* kb,
                                           const NGramIndex* index) const {
  FeaturizedUtterance fu;
  fu.tokens = tokenize(text);
  std::vector<EntityMention> mentions;
  if (kb != nullptr && index != nullptr && !fu.tokens.empty())
    mentions = link_tokens(fu.tokens, *kb, *index);
  if (fu.tokens.empty()) {
    fu.token_ids = {Vocab::kOov};
    fu.chars = {std::vector<int>(static_cast<size_t>(config.char_k),
                                 Vocab::kPad)};
    fu.pos = {PosTag::kX};
    fu.pos_ids = {vocab.pos_id(PosTag::kX)};
    fu.type_seq = {kNoType};
  } else {
    fu.token_ids.reserve(fu.tokens.size());
    for (const auto& tok : fu.tokens) fu.token_ids.push_back(vocab.token_id(tok));
    fu.chars = char_grid(fu.tokens, config.char_k, vocab);
    fu.pos = pos_tag(fu.tokens);
    fu.pos_ids.reserve(fu.pos.size());
    for (PosTag t : fu.pos) fu.pos_ids.push_back(vocab.pos_id(t));
    fu.type_seq = type_sequence(fu.tokens, mentions);
  }
  fu.type_dist = type_dist_vector(mentions, inventory);
  if (lda.topics() > 0 && lsa.topics() > 0)
    fu.topic_vec = topic_features(lda, lsa, fu.tokens);
  size_t cap = static_cast<size_t>(config.max_len);
  if (fu.token_ids.size() > cap) {
    fu.token_ids.resize(cap);
    fu.chars.resize(cap);
    fu.pos.resize(cap);
    fu.pos_ids.resize(cap);
    fu.type_seq.resize(cap);
  }
  return fu;
}

std::vector<double> ConcetModel::predict(const FeaturizedUtterance& fu) const {
  Tape tape;
  Var probs = tape.softmax_op(forward(tape, fu, false, 0, nullptr));
  const Tensor& p = tape.val(probs);
  return std::vector<double>(p.data(), p.data() + p.size());
}

void ConcetModel::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  json manifest;
  manifest["format"] = "concet-checkpoint";
  manifest["version"] = kCheckpointVersion;
  manifest["config"] = {{"word_dim", config.word_dim},
                        {"char_dim", config.char_dim},
                        {"pos_dim", config.pos_dim},
                        {"ent_dim", config.ent_dim},
                        {"conv_channels", config.conv_channels},
                        {"lstm_hidden", config.lstm_hidden},
                        {"char_k", config.char_k},
                        {"max_len", config.max_len},
                        {"dropout", config.dropout}};
  manifest["ablation"] = {{"use_entity_seq", ablation.use_entity_seq},
                          {"use_type_dist", ablation.use_type_dist},
                          {"use_topic_features", ablation.use_topic_features},
                          {"use_char", ablation.use_char},
                          {"use_pos", ablation.use_pos}};
  manifest["labels"] = labels;
  manifest["types"] = inventory.names();
  manifest["has_topics"] = lda.topics() > 0;
  json plist = json::array();
  for (const auto& [name, t] : params)
    plist.push_back({{"name", name},
                     {"rank", t.rank()},
                     {"rows", t.rows()},
                     {"cols", t.cols()}});
  manifest["tensors"] = plist;
  io::write_file(dir + "/manifest.json", manifest.dump(2) + "\n");

  std::ostringstream wb;
  wb.write(kWeightsMagic, 4);
  io::write_u32(wb, kCheckpointVersion);
  io::write_u64(wb, params.size());
  for (const auto& [name, t] : params) {
    io::write_string(wb, name);
    io::write_tensor(wb, t);
  }
  io::write_file(dir + "/weights.bin", wb.str());

  std::ostringstream vs;
  vocab.save(vs);
  io::write_file(dir + "/vocab.txt", vs.str());

  std::ostringstream ts;
  io::write_u8(ts, lda.topics() > 0 ? 1 : 0);
  if (lda.topics() > 0) lda.save(ts);
  io::write_u8(ts, lsa.topics() > 0 ? 1 : 0);
  if (lsa.topics() > 0) lsa.save(ts);
  io::write_file(dir + "/topics.bin", ts.str());
}

ConcetModel ConcetModel::load(const std::string& dir) {
  std::string mpath = dir + "/manifest.json";
  json manifest;
  try {
    manifest = json::parse(io::read_file(mpath));
  } catch (const json::exception& e) {
    throw ParseError(mpath, 0, e.what());
  }
  if (!manifest.is_object() || manifest.value("format", "") != "concet-checkpoint")
    throw DataError("not a checkpoint manifest: " + mpath);
  if (manifest.value("version", 0u) != kCheckpointVersion)
    throw VersionError("unsupported checkpoint version in " + mpath);

  ConcetModel model;
  const json& c = manifest.at("config");
  model.config.word_dim = c.at("word_dim").get<int>();
  model.config.char_dim = c.at("char_dim").get<int>();
  model.config.pos_dim = c.at("pos_dim").get<int>();
  model.config.ent_dim = c.at("ent_dim").get<int>();
  model.config.conv_channels = c.at("conv_channels").get<int>();
  model.config.lstm_hidden = c.at("lstm_hidden").get<int>();
  model.config.char_k = c.at("char_k").get<int>();
  model.config.max_len = c.at("max_len").get<int>();
  model.config.dropout = c.at("dropout").get<double>();
  const json& a = manifest.at("ablation");
  model.ablation.use_entity_seq = a.at("use_entity_seq").get<bool>();
  model.ablation.use_type_dist = a.at("use_type_dist").get<bool>();
  model.ablation.use_topic_features = a.at("use_topic_features").get<bool>();
  model.ablation.use_char = a.at("use_char").get<bool>();
  model.ablation.use_pos = a.at("use_pos").get<bool>();
  model.labels = manifest.at("labels").get<std::vector<std::string>>();
  model.inventory =
      TypeInventory(manifest.at("types").get<std::vector<std::string>>());

  {
    std::istringstream vs(io::read_file(dir + "/vocab.txt"));
    model.vocab = Vocab::load(vs);
  }
  {
    std::istringstream ts(io::read_file(dir + "/topics.bin"));
    if (io::read_u8(ts) != 0) model.lda = LdaModel::load(ts);
    if (io::read_u8(ts) != 0) model.lsa = LsaModel::load(ts);
  }

  model.init_params(0);  // allocates the expected name and shape set

  std::istringstream wb(io::read_file(dir + "/weights.bin"));
  char magic[4];
  wb.read(magic, 4);
  if (wb.gcount() != 4 || std::memcmp(magic, kWeightsMagic, 4) != 0)
    throw DataError("bad weights magic in " + dir);
  if (io::read_u32(wb) != kCheckpointVersion)
    throw VersionError("unsupported weights version in " + dir);
  uint64_t count = io::read_u64(wb);
  if (count != model.params.size())
    throw DataError("checkpoint tensor count mismatch in " + dir);
  std::set<std::string> seen;
  for (uint64_t i = 0; i < count; ++i) {
    std::string name = io::read_string(wb);
    Tensor t = io::read_tensor(wb);
    bool found = false;
    for (auto& [n, p] : model.params) {
      if (n != name) continue;
      if (!p.same_shape(t))
        throw DataError("checkpoint tensor shape mismatch: " + name);
      p = std::move(t);
      found = true;
      break;
    }
    if (!found) throw DataError("unexpected checkpoint tensor: " + name);
    if (!seen.insert(name).second)
      throw DataError("duplicate checkpoint tensor: " + name);
  }
  return model;
}

namespace {

struct FeatExample {
  FeaturizedUtterance fu;
  int label;
};

double eval_cached(const ConcetModel& model,
                   const std::vector<FeatExample>& set) {
  if (set.empty()) return 0.0;
  long ok = 0;
  for (const auto& fe : set) {
    Tape tape;
    Var logits = model.forward(tape, fe.fu, false, 0, nullptr);
    if (argmax_index(tape.val(logits)) == fe.label) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(set.size());
}

}  // namespace

std::vector<EpochStats> train_model(ConcetModel& model,
                                    const std::vector<Example>& train,
                                    const std::vector<Example>& val,
                                    const TrainConfig& tc, const Kb* kb,
                                    const NGramIndex* index) {
  if (train.empty()) throw DataError("training set is empty");
  if (model.params.empty()) throw UsageError("train: parameters not initialized");

  std::vector<FeatExample> tr, va;
  tr.reserve(train.size());
  for (const auto& ex : train)
    tr.push_back({model.featurize(ex.text, kb, index), model.label_id(ex.label)});
  va.reserve(val.size());
  for (const auto& ex : val)
    va.push_back({model.featurize(ex.text, kb, index), model.label_id(ex.label)});

  Adam opt(AdamConfig{tc.lr, 0.9, 0.999, 1e-8});
  size_t n = tr.size();
  size_t batch = tc.batch_size > 0 ? static_cast<size_t>(tc.batch_size) : n;
  // Examples accumulate per fixed-size chunk and chunks merge in order, so
  // the reduction tree is the same for any jobs value.
  constexpr size_t kChunk = 8;

  std::vector<EpochStats> history;
  NamedTensors best = model.params;
  double best_acc = -1.0;
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    Rng shuffle(mix_seed(tc.seed, 0x73687566u + static_cast<uint64_t>(epoch)));
    for (size_t i = n; i > 1; --i) {
      size_t j = shuffle.uniform_int(i);
      std::swap(order[i - 1], order[j]);
    }
    double loss_sum = 0.0;
    long correct = 0;
    for (size_t start = 0; start < n; start += batch) {
      size_t m = std::min(batch, n - start);
      size_t n_chunks = (m + kChunk - 1) / kChunk;
      std::vector<GradMap> chunk_grads(n_chunks);
      std::vector<double> chunk_loss(n_chunks, 0.0);
      std::vector<long> chunk_ok(n_chunks, 0);
#ifdef _OPENMP
#pragma omp parallel for num_threads(tc.jobs > 1 ? tc.jobs : 1) \
    schedule(static) if (tc.jobs > 1)
#endif
      for (long long ci = 0; ci < static_cast<long long>(n_chunks); ++ci) {
        size_t c = static_cast<size_t>(ci);
        size_t lo = start + c * kChunk;
        size_t hi = std::min(lo + kChunk, start + m);
        for (size_t e = lo; e < hi; ++e) {
          const FeatExample& fe = tr[order[e]];
          uint64_t drop = mix_seed(mix_seed(tc.seed, 0xd70u + epoch),
                                   static_cast<uint64_t>(order[e]));
          Tape tape;
          Var logits = model.forward(tape, fe.fu, true, drop, &chunk_grads[c]);
          Var loss = tape.cross_entropy(logits, fe.label);
          chunk_loss[c] += tape.val(loss)[0];
          if (argmax_index(tape.val(logits)) == fe.label) ++chunk_ok[c];
          tape.backward(loss);
        }
      }
      GradMap grads;
      for (size_t c = 0; c < n_chunks; ++c) {
        for (auto& [name, g] : chunk_grads[c]) {
          auto it = grads.find(name);
          if (it == grads.end())
            grads.emplace(name, std::move(g));
          else
            it->second += g;
        }
        loss_sum += chunk_loss[c];
        correct += chunk_ok[c];
      }
      double inv = 1.0 / static_cast<double>(m);
      for (auto& [name, g] : grads)
        for (size_t i = 0; i < g.size(); ++i) g[i] *= inv;
      opt.step(model.params, grads);
    }
    EpochStats st;
    st.epoch = epoch;
    st.train_loss = loss_sum / static_cast<double>(n);
    st.train_acc = static_cast<double>(correct) / static_cast<double>(n);
    st.val_acc = eval_cached(model, va);
    history.push_back(st);
    if (!va.empty() && st.val_acc > best_acc) {
      best_acc = st.val_acc;
      best = model.params;
    }
  }
  if (!va.empty()) model.params = best;
  return history;
}

TrainResult train_pipeline(const std::vector<Example>& train,
                           const std::vector<Example>& val,
                           const ModelConfig& mc, const TrainConfig& tc,
                           const Kb* kb, const NGramIndex* index) {
  if (train.empty()) throw DataError("training set is empty");
  TrainResult out;
  ConcetModel& model = out.model;
  model.config = mc;
  model.ablation = tc.ablation;

  std::set<std::string> label_set;
  for (const auto& ex : train) label_set.insert(ex.label);
  model.labels.assign(label_set.begin(), label_set.end());

  std::vector<std::vector<std::string>> docs;
  docs.reserve(train.size());
  for (const auto& ex : train) docs.push_back(tokenize(ex.text));
  model.vocab = Vocab::build(docs, 1);
  model.inventory =
      kb != nullptr ? kb->inventory() : TypeInventory::standard();

  if (tc.ablation.use_topic_features) {
    int k = static_cast<int>(model.labels.size());
    model.lda = lda_fit(docs, k, 500, tc.seed);
    model.lsa = lsa_fit(docs, k);
  }
  model.init_params(tc.seed);
  out.history = train_model(model, train, val, tc, kb, index);
  return out;
}

double accuracy(const ConcetModel& model, const std::vector<Example>& examples,
                const Kb* kb, const NGramIndex* index) {
  if (examples.empty()) return 0.0;
  long ok = 0;
  for (const auto& ex : examples) {
    auto fu = model.featurize(ex.text, kb, index);
    auto probs = model.predict(fu);
    int best = 0;
    for (size_t i = 1; i < probs.size(); ++i)
      if (probs[i] > probs[static_cast<size_t>(best)]) best = static_cast<int>(i);
    if (best == model.label_id(ex.label)) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(examples.size());
}

}  // namespace concet
