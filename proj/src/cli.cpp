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

#include "concet/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "concet/error.hpp"
#include "concet/eval.hpp"
#include "concet/io.hpp"
#include "concet/kb.hpp"
#include "concet/linker.hpp"
#include "concet/log.hpp"
#include "concet/model.hpp"
#include "concet/pmi.hpp"
#include "concet/synthgen.hpp"
#include "concet/text.hpp"
#include "concet/topics.hpp"

namespace concet {
namespace cli {
namespace {

constexpr char kTopicsMagic[4] = {'C', 'T', 'P', 'F'};
constexpr uint32_t kTopicsVersion = 1;

std::string trimmed(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string f4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string f6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// One subcommand: its CLI11 app, the string value of every flag, and any
// config-file-only keys it honors.
struct Cmd {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> vals;
  std::map<std::string, CLI::Option*> opts;
  std::set<std::string> file_only;
  std::map<std::string, std::string> extras;
  std::vector<std::string> keyword_paths;
  CLI::Option* keywords_opt = nullptr;
  std::string config_path;

  void opt(const std::string& name, const std::string& desc) {
    opts.emplace(name, app->add_option("--" + name, vals[name], desc));
  }

  const std::string& val(const std::string& key) const {
    static const std::string kEmpty;
    auto it = vals.find(key);
    return it == vals.end() ? kEmpty : it->second;
  }
};

// key=value lines; blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::istringstream in(io::read_file(path));
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(path, lineno, "expected key=value");
    std::string key = trimmed(t.substr(0, eq));
    std::string value = trimmed(t.substr(eq + 1));
    if (key.empty()) throw ParseError(path, lineno, "empty key");
    if (kv.count(key))
      throw ParseError(path, lineno, "duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ','))
    if (!trimmed(cur).empty()) out.push_back(trimmed(cur));
  return out;
}

// Fills flags the command line left untouched from the config file.
void apply_config(Cmd& c) {
  if (c.config_path.empty()) return;
  for (const auto& [key, value] : parse_kv_file(c.config_path)) {
    if (key == "keywords" && c.keywords_opt != nullptr) {
      if (c.keywords_opt->count() == 0) c.keyword_paths = split_commas(value);
      continue;
    }
    auto it = c.opts.find(key);
    if (it != c.opts.end()) {
      if (it->second->count() == 0) c.vals[key] = value;
      continue;
    }
    if (c.file_only.count(key) != 0) {
      c.extras[key] = value;
      continue;
    }
    throw UsageError("unknown config key '" + key + "' for subcommand " +
                     c.app->get_name());
  }
}

void log_resolved(const Cmd& c) {
  std::ostringstream os;
  for (const auto& [k, v] : c.vals)
    if (!v.empty()) os << ' ' << k << '=' << v;
  for (const auto& [k, v] : c.extras) os << ' ' << k << '=' << v;
  for (const auto& p : c.keyword_paths) os << " keywords=" << p;
  CONCET_LOG(kInfo) << c.app->get_name() << " resolved config:"
                    << (os.str().empty() ? " (defaults)" : os.str());
}

const std::string& need(const Cmd& c, const std::string& key) {
  const std::string& v = c.val(key);
  if (v.empty()) throw UsageError("missing required flag --" + key);
  return v;
}

long long parse_ll(const std::string& key, const std::string& v) {
  long long n = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (ec != std::errc() || p != v.data() + v.size())
    throw UsageError("--" + key + " expects an integer, got '" + v + "'");
  return n;
}

long long ll_of(const Cmd& c, const std::string& key, long long dflt) {
  const std::string& v = c.val(key);
  return v.empty() ? dflt : parse_ll(key, v);
}

int int_of(const Cmd& c, const std::string& key, int dflt) {
  return static_cast<int>(ll_of(c, key, dflt));
}

uint64_t u64_of(const Cmd& c, const std::string& key, uint64_t dflt) {
  const std::string& v = c.val(key);
  if (v.empty()) return dflt;
  uint64_t n = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (ec != std::errc() || p != v.data() + v.size())
    throw UsageError("--" + key + " expects an unsigned integer, got '" + v +
                     "'");
  return n;
}

double extra_d(const Cmd& c, const std::string& key, double dflt) {
  auto it = c.extras.find(key);
  if (it == c.extras.end()) return dflt;
  const std::string& v = it->second;
  char* end = nullptr;
  double d = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty())
    throw UsageError("config key '" + key + "' expects a number, got '" + v +
                     "'");
  return d;
}

int extra_int(const Cmd& c, const std::string& key, int dflt) {
  auto it = c.extras.find(key);
  if (it == c.extras.end()) return dflt;
  return static_cast<int>(parse_ll(key, it->second));
}

// Optional KB plus index: the index file when given, otherwise built from
// the KB. --index without --kb is a usage error.
struct KbBundle {
  Kb kb;
  NGramIndex index;
  bool loaded = false;

  const Kb* kb_ptr() const { return loaded ? &kb : nullptr; }
  const NGramIndex* index_ptr() const { return loaded ? &index : nullptr; }
};

KbBundle load_bundle(const Cmd& c) {
  KbBundle b;
  const std::string& kb_path = c.val("kb");
  const std::string& index_path = c.val("index");
  if (kb_path.empty()) {
    if (!index_path.empty()) throw UsageError("--index requires --kb");
    return b;
  }
  b.kb = load_kb(kb_path);
  b.index = index_path.empty() ? build_index(b.kb)
                               : load_index(index_path, b.kb);
  b.loaded = true;
  return b;
}

ModelConfig model_config_of(const Cmd& c) {
  ModelConfig mc;
  mc.word_dim = extra_int(c, "word-dim", mc.word_dim);
  mc.char_dim = extra_int(c, "char-dim", mc.char_dim);
  mc.pos_dim = extra_int(c, "pos-dim", mc.pos_dim);
  mc.ent_dim = extra_int(c, "ent-dim", mc.ent_dim);
  mc.conv_channels = extra_int(c, "conv-channels", mc.conv_channels);
  mc.lstm_hidden = extra_int(c, "lstm-hidden", mc.lstm_hidden);
  mc.char_k = extra_int(c, "char-k", mc.char_k);
  mc.max_len = extra_int(c, "max-len", mc.max_len);
  mc.dropout = extra_d(c, "dropout", mc.dropout);
  return mc;
}

int cmd_build_kb(const Cmd& c, std::ostream& out) {
  Kb kb = load_kb(need(c, "kb"));
  NGramIndex index = build_index(kb);
  if (!c.val("out").empty()) save_kb(kb, c.val("out"));
  if (!c.val("index").empty()) save_index(index, kb, c.val("index"));
  out << kb.size() << " records, " << kb.inventory().size() << " types, "
      << index.key_count() << " index keys\n";
  return 0;
}

int cmd_pmi_estimate(const Cmd& c, std::ostream& out) {
  int jobs = int_of(c, "jobs", 1);
  Kb kb = load_kb(need(c, "kb"));
  std::vector<std::string> docs = load_corpus(need(c, "corpus"));
  std::set<std::string> phrase_set;
  for (const auto& rec : kb.records())
    for (const auto& form : rec.forms) phrase_set.insert(form);
  std::vector<std::string> phrases(phrase_set.begin(), phrase_set.end());
  CorpusStats stats = build_corpus_stats(
      docs, phrases, AliasTable::defaults(kb.inventory()), jobs);
  size_t scored = apply_pmi_scores(kb, stats);
  save_kb(kb, need(c, "out"));
  out << "scored " << scored << " of " << kb.size() << " records over "
      << docs.size() << " documents\n";
  return 0;
}

int cmd_link(const Cmd& c, std::istream& in, std::ostream& out) {
  need(c, "kb");
  KbBundle b = load_bundle(c);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    nlohmann::json rec;
    rec["text"] = line;
    rec["mentions"] = nlohmann::json::array();
    for (const auto& m : link(line, b.kb, b.index)) {
      nlohmann::json jm;
      jm["start"] = m.start;
      jm["end"] = m.end;
      jm["surface"] = m.surface;
      jm["id"] = m.canonical_id;
      jm["types"] = nlohmann::json::array();
      for (const auto& [type, p] : m.types)
        jm["types"].push_back({b.kb.inventory().name(type), p});
      rec["mentions"].push_back(std::move(jm));
    }
    out << rec.dump() << '\n';
  }
  return 0;
}

int cmd_gen_synthetic(const Cmd& c, std::ostream& out) {
  GeneratorConfig gc;
  gc.rho = ll_of(c, "rho", 1);
  gc.seed = u64_of(c, "seed", 1);
  if (gc.rho < 1) throw UsageError("--rho must be at least 1");
  Kb kb = load_kb(need(c, "kb"));
  KeywordLists keywords = load_keyword_lists(c.keyword_paths);
  std::vector<Template> templates =
      load_templates(need(c, "templates"), kb.inventory(), keywords);
  GenerationStats stats;
  std::vector<SynthRecord> records = generate(templates, kb, keywords, gc,
                                              &stats);
  save_synth(records, need(c, "out"));
  out << "emitted " << stats.emitted << " (duplicates " << stats.duplicates
      << ", skipped " << stats.skipped << ")\n";
  return 0;
}

int cmd_topics_fit(const Cmd& c, std::ostream& out) {
  int n = int_of(c, "topics-n", 0);
  if (n < 1) throw UsageError("--topics-n must be at least 1");
  uint64_t seed = u64_of(c, "seed", 1);
  std::vector<std::string> lines = load_corpus(need(c, "corpus"));
  std::vector<std::vector<std::string>> docs;
  docs.reserve(lines.size());
  for (const auto& line : lines) docs.push_back(tokenize(line));
  LdaModel lda = lda_fit(docs, n, 500, seed);
  LsaModel lsa = lsa_fit(docs, n);
  std::ofstream f(need(c, "out"), std::ios::binary);
  if (!f) throw DataError("cannot open file: " + c.val("out"));
  f.write(kTopicsMagic, 4);
  io::write_u32(f, kTopicsVersion);
  lda.save(f);
  lsa.save(f);
  out << "fit " << n << " topics over " << docs.size() << " documents\n";
  return 0;
}

int cmd_train(const Cmd& c, std::ostream& out) {
  ModelConfig mc = model_config_of(c);
  TrainConfig tc;
  tc.epochs = int_of(c, "epochs", tc.epochs);
  tc.batch_size = int_of(c, "batch", tc.batch_size);
  tc.lr = extra_d(c, "lr", tc.lr);
  tc.seed = u64_of(c, "seed", tc.seed);
  tc.jobs = int_of(c, "jobs", tc.jobs);
  if (!c.val("ablation").empty())
    tc.ablation = parse_ablation(c.val("ablation"));
  const std::string& dir = need(c, "checkpoint");
  std::vector<Example> train = load_examples(need(c, "corpus"));
  KbBundle b = load_bundle(c);
  TrainResult tr = train_pipeline(train, {}, mc, tc, b.kb_ptr(),
                                  b.index_ptr());
  tr.model.save(dir);
  for (const auto& e : tr.history)
    out << "epoch " << e.epoch << " loss " << f6(e.train_loss) << " acc "
        << f4(e.train_acc) << "\n";
  out << "checkpoint saved to " << dir << "\n";
  return 0;
}

int cmd_eval(const Cmd& c, std::ostream& out) {
  ConcetModel model = ConcetModel::load(need(c, "checkpoint"));
  std::vector<Example> test = load_examples(need(c, "corpus"));
  KbBundle b = load_bundle(c);
  std::vector<std::string> gold;
  gold.reserve(test.size());
  for (const auto& e : test) gold.push_back(e.label);
  EvalReport report =
      evaluate(predict_labels(model, test, b.kb_ptr(), b.index_ptr()), gold,
               model.labels);
  report.seed = u64_of(c, "seed", 1);
  report.config = ablation_name(model.ablation);
  report.dataset_hash = dataset_hash(test);
  out << format_report(report);
  if (!c.val("out").empty())
    io::write_file(c.val("out"), report_to_json(report));
  return 0;
}

int cmd_predict(const Cmd& c, std::istream& in, std::ostream& out) {
  ConcetModel model = ConcetModel::load(need(c, "checkpoint"));
  KbBundle b = load_bundle(c);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fu = model.featurize(line, b.kb_ptr(), b.index_ptr());
    std::vector<double> probs = model.predict(fu);
    size_t best = 0;
    for (size_t i = 1; i < probs.size(); ++i)
      if (probs[i] > probs[best]) best = i;
    out << model.labels[best] << '\t' << f6(probs[best]) << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  CLI::App app{"entity-aware conversational topic classification pipeline"};
  app.name("concet");
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Cmd>> cmds;
  auto make = [&](const char* name, const char* desc) -> Cmd& {
    auto c = std::make_unique<Cmd>();
    c->app = app.add_subcommand(name, desc);
    c->app->add_option("--config", c->config_path,
                       "key=value config file; flags override file values");
    c->opt("seed", "random seed (default 1)");
    cmds.push_back(std::move(c));
    return *cmds.back();
  };

  Cmd& build_kb = make("build-kb", "validate a KB file and build its index");
  build_kb.opt("kb", "entity KB file (JSONL), required");
  build_kb.opt("out", "write the canonical KB here");
  build_kb.opt("index", "write the n-gram index here");

  Cmd& pmi = make("pmi-estimate",
                  "score entity types from corpus co-occurrence counts");
  pmi.opt("kb", "entity KB file, required");
  pmi.opt("corpus", "one document per line, required");
  pmi.opt("out", "write the scored KB here, required");
  pmi.opt("jobs", "worker threads (default 1)");

  Cmd& lnk = make("link", "link utterances from stdin, one JSON per line");
  lnk.opt("kb", "entity KB file, required");
  lnk.opt("index", "prebuilt n-gram index (default: built from the KB)");

  Cmd& gen = make("gen-synthetic",
                  "generate labeled utterances from templates");
  gen.opt("templates", "topic TAB template file, required");
  gen.opt("kb", "entity KB file, required");
  gen.opt("rho", "cap on emitted utterances (default 1)");
  gen.opt("out", "write generated JSONL here, required");
  gen.keywords_opt = gen.app->add_option(
      "--keywords", gen.keyword_paths, "keyword list file (repeatable)");

  Cmd& topics = make("topics-fit", "fit topic models over a corpus");
  topics.opt("corpus", "one document per line, required");
  topics.opt("topics-n", "number of topics, required");
  topics.opt("out", "write the fitted models here, required");

  Cmd& train = make("train", "train a classifier and write a checkpoint");
  train.opt("corpus", "labeled JSONL training set, required");
  train.opt("kb", "entity KB file");
  train.opt("index", "prebuilt n-gram index");
  train.opt("checkpoint", "checkpoint directory to write, required");
  train.opt("epochs", "training epochs (default 10)");
  train.opt("batch", "minibatch size (default 32)");
  train.opt("jobs", "worker threads (default 1)");
  train.opt("ablation", "configuration name, e.g. Utt2Vec+TypeDist");
  train.file_only = {"word-dim", "char-dim", "pos-dim",       "ent-dim",
                     "conv-channels", "lstm-hidden", "char-k", "max-len",
                     "dropout", "lr"};

  Cmd& evl = make("eval", "score a checkpoint against a labeled set");
  evl.opt("checkpoint", "checkpoint directory, required");
  evl.opt("corpus", "labeled JSONL test set, required");
  evl.opt("kb", "entity KB file");
  evl.opt("index", "prebuilt n-gram index");
  evl.opt("out", "write the JSON report here");

  Cmd& prd = make("predict", "label utterances from stdin");
  prd.opt("checkpoint", "checkpoint directory, required");
  prd.opt("kb", "entity KB file");
  prd.opt("index", "prebuilt n-gram index");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    auto parsed = app.get_subcommands();
    if (!parsed.empty()) target = parsed.front();
    out << target->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    CLI::App* target = &app;
    auto parsed = app.get_subcommands();
    if (!parsed.empty()) target = parsed.front();
    err << "error: " << e.what() << "\n\n" << target->help();
    return 1;
  }

  Cmd* chosen = nullptr;
  for (auto& c : cmds)
    if (c->app->parsed()) chosen = c.get();

  try {
    apply_config(*chosen);
    log_resolved(*chosen);
    const std::string& name = chosen->app->get_name();
    if (name == "build-kb") return cmd_build_kb(*chosen, out);
    if (name == "pmi-estimate") return cmd_pmi_estimate(*chosen, out);
    if (name == "link") return cmd_link(*chosen, in, out);
    if (name == "gen-synthetic") return cmd_gen_synthetic(*chosen, out);
    if (name == "topics-fit") return cmd_topics_fit(*chosen, out);
    if (name == "train") return cmd_train(*chosen, out);
    if (name == "eval") return cmd_eval(*chosen, out);
    if (name == "predict") return cmd_predict(*chosen, in, out);
    throw UsageError("unknown subcommand " + name);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << chosen->app->help();
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cin, std::cout, std::cerr);
}

}  // namespace cli
}  // namespace concet
