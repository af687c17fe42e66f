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

#include "concet/pmi.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "concet/io.hpp"
#include "concet/log.hpp"
#include "concet/text.hpp"

namespace concet {

using nlohmann::json;

namespace {

std::vector<std::string> split_words(const std::string& normalized) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start < normalized.size()) {
    size_t sp = normalized.find(' ', start);
    if (sp == std::string::npos) {
      out.push_back(normalized.substr(start));
      break;
    }
    out.push_back(normalized.substr(start, sp - start));
    start = sp + 1;
  }
  return out;
}

// Lowercased tokens with pure-punctuation tokens dropped; the stream that
// phrase containment is defined over.
std::vector<std::string> normalized_stream(const std::string& doc) {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(doc)) {
    std::string n = normalize_ngram(tok);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

bool contains_phrase(const std::vector<std::string>& stream,
                     const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > stream.size()) return false;
  return std::search(stream.begin(), stream.end(), phrase.begin(),
                     phrase.end()) != stream.end();
}

}  // namespace

AliasTable AliasTable::defaults(const TypeInventory& inv) {
  AliasTable table;
  for (const auto& name : inv.names()) {
    std::string alias;
    alias.reserve(name.size());
    for (char c : name)
      alias.push_back(c == '_' ? ' '
                               : static_cast<char>(std::tolower(
                                     static_cast<unsigned char>(c))));
    table.table_[name] = {alias};
  }
  return table;
}

void AliasTable::set(const std::string& type, std::vector<std::string> aliases) {
  if (aliases.empty())
    throw DataError("alias list for " + type + " is empty");
  table_[type] = std::move(aliases);
}

const std::vector<std::string>& AliasTable::aliases(const std::string& type) const {
  auto it = table_.find(type);
  if (it == table_.end()) throw DataError("no aliases for type: " + type);
  return it->second;
}

AliasTable AliasTable::load(const std::string& path, const TypeInventory& inv) {
  AliasTable table = defaults(inv);
  auto lines = io::read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const int line_no = static_cast<int>(i + 1);
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
    try {
      std::string type = j.at("type").get<std::string>();
      inv.require(type);
      std::vector<std::string> aliases;
      for (const auto& a : j.at("aliases"))
        aliases.push_back(a.get<std::string>());
      table.set(type, std::move(aliases));
    } catch (const json::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return table;
}

long long CorpusStats::docs_with(const std::string& phrase) const {
  auto it = phrase_docs.find(normalize_ngram(phrase));
  return it == phrase_docs.end() ? 0 : it->second;
}

long long CorpusStats::docs_with_pair(const std::string& phrase,
                                      const std::string& type) const {
  auto it = pair_docs.find({normalize_ngram(phrase), type});
  return it == pair_docs.end() ? 0 : it->second;
}

long long count_docs(const std::vector<std::string>& docs,
                     const std::string& phrase) {
  auto words = split_words(normalize_ngram(phrase));
  if (words.empty()) return 0;
  long long count = 0;
  for (const auto& doc : docs)
    if (contains_phrase(normalized_stream(doc), words)) ++count;
  return count;
}

namespace {

struct TrackedTerms {
  std::set<std::string> phrases;
  // alias n-gram → types it stands for
  std::map<std::string, std::vector<std::string>> alias_types;
  size_t max_words = 0;
};

TrackedTerms prepare_terms(const std::vector<std::string>& phrases,
                           const AliasTable& aliases) {
  TrackedTerms t;
  for (const auto& p : phrases) {
    std::string n = normalize_ngram(p);
    if (n.empty()) continue;
    t.max_words = std::max(t.max_words, split_words(n).size());
    t.phrases.insert(std::move(n));
  }
  for (const auto& [type, list] : aliases.all()) {
    for (const auto& a : list) {
      std::string n = normalize_ngram(a);
      if (n.empty()) continue;
      t.max_words = std::max(t.max_words, split_words(n).size());
      auto& types = t.alias_types[n];
      if (std::find(types.begin(), types.end(), type) == types.end())
        types.push_back(type);
    }
  }
  return t;
}

void count_doc(const std::string& doc, const TrackedTerms& terms,
               CorpusStats& stats) {
  auto stream = normalized_stream(doc);
  std::set<std::string> present_phrases;
  std::set<std::string> present_types;
  const size_t n = stream.size();
  std::string gram;
  for (size_t start = 0; start < n; ++start) {
    gram.clear();
    for (size_t k = 0; k < terms.max_words && start + k < n; ++k) {
      if (k) gram.push_back(' ');
      gram += stream[start + k];
      if (terms.phrases.count(gram)) present_phrases.insert(gram);
      auto it = terms.alias_types.find(gram);
      if (it != terms.alias_types.end())
        for (const auto& type : it->second) present_types.insert(type);
    }
  }
  for (const auto& p : present_phrases) ++stats.phrase_docs[p];
  for (const auto& p : present_phrases)
    for (const auto& t : present_types) ++stats.pair_docs[{p, t}];
}

void merge_stats(CorpusStats& into, const CorpusStats& from) {
  for (const auto& [k, v] : from.phrase_docs) into.phrase_docs[k] += v;
  for (const auto& [k, v] : from.pair_docs) into.pair_docs[k] += v;
}

}  // namespace

CorpusStats build_corpus_stats_serial(const std::vector<std::string>& docs,
                                      const std::vector<std::string>& phrases,
                                      const AliasTable& aliases) {
  TrackedTerms terms = prepare_terms(phrases, aliases);
  CorpusStats stats;
  stats.doc_count = static_cast<long long>(docs.size());
  for (const auto& doc : docs) count_doc(doc, terms, stats);
  return stats;
}

CorpusStats build_corpus_stats(const std::vector<std::string>& docs,
                               const std::vector<std::string>& phrases,
                               const AliasTable& aliases, int jobs) {
#ifdef _OPENMP
  if (jobs > 1 && docs.size() > 1) {
    TrackedTerms terms = prepare_terms(phrases, aliases);
    const size_t chunks = std::min<size_t>(static_cast<size_t>(jobs), docs.size());
    std::vector<CorpusStats> partial(chunks);
#pragma omp parallel for schedule(static) num_threads(static_cast<int>(chunks))
    for (long long ci = 0; ci < static_cast<long long>(chunks); ++ci) {
      const size_t c = static_cast<size_t>(ci);
      const size_t begin = docs.size() * c / chunks;
      const size_t end = docs.size() * (c + 1) / chunks;
      for (size_t d = begin; d < end; ++d)
        count_doc(docs[d], terms, partial[c]);
    }
    CorpusStats stats;
    stats.doc_count = static_cast<long long>(docs.size());
    for (const auto& p : partial) merge_stats(stats, p);
    return stats;
  }
#else
  (void)jobs;
#endif
  return build_corpus_stats_serial(docs, phrases, aliases);
}

double type_score(const CorpusStats& stats, const std::string& mention,
                  const std::string& type_name) {
  long long m = stats.docs_with(mention);
  if (m <= 0)
    throw NoOccurrenceError("mention never observed: " + mention);
  long long pair = stats.docs_with_pair(mention, type_name);
  return static_cast<double>(pair) / static_cast<double>(m);
}

double TypeDistribution::prob(const std::string& type) const {
  for (const auto& [t, p] : entries)
    if (t == type) return p;
  return 0.0;
}

double TypeDistribution::sum() const {
  double s = 0.0;
  for (const auto& [t, p] : entries) s += p;
  return s;
}

TypeDistribution type_distribution(const CorpusStats& stats,
                                   const std::string& mention,
                                   const std::vector<std::string>& candidates) {
  if (candidates.empty())
    throw DataError("type_distribution needs at least one candidate type");
  TypeDistribution dist;
  double total = 0.0;
  for (const auto& type : candidates) {
    double s = type_score(stats, mention, type);
    dist.entries.emplace_back(type, s);
    total += s;
  }
  if (total > 0.0) {
    for (auto& [t, p] : dist.entries) p /= total;
  } else {
    const double u = 1.0 / static_cast<double>(candidates.size());
    for (auto& [t, p] : dist.entries) p = u;
  }
  return dist;
}

size_t apply_pmi_scores(Kb& kb, const CorpusStats& stats) {
  size_t scored = 0;
  for (size_t i = 0; i < kb.size(); ++i) {
    EntityRecord& rec = kb.mutable_record(i);
    rec.scores.clear();
    const std::string* mention = nullptr;
    for (const auto& form : rec.forms) {
      if (stats.docs_with(form) > 0) {
        mention = &form;
        break;
      }
    }
    if (mention == nullptr) continue;

    std::vector<std::string> candidates;
    for (int t : rec.types) candidates.push_back(kb.inventory().name(t));
    TypeDistribution dist = type_distribution(stats, *mention, candidates);
    for (size_t t = 0; t < rec.types.size(); ++t)
      rec.scores.emplace_back(rec.types[t], dist.entries[t].second);
    std::sort(rec.scores.begin(), rec.scores.end());
    ++scored;
  }
  return scored;
}

std::vector<std::string> load_corpus(const std::string& path) {
  std::vector<std::string> docs;
  for (const auto& line : io::read_lines(path)) {
    if (line.empty()) continue;
    if (line[0] == '{') {
      json j = json::parse(line, nullptr, false);
      if (!j.is_discarded() && j.is_object() && j.contains("text") &&
          j["text"].is_string()) {
        docs.push_back(j["text"].get<std::string>());
        continue;
      }
    }
    docs.push_back(line);
  }
  return docs;
}

}  // namespace concet
