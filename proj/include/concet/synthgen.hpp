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
// Template driven synthetic utterance generator.  Templates carry slots
// (NER_<TYPE> filled from the knowledge base, KEYWORD_<LIST> filled from
// keyword lists); generation enumerates the slot product per template,
// deduplicates within each topic, and stops at the configured cap.

#ifndef CONCET_SYNTHGEN_HPP_
#define CONCET_SYNTHGEN_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "concet/kb.hpp"
#include "concet/rng.hpp"

namespace concet {

// Named keyword lists in file order.  File format: a list starts at a line
// matching [A-Z][A-Z0-9_]* and collects every following non-empty line as
// one keyword (kept verbatim, so multi-word keywords are fine).  An
// all-caps line always opens a new list, which is why keywords themselves
// are lowercase by convention; emitted utterances are lowercased anyway.
class KeywordLists {
 public:
  void add(const std::string& name, std::vector<std::string> entries);

  // nullptr when the list is unknown.
  const std::vector<std::string>* find(const std::string& name) const;

  const std::vector<std::pair<std::string, std::vector<std::string>>>& lists()
      const {
    return lists_;
  }

 private:
  std::vector<std::pair<std::string, std::vector<std::string>>> lists_;
};

KeywordLists parse_keyword_lists(const std::string& content,
                                 const std::string& origin);
KeywordLists load_keyword_lists(const std::vector<std::string>& paths);

struct TemplateSlot {
  enum class Kind { kEntity, kKeyword };
  Kind kind = Kind::kEntity;
  size_t pos = 0;    // character offset of the slot token
  size_t len = 0;    // length of the slot token
  std::string raw;   // the literal token, e.g. NER_ANIMALS
  std::string name;  // resolved inventory type or keyword list name
  int type_index = -1;  // inventory index, entity slots only
};

struct Template {
  std::string topic;
  std::string text;
  std::vector<TemplateSlot> slots;  // ascending by pos
};

// Finds every whitespace token starting with NER_ or KEYWORD_ and resolves
// it.  Entity slots match inventory names case-insensitively with one
// trailing S of tolerance on either side, so NER_ANIMALS finds Animal and
// NER_SINGER finds Singers.  A malformed or unresolvable slot throws
// ParseError naming the column; `origin` and `line` locate the message.
Template parse_template(const std::string& topic, const std::string& text,
                        const TypeInventory& inventory,
                        const KeywordLists& keywords,
                        const std::string& origin = "<template>",
                        int line = 0);

// One "<topic> TAB <template text>" per line; blank lines are skipped.
std::vector<Template> load_templates(const std::string& path,
                                     const TypeInventory& inventory,
                                     const KeywordLists& keywords);

struct SynthRecord {
  std::string text;
  std::string label;
  std::string provenance;  // "synthetic" or "external"
};

struct GeneratorConfig {
  long long rho = 1;  // hard cap on emitted utterances, at least 1
  uint64_t seed = 1;  // reserved for sampling-based filling
  bool dedupe = true;
  // Optional per-topic caps; topics absent from the map are uncapped.
  std::map<std::string, long long> quotas;
};

struct GenerationStats {
  long long emitted = 0;
  long long duplicates = 0;  // dropped by the per-topic dedupe
  long long skipped = 0;     // templates passed over for an empty slot pool
  std::map<std::string, long long> per_topic;
};

// Deterministic enumeration: topics round-robin in first-appearance order,
// templates in input order within a topic, slot values by an odometer with
// the rightmost slot fastest.  Entity pools are ordered by popularity rank
// then id and use each record's first surface form; keyword pools keep
// file order.  Output size is exactly min(rho, deduplicated space).
// Emitted text is lowercased.  Throws UsageError when rho < 1 and
// DataError when no templates are given.
std::vector<SynthRecord> generate(const std::vector<Template>& templates,
                                  const Kb& kb, const KeywordLists& keywords,
                                  const GeneratorConfig& cfg,
                                  GenerationStats* stats = nullptr);

// One random fill of a single template: entity slots sample with weight
// 1/rank (most popular first), keyword slots uniformly.  Throws
// EmptyPoolError naming the slot when a pool is empty.
SynthRecord fill(const Template& tpl, const Kb& kb,
                 const KeywordLists& keywords, Rng& rng);

// Keeps questions whose token count is strictly below max_words and labels
// them with the topic; text is kept verbatim.  Throws UsageError when
// max_words < 1.
std::vector<SynthRecord> ingest_external(
    const std::vector<std::string>& questions, const std::string& topic,
    int max_words);

// JSONL with one {"text", "label", "provenance"} object per line.  The
// files also load as plain training examples, which ignore provenance.
void save_synth(const std::vector<SynthRecord>& records,
                const std::string& path);
std::vector<SynthRecord> load_synth(const std::string& path);

}  // namespace concet

#endif  // CONCET_SYNTHGEN_HPP_
