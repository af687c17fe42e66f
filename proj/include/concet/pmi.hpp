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
// Document co-occurrence statistics and entity-type score estimation.  The
// score of type t for mention m is the fraction of documents containing m
// that also contain t (via any of t's aliases); per-entity scores are then
// normalized into a distribution over the entity's KB types.

#ifndef CONCET_PMI_HPP_
#define CONCET_PMI_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "concet/error.hpp"
#include "concet/kb.hpp"

namespace concet {

// Human-readable co-occurrence aliases per type.  The default alias of a
// type is its identifier lowercased with underscores as spaces.
class AliasTable {
 public:
  AliasTable() = default;

  static AliasTable defaults(const TypeInventory& inv);

  // Replaces the alias list of one type.
  void set(const std::string& type, std::vector<std::string> aliases);

  const std::vector<std::string>& aliases(const std::string& type) const;

  // Line-delimited JSON {"type":..., "aliases":[...]} merged over defaults.
  static AliasTable load(const std::string& path, const TypeInventory& inv);

  const std::map<std::string, std::vector<std::string>>& all() const {
    return table_;
  }

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

// Document-level counts: how many documents contain each tracked phrase,
// and how many contain a (mention, type) pair.  Immutable once built.
struct CorpusStats {
  long long doc_count = 0;
  std::map<std::string, long long> phrase_docs;
  std::map<std::pair<std::string, std::string>, long long> pair_docs;

  long long docs_with(const std::string& phrase) const;
  long long docs_with_pair(const std::string& phrase,
                           const std::string& type) const;
};

// Number of documents whose token stream contains the normalized phrase as
// a contiguous subsequence; each document counts at most once.
long long count_docs(const std::vector<std::string>& docs,
                     const std::string& phrase);

// Counts tracked phrases and (phrase, type) pairs across the corpus.  The
// parallel variant partitions documents and merges per-chunk counts in
// chunk order; results are identical to the serial build for any jobs.
CorpusStats build_corpus_stats_serial(const std::vector<std::string>& docs,
                                      const std::vector<std::string>& phrases,
                                      const AliasTable& aliases);
CorpusStats build_corpus_stats(const std::vector<std::string>& docs,
                               const std::vector<std::string>& phrases,
                               const AliasTable& aliases, int jobs = 1);

// Fraction of the mention's documents that also mention the type.
// Throws NoOccurrenceError when the mention was never observed.
double type_score(const CorpusStats& stats, const std::string& mention,
                  const std::string& type_name);

// Normalized distribution over candidate types.  Entries keep candidate
// order.  Sums to 1; all-zero scores fall back to uniform.
struct TypeDistribution {
  std::vector<std::pair<std::string, double>> entries;

  double prob(const std::string& type) const;
  double sum() const;
};

TypeDistribution type_distribution(const CorpusStats& stats,
                                   const std::string& mention,
                                   const std::vector<std::string>& candidates);

// Fills each record's type_scores from the stats using its first observed
// surface form; records with no observed form keep no scores (the linker
// then falls back to uniform).  Returns the number of records scored.
size_t apply_pmi_scores(Kb& kb, const CorpusStats& stats);

// One document per line.  Lines that parse as JSON objects with a "text"
// field contribute that field; anything else is taken verbatim.
std::vector<std::string> load_corpus(const std::string& path);

}  // namespace concet

#endif  // CONCET_PMI_HPP_
