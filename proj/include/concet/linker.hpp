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
// Runtime entity linking: enumerate utterance n-grams, probe the index,
// resolve overlaps, and emit mentions with type distributions.

#ifndef CONCET_LINKER_HPP_
#define CONCET_LINKER_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "concet/kb.hpp"

namespace concet {

struct SpotCandidate {
  size_t start = 0;
  size_t end = 0;      // token span [start, end)
  std::string ngram;   // normalized
};

// All contiguous spans of 1..min(max_gram, n) tokens, with their normalized
// n-gram strings.  Ordered by span length, then start.
std::vector<SpotCandidate> spot(const std::vector<std::string>& tokens,
                                int max_gram);

// Closed form for |spot(tokens, max_gram)|.
size_t spot_count(size_t n_tokens, int max_gram);

struct EntityMention {
  size_t start = 0;
  size_t end = 0;
  std::string surface;       // normalized n-gram
  std::string canonical_id;
  // Inventory type index → probability, ascending by index.  Stored KB
  // scores when present, otherwise uniform over the entity's types.
  std::vector<std::pair<int, double>> types;
};

// Links one utterance.  Mentions are sorted by start and never overlap;
// longer spans win, ties go to the leftmost.  When several entities share a
// surface form the best (lowest) popularity rank wins, then the smaller id.
std::vector<EntityMention> link(const std::string& utterance, const Kb& kb,
                                const NGramIndex& index);
std::vector<EntityMention> link_tokens(const std::vector<std::string>& tokens,
                                       const Kb& kb, const NGramIndex& index);

}  // namespace concet

#endif  // CONCET_LINKER_HPP_
