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
// Turns linked mentions into model inputs: a per-token entity-type sequence
// and an aggregated per-type max-score vector.

#ifndef CONCET_ENTITY_FEATURES_HPP_
#define CONCET_ENTITY_FEATURES_HPP_

#include <map>
#include <string>
#include <vector>

#include "concet/kb.hpp"
#include "concet/linker.hpp"

namespace concet {

// The non-entity label O in type sequences.
inline constexpr int kNoType = -1;

// The mention's most probable type; ties resolve to the type earliest in
// inventory order.
int argmax_type(const EntityMention& mention);

// One label per token: tokens inside a mention span get the mention's
// argmax type, everything else gets O.  Throws DataError on overlapping
// mentions or spans out of range.
std::vector<int> type_sequence(const std::vector<std::string>& tokens,
                               const std::vector<EntityMention>& mentions);

// Per inventory type, the maximum probability over all mentions; 0 for
// types no mention carries.  Never renormalized.
std::vector<double> type_dist_vector(const std::vector<EntityMention>& mentions,
                                     const TypeInventory& inventory);

// Builds an inventory of the most frequent observed types, capped at `cap`,
// ordered by count descending then name ascending.
TypeInventory inventory_from_frequencies(
    const std::map<std::string, long long>& counts, size_t cap);

}  // namespace concet

#endif  // CONCET_ENTITY_FEATURES_HPP_
