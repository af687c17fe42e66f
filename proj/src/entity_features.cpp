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

#include "concet/entity_features.hpp"

#include <algorithm>

namespace concet {

int argmax_type(const EntityMention& mention) {
  if (mention.types.empty()) return kNoType;
  int best = mention.types[0].first;
  double best_p = mention.types[0].second;
  for (const auto& [t, p] : mention.types) {
    // types are sorted ascending by index, so > keeps the earliest on ties
    if (p > best_p) {
      best = t;
      best_p = p;
    }
  }
  return best;
}

std::vector<int> type_sequence(const std::vector<std::string>& tokens,
                               const std::vector<EntityMention>& mentions) {
  std::vector<int> labels(tokens.size(), kNoType);
  for (const auto& m : mentions) {
    if (m.start >= m.end || m.end > tokens.size())
      throw DataError("mention span out of range");
    const int t = argmax_type(m);
    for (size_t i = m.start; i < m.end; ++i) {
      if (labels[i] != kNoType)
        throw DataError("overlapping mentions in type_sequence");
      labels[i] = t;
    }
  }
  return labels;
}

std::vector<double> type_dist_vector(const std::vector<EntityMention>& mentions,
                                     const TypeInventory& inventory) {
  std::vector<double> values(inventory.size(), 0.0);
  for (const auto& m : mentions) {
    for (const auto& [t, p] : m.types) {
      if (t < 0 || t >= static_cast<int>(inventory.size()))
        throw DataError("mention type outside the inventory");
      values[static_cast<size_t>(t)] =
          std::max(values[static_cast<size_t>(t)], p);
    }
  }
  return values;
}

TypeInventory inventory_from_frequencies(
    const std::map<std::string, long long>& counts, size_t cap) {
  std::vector<std::pair<std::string, long long>> order(counts.begin(),
                                                       counts.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (order.size() > cap) order.resize(cap);
  std::vector<std::string> names;
  names.reserve(order.size());
  for (const auto& [name, cnt] : order) names.push_back(name);
  return TypeInventory(std::move(names));
}

}  // namespace concet
