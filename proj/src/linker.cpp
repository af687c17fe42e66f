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

#include "concet/linker.hpp"

#include <algorithm>

#include "concet/text.hpp"

namespace concet {

namespace {

size_t word_count(const std::string& normalized) {
  if (normalized.empty()) return 0;
  return static_cast<size_t>(std::count(normalized.begin(), normalized.end(),
                                        ' ')) + 1;
}

std::vector<std::pair<int, double>> mention_types(const EntityRecord& rec) {
  std::vector<std::pair<int, double>> types;
  if (rec.has_scores()) {
    types = rec.scores;  // already sorted by type index
  } else {
    std::vector<int> sorted = rec.types;
    std::sort(sorted.begin(), sorted.end());
    const double u = 1.0 / static_cast<double>(sorted.size());
    for (int t : sorted) types.emplace_back(t, u);
  }
  return types;
}

}  // namespace

std::vector<SpotCandidate> spot(const std::vector<std::string>& tokens,
                                int max_gram) {
  std::vector<SpotCandidate> out;
  const size_t n = tokens.size();
  const size_t top = std::min(n, static_cast<size_t>(max_gram));
  for (size_t k = 1; k <= top; ++k) {
    for (size_t start = 0; start + k <= n; ++start) {
      std::string joined;
      for (size_t i = start; i < start + k; ++i) {
        if (i > start) joined.push_back(' ');
        joined += tokens[i];
      }
      out.push_back({start, start + k, normalize_ngram(joined)});
    }
  }
  return out;
}

size_t spot_count(size_t n_tokens, int max_gram) {
  size_t count = 0;
  const size_t top = std::min(n_tokens, static_cast<size_t>(max_gram));
  for (size_t k = 1; k <= top; ++k) count += n_tokens - k + 1;
  return count;
}

std::vector<EntityMention> link_tokens(const std::vector<std::string>& tokens,
                                       const Kb& kb, const NGramIndex& index) {
  struct Hit {
    size_t start, end;
    std::string ngram;
    uint32_t record;
  };
  std::vector<Hit> hits;
  for (auto& cand : spot(tokens, index.max_gram())) {
    const auto& matches = index.lookup(cand.ngram);
    if (matches.empty()) continue;
    // A span whose normalization dropped tokens (edge punctuation) is not a
    // real mention of this span; the shorter clean span covers it.
    if (word_count(cand.ngram) != cand.end - cand.start) continue;

    uint32_t best = matches[0];
    for (uint32_t ri : matches) {
      const auto& a = kb.record(ri);
      const auto& b = kb.record(best);
      if (a.rank < b.rank || (a.rank == b.rank && a.id < b.id)) best = ri;
    }
    hits.push_back({cand.start, cand.end, std::move(cand.ngram), best});
  }

  // Maximal munch: longer spans first, then leftmost.
  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    const size_t la = a.end - a.start, lb = b.end - b.start;
    if (la != lb) return la > lb;
    return a.start < b.start;
  });

  std::vector<EntityMention> accepted;
  for (auto& h : hits) {
    bool overlaps = false;
    for (const auto& m : accepted) {
      if (h.start < m.end && m.start < h.end) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) continue;
    const EntityRecord& rec = kb.record(h.record);
    EntityMention m;
    m.start = h.start;
    m.end = h.end;
    m.surface = std::move(h.ngram);
    m.canonical_id = rec.id;
    m.types = mention_types(rec);
    accepted.push_back(std::move(m));
  }

  std::sort(accepted.begin(), accepted.end(),
            [](const EntityMention& a, const EntityMention& b) {
              return a.start < b.start;
            });
  return accepted;
}

std::vector<EntityMention> link(const std::string& utterance, const Kb& kb,
                                const NGramIndex& index) {
  return link_tokens(tokenize(utterance), kb, index);
}

}  // namespace concet
