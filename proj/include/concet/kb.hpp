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
// Entity knowledge base and the inverted n-gram index over its surface
// forms.

#ifndef CONCET_KB_HPP_
#define CONCET_KB_HPP_

#include <atomic>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "concet/error.hpp"

namespace concet {

// Ordered list of entity type identifiers.  The order is fixed at creation
// and defines the layout of every type-indexed vector downstream.  The
// non-entity label O is implicit and never a member.
class TypeInventory {
 public:
  TypeInventory() = default;
  explicit TypeInventory(std::vector<std::string> types);

  // The stock 20-type inventory.
  static TypeInventory standard();

  size_t size() const { return names_.size(); }
  const std::string& name(int i) const { return names_[static_cast<size_t>(i)]; }
  const std::vector<std::string>& names() const { return names_; }

  // -1 when absent.
  int index(const std::string& name) const;
  // Throws DataError when absent.
  int require(const std::string& name) const;

  bool operator==(const TypeInventory& o) const { return names_ == o.names_; }
  bool operator!=(const TypeInventory& o) const { return !(*this == o); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> lookup_;
};

struct EntityRecord {
  std::string id;
  std::vector<std::string> forms;
  std::vector<int> types;  // inventory indices
  int rank = 1;            // 1 = most popular
  // Sorted by type index; empty means no scores stored.  When present the
  // keys are a subset of `types` and values sum to 1 within 1e-9.
  std::vector<std::pair<int, double>> scores;

  bool has_scores() const { return !scores.empty(); }
  double score_for(int type) const;
};

class Kb {
 public:
  Kb() : inventory_(TypeInventory::standard()) {}
  explicit Kb(TypeInventory inv) : inventory_(std::move(inv)) {}

  // Validates the record and rejects duplicates by id.
  void add(EntityRecord rec);

  const TypeInventory& inventory() const { return inventory_; }
  const std::vector<EntityRecord>& records() const { return records_; }
  const EntityRecord& record(size_t i) const { return records_[i]; }
  EntityRecord& mutable_record(size_t i) { return records_[i]; }
  size_t size() const { return records_.size(); }

  // Record index by canonical id, -1 when absent.
  int find(const std::string& id) const;

  // FNV-1a over all canonical ids; used to pair an index file with its KB.
  uint64_t ids_hash() const;

 private:
  void validate(const EntityRecord& rec) const;

  TypeInventory inventory_;
  std::vector<EntityRecord> records_;
  std::unordered_map<std::string, int> by_id_;
};

// Line-delimited JSON: a header line with format/version/types, then one
// record per line.  Serialization is deterministic, so round-trips are
// byte-identical.
std::string kb_to_string(const Kb& kb);
Kb kb_from_string(const std::string& content, const std::string& origin);
void save_kb(const Kb& kb, const std::string& path);
Kb load_kb(const std::string& path);

// Inverted map from normalized surface form to KB record indices.  Immutable
// after build; lookups are thread-safe and counted.
class NGramIndex {
 public:
  NGramIndex() = default;
  NGramIndex(NGramIndex&& o) noexcept { *this = std::move(o); }
  NGramIndex& operator=(NGramIndex&& o) noexcept;
  NGramIndex(const NGramIndex&) = delete;
  NGramIndex& operator=(const NGramIndex&) = delete;

  int max_gram() const { return max_gram_; }
  size_t key_count() const { return map_.size(); }
  // Surface forms longer than max_gram tokens (or empty after
  // normalization), left out of the index.
  uint64_t skipped_forms() const { return skipped_; }

  // Normalizes, counts the probe, and returns matching record indices
  // (possibly empty; order = KB record order).
  const std::vector<uint32_t>& lookup(const std::string& ngram) const;

  uint64_t lookup_count() const {
    return lookups_.load(std::memory_order_relaxed);
  }
  void reset_lookup_count() { lookups_.store(0, std::memory_order_relaxed); }

  void save(std::ostream& os, const Kb& kb) const;
  static NGramIndex load(std::istream& is, const Kb& kb);

  friend NGramIndex build_index(const Kb& kb, int max_gram);

 private:
  std::unordered_map<std::string, std::vector<uint32_t>> map_;
  int max_gram_ = 5;
  uint64_t skipped_ = 0;
  mutable std::atomic<uint64_t> lookups_{0};
};

// Indexes every normalized surface form of at most max_gram tokens.
// Throws DataError for an empty KB and on records without surface forms.
NGramIndex build_index(const Kb& kb, int max_gram = 5);

void save_index(const NGramIndex& index, const Kb& kb, const std::string& path);
NGramIndex load_index(const std::string& path, const Kb& kb);

}  // namespace concet

#endif  // CONCET_KB_HPP_
