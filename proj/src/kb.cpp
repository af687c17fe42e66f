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

#include "concet/kb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "concet/io.hpp"
#include "concet/log.hpp"
#include "concet/rng.hpp"
#include "concet/text.hpp"

namespace concet {

using nlohmann::json;

namespace {

constexpr char kKbFormat[] = "concet-kb";
constexpr int kKbVersion = 1;
constexpr char kIndexMagic[4] = {'C', 'C', 'I', 'X'};
constexpr uint8_t kIndexVersion = 1;

size_t token_count(const std::string& normalized) {
  if (normalized.empty()) return 0;
  return static_cast<size_t>(std::count(normalized.begin(), normalized.end(),
                                        ' ')) + 1;
}

}  // namespace

TypeInventory::TypeInventory(std::vector<std::string> types) {
  if (types.empty()) throw DataError("type inventory is empty");
  for (const auto& t : types) {
    if (t.empty()) throw DataError("empty type identifier");
    if (t == "O") throw DataError("O is reserved for the non-entity label");
    if (lookup_.count(t)) throw DataError("duplicate type identifier: " + t);
    lookup_[t] = static_cast<int>(names_.size());
    names_.push_back(t);
  }
}

TypeInventory TypeInventory::standard() {
  return TypeInventory({
      "Movie_Name", "Celebrities", "Authors", "Bands", "Sports_Team",
      "Sportname", "Companies", "Food", "Organization", "Politicians",
      "Universities", "Singers", "Songname", "Animal", "Country", "Actors",
      "Hotels_Foodchains", "Tourist_points", "Genre_Books", "City",
  });
}

int TypeInventory::index(const std::string& name) const {
  auto it = lookup_.find(name);
  return it == lookup_.end() ? -1 : it->second;
}

int TypeInventory::require(const std::string& name) const {
  int i = index(name);
  if (i < 0) throw DataError("unknown entity type: " + name);
  return i;
}

double EntityRecord::score_for(int type) const {
  for (const auto& [t, s] : scores)
    if (t == type) return s;
  return 0.0;
}

void Kb::validate(const EntityRecord& rec) const {
  if (rec.id.empty()) throw DataError("entity record with empty id");
  if (rec.forms.empty())
    throw DataError("record '" + rec.id + "' has no surface forms");
  for (const auto& f : rec.forms)
    if (f.empty())
      throw DataError("record '" + rec.id + "' has an empty surface form");
  if (rec.types.empty())
    throw DataError("record '" + rec.id + "' has no types");
  std::vector<int> seen;
  for (int t : rec.types) {
    if (t < 0 || t >= static_cast<int>(inventory_.size()))
      throw DataError("record '" + rec.id + "' has an out-of-range type");
    if (std::count(seen.begin(), seen.end(), t))
      throw DataError("record '" + rec.id + "' repeats type " +
                      inventory_.name(t));
    seen.push_back(t);
  }
  if (rec.rank < 1)
    throw DataError("record '" + rec.id + "' has non-positive rank");
  if (!rec.scores.empty()) {
    double sum = 0.0;
    for (const auto& [t, s] : rec.scores) {
      if (std::find(rec.types.begin(), rec.types.end(), t) == rec.types.end())
        throw DataError("record '" + rec.id + "' scores a type it lacks");
      if (s < 0.0 || s > 1.0)
        throw DataError("record '" + rec.id + "' has a score outside [0,1]");
      sum += s;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      throw DataError("record '" + rec.id + "' scores sum to " +
                      std::to_string(sum) + ", expected 1");
  }
}

void Kb::add(EntityRecord rec) {
  std::sort(rec.scores.begin(), rec.scores.end());
  validate(rec);
  if (by_id_.count(rec.id))
    throw DataError("duplicate canonical id: " + rec.id);
  by_id_[rec.id] = static_cast<int>(records_.size());
  records_.push_back(std::move(rec));
}

int Kb::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? -1 : it->second;
}

uint64_t Kb::ids_hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& rec : records_) {
    for (char c : rec.id) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= '\n';
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string kb_to_string(const Kb& kb) {
  std::string out;
  json header;
  header["format"] = kKbFormat;
  header["version"] = kKbVersion;
  header["types"] = kb.inventory().names();
  out += header.dump();
  out += '\n';
  for (const auto& rec : kb.records()) {
    json j;
    j["id"] = rec.id;
    j["forms"] = rec.forms;
    json types = json::array();
    for (int t : rec.types) types.push_back(kb.inventory().name(t));
    j["types"] = types;
    j["rank"] = rec.rank;
    if (!rec.scores.empty()) {
      json scores;
      for (const auto& [t, s] : rec.scores) scores[kb.inventory().name(t)] = s;
      j["scores"] = scores;
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

Kb kb_from_string(const std::string& content, const std::string& origin) {
  std::vector<std::string> lines;
  {
    size_t start = 0;
    while (start <= content.size()) {
      size_t nl = content.find('\n', start);
      if (nl == std::string::npos) {
        if (start < content.size()) lines.push_back(content.substr(start));
        break;
      }
      lines.push_back(content.substr(start, nl - start));
      start = nl + 1;
    }
  }
  if (lines.empty()) throw ParseError(origin, 1, "missing KB header line");

  json header;
  try {
    header = json::parse(lines[0]);
  } catch (const json::exception& e) {
    throw ParseError(origin, 1, e.what());
  }
  if (!header.is_object() || !header.contains("format") ||
      header["format"] != kKbFormat)
    throw ParseError(origin, 1, "not a KB file (bad format field)");
  if (!header.contains("version") || !header["version"].is_number_integer())
    throw ParseError(origin, 1, "missing version");
  if (header["version"].get<int>() != kKbVersion)
    throw VersionError("KB file version " +
                       std::to_string(header["version"].get<int>()) +
                       " (supported: " + std::to_string(kKbVersion) + ")");
  if (!header.contains("types") || !header["types"].is_array())
    throw ParseError(origin, 1, "missing types array");

  std::vector<std::string> types;
  for (const auto& t : header["types"]) {
    if (!t.is_string()) throw ParseError(origin, 1, "non-string type name");
    types.push_back(t.get<std::string>());
  }

  Kb kb{TypeInventory(std::move(types))};
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const int line_no = static_cast<int>(i + 1);
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw ParseError(origin, line_no, e.what());
    }
    try {
      EntityRecord rec;
      rec.id = j.at("id").get<std::string>();
      for (const auto& f : j.at("forms")) rec.forms.push_back(f.get<std::string>());
      for (const auto& t : j.at("types"))
        rec.types.push_back(kb.inventory().require(t.get<std::string>()));
      rec.rank = j.at("rank").get<int>();
      if (j.contains("scores")) {
        for (const auto& [name, score] : j["scores"].items())
          rec.scores.emplace_back(kb.inventory().require(name),
                                  score.get<double>());
      }
      kb.add(std::move(rec));
    } catch (const json::exception& e) {
      throw ParseError(origin, line_no, e.what());
    }
  }
  return kb;
}

void save_kb(const Kb& kb, const std::string& path) {
  io::write_file(path, kb_to_string(kb));
}

Kb load_kb(const std::string& path) {
  return kb_from_string(io::read_file(path), path);
}

NGramIndex& NGramIndex::operator=(NGramIndex&& o) noexcept {
  map_ = std::move(o.map_);
  max_gram_ = o.max_gram_;
  skipped_ = o.skipped_;
  lookups_.store(o.lookups_.load(std::memory_order_relaxed),
                 std::memory_order_relaxed);
  return *this;
}

const std::vector<uint32_t>& NGramIndex::lookup(const std::string& ngram) const {
  static const std::vector<uint32_t> kEmpty;
  lookups_.fetch_add(1, std::memory_order_relaxed);
  auto it = map_.find(normalize_ngram(ngram));
  return it == map_.end() ? kEmpty : it->second;
}

NGramIndex build_index(const Kb& kb, int max_gram) {
  if (kb.size() == 0) throw DataError("cannot index an empty KB");
  if (max_gram < 1) throw DataError("max_gram must be at least 1");

  NGramIndex index;
  index.max_gram_ = max_gram;
  for (uint32_t ri = 0; ri < kb.size(); ++ri) {
    for (const auto& form : kb.record(ri).forms) {
      std::string key = normalize_ngram(form);
      size_t n = token_count(key);
      if (n == 0 || n > static_cast<size_t>(max_gram)) {
        ++index.skipped_;
        continue;
      }
      auto& ids = index.map_[key];
      if (ids.empty() || ids.back() != ri) ids.push_back(ri);
    }
  }
  if (index.skipped_ > 0)
    CONCET_LOG(kWarn) << index.skipped_
                      << " surface forms skipped (too long or empty)";
  return index;
}

void NGramIndex::save(std::ostream& os, const Kb& kb) const {
  os.write(kIndexMagic, 4);
  io::write_u8(os, kIndexVersion);
  io::write_u32(os, static_cast<uint32_t>(max_gram_));
  io::write_u64(os, skipped_);
  io::write_u64(os, kb.size());
  io::write_u64(os, kb.ids_hash());

  std::vector<const std::string*> keys;
  keys.reserve(map_.size());
  for (const auto& [key, ids] : map_) keys.push_back(&key);
  std::sort(keys.begin(), keys.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });

  io::write_u64(os, keys.size());
  for (const std::string* key : keys) {
    io::write_string(os, *key);
    const auto& ids = map_.at(*key);
    io::write_u64(os, ids.size());
    for (uint32_t id : ids) io::write_u32(os, id);
  }
}

NGramIndex NGramIndex::load(std::istream& is, const Kb& kb) {
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::memcmp(magic, kIndexMagic, 4) != 0)
    throw DataError("not an n-gram index file (bad magic)");
  uint8_t version = io::read_u8(is);
  if (version != kIndexVersion)
    throw VersionError("index file version " + std::to_string(version) +
                       " (supported: " + std::to_string(kIndexVersion) + ")");
  NGramIndex index;
  index.max_gram_ = static_cast<int>(io::read_u32(is));
  index.skipped_ = io::read_u64(is);
  uint64_t record_count = io::read_u64(is);
  uint64_t hash = io::read_u64(is);
  if (record_count != kb.size() || hash != kb.ids_hash())
    throw DataError("index file does not match the supplied KB");

  uint64_t keys = io::read_u64(is);
  for (uint64_t i = 0; i < keys; ++i) {
    std::string key = io::read_string(is);
    uint64_t n = io::read_u64(is);
    std::vector<uint32_t> ids(n);
    for (auto& id : ids) {
      id = io::read_u32(is);
      if (id >= kb.size()) throw DataError("index references a missing record");
    }
    index.map_[std::move(key)] = std::move(ids);
  }
  return index;
}

void save_index(const NGramIndex& index, const Kb& kb, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  index.save(out, kb);
  if (!out) throw DataError("write failed: " + path);
}

NGramIndex load_index(const std::string& path, const Kb& kb) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  return NGramIndex::load(in, kb);
}

}  // namespace concet
