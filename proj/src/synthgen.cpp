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

#include "concet/synthgen.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "concet/error.hpp"
#include "concet/io.hpp"
#include "concet/log.hpp"
#include "concet/text.hpp"

namespace concet {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string upper_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string lower_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Uppercase letter first, then letters, digits, and underscores only.
bool slot_name_ok(const std::string& s) {
  if (s.empty() || s[0] < 'A' || s[0] > 'Z') return false;
  for (char c : s)
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_'))
      return false;
  return true;
}

// NER_ANIMALS finds Animal and NER_SINGER finds Singers: exact uppercase
// match first, then one trailing S of tolerance on either side.
int resolve_entity_type(const std::string& slot, const TypeInventory& inv) {
  for (size_t i = 0; i < inv.size(); ++i)
    if (upper_ascii(inv.name(static_cast<int>(i))) == slot)
      return static_cast<int>(i);
  for (size_t i = 0; i < inv.size(); ++i) {
    std::string u = upper_ascii(inv.name(static_cast<int>(i)));
    if (slot.size() > 1 && slot.back() == 'S' &&
        u == slot.substr(0, slot.size() - 1))
      return static_cast<int>(i);
    if (u == slot + "S") return static_cast<int>(i);
  }
  return -1;
}

// KB record indices carrying the type, most popular first.
std::vector<size_t> entity_pool(const Kb& kb, int type) {
  std::vector<size_t> pool;
  for (size_t i = 0; i < kb.size(); ++i) {
    const auto& types = kb.record(i).types;
    if (std::find(types.begin(), types.end(), type) != types.end())
      pool.push_back(i);
  }
  std::sort(pool.begin(), pool.end(), [&kb](size_t a, size_t b) {
    const EntityRecord& ra = kb.record(a);
    const EntityRecord& rb = kb.record(b);
    if (ra.rank != rb.rank) return ra.rank < rb.rank;
    return ra.id < rb.id;
  });
  return pool;
}

std::string splice(const Template& tpl, const std::vector<std::string>& values) {
  std::string out;
  size_t prev = 0;
  for (size_t s = 0; s < tpl.slots.size(); ++s) {
    out += tpl.text.substr(prev, tpl.slots[s].pos - prev);
    out += values[s];
    prev = tpl.slots[s].pos + tpl.slots[s].len;
  }
  out += tpl.text.substr(prev);
  return lower_ascii(out);
}

// A template with every slot expanded to its ordered value list.
struct PreparedTemplate {
  const Template* tpl = nullptr;
  std::vector<std::vector<std::string>> pools;
  bool usable = true;
};

PreparedTemplate prepare(const Template& tpl, const Kb& kb,
                         const KeywordLists& keywords) {
  PreparedTemplate p;
  p.tpl = &tpl;
  for (const auto& slot : tpl.slots) {
    std::vector<std::string> values;
    if (slot.kind == TemplateSlot::Kind::kEntity) {
      for (size_t r : entity_pool(kb, slot.type_index))
        values.push_back(kb.record(r).forms[0]);
    } else {
      const auto* list = keywords.find(slot.name);
      if (list != nullptr) values = *list;
    }
    if (values.empty()) p.usable = false;
    p.pools.push_back(std::move(values));
  }
  return p;
}

// Walks one topic's templates and slot odometers; each call to next()
// yields the next raw combination or false when the topic is exhausted.
struct TopicCursor {
  std::vector<PreparedTemplate> tpls;
  size_t tpl_i = 0;
  std::vector<size_t> odo;
  bool fresh = true;  // odometer not yet emitted for the current template

  bool next(std::string* out) {
    while (tpl_i < tpls.size()) {
      const PreparedTemplate& p = tpls[tpl_i];
      if (!p.usable) {
        ++tpl_i;
        fresh = true;
        continue;
      }
      if (fresh) {
        odo.assign(p.pools.size(), 0);
        fresh = false;
      } else if (!advance(p)) {
        ++tpl_i;
        fresh = true;
        continue;
      }
      std::vector<std::string> values(p.pools.size());
      for (size_t s = 0; s < p.pools.size(); ++s) values[s] = p.pools[s][odo[s]];
      *out = splice(*p.tpl, values);
      return true;
    }
    return false;
  }

 private:
  // Rightmost slot fastest; false on wrap past the leftmost.
  bool advance(const PreparedTemplate& p) {
    for (size_t s = p.pools.size(); s-- > 0;) {
      if (++odo[s] < p.pools[s].size()) return true;
      odo[s] = 0;
    }
    return false;
  }
};

}  // namespace

void KeywordLists::add(const std::string& name,
                       std::vector<std::string> entries) {
  if (!slot_name_ok(name))
    throw DataError("keyword list name must be ALL_CAPS: '" + name + "'");
  if (find(name) != nullptr)
    throw DataError("duplicate keyword list: " + name);
  lists_.emplace_back(name, std::move(entries));
}

const std::vector<std::string>* KeywordLists::find(
    const std::string& name) const {
  for (const auto& [n, entries] : lists_)
    if (n == name) return &entries;
  return nullptr;
}

KeywordLists parse_keyword_lists(const std::string& content,
                                 const std::string& origin) {
  KeywordLists out;
  std::istringstream is(content);
  std::string line;
  int line_no = 0;
  std::string current;
  std::vector<std::string> entries;
  bool open = false;
  auto flush = [&] {
    if (open) out.add(current, std::move(entries));
    entries = {};
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty()) continue;
    if (slot_name_ok(t)) {
      if (out.find(t) != nullptr || (open && current == t))
        throw ParseError(origin, line_no, "duplicate keyword list " + t);
      flush();
      current = t;
      open = true;
    } else {
      if (!open)
        throw ParseError(origin, line_no,
                         "keyword before the first list header");
      entries.push_back(t);
    }
  }
  flush();
  return out;
}

KeywordLists load_keyword_lists(const std::vector<std::string>& paths) {
  KeywordLists merged;
  for (const auto& path : paths) {
    KeywordLists one = parse_keyword_lists(io::read_file(path), path);
    for (const auto& [name, entries] : one.lists()) {
      if (merged.find(name) != nullptr)
        throw DataError("duplicate keyword list " + name + " in " + path);
      merged.add(name, entries);
    }
  }
  return merged;
}

Template parse_template(const std::string& topic, const std::string& text,
                        const TypeInventory& inventory,
                        const KeywordLists& keywords,
                        const std::string& origin, int line) {
  if (trim(topic).empty()) throw ParseError(origin, line, "empty topic");
  Template tpl;
  tpl.topic = topic;
  tpl.text = text;

  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::string tok = text.substr(start, i - start);

    TemplateSlot::Kind kind;
    size_t prefix;
    if (tok.rfind("NER_", 0) == 0) {
      kind = TemplateSlot::Kind::kEntity;
      prefix = 4;
    } else if (tok.rfind("KEYWORD_", 0) == 0) {
      kind = TemplateSlot::Kind::kKeyword;
      prefix = 8;
    } else {
      continue;
    }
    const std::string col = std::to_string(start + 1);
    const std::string suffix = tok.substr(prefix);
    if (!slot_name_ok(suffix))
      throw ParseError(origin, line,
                       "malformed slot '" + tok + "' at column " + col);

    TemplateSlot slot;
    slot.kind = kind;
    slot.pos = start;
    slot.len = tok.size();
    slot.raw = tok;
    if (kind == TemplateSlot::Kind::kEntity) {
      slot.type_index = resolve_entity_type(suffix, inventory);
      if (slot.type_index < 0)
        throw ParseError(origin, line,
                         "unknown entity type in slot '" + tok +
                             "' at column " + col);
      slot.name = inventory.name(slot.type_index);
    } else {
      if (keywords.find(suffix) == nullptr)
        throw ParseError(origin, line,
                         "unknown keyword list in slot '" + tok +
                             "' at column " + col);
      slot.name = suffix;
    }
    tpl.slots.push_back(std::move(slot));
  }
  return tpl;
}

std::vector<Template> load_templates(const std::string& path,
                                     const TypeInventory& inventory,
                                     const KeywordLists& keywords) {
  std::vector<Template> out;
  std::istringstream is(io::read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path, line_no, "expected <topic> TAB <template text>");
    out.push_back(parse_template(trim(line.substr(0, tab)), line.substr(tab + 1),
                                 inventory, keywords, path, line_no));
  }
  return out;
}

std::vector<SynthRecord> generate(const std::vector<Template>& templates,
                                  const Kb& kb, const KeywordLists& keywords,
                                  const GeneratorConfig& cfg,
                                  GenerationStats* stats) {
  if (cfg.rho < 1) throw UsageError("rho must be at least 1");
  if (templates.empty()) throw DataError("no templates to generate from");

  GenerationStats st;

  struct TopicState {
    std::string topic;
    TopicCursor cursor;
    std::unordered_set<std::string> seen;
    long long emitted = 0;
    long long quota = -1;
  };
  std::vector<TopicState> states;
  std::unordered_map<std::string, size_t> topic_at;
  for (const Template& tpl : templates) {
    auto it = topic_at.find(tpl.topic);
    if (it == topic_at.end()) {
      it = topic_at.emplace(tpl.topic, states.size()).first;
      states.emplace_back();
      states.back().topic = tpl.topic;
      auto q = cfg.quotas.find(tpl.topic);
      if (q != cfg.quotas.end()) states.back().quota = q->second;
    }
    PreparedTemplate p = prepare(tpl, kb, keywords);
    if (!p.usable) {
      ++st.skipped;
      CONCET_LOG(kWarn) << "template for topic '" << tpl.topic
                        << "' skipped: a slot pool is empty";
    }
    states[it->second].cursor.tpls.push_back(std::move(p));
  }

  std::vector<size_t> active;
  for (size_t i = 0; i < states.size(); ++i)
    if (states[i].quota != 0) active.push_back(i);

  std::vector<SynthRecord> out;
  size_t turn = 0;
  while (static_cast<long long>(out.size()) < cfg.rho && !active.empty()) {
    TopicState& ts = states[active[turn]];
    bool produced = false;
    std::string text;
    while (ts.cursor.next(&text)) {
      if (cfg.dedupe && !ts.seen.insert(text).second) {
        ++st.duplicates;
        continue;
      }
      out.push_back({std::move(text), ts.topic, "synthetic"});
      ++ts.emitted;
      ++st.per_topic[ts.topic];
      produced = true;
      break;
    }
    if (!produced || (ts.quota >= 0 && ts.emitted >= ts.quota)) {
      active.erase(active.begin() + static_cast<long>(turn));
      if (active.empty()) break;
      turn %= active.size();
    } else {
      turn = (turn + 1) % active.size();
    }
  }
  st.emitted = static_cast<long long>(out.size());
  if (stats != nullptr) *stats = st;
  return out;
}

SynthRecord fill(const Template& tpl, const Kb& kb,
                 const KeywordLists& keywords, Rng& rng) {
  std::vector<std::string> values;
  values.reserve(tpl.slots.size());
  for (const auto& slot : tpl.slots) {
    if (slot.kind == TemplateSlot::Kind::kEntity) {
      std::vector<size_t> pool = entity_pool(kb, slot.type_index);
      if (pool.empty())
        throw EmptyPoolError("no knowledge base entity for slot " + slot.raw);
      double total = 0.0;
      for (size_t r : pool) total += 1.0 / std::max(kb.record(r).rank, 1);
      double u = rng.uniform() * total;
      size_t pick = pool.size() - 1;
      for (size_t i = 0; i < pool.size(); ++i) {
        u -= 1.0 / std::max(kb.record(pool[i]).rank, 1);
        if (u <= 0.0) {
          pick = i;
          break;
        }
      }
      values.push_back(kb.record(pool[pick]).forms[0]);
    } else {
      const auto* list = keywords.find(slot.name);
      if (list == nullptr || list->empty())
        throw EmptyPoolError("no keywords for slot " + slot.raw);
      values.push_back((*list)[rng.uniform_int(list->size())]);
    }
  }
  return {splice(tpl, values), tpl.topic, "synthetic"};
}

std::vector<SynthRecord> ingest_external(
    const std::vector<std::string>& questions, const std::string& topic,
    int max_words) {
  if (max_words < 1) throw UsageError("max_words must be at least 1");
  std::vector<SynthRecord> out;
  for (const auto& q : questions)
    if (static_cast<int>(tokenize(q).size()) < max_words)
      out.push_back({q, topic, "external"});
  return out;
}

void save_synth(const std::vector<SynthRecord>& records,
                const std::string& path) {
  std::ostringstream os;
  for (const auto& r : records) {
    json j;
    j["label"] = r.label;
    j["provenance"] = r.provenance;
    j["text"] = r.text;
    os << j.dump() << "\n";
  }
  io::write_file(path, os.str());
}

std::vector<SynthRecord> load_synth(const std::string& path) {
  std::vector<SynthRecord> out;
  std::istringstream is(io::read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string() ||
        !j.contains("label") || !j["label"].is_string() ||
        !j.contains("provenance") || !j["provenance"].is_string())
      throw ParseError(path, line_no,
                       "expected {\"text\", \"label\", \"provenance\"}");
    out.push_back({j["text"].get<std::string>(), j["label"].get<std::string>(),
                   j["provenance"].get<std::string>()});
  }
  return out;
}

}  // namespace concet
