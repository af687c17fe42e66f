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

#include "concet/text.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "concet/error.hpp"
#include "concet/io.hpp"

namespace concet {

namespace {

bool is_ascii_punct(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 128 && std::ispunct(u);
}

bool is_space(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 128 && std::isspace(u);
}

char to_lower(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  if (u < 128) return static_cast<char>(std::tolower(u));
  return c;
}

bool all_punct(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!is_ascii_punct(c)) return false;
  return true;
}

bool looks_numeric(const std::string& s) {
  bool digit = false;
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isdigit(u)) {
      digit = true;
    } else if (c != '.' && c != ',' && c != '-' && c != ':') {
      return false;
    }
  }
  return digit;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i >= n) break;
    size_t start = i;
    while (i < n && !is_space(text[i])) ++i;
    std::string chunk;
    chunk.reserve(i - start);
    for (size_t j = start; j < i; ++j) chunk.push_back(to_lower(text[j]));

    size_t end = chunk.size();
    while (end > 0 && is_ascii_punct(chunk[end - 1])) --end;
    if (end > 0) out.push_back(chunk.substr(0, end));
    for (size_t j = end; j < chunk.size(); ++j)
      out.push_back(std::string(1, chunk[j]));
  }
  return out;
}

std::string normalize_ngram(const std::string& s) {
  std::string lowered;
  lowered.reserve(s.size());
  for (char c : s) lowered.push_back(to_lower(c));

  size_t begin = 0;
  size_t end = lowered.size();
  while (begin < end && (is_space(lowered[begin]) || is_ascii_punct(lowered[begin])))
    ++begin;
  while (end > begin &&
         (is_space(lowered[end - 1]) || is_ascii_punct(lowered[end - 1])))
    --end;

  std::string out;
  out.reserve(end - begin);
  bool in_space = false;
  for (size_t i = begin; i < end; ++i) {
    if (is_space(lowered[i])) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      in_space = false;
      out.push_back(lowered[i]);
    }
  }
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

const char* pos_tag_name(PosTag tag) {
  static const char* kNames[kNumPosTags] = {
      "ADJ",  "ADP",   "ADV",  "AUX",   "CCONJ", "DET",  "INTJ", "NOUN", "NUM",
      "PART", "PRON",  "PROPN", "PUNCT", "SCONJ", "SYM",  "VERB", "X"};
  int i = static_cast<int>(tag);
  if (i < 0 || i >= kNumPosTags) return "X";
  return kNames[i];
}

PosTag parse_pos_tag(const std::string& name) {
  for (int i = 0; i < kNumPosTags; ++i)
    if (name == pos_tag_name(static_cast<PosTag>(i)))
      return static_cast<PosTag>(i);
  throw DataError("unknown POS tag: " + name);
}

Tagger::Tagger() {
  struct Entry {
    const char* word;
    PosTag tag;
  };
  static const Entry kLexicon[] = {
      {"the", PosTag::kDet},     {"a", PosTag::kDet},
      {"an", PosTag::kDet},      {"some", PosTag::kDet},
      {"any", PosTag::kDet},     {"every", PosTag::kDet},
      {"each", PosTag::kDet},    {"no", PosTag::kDet},
      {"is", PosTag::kAux},      {"are", PosTag::kAux},
      {"was", PosTag::kAux},     {"were", PosTag::kAux},
      {"be", PosTag::kAux},      {"been", PosTag::kAux},
      {"being", PosTag::kAux},   {"am", PosTag::kAux},
      {"do", PosTag::kAux},      {"does", PosTag::kAux},
      {"did", PosTag::kAux},     {"have", PosTag::kAux},
      {"has", PosTag::kAux},     {"had", PosTag::kAux},
      {"will", PosTag::kAux},    {"would", PosTag::kAux},
      {"can", PosTag::kAux},     {"could", PosTag::kAux},
      {"shall", PosTag::kAux},   {"should", PosTag::kAux},
      {"may", PosTag::kAux},     {"might", PosTag::kAux},
      {"must", PosTag::kAux},    {"and", PosTag::kCconj},
      {"or", PosTag::kCconj},    {"but", PosTag::kCconj},
      {"nor", PosTag::kCconj},   {"if", PosTag::kSconj},
      {"because", PosTag::kSconj}, {"while", PosTag::kSconj},
      {"although", PosTag::kSconj}, {"whether", PosTag::kSconj},
      {"that", PosTag::kSconj},  {"since", PosTag::kSconj},
      {"in", PosTag::kAdp},      {"on", PosTag::kAdp},
      {"at", PosTag::kAdp},      {"of", PosTag::kAdp},
      {"for", PosTag::kAdp},     {"with", PosTag::kAdp},
      {"from", PosTag::kAdp},    {"to", PosTag::kAdp},
      {"by", PosTag::kAdp},      {"about", PosTag::kAdp},
      {"into", PosTag::kAdp},    {"over", PosTag::kAdp},
      {"under", PosTag::kAdp},   {"between", PosTag::kAdp},
      {"after", PosTag::kAdp},   {"before", PosTag::kAdp},
      {"i", PosTag::kPron},      {"you", PosTag::kPron},
      {"he", PosTag::kPron},     {"she", PosTag::kPron},
      {"it", PosTag::kPron},     {"we", PosTag::kPron},
      {"they", PosTag::kPron},   {"me", PosTag::kPron},
      {"him", PosTag::kPron},    {"her", PosTag::kPron},
      {"us", PosTag::kPron},     {"them", PosTag::kPron},
      {"my", PosTag::kPron},     {"your", PosTag::kPron},
      {"his", PosTag::kPron},    {"its", PosTag::kPron},
      {"our", PosTag::kPron},    {"their", PosTag::kPron},
      {"this", PosTag::kPron},   {"these", PosTag::kPron},
      {"those", PosTag::kPron},  {"what", PosTag::kPron},
      {"who", PosTag::kPron},    {"whom", PosTag::kPron},
      {"which", PosTag::kPron},  {"something", PosTag::kPron},
      {"anything", PosTag::kPron}, {"everything", PosTag::kPron},
      {"not", PosTag::kPart},    {"n't", PosTag::kPart},
      {"'s", PosTag::kPart},     {"very", PosTag::kAdv},
      {"too", PosTag::kAdv},     {"so", PosTag::kAdv},
      {"now", PosTag::kAdv},     {"then", PosTag::kAdv},
      {"here", PosTag::kAdv},    {"there", PosTag::kAdv},
      {"when", PosTag::kAdv},    {"where", PosTag::kAdv},
      {"how", PosTag::kAdv},     {"why", PosTag::kAdv},
      {"again", PosTag::kAdv},   {"also", PosTag::kAdv},
      {"just", PosTag::kAdv},    {"only", PosTag::kAdv},
      {"more", PosTag::kAdv},    {"most", PosTag::kAdv},
      {"please", PosTag::kIntj}, {"tell", PosTag::kVerb},
      {"play", PosTag::kVerb},   {"give", PosTag::kVerb},
      {"show", PosTag::kVerb},   {"find", PosTag::kVerb},
      {"get", PosTag::kVerb},    {"go", PosTag::kVerb},
      {"know", PosTag::kVerb},   {"like", PosTag::kVerb},
      {"want", PosTag::kVerb},   {"make", PosTag::kVerb},
      {"say", PosTag::kVerb},    {"said", PosTag::kVerb},
      {"see", PosTag::kVerb},    {"think", PosTag::kVerb},
      {"take", PosTag::kVerb},   {"won", PosTag::kVerb},
      {"win", PosTag::kVerb},    {"runs", PosTag::kVerb},
      {"run", PosTag::kVerb},    {"watch", PosTag::kVerb},
      {"listen", PosTag::kVerb}, {"talk", PosTag::kVerb},
      {"chat", PosTag::kVerb},   {"love", PosTag::kVerb},
      {"hate", PosTag::kVerb},   {"let", PosTag::kVerb},
      {"good", PosTag::kAdj},    {"bad", PosTag::kAdj},
      {"best", PosTag::kAdj},    {"new", PosTag::kAdj},
      {"old", PosTag::kAdj},     {"big", PosTag::kAdj},
      {"small", PosTag::kAdj},   {"great", PosTag::kAdj},
      {"favorite", PosTag::kAdj}, {"funny", PosTag::kAdj},
      {"interesting", PosTag::kAdj}, {"latest", PosTag::kAdj},
      {"oh", PosTag::kIntj},     {"hey", PosTag::kIntj},
      {"hi", PosTag::kIntj},     {"hello", PosTag::kIntj},
      {"wow", PosTag::kIntj},    {"yes", PosTag::kIntj},
      {"yeah", PosTag::kIntj},   {"ok", PosTag::kIntj},
      {"okay", PosTag::kIntj},   {"one", PosTag::kNum},
      {"two", PosTag::kNum},     {"three", PosTag::kNum},
      {"four", PosTag::kNum},    {"five", PosTag::kNum},
      {"six", PosTag::kNum},     {"seven", PosTag::kNum},
      {"eight", PosTag::kNum},   {"nine", PosTag::kNum},
      {"ten", PosTag::kNum},     {"$", PosTag::kSym},
      {"%", PosTag::kSym},       {"+", PosTag::kSym},
      {"=", PosTag::kSym},
  };
  for (const auto& e : kLexicon) lexicon_[e.word] = e.tag;

  add_suffix("ing", PosTag::kVerb);
  add_suffix("ed", PosTag::kVerb);
  add_suffix("ly", PosTag::kAdv);
  add_suffix("tion", PosTag::kNoun);
  add_suffix("sion", PosTag::kNoun);
  add_suffix("ness", PosTag::kNoun);
  add_suffix("ment", PosTag::kNoun);
  add_suffix("ship", PosTag::kNoun);
  add_suffix("ful", PosTag::kAdj);
  add_suffix("ous", PosTag::kAdj);
  add_suffix("ible", PosTag::kAdj);
  add_suffix("able", PosTag::kAdj);
  add_suffix("ive", PosTag::kAdj);
  add_suffix("ical", PosTag::kAdj);
}

void Tagger::load_lexicon(const std::string& path) {
  auto lines = io::read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    size_t sep = line.find_first_of(" \t");
    if (sep == std::string::npos)
      throw ParseError(path, static_cast<int>(i + 1), "expected 'token TAG'");
    size_t tag_start = line.find_first_not_of(" \t", sep);
    if (tag_start == std::string::npos)
      throw ParseError(path, static_cast<int>(i + 1), "missing tag");
    std::string token = line.substr(0, sep);
    std::string tag = line.substr(tag_start);
    while (!tag.empty() && (tag.back() == ' ' || tag.back() == '\t'))
      tag.pop_back();
    add_word(token, parse_pos_tag(tag));
  }
}

void Tagger::load_suffix_rules(const std::string& path) {
  auto lines = io::read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    size_t sep = line.find_first_of(" \t");
    if (sep == std::string::npos)
      throw ParseError(path, static_cast<int>(i + 1), "expected 'suffix TAG'");
    size_t tag_start = line.find_first_not_of(" \t", sep);
    if (tag_start == std::string::npos)
      throw ParseError(path, static_cast<int>(i + 1), "missing tag");
    std::string tag = line.substr(tag_start);
    while (!tag.empty() && (tag.back() == ' ' || tag.back() == '\t'))
      tag.pop_back();
    add_suffix(line.substr(0, sep), parse_pos_tag(tag));
  }
}

void Tagger::add_word(const std::string& token, PosTag tag) {
  lexicon_[token] = tag;
}

void Tagger::add_suffix(const std::string& suffix, PosTag tag) {
  auto it = std::find_if(suffixes_.begin(), suffixes_.end(),
                         [&](const auto& p) { return p.first == suffix; });
  if (it != suffixes_.end()) {
    it->second = tag;
    return;
  }
  suffixes_.emplace_back(suffix, tag);
  std::stable_sort(suffixes_.begin(), suffixes_.end(),
                   [](const auto& a, const auto& b) {
                     return a.first.size() > b.first.size();
                   });
}

PosTag Tagger::tag(const std::string& token) const {
  if (token.empty()) return PosTag::kX;
  auto it = lexicon_.find(token);
  if (it != lexicon_.end()) return it->second;
  if (all_punct(token)) return PosTag::kPunct;
  if (looks_numeric(token)) return PosTag::kNum;
  for (const auto& [suffix, t] : suffixes_) {
    if (token.size() > suffix.size() &&
        token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0)
      return t;
  }
  return PosTag::kNoun;
}

std::vector<PosTag> Tagger::tag_all(const std::vector<std::string>& tokens) const {
  std::vector<PosTag> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(tag(t));
  return out;
}

std::vector<PosTag> pos_tag(const std::vector<std::string>& tokens) {
  static const Tagger tagger;
  return tagger.tag_all(tokens);
}

Vocab Vocab::build(const std::vector<std::vector<std::string>>& corpus,
                   int min_count) {
  std::unordered_map<std::string, long long> counts;
  std::map<char, int> chars;
  for (const auto& utt : corpus) {
    for (const auto& tok : utt) {
      ++counts[tok];
      for (char c : tok) chars.emplace(c, 0);
    }
  }

  std::vector<std::pair<std::string, long long>> kept;
  for (const auto& [tok, cnt] : counts)
    if (cnt >= min_count) kept.emplace_back(tok, cnt);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocab v;
  int next = 2;
  for (const auto& [tok, cnt] : kept) v.tokens_[tok] = next++;
  next = 2;
  for (auto& [c, id] : chars) id = next++;
  v.chars_ = std::move(chars);
  return v;
}

int Vocab::token_id(const std::string& token) const {
  auto it = tokens_.find(token);
  return it == tokens_.end() ? kOov : it->second;
}

int Vocab::char_id(char c) const {
  auto it = chars_.find(c);
  return it == chars_.end() ? kOov : it->second;
}

void Vocab::save(std::ostream& os) const {
  io::write_u64(os, tokens_.size());
  for (const auto& [tok, id] : tokens_) {
    io::write_string(os, tok);
    io::write_u32(os, static_cast<uint32_t>(id));
  }
  io::write_u64(os, chars_.size());
  for (const auto& [c, id] : chars_) {
    io::write_u8(os, static_cast<uint8_t>(c));
    io::write_u32(os, static_cast<uint32_t>(id));
  }
}

Vocab Vocab::load(std::istream& is) {
  Vocab v;
  uint64_t n = io::read_u64(is);
  for (uint64_t i = 0; i < n; ++i) {
    std::string tok = io::read_string(is);
    int id = static_cast<int>(io::read_u32(is));
    v.tokens_[tok] = id;
  }
  uint64_t m = io::read_u64(is);
  for (uint64_t i = 0; i < m; ++i) {
    char c = static_cast<char>(io::read_u8(is));
    int id = static_cast<int>(io::read_u32(is));
    v.chars_[c] = id;
  }
  return v;
}

std::vector<std::vector<int>> char_grid(const std::vector<std::string>& tokens,
                                        int k, const Vocab& vocab) {
  std::vector<std::vector<int>> grid;
  grid.reserve(tokens.size());
  for (const auto& tok : tokens) {
    std::vector<int> row(static_cast<size_t>(k), Vocab::kPad);
    const size_t limit = std::min(tok.size(), static_cast<size_t>(k));
    for (size_t i = 0; i < limit; ++i) row[i] = vocab.char_id(tok[i]);
    grid.push_back(std::move(row));
  }
  return grid;
}

}  // namespace concet
