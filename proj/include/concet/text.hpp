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
// Tokenization, POS tagging, character grids, and vocabulary construction.

#ifndef CONCET_TEXT_HPP_
#define CONCET_TEXT_HPP_

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "concet/error.hpp"

namespace concet {

// Lowercases, splits on whitespace, and detaches trailing ASCII punctuation
// from each chunk into separate single-char tokens.  Idempotent when re-run
// on its own space-joined output.
std::vector<std::string> tokenize(const std::string& text);

// Lowercase, collapse runs of whitespace to single spaces, strip leading and
// trailing ASCII punctuation and whitespace.  Canonical key for surface
// forms and n-gram lookups.
std::string normalize_ngram(const std::string& s);

std::string join_tokens(const std::vector<std::string>& tokens);

// Universal-style coarse tagset.
enum class PosTag : int {
  kAdj = 0,
  kAdp,
  kAdv,
  kAux,
  kCconj,
  kDet,
  kIntj,
  kNoun,
  kNum,
  kPart,
  kPron,
  kPropn,
  kPunct,
  kSconj,
  kSym,
  kVerb,
  kX,
};

inline constexpr int kNumPosTags = 17;

const char* pos_tag_name(PosTag tag);
PosTag parse_pos_tag(const std::string& name);  // throws DataError

// Lexicon + suffix-rule tagger.  The default constructor installs a built-in
// lexicon of common function words and a handful of suffix rules; both can
// be extended from files.  Unknown tokens tag as NOUN.
class Tagger {
 public:
  Tagger();

  // Lines of "token<ws>TAG"; blank lines and #-comments skipped.
  void load_lexicon(const std::string& path);
  // Lines of "suffix<ws>TAG".
  void load_suffix_rules(const std::string& path);

  void add_word(const std::string& token, PosTag tag);
  void add_suffix(const std::string& suffix, PosTag tag);

  PosTag tag(const std::string& token) const;
  std::vector<PosTag> tag_all(const std::vector<std::string>& tokens) const;

 private:
  std::map<std::string, PosTag> lexicon_;
  // Kept sorted by suffix length descending so the longest match wins.
  std::vector<std::pair<std::string, PosTag>> suffixes_;
};

// Tags with a process-wide default Tagger.
std::vector<PosTag> pos_tag(const std::vector<std::string>& tokens);

// Token, character, and tag id spaces.  PAD=0 and OOV=1 in each.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kOov = 1;

  Vocab() = default;

  // Tokens seen at least min_count times get ids, ordered by count
  // descending then token ascending.  Characters of all corpus tokens get
  // ids in byte order.  POS ids are fixed from the tagset.
  static Vocab build(const std::vector<std::vector<std::string>>& corpus,
                     int min_count);

  int token_id(const std::string& token) const;
  int char_id(char c) const;
  int pos_id(PosTag tag) const { return 2 + static_cast<int>(tag); }

  size_t token_count() const { return 2 + tokens_.size(); }
  size_t char_count() const { return 2 + chars_.size(); }
  size_t pos_count() const { return 2 + kNumPosTags; }

  bool has_token(const std::string& token) const {
    return tokens_.count(token) != 0;
  }

  void save(std::ostream& os) const;
  static Vocab load(std::istream& is);

  bool operator==(const Vocab& o) const {
    return tokens_ == o.tokens_ && chars_ == o.chars_;
  }

 private:
  std::map<std::string, int> tokens_;
  std::map<char, int> chars_;
};

// Per-token character ids, right-padded with PAD to k and truncated at k.
// Shape is (|tokens|, k).
std::vector<std::vector<int>> char_grid(const std::vector<std::string>& tokens,
                                        int k, const Vocab& vocab);

// One utterance, fully featurized for the model.  Entity and topic fields
// are filled in later stages.
struct FeaturizedUtterance {
  std::vector<std::string> tokens;
  std::vector<int> token_ids;
  std::vector<std::vector<int>> chars;  // (n, k)
  std::vector<PosTag> pos;
  std::vector<int> pos_ids;
  std::vector<int> type_seq;      // per-token entity type, -1 for none
  std::vector<double> type_dist;  // per-type max link score
  std::vector<double> topic_vec;  // topic model features
};

}  // namespace concet

#endif  // CONCET_TEXT_HPP_
