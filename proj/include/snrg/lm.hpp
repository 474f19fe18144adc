// Copyright 2026 The snrg Authors
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

#ifndef SNRG_LM_HPP_
#define SNRG_LM_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "snrg/text.hpp"

namespace snrg {

inline constexpr const char* kSentenceBegin = "<s>";
inline constexpr const char* kSentenceEnd = "</s>";
inline constexpr const char* kUnknownWord = "<unk>";
// log10 probability of a word the model has no entry for when the model
// itself lacks <unk>.
inline constexpr double kMissingUnknownLogProb = -100.0;

// Back-off n-gram model, log10 throughout.
class NGramModel {
 public:
  using WordId = std::int32_t;
  static constexpr WordId kNoWord = -1;

  struct Entry {
    float log_prob = 0.0f;
    float backoff = 0.0f;
  };

  int order() const { return order_; }
  // Entries per order, index 0 is unigrams.
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t entry_count() const;

  WordId id(const std::string& word) const;  // kNoWord when absent
  bool has_unknown() const { return unk_ != kNoWord; }

  // <s> tokens </s>.
  double score(const Tokens& tokens) const;
  // Word by word, without boundary symbols and without any context from
  // outside the fragment.
  double score_fragment(const Tokens& tokens) const;
  // log10 p(word | context), context oldest first; only its last order-1
  // words are used.
  double conditional(const std::vector<WordId>& context, WordId word) const;

  // Builds the model from ARPA text. Throws FormatError.
  static NGramModel read_arpa(std::istream& in, const std::string& name);

 private:
  std::string key(const WordId* words, std::size_t n) const;
  const Entry* find(const WordId* words, std::size_t n) const;
  WordId map_word(const std::string& word) const;

  int order_ = 0;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, WordId> vocab_;
  std::vector<std::unordered_map<std::string, Entry>> entries_;
  WordId unk_ = kNoWord;
  WordId bos_ = kNoWord;
  WordId eos_ = kNoWord;
};

// Plain or gzip-compressed ARPA file.
NGramModel load_arpa(const std::string& path);

}  // namespace snrg

#endif  // SNRG_LM_HPP_
