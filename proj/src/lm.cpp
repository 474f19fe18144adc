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

#include "snrg/lm.hpp"

#include <zlib.h>

#include <cstring>
#include <istream>
#include <memory>
#include <sstream>

#include "snrg/error.hpp"

namespace snrg {

std::size_t NGramModel::entry_count() const {
  std::size_t n = 0;
  for (const auto& m : entries_) n += m.size();
  return n;
}

NGramModel::WordId NGramModel::id(const std::string& word) const {
  auto it = vocab_.find(word);
  return it == vocab_.end() ? kNoWord : it->second;
}

NGramModel::WordId NGramModel::map_word(const std::string& word) const {
  WordId w = id(word);
  return w == kNoWord ? unk_ : w;
}

std::string NGramModel::key(const WordId* words, std::size_t n) const {
  return std::string(reinterpret_cast<const char*>(words), n * sizeof(WordId));
}

const NGramModel::Entry* NGramModel::find(const WordId* words, std::size_t n) const {
  if (n == 0 || n > entries_.size()) return nullptr;
  for (std::size_t i = 0; i < n; ++i)
    if (words[i] == kNoWord) return nullptr;
  const auto& table = entries_[n - 1];
  auto it = table.find(key(words, n));
  return it == table.end() ? nullptr : &it->second;
}

double NGramModel::conditional(const std::vector<WordId>& context, WordId word) const {
  std::size_t keep = std::min(context.size(), static_cast<std::size_t>(order_ - 1));
  std::vector<WordId> gram(context.end() - static_cast<std::ptrdiff_t>(keep), context.end());
  gram.push_back(word);
  // Back off from the longest history: sum the back-off weights of every
  // history that fails to extend to the word.
  double backoff = 0.0;
  for (std::size_t start = 0; start < gram.size(); ++start) {
    std::size_t n = gram.size() - start;
    if (const Entry* e = find(gram.data() + start, n)) return backoff + e->log_prob;
    if (const Entry* h = find(gram.data() + start, n - 1)) backoff += h->backoff;
  }
  // Only reached for a word with no unigram: a missing <unk>.
  return backoff + kMissingUnknownLogProb;
}

double NGramModel::score(const Tokens& tokens) const {
  std::vector<WordId> context{bos_};
  double total = 0.0;
  for (const std::string& w : tokens) {
    WordId id = map_word(w);
    total += conditional(context, id);
    context.push_back(id);
  }
  return total + conditional(context, eos_);
}

double NGramModel::score_fragment(const Tokens& tokens) const {
  std::vector<WordId> context;
  double total = 0.0;
  for (const std::string& w : tokens) {
    WordId id = map_word(w);
    total += conditional(context, id);
    context.push_back(id);
  }
  return total;
}

NGramModel NGramModel::read_arpa(std::istream& in, const std::string& name) {
  NGramModel m;
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  auto fail = [&](const std::string& what) { throw FormatError(name, line_no, what); };

  while (next() && trim(line) != "\\data\\") {
  }
  if (trim(line) != "\\data\\") fail("missing \\data\\ header");
  while (next()) {
    std::string t = trim(line);
    if (t.empty()) {
      if (!m.counts_.empty()) break;
      continue;
    }
    if (!starts_with(t, "ngram ")) {
      if (t.front() == '\\') break;
      fail("bad header line '" + t + "'");
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) fail("bad header line '" + t + "'");
    int n = std::stoi(t.substr(6, eq - 6));
    if (n != static_cast<int>(m.counts_.size()) + 1) fail("n-gram orders out of sequence in header");
    m.counts_.push_back(std::stoul(t.substr(eq + 1)));
  }
  if (m.counts_.empty()) fail("empty \\data\\ header");
  m.order_ = static_cast<int>(m.counts_.size());
  m.entries_.resize(m.counts_.size());

  auto intern = [&](const std::string& w) {
    auto [it, fresh] = m.vocab_.emplace(w, static_cast<WordId>(m.vocab_.size()));
    return it->second;
  };

  bool ended = false;
  int section = 0;
  std::vector<WordId> ids;
  do {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t == "\\end\\") {
      ended = true;
      break;
    }
    if (t.front() == '\\') {
      int n = 0;
      if (std::sscanf(t.c_str(), "\\%d-grams:", &n) != 1) fail("unknown section '" + t + "'");
      if (n != section + 1 || n > m.order_) fail("section '" + t + "' out of order");
      section = n;
      continue;
    }
    if (section == 0) fail("n-gram entry outside a section");
    Tokens f = split_whitespace(t);
    auto n = static_cast<std::size_t>(section);
    if (f.size() != n + 1 && f.size() != n + 2) fail("expected " + std::to_string(n) + " words in '" + t + "'");
    Entry e;
    try {
      e.log_prob = static_cast<float>(parse_double(f[0]));
      if (f.size() == n + 2) e.backoff = static_cast<float>(parse_double(f[n + 1]));
    } catch (const std::exception&) {
      fail("bad number in '" + t + "'");
    }
    ids.clear();
    for (std::size_t i = 1; i <= n; ++i) ids.push_back(section == 1 ? intern(f[i]) : m.id(f[i]));
    for (WordId w : ids)
      if (w == kNoWord) fail("word missing from the unigram section in '" + t + "'");
    if (!m.entries_[n - 1].emplace(m.key(ids.data(), n), e).second) fail("duplicate n-gram '" + t + "'");
  } while (next());
  if (!ended) fail("missing \\end\\ marker");
  for (std::size_t n = 0; n < m.counts_.size(); ++n)
    if (m.entries_[n].size() != m.counts_[n])
      throw FormatError(name, line_no, std::to_string(n + 1) + "-gram count " + std::to_string(m.entries_[n].size()) +
                                           " does not match header " + std::to_string(m.counts_[n]));
  m.unk_ = m.id(kUnknownWord);
  m.bos_ = m.id(kSentenceBegin);
  m.eos_ = m.id(kSentenceEnd);
  return m;
}

NGramModel load_arpa(const std::string& path) {
  // gzread passes uncompressed files through untouched.
  std::unique_ptr<gzFile_s, int (*)(gzFile)> file(gzopen(path.c_str(), "rb"), gzclose);
  if (!file) throw FormatError(path, 0, "cannot open language model");
  std::string text;
  char buf[1 << 16];
  int got;
  while ((got = gzread(file.get(), buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(got));
  if (got < 0) throw FormatError(path, 0, "read error");
  std::istringstream in(std::move(text));
  return NGramModel::read_arpa(in, path);
}

}  // namespace snrg
