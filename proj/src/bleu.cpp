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

#include "snrg/bleu.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>

#include "snrg/error.hpp"

namespace snrg {

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < matches.size(); ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats& BleuStats::operator-=(const BleuStats& other) {
  for (std::size_t n = 0; n < matches.size(); ++n) {
    matches[n] -= other.matches[n];
    totals[n] -= other.totals[n];
  }
  candidate_length -= other.candidate_length;
  reference_length -= other.reference_length;
  return *this;
}

namespace {

using NGramCounts = std::map<Tokens, int>;

NGramCounts count_ngrams(const Tokens& words, std::size_t n) {
  NGramCounts out;
  for (std::size_t i = 0; i + n <= words.size(); ++i) ++out[Tokens(words.begin() + static_cast<long>(i),
                                                                    words.begin() + static_cast<long>(i + n))];
  return out;
}

Tokens normalized(const Tokens& words, bool lowercase) {
  if (!lowercase) return words;
  Tokens out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(to_lower(w));
  return out;
}

}  // namespace

BleuStats sentence_stats(const Tokens& candidate, const std::vector<Tokens>& references, const BleuOptions& options) {
  if (options.max_n < 1) throw ContractError("BLEU order must be at least 1");
  if (references.empty()) throw ContractError("BLEU needs at least one reference per candidate");
  BleuStats s(options.max_n);
  Tokens cand = normalized(candidate, options.lowercase);
  std::vector<Tokens> refs;
  for (const auto& r : references) refs.push_back(normalized(r, options.lowercase));

  s.candidate_length = static_cast<double>(cand.size());
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& r : refs) {
    auto diff = [&](std::size_t len) { return len > cand.size() ? len - cand.size() : cand.size() - len; };
    if (best == std::numeric_limits<std::size_t>::max() || diff(r.size()) < diff(best) ||
        (diff(r.size()) == diff(best) && r.size() < best))
      best = r.size();
  }
  s.reference_length = static_cast<double>(best);

  for (int n = 1; n <= options.max_n; ++n) {
    auto k = static_cast<std::size_t>(n);
    NGramCounts c = count_ngrams(cand, k);
    NGramCounts max_ref;
    for (const auto& r : refs)
      for (const auto& [g, count] : count_ngrams(r, k)) max_ref[g] = std::max(max_ref[g], count);
    double matched = 0;
    for (const auto& [g, count] : c) {
      auto it = max_ref.find(g);
      if (it != max_ref.end()) matched += std::min(count, it->second);
    }
    s.matches[k - 1] = matched;
    s.totals[k - 1] = static_cast<double>(cand.size() >= k ? cand.size() - k + 1 : 0);
  }
  return s;
}

double bleu_score(const BleuStats& s, const BleuOptions& options) {
  if (s.candidate_length <= 0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < s.matches.size(); ++n) {
    double m = s.matches[n], t = s.totals[n];
    if (options.smooth && n > 0) {
      m += 1;
      t += 1;
    }
    if (m <= 0 || t <= 0) return 0.0;
    log_sum += std::log(m / t);
  }
  double bp = s.candidate_length < s.reference_length ? 1.0 - s.reference_length / s.candidate_length : 0.0;
  return std::exp(bp + log_sum / static_cast<double>(s.matches.size()));
}

double corpus_bleu(const std::vector<Tokens>& candidates, const std::vector<std::vector<Tokens>>& references,
                   const BleuOptions& options) {
  if (candidates.size() != references.size())
    throw ContractError("BLEU got " + std::to_string(candidates.size()) + " candidates and " +
                        std::to_string(references.size()) + " references");
  BleuStats total(options.max_n);
  for (std::size_t i = 0; i < candidates.size(); ++i) total += sentence_stats(candidates[i], references[i], options);
  return bleu_score(total, options);
}

double corpus_bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references,
                   const BleuOptions& options) {
  std::vector<Tokens> c;
  std::vector<std::vector<Tokens>> r;
  for (const auto& s : candidates) c.push_back(split_whitespace(s));
  for (const auto& s : references) r.push_back({split_whitespace(s)});
  return corpus_bleu(c, r, options);
}

std::vector<Tokens> read_sentences(std::istream& in) {
  std::vector<Tokens> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(split_whitespace(line));
  return out;
}

std::vector<Tokens> load_sentences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, 0, "cannot open sentence file");
  return read_sentences(in);
}

std::vector<std::vector<Tokens>> load_references(const std::vector<std::string>& paths) {
  std::vector<std::vector<Tokens>> out;
  for (const auto& p : paths) {
    std::vector<Tokens> lines = load_sentences(p);
    if (out.empty()) out.resize(lines.size());
    if (lines.size() != out.size())
      throw FormatError(p, lines.size(), "reference file has " + std::to_string(lines.size()) + " lines, expected " +
                                             std::to_string(out.size()));
    for (std::size_t i = 0; i < lines.size(); ++i) out[i].push_back(std::move(lines[i]));
  }
  return out;
}

}  // namespace snrg
