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

#ifndef SNRG_BLEU_HPP_
#define SNRG_BLEU_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "snrg/text.hpp"

namespace snrg {

struct BleuOptions {
  int max_n = 4;
  bool lowercase = true;
  // Adds one to matches and totals of every order above unigrams.
  bool smooth = false;
};

// Sufficient statistics; corpus BLEU is computed from their sum.
struct BleuStats {
  std::vector<double> matches;  // clipped n-gram matches, per order
  std::vector<double> totals;   // candidate n-grams, per order
  double candidate_length = 0;
  double reference_length = 0;  // closest reference, ties to the shorter

  explicit BleuStats(int max_n = 4) : matches(static_cast<std::size_t>(max_n)), totals(static_cast<std::size_t>(max_n)) {}
  BleuStats& operator+=(const BleuStats& other);
  BleuStats& operator-=(const BleuStats& other);
};

BleuStats sentence_stats(const Tokens& candidate, const std::vector<Tokens>& references, const BleuOptions& options = {});
double bleu_score(const BleuStats& stats, const BleuOptions& options = {});

// Corpus BLEU; references[i] holds every reference for candidate i.
double corpus_bleu(const std::vector<Tokens>& candidates, const std::vector<std::vector<Tokens>>& references,
                   const BleuOptions& options = {});
// Single-reference convenience over raw lines.
double corpus_bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references,
                   const BleuOptions& options = {});

// One sentence per line. Several reference files give several references.
std::vector<Tokens> read_sentences(std::istream& in);
std::vector<Tokens> load_sentences(const std::string& path);
std::vector<std::vector<Tokens>> load_references(const std::vector<std::string>& paths);

}  // namespace snrg

#endif  // SNRG_BLEU_HPP_
