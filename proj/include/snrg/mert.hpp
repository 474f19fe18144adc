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

#ifndef SNRG_MERT_HPP_
#define SNRG_MERT_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "snrg/bleu.hpp"
#include "snrg/decoder.hpp"

namespace snrg {

struct Candidate {
  Tokens words;
  FeatureVector features{};
};

// Accumulated k-best lists, one per dev sentence, with cached BLEU statistics.
class KBestPool {
 public:
  KBestPool(std::vector<std::vector<Tokens>> references, BleuOptions options = {});

  std::size_t size() const { return references_.size(); }
  const std::vector<Candidate>& candidates(std::size_t sentence) const { return candidates_.at(sentence); }
  const BleuStats& stats(std::size_t sentence, std::size_t candidate) const { return stats_.at(sentence).at(candidate); }
  const BleuOptions& options() const { return options_; }
  std::size_t total_candidates() const;

  // Returns the number of candidates that were new (by string and features).
  std::size_t add(std::size_t sentence, const std::vector<Candidate>& kbest);

  // Index of the highest-scoring candidate; ties go to the earliest.
  std::size_t best(std::size_t sentence, const Weights& w) const;
  double bleu(const Weights& w) const;

 private:
  std::vector<std::vector<Tokens>> references_;
  BleuOptions options_;
  std::vector<std::vector<Candidate>> candidates_;
  std::vector<std::vector<BleuStats>> stats_;
};

struct LineSearchResult {
  double gamma = 0.0;
  double bleu = 0.0;
};

// Exact maximization of pool BLEU along w + gamma * direction. Among optimal
// intervals the one nearest gamma = 0 wins; gamma is 0 when that interval
// contains it and the interval midpoint otherwise.
LineSearchResult line_search(const KBestPool& pool, const Weights& w, const Weights& direction);

// Decodes every dev sentence with the given weights.
using KBestDecoder = std::function<std::vector<std::vector<Candidate>>(const Weights&)>;

struct MertOptions {
  std::size_t max_iters = 10;
  std::size_t restarts = 20;
  std::uint32_t seed = 1;
  double min_gain = 1e-4;
  BleuOptions bleu;
};

struct MertIteration {
  std::size_t pool_size = 0;
  double decoded_bleu = 0.0;  // 1-best of this iteration's decode
  double pool_bleu = 0.0;     // best weights so far on the merged pool
};

struct MertResult {
  Weights weights{};
  double bleu = 0.0;  // pool BLEU of weights
  std::vector<MertIteration> history;
};

MertResult mert(const KBestDecoder& decode, const std::vector<std::vector<Tokens>>& references, const Weights& initial,
                const MertOptions& options = {}, std::ostream* log = nullptr);

// Scales w so that max |w_i| = 1; zero vectors are returned unchanged.
Weights normalize_weights(const Weights& w);

}  // namespace snrg

#endif  // SNRG_MERT_HPP_
