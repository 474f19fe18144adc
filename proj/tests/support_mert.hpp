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

// Synthetic tuning data shared by the unit tests and the acceptance binary.

#ifndef SNRG_TESTS_SUPPORT_MERT_HPP_
#define SNRG_TESTS_SUPPORT_MERT_HPP_

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "snrg/mert.hpp"

namespace snrg::testing {

// A dev set whose hidden candidate lists reward one feature: each candidate is
// the reference with a random fraction q of its words replaced, and its
// planted feature is -q plus small noise. Every other feature is noise.
// Candidates are listed most-corrupted first, so all-zero weights pick junk.
struct PlantedDevSet {
  std::vector<std::vector<Tokens>> references;
  std::vector<std::vector<Candidate>> hidden;
  std::size_t planted = 0;

  // Top-k of each hidden list under w, ties to the earlier candidate.
  std::vector<std::vector<Candidate>> decode(const Weights& w, std::size_t k) const {
    std::vector<std::vector<Candidate>> out;
    for (const auto& list : hidden) {
      std::vector<std::size_t> order(list.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return score_hypothesis(list[a].features, w) > score_hypothesis(list[b].features, w);
      });
      std::vector<Candidate> top;
      for (std::size_t i = 0; i < std::min(k, order.size()); ++i) top.push_back(list[order[i]]);
      out.push_back(std::move(top));
    }
    return out;
  }
};

inline PlantedDevSet planted_dev_set(std::mt19937& rng, std::size_t sentences = 20, std::size_t candidates = 60,
                                     std::size_t planted = kLogPFGivenE) {
  PlantedDevSet d;
  d.planted = planted;
  std::uniform_int_distribution<int> word(0, 39), length(8, 14);
  std::uniform_real_distribution<double> unit(0.0, 1.0), noise(-1.0, 1.0);
  for (std::size_t s = 0; s < sentences; ++s) {
    Tokens ref;
    for (int i = length(rng); i > 0; --i) ref.push_back("t" + std::to_string(word(rng)));
    std::vector<std::pair<double, Candidate>> list;
    for (std::size_t c = 0; c < candidates; ++c) {
      double q = 0.6 * unit(rng);
      Candidate cand;
      for (const auto& w : ref) cand.words.push_back(unit(rng) < q ? "x" + std::to_string(word(rng)) : w);
      for (double& f : cand.features) f = noise(rng);
      cand.features[planted] = -q + 0.05 * noise(rng);
      list.emplace_back(q, std::move(cand));
    }
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Candidate> hidden;
    for (auto& [q, c] : list) hidden.push_back(std::move(c));
    d.references.push_back({ref});
    d.hidden.push_back(std::move(hidden));
  }
  return d;
}

// Pool BLEU along w + gamma * dir sampled on a uniform grid.
inline double grid_search_bleu(const KBestPool& pool, const Weights& w, const Weights& dir, double lo, double hi,
                               double step) {
  double best = 0.0;
  for (double g = lo; g <= hi; g += step) {
    Weights x;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = w[i] + g * dir[i];
    best = std::max(best, pool.bleu(x));
  }
  return best;
}

}  // namespace snrg::testing

#endif  // SNRG_TESTS_SUPPORT_MERT_HPP_
