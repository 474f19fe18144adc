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

#include "snrg/mert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "snrg/error.hpp"

namespace snrg {

KBestPool::KBestPool(std::vector<std::vector<Tokens>> references, BleuOptions options)
    : references_(std::move(references)),
      options_(options),
      candidates_(references_.size()),
      stats_(references_.size()) {}

std::size_t KBestPool::total_candidates() const {
  std::size_t n = 0;
  for (const auto& c : candidates_) n += c.size();
  return n;
}

std::size_t KBestPool::add(std::size_t sentence, const std::vector<Candidate>& kbest) {
  auto& pool = candidates_.at(sentence);
  std::size_t added = 0;
  for (const Candidate& c : kbest) {
    bool seen = std::any_of(pool.begin(), pool.end(),
                            [&](const Candidate& o) { return o.words == c.words && o.features == c.features; });
    if (seen) continue;
    pool.push_back(c);
    stats_[sentence].push_back(sentence_stats(c.words, references_[sentence], options_));
    ++added;
  }
  return added;
}

std::size_t KBestPool::best(std::size_t sentence, const Weights& w) const {
  const auto& pool = candidates_.at(sentence);
  if (pool.empty()) throw ContractError("no candidates for dev sentence " + std::to_string(sentence));
  std::size_t best = 0;
  double top = score_hypothesis(pool[0].features, w);
  for (std::size_t i = 1; i < pool.size(); ++i) {
    double s = score_hypothesis(pool[i].features, w);
    if (s > top) {
      top = s;
      best = i;
    }
  }
  return best;
}

double KBestPool::bleu(const Weights& w) const {
  BleuStats total(options_.max_n);
  for (std::size_t s = 0; s < size(); ++s) total += stats_[s][best(s, w)];
  return bleu_score(total, options_);
}

namespace {

struct Line {
  double slope;
  double intercept;
  std::size_t index;
};

struct Segment {
  double start;  // gamma at which this candidate becomes best
  std::size_t index;
};

// Upper envelope of score(gamma) = intercept + gamma * slope over candidates.
// Identical lines resolve to the lowest index, as KBestPool::best does.
std::vector<Segment> upper_envelope(std::vector<Line> lines) {
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.slope != b.slope) return a.slope < b.slope;
    if (a.intercept != b.intercept) return a.intercept < b.intercept;
    return a.index > b.index;
  });
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Line> hull;
  std::vector<double> starts;
  for (const Line& l : lines) {
    if (!hull.empty() && hull.back().slope == l.slope) {
      hull.pop_back();
      starts.pop_back();
    }
    double start = -inf;
    while (!hull.empty()) {
      const Line& top = hull.back();
      start = (top.intercept - l.intercept) / (l.slope - top.slope);
      if (start <= starts.back()) {
        hull.pop_back();
        starts.pop_back();
        start = -inf;
      } else {
        break;
      }
    }
    hull.push_back(l);
    starts.push_back(start);
  }
  std::vector<Segment> out;
  for (std::size_t i = 0; i < hull.size(); ++i) out.push_back({starts[i], hull[i].index});
  return out;
}

struct Event {
  double gamma;
  std::size_t sentence;
  std::size_t from;
  std::size_t to;
};

}  // namespace

LineSearchResult line_search(const KBestPool& pool, const Weights& w, const Weights& direction) {
  const double inf = std::numeric_limits<double>::infinity();
  BleuStats total(pool.options().max_n);
  std::vector<Event> events;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    const auto& cands = pool.candidates(s);
    if (cands.empty()) throw ContractError("no candidates for dev sentence " + std::to_string(s));
    std::vector<Line> lines;
    for (std::size_t i = 0; i < cands.size(); ++i)
      lines.push_back({score_hypothesis(cands[i].features, direction), score_hypothesis(cands[i].features, w), i});
    std::vector<Segment> env = upper_envelope(std::move(lines));
    total += pool.stats(s, env[0].index);
    for (std::size_t j = 1; j < env.size(); ++j) events.push_back({env[j].start, s, env[j - 1].index, env[j].index});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.gamma < b.gamma; });

  struct Interval {
    double lo, hi, bleu;
  };
  std::vector<Interval> intervals;
  double lo = -inf;
  for (std::size_t e = 0; e <= events.size();) {
    double hi = e < events.size() ? events[e].gamma : inf;
    if (hi > lo) intervals.push_back({lo, hi, bleu_score(total, pool.options())});
    if (e == events.size()) break;
    // Apply every change at this breakpoint.
    double g = events[e].gamma;
    for (; e < events.size() && events[e].gamma == g; ++e) {
      total -= pool.stats(events[e].sentence, events[e].from);
      total += pool.stats(events[e].sentence, events[e].to);
    }
    lo = g;
  }

  double top = -1.0;
  for (const Interval& i : intervals) top = std::max(top, i.bleu);
  auto distance = [](const Interval& i) {
    if (i.lo < 0 && i.hi > 0) return 0.0;
    return std::min(std::abs(i.lo), std::abs(i.hi));
  };
  const Interval* pick = nullptr;
  for (const Interval& i : intervals)
    if (i.bleu >= top - 1e-15 && (!pick || distance(i) < distance(*pick))) pick = &i;

  LineSearchResult r;
  r.bleu = pick->bleu;
  if (pick->lo < 0 && pick->hi > 0) r.gamma = 0.0;
  else if (pick->lo == -inf) r.gamma = pick->hi - 1.0;
  else if (pick->hi == inf) r.gamma = pick->lo + 1.0;
  else r.gamma = 0.5 * (pick->lo + pick->hi);
  return r;
}

Weights normalize_weights(const Weights& w) {
  double m = 0.0;
  for (double x : w) m = std::max(m, std::abs(x));
  if (m == 0.0) return w;
  Weights out;
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / m;
  return out;
}

namespace {

// Coordinate ascent from one starting point.
std::pair<Weights, double> optimize_from(const KBestPool& pool, Weights w) {
  double current = pool.bleu(w);
  for (int round = 0; round < 100; ++round) {
    bool improved = false;
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
      Weights dir{};
      dir[d] = 1.0;
      LineSearchResult r = line_search(pool, w, dir);
      if (r.bleu > current + 1e-12) {
        w[d] += r.gamma;
        current = r.bleu;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return {normalize_weights(w), current};
}

std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

}  // namespace

MertResult mert(const KBestDecoder& decode, const std::vector<std::vector<Tokens>>& references, const Weights& initial,
                const MertOptions& options, std::ostream* log) {
  if (references.empty()) throw ContractError("MERT needs a non-empty dev set");
  KBestPool pool(references, options.bleu);
  std::mt19937 rng(options.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  std::vector<Weights> seen{initial};
  Weights w = initial;
  MertResult result;
  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    auto kbest = decode(w);
    if (kbest.size() != references.size())
      throw ContractError("decoder returned " + std::to_string(kbest.size()) + " k-best lists for " +
                          std::to_string(references.size()) + " dev sentences");
    std::size_t added = 0;
    std::vector<Tokens> one_best;
    for (std::size_t s = 0; s < kbest.size(); ++s) {
      added += pool.add(s, kbest[s]);
      one_best.push_back(kbest[s].empty() ? Tokens{} : kbest[s].front().words);
    }
    MertIteration it;
    it.pool_size = pool.total_candidates();
    it.decoded_bleu = corpus_bleu(one_best, references, options.bleu);

    double before = pool.bleu(w);
    std::pair<Weights, double> best{w, before};
    std::vector<Weights> starts{w};
    for (std::size_t r = 0; r < options.restarts; ++r) {
      Weights s;
      for (double& x : s) x = uniform(rng);
      starts.push_back(s);
    }
    for (const Weights& s : starts) {
      auto candidate = optimize_from(pool, s);
      if (candidate.second > best.second + 1e-12) best = candidate;
    }
    w = best.first;
    seen.push_back(w);
    it.pool_bleu = best.second;
    result.history.push_back(it);
    if (log)
      *log << "iteration " << iter + 1 << " pool " << it.pool_size << " new " << added << " decoded-bleu "
           << fixed4(it.decoded_bleu) << " pool-bleu " << fixed4(it.pool_bleu) << '\n';
    if (added == 0 || best.second - before < options.min_gain) break;
  }

  // Best weights seen, judged on the final pool.
  result.weights = seen.front();
  result.bleu = pool.bleu(seen.front());
  for (const Weights& s : seen) {
    double b = pool.bleu(s);
    if (b > result.bleu + 1e-12) {
      result.weights = s;
      result.bleu = b;
    }
  }
  return result;
}

}  // namespace snrg
