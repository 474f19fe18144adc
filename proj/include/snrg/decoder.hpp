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

#ifndef SNRG_DECODER_HPP_
#define SNRG_DECODER_HPP_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "snrg/amr.hpp"
#include "snrg/grammar.hpp"
#include "snrg/lm.hpp"
#include "snrg/reorder.hpp"

namespace snrg {

// ---------------------------------------------------------------- features

enum Feature : std::size_t {
  kLogPFGivenE,
  kLogPEGivenF,
  kLogPwFGivenE,
  kLogPwEGivenF,
  kLanguageModel,  // log10
  kWordCount,
  kRuleCount,
  kReorder,        // natural log
  kMovingDistance,
  kFeatureCount
};

using FeatureVector = std::array<double, kFeatureCount>;
using Weights = std::array<double, kFeatureCount>;

const std::array<std::string, kFeatureCount>& feature_names();

// Translation probabilities enter as natural logs floored here.
inline constexpr double kProbabilityFloor = 1e-12;

double score_hypothesis(const FeatureVector& features, const Weights& weights);

// Untuned starting point: translation, LM and reorder features at 1.
Weights default_weights();

// A '#' header naming the features, then the nine weights.
void write_weights(std::ostream& out, const Weights& w);
Weights read_weights(std::istream& in, const std::string& name);
Weights load_weights(const std::string& path);
void save_weights(const Weights& w, const std::string& path);

// ---------------------------------------------------------------- search state

struct DerivationStep {
  std::shared_ptr<const SynchronousRule> rule;
  FragmentMatch match;
};

struct Trace {
  std::shared_ptr<const Trace> parent;
  DerivationStep step;
};

struct Hypothesis {
  AmrGraph graph;  // partially collapsed input
  FeatureVector features{};
  double score = 0.0;
  // Input-graph node under the previous match's root, kNoNode before the first.
  NodeId last_root = kNoNode;
  std::shared_ptr<const Trace> trace;
  std::size_t rules = 0;
  std::size_t collapsed_nodes = 0;  // input nodes now inside nonterminals
  std::size_t collapsed_edges = 0;  // input edges consumed
  bool finished = false;            // start symbol applied

  std::size_t coverage() const { return collapsed_nodes + collapsed_edges; }
  bool is_goal() const;
  std::vector<DerivationStep> derivation() const;
};

struct DecoderOptions {
  std::size_t beam_size = 100;  // 0 keeps every hypothesis
  std::size_t k = 50;
  bool use_induced_rules = true;
  bool use_concept_rules = true;
  bool use_moving_distance = true;
  bool use_reorder_model = true;
  // Beams keyed by (coverage, collapsed edges) instead of coverage alone.
  bool pair_beams = false;
  bool recombine = true;
};

struct KBestEntry {
  Tokens words;
  FeatureVector features{};
  double score = 0.0;
  std::vector<DerivationStep> derivation;
  bool complete = true;  // false for the concatenation fallback

  std::string text() const { return join(words); }
};

struct DecodeResult {
  std::vector<KBestEntry> kbest;  // best first, distinct strings
  bool complete = true;
  std::size_t expansions = 0;

  const KBestEntry& best() const { return kbest.front(); }
};

class Decoder;

// Everything that depends on one input graph: the rules that can apply to
// it, its distances, and the search itself.
class DecodeSession {
 public:
  DecodeSession(const Decoder& decoder, const AmrGraph& input);

  const AmrGraph& input() const { return input_; }
  const std::vector<std::shared_ptr<const SynchronousRule>>& rules() const { return rules_; }

  Hypothesis initial() const;
  // Every (rule, match) applicable to hyp, in deterministic order.
  std::vector<DerivationStep> expansions(const Hypothesis& hyp) const;

  FeatureVector feature_delta(const Hypothesis& hyp, const SynchronousRule& rule, const FragmentMatch& match,
                              const Tokens& translation) const;
  Hypothesis apply(const Hypothesis& hyp, const DerivationStep& step) const;
  // S -> X: exact LM rescoring of the finished string.
  Hypothesis finish(const Hypothesis& goal) const;

  DecodeResult search() const;

  // Re-applies a derivation from the input graph.
  KBestEntry replay(const std::vector<DerivationStep>& derivation) const;

 private:
  struct Pattern {
    std::shared_ptr<const FragmentPattern> pattern;
    std::vector<std::size_t> rules;  // into rules_
  };

  void add_group(std::shared_ptr<const FragmentPattern> pattern,
                 const std::vector<std::shared_ptr<const SynchronousRule>>& rules);

  Tokens substitute(const Hypothesis& hyp, const SynchronousRule& rule, const FragmentMatch& match) const;
  double lm_fragment(const Tokens& words) const;
  KBestEntry fallback(const Hypothesis& hyp) const;
  std::string recombination_key(const Hypothesis& hyp) const;

  const Decoder& decoder_;
  AmrGraph input_;
  std::vector<std::vector<int>> distances_;
  std::vector<std::shared_ptr<const SynchronousRule>> rules_;
  std::vector<Pattern> patterns_;
};

class Decoder {
 public:
  Decoder(const RuleTable& grammar, Weights weights, DecoderOptions options = {}, const NGramModel* lm = nullptr,
          const ReorderModel* reorder = nullptr, const VerbalizationLexicon* lexicon = nullptr);

  DecodeResult decode(const AmrGraph& input) const;
  DecodeSession session(const AmrGraph& input) const { return DecodeSession(*this, input); }

  const Weights& weights() const { return weights_; }
  const DecoderOptions& options() const { return options_; }
  const NGramModel* lm() const { return lm_; }
  const ReorderModel* reorder() const { return reorder_; }

 private:
  friend class DecodeSession;

  struct RuleGroup {
    std::shared_ptr<const FragmentPattern> pattern;
    std::vector<std::string> node_labels;  // terminal node labels of F, sorted
    std::vector<std::string> edge_labels;  // sorted
    std::vector<std::shared_ptr<const SynchronousRule>> rules;
  };

  std::vector<RuleGroup> groups_;
  Weights weights_;
  DecoderOptions options_;
  const NGramModel* lm_;
  const ReorderModel* reorder_;
  const VerbalizationLexicon* lexicon_;
  ReorderModel no_counts_;
};

// "<id> ||| <string> ||| <f1> ... <f9> ||| <score>"
void write_kbest(std::ostream& out, const std::string& id, const std::vector<KBestEntry>& kbest);

struct KBestLine {
  std::string id;
  Tokens words;
  FeatureVector features{};
  double score = 0.0;
};
std::vector<KBestLine> read_kbest(std::istream& in, const std::string& name);

UsageLog derivation_usage(const std::vector<DerivationStep>& derivation);

}  // namespace snrg

#endif  // SNRG_DECODER_HPP_
