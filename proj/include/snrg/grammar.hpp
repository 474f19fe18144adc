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

#ifndef SNRG_GRAMMAR_HPP_
#define SNRG_GRAMMAR_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "snrg/amr.hpp"
#include "snrg/corpus.hpp"
#include "snrg/text.hpp"

namespace snrg {

enum class RuleKind { kInducedInitial, kInducedCollapsed, kConcept, kGlue };

std::string rule_kind_name(RuleKind kind);
RuleKind parse_rule_kind(const std::string& name);

inline constexpr double kFixedRuleProbability = 0.0001;

struct RuleFeatures {
  double p_f_given_e = 1.0;
  double p_e_given_f = 1.0;
  double pw_f_given_e = 1.0;
  double pw_e_given_f = 1.0;

  friend bool operator==(const RuleFeatures&, const RuleFeatures&) = default;
};

// X -> <F, E>. Nonterminals are aligned by marker: the F node labelled #Xk#
// pairs with the token #Xk# in E.
struct SynchronousRule {
  std::string lhs = "X";
  AmrFragment fragment;
  std::string key;  // canonical_form(fragment)
  Tokens phrase;
  RuleKind kind = RuleKind::kInducedInitial;
  RuleFeatures features;
  double count = 0.0;  // in-memory only, not persisted
};

// Canonicalizes F (and renumbers the nonterminal tokens of E to match) and
// checks the rule invariants. Throws ContractError.
SynchronousRule make_rule(const AmrFragment& fragment, Tokens phrase, RuleKind kind);
void validate_rule(const SynchronousRule& rule);

// Terminal labels of F: concept labels of terminal nodes plus edge labels,
// one entry per occurrence.
std::vector<std::string> fragment_labels(const AmrFragment& fragment);
std::size_t terminal_node_count(const AmrFragment& fragment);
bool has_nonterminal(const SynchronousRule& rule);

// ---------------------------------------------------------------- extraction

struct ExtractOptions {
  std::size_t max_fragment_nodes = 5;
  std::size_t max_absorbed = 2;  // unaligned tokens per span side
};

std::vector<SynchronousRule> extract_initial_rules(const Instance& inst, const ExtractOptions& options = {});

// Proper containment of initial rules: r_j.F embeds (anywhere) in r_i.F and
// r_j.E is a contiguous sub-phrase of r_i.E.
bool rule_contains(const SynchronousRule& r_i, const SynchronousRule& r_j);
SynchronousRule collapse_rules(const SynchronousRule& r_i, const SynchronousRule& r_j);

// Rule extraction over one instance and over a corpus; the raw multiset R.
std::vector<SynchronousRule> induce_instance(const Instance& inst, const ExtractOptions& options = {});
std::vector<SynchronousRule> induce_grammar(const std::vector<Instance>& corpus, const ExtractOptions& options = {});

// Raw rule instances, one per line: "<F> ||| <E> ||| <kind>".
void write_rule_instances(std::ostream& out, const std::vector<SynchronousRule>& rules);
std::vector<SynchronousRule> read_rule_instances(std::istream& in, const std::string& name);

// ---------------------------------------------------------------- estimation

class LexicalTable {
 public:
  void add(const std::string& label, const std::string& word, double count);
  // Turns accumulated counts into both conditional tables.
  void normalize();

  double label_given_word(const std::string& label, const std::string& word) const;
  double word_given_label(const std::string& word, const std::string& label) const;
  bool empty() const { return joint_.empty(); }

 private:
  std::map<std::pair<std::string, std::string>, double> joint_;  // (label, word)
  std::unordered_map<std::string, std::unordered_map<std::string, double>> l_given_w_;  // [word][label]
  std::unordered_map<std::string, std::unordered_map<std::string, double>> w_given_l_;  // [label][word]
};

// Lexicalized probabilities, clamped to [1e-12, 1].
double lexical_f_given_e(const LexicalTable& lex, const AmrFragment& fragment, const Tokens& phrase);
double lexical_e_given_f(const LexicalTable& lex, const AmrFragment& fragment, const Tokens& phrase);

class RuleTable {
 public:
  std::size_t add(SynchronousRule rule);
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }
  const SynchronousRule& rule(std::size_t i) const { return rules_.at(i); }
  const std::vector<SynchronousRule>& rules() const { return rules_; }

  // Rules whose F is isomorphic to the query.
  std::vector<std::size_t> lookup(const AmrFragment& query) const;
  std::vector<std::size_t> lookup(const std::string& canonical) const;
  std::vector<std::string> keys() const;
  std::vector<std::string> edge_labels() const;

  LexicalTable lexical;

 private:
  std::vector<SynchronousRule> rules_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

// Deduplicates R by (F, E), counts each occurrence once, and fills the four
// translation features.
RuleTable estimate_probabilities(const std::vector<SynchronousRule>& raw);

// ---------------------------------------------------------------- concept and glue rules

// Sense suffix stripped; quoted literals unquoted and lowercased.
std::string concept_surface(const std::string& label);

class VerbalizationLexicon {
 public:
  void add(const AmrFragment& pattern, Tokens phrase);
  const std::vector<std::pair<AmrFragment, Tokens>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<std::pair<AmrFragment, Tokens>> entries_;
};

// Lines "<PENMAN pattern> ||| <phrase>"; blank and '#' lines skipped.
VerbalizationLexicon read_verbalization(std::istream& in, const std::string& name);
VerbalizationLexicon load_verbalization(const std::string& path);

std::vector<SynchronousRule> make_concept_rules(const AmrGraph& g, const VerbalizationLexicon* lexicon = nullptr);

enum class Orientation { kMonotonic, kInverse };

// Per label: r1 (monotonic), r2 (inverse), r3 (self-loop), in that order.
std::vector<SynchronousRule> make_glue_rules(const std::vector<std::string>& labels);

struct GlueShape {
  std::string label;
  std::optional<Orientation> orientation;  // empty for the self-loop rule
};
std::optional<GlueShape> glue_shape(const SynchronousRule& rule);

// ---------------------------------------------------------------- persistence

// "<lhs> ||| <F> ||| <E> ||| <p(F|E)> <p(E|F)> <pw(F|E)> <pw(E|F)> ||| <kind>"
void write_grammar(std::ostream& out, const RuleTable& table);
RuleTable read_grammar(std::istream& in, const std::string& name);
void save_grammar(const RuleTable& table, const std::string& path);
RuleTable load_grammar(const std::string& path);

// ---------------------------------------------------------------- statistics

enum class UsageClass { kGlue, kNonterminal, kTerminal };
UsageClass usage_class(const SynchronousRule& rule);
std::string usage_class_name(UsageClass c);

struct UsageLog {
  std::size_t glue = 0;
  std::size_t nonterminal = 0;
  std::size_t terminal = 0;

  void record(UsageClass c);
  std::size_t total() const { return glue + nonterminal + terminal; }
};

// Lines "[<sent-id>] <class>"; only the last field is read.
UsageLog read_usage(std::istream& in, const std::string& name);

struct GrammarStats {
  // (#terminal nodes in F, has nonterminal) -> rule count
  std::map<std::pair<std::size_t, bool>, std::size_t> histogram;
  std::size_t rules = 0;
  std::optional<UsageLog> usage;

  double percent(UsageClass c) const;
};

GrammarStats grammar_stats(const RuleTable& table, const UsageLog* usage = nullptr);
void write_stats(std::ostream& out, const GrammarStats& stats);

}  // namespace snrg

#endif  // SNRG_GRAMMAR_HPP_
