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

#include "snrg/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "snrg/error.hpp"

namespace snrg {

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names{
      "p(F|E)", "p(E|F)", "pw(F|E)", "pw(E|F)", "lm", "word-count", "rule-count", "reorder", "moving-distance"};
  return names;
}

double score_hypothesis(const FeatureVector& features, const Weights& weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) s += weights[i] * features[i];
  return s;
}

Weights default_weights() {
  Weights w{};
  w[kLogPFGivenE] = w[kLogPEGivenF] = w[kLogPwFGivenE] = w[kLogPwEGivenF] = 1.0;
  w[kLanguageModel] = 1.0;
  w[kReorder] = 1.0;
  return w;
}

void write_weights(std::ostream& out, const Weights& w) {
  out << '#';
  for (const auto& n : feature_names()) out << ' ' << n;
  out << '\n';
  for (std::size_t i = 0; i < kFeatureCount; ++i) out << (i ? " " : "") << format_double(w[i]);
  out << '\n';
}

Weights read_weights(std::istream& in, const std::string& name) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      Tokens names = split_whitespace(t.substr(1));
      if (!names.empty() && !std::equal(names.begin(), names.end(), feature_names().begin(), feature_names().end()))
        throw FormatError(name, line_no, "feature header does not match '" +
                                             join(Tokens(feature_names().begin(), feature_names().end())) + "'");
      continue;
    }
    for (const std::string& tok : split_whitespace(t)) {
      try {
        values.push_back(parse_double(tok));
      } catch (const std::exception&) {
        throw FormatError(name, line_no, "bad weight '" + tok + "'");
      }
    }
  }
  if (values.size() != kFeatureCount)
    throw FormatError(name, line_no, "expected " + std::to_string(kFeatureCount) + " weights, got " + std::to_string(values.size()));
  Weights w{};
  std::copy(values.begin(), values.end(), w.begin());
  return w;
}

Weights load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, 0, "cannot open weights");
  return read_weights(in, path);
}

void save_weights(const Weights& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path, 0, "cannot write weights");
  write_weights(out, w);
}

// ---------------------------------------------------------------- hypotheses

bool Hypothesis::is_goal() const {
  return graph.node_count() == 1 && graph.edge_count() == 0 && is_nonterminal(graph.node(0).label);
}

std::vector<DerivationStep> Hypothesis::derivation() const {
  std::vector<DerivationStep> out;
  for (const Trace* t = trace.get(); t; t = t->parent.get()) out.push_back(t->step);
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

// A rule that neither covers an input node nor consumes an edge would never
// advance the search.
bool consumes_something(const SynchronousRule& r) {
  return r.fragment.edge_count() > 0 || terminal_node_count(r.fragment) > 0;
}

std::vector<std::string> sorted_node_labels(const AmrFragment& f) {
  std::vector<std::string> out;
  for (const Node& n : f.nodes())
    if (!is_nonterminal(n.label)) out.push_back(n.label);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> sorted_edge_labels(const AmrFragment& f) {
  std::vector<std::string> out;
  for (const Edge& e : f.edges()) out.push_back(e.label);
  std::sort(out.begin(), out.end());
  return out;
}

// Multiset inclusion of sorted label lists.
bool fits(const std::vector<std::string>& need, const std::vector<std::string>& have) {
  return std::includes(have.begin(), have.end(), need.begin(), need.end());
}

double floored_log(double p) { return std::log(std::max(p, kProbabilityFloor)); }

std::string partial_text(const AmrGraph& g) {
  std::vector<std::pair<int, const Node*>> nts;
  for (const Node& n : g.nodes())
    if (is_nonterminal(n.label)) nts.emplace_back(nonterminal_index(n.label), &n);
  std::sort(nts.begin(), nts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (const auto& [k, n] : nts) {
    if (!out.empty()) out += " | ";
    if (n->translation) out += join(*n->translation);
  }
  return out;
}

}  // namespace

Decoder::Decoder(const RuleTable& grammar, Weights weights, DecoderOptions options, const NGramModel* lm,
                 const ReorderModel* reorder, const VerbalizationLexicon* lexicon)
    : weights_(weights), options_(options), lm_(lm), reorder_(reorder), lexicon_(lexicon) {
  if (options_.k == 0) throw ContractError("k must be at least 1");
  std::unordered_map<std::string, std::size_t> by_key;
  for (const SynchronousRule& r : grammar.rules()) {
    bool induced = r.kind == RuleKind::kInducedInitial || r.kind == RuleKind::kInducedCollapsed;
    if (induced && !options_.use_induced_rules) continue;
    if (r.kind == RuleKind::kConcept && !options_.use_concept_rules) continue;
    if (!consumes_something(r)) continue;
    auto [it, fresh] = by_key.emplace(r.key, groups_.size());
    if (fresh) {
      RuleGroup g;
      g.pattern = std::make_shared<FragmentPattern>(r.fragment);
      g.node_labels = sorted_node_labels(r.fragment);
      g.edge_labels = sorted_edge_labels(r.fragment);
      groups_.push_back(std::move(g));
    }
    groups_[it->second].rules.push_back(std::make_shared<SynchronousRule>(r));
  }
}

DecodeResult Decoder::decode(const AmrGraph& input) const {
  return session(input).search();
}

// ---------------------------------------------------------------- session

DecodeSession::DecodeSession(const Decoder& decoder, const AmrGraph& input) : decoder_(decoder) {
  input.validate();
  // Fresh tracking information: every node stands for itself.
  for (const Node& n : input.nodes()) {
    if (is_nonterminal(n.label)) throw ContractError("decoder input contains a nonterminal node");
    input_.add_node(n.label, n.variable, n.constant);
  }
  for (const Edge& e : input.edges()) input_.add_edge(e.source, e.label, e.target);
  input_.set_root(input.root());
  distances_ = all_pair_distances(input_);

  std::vector<std::string> have_nodes = sorted_node_labels(input_);
  std::vector<std::string> have_edges = sorted_edge_labels(input_);
  for (const auto& g : decoder_.groups_)
    if (fits(g.node_labels, have_nodes) && fits(g.edge_labels, have_edges)) add_group(g.pattern, g.rules);

  std::vector<SynchronousRule> generated;
  if (decoder_.options_.use_concept_rules) generated = make_concept_rules(input_, decoder_.lexicon_);
  for (SynchronousRule& r : make_glue_rules(input_.edge_labels())) generated.push_back(std::move(r));
  std::map<std::string, std::vector<std::shared_ptr<const SynchronousRule>>> by_key;
  for (SynchronousRule& r : generated) by_key[r.key].push_back(std::make_shared<SynchronousRule>(std::move(r)));
  for (auto& [key, rules] : by_key) add_group(std::make_shared<FragmentPattern>(rules.front()->fragment), rules);
}

void DecodeSession::add_group(std::shared_ptr<const FragmentPattern> pattern,
                              const std::vector<std::shared_ptr<const SynchronousRule>>& rules) {
  Pattern p{std::move(pattern), {}};
  for (const auto& r : rules) {
    p.rules.push_back(rules_.size());
    rules_.push_back(r);
  }
  patterns_.push_back(std::move(p));
}

Hypothesis DecodeSession::initial() const {
  Hypothesis h;
  h.graph = input_;
  h.score = score_hypothesis(h.features, decoder_.weights_);
  return h;
}

std::vector<DerivationStep> DecodeSession::expansions(const Hypothesis& hyp) const {
  std::vector<DerivationStep> out;
  if (hyp.finished) return out;
  const AmrGraph& g = hyp.graph;
  for (const Pattern& p : patterns_) {
    for (NodeId v = 0; v < static_cast<NodeId>(g.node_count()); ++v) {
      const std::string& label = g.node(v).label;
      if (p.pattern->root_is_nonterminal() ? !is_nonterminal(label) : label != p.pattern->root_label()) continue;
      for (FragmentMatch& m : p.pattern->match_at(g, v))
        for (std::size_t r : p.rules) out.push_back({rules_[r], m});
    }
  }
  return out;
}

Tokens DecodeSession::substitute(const Hypothesis& hyp, const SynchronousRule& rule, const FragmentMatch& match) const {
  Tokens out;
  const AmrFragment& f = rule.fragment;
  for (const std::string& tok : rule.phrase) {
    int k = nonterminal_index(tok);
    if (k < 0) {
      out.push_back(tok);
      continue;
    }
    for (NodeId v = 0; v < static_cast<NodeId>(f.node_count()); ++v) {
      if (nonterminal_index(f.node(v).label) != k) continue;
      const auto& t = hyp.graph.node(match.binding[static_cast<std::size_t>(v)]).translation;
      if (t) out.insert(out.end(), t->begin(), t->end());
      break;
    }
  }
  return out;
}

double DecodeSession::lm_fragment(const Tokens& words) const {
  return decoder_.lm_ ? decoder_.lm_->score_fragment(words) : 0.0;
}

FeatureVector DecodeSession::feature_delta(const Hypothesis& hyp, const SynchronousRule& rule, const FragmentMatch& match,
                                           const Tokens& translation) const {
  const DecoderOptions& opt = decoder_.options_;
  FeatureVector d{};
  d[kLogPFGivenE] = floored_log(rule.features.p_f_given_e);
  d[kLogPEGivenF] = floored_log(rule.features.p_e_given_f);
  d[kLogPwFGivenE] = floored_log(rule.features.pw_f_given_e);
  d[kLogPwEGivenF] = floored_log(rule.features.pw_e_given_f);

  const AmrFragment& f = rule.fragment;
  if (decoder_.lm_) {
    double lm = lm_fragment(translation);
    for (NodeId v = 0; v < static_cast<NodeId>(f.node_count()); ++v) {
      if (!is_nonterminal(f.node(v).label)) continue;
      const auto& t = hyp.graph.node(match.binding[static_cast<std::size_t>(v)]).translation;
      if (t) lm -= lm_fragment(*t);
    }
    d[kLanguageModel] = lm;
  }
  d[kWordCount] = static_cast<double>(
      std::count_if(rule.phrase.begin(), rule.phrase.end(), [](const std::string& w) { return !is_nonterminal(w); }));
  d[kRuleCount] = 1.0;

  if (opt.use_reorder_model && rule.kind == RuleKind::kGlue) {
    auto shape = glue_shape(rule);
    if (shape && shape->orientation) {
      const Edge& e = f.edge(0);
      const AmrGraph& g = hyp.graph;
      NodeId head = g.node(match.binding[static_cast<std::size_t>(e.source)]).origin;
      NodeId tail = g.node(match.binding[static_cast<std::size_t>(e.target)]).origin;
      const ReorderModel& model = decoder_.reorder_ ? *decoder_.reorder_ : decoder_.no_counts_;
      d[kReorder] = std::log(model.prob(input_.node(head).label, e.label, input_.node(tail).label, *shape->orientation));
    }
  }
  if (opt.use_moving_distance && hyp.last_root != kNoNode) {
    NodeId here = hyp.graph.node(match.root_image).origin;
    d[kMovingDistance] = distances_[static_cast<std::size_t>(hyp.last_root)][static_cast<std::size_t>(here)];
  }
  return d;
}

Hypothesis DecodeSession::apply(const Hypothesis& hyp, const DerivationStep& step) const {
  if (hyp.finished) throw ContractError("hypothesis is already finished");
  const SynchronousRule& rule = *step.rule;
  const FragmentMatch& m = step.match;
  Tokens translation = substitute(hyp, rule, m);
  FeatureVector delta = feature_delta(hyp, rule, m, translation);

  Hypothesis next;
  for (NodeId v : m.binding)
    if (!is_nonterminal(hyp.graph.node(v).label)) ++next.collapsed_nodes;
  next.collapsed_nodes += hyp.collapsed_nodes;
  next.collapsed_edges = hyp.collapsed_edges + m.edges.size();
  next.graph = collapse_match(hyp.graph, m, std::move(translation));
  for (std::size_t i = 0; i < kFeatureCount; ++i) next.features[i] = hyp.features[i] + delta[i];
  next.score = score_hypothesis(next.features, decoder_.weights_);
  next.last_root = hyp.graph.node(m.root_image).origin;
  next.trace = std::make_shared<Trace>(Trace{hyp.trace, step});
  next.rules = hyp.rules + 1;
  return next;
}

Hypothesis DecodeSession::finish(const Hypothesis& goal) const {
  if (!goal.is_goal()) throw ContractError("only a single-nonterminal graph can be finished");
  Hypothesis done = goal;
  if (decoder_.lm_) {
    const Tokens& words = *goal.graph.node(0).translation;
    done.features[kLanguageModel] += decoder_.lm_->score(words) - lm_fragment(words);
  }
  done.score = score_hypothesis(done.features, decoder_.weights_);
  done.finished = true;
  return done;
}

std::string DecodeSession::recombination_key(const Hypothesis& hyp) const {
  const AmrGraph& g = hyp.graph;
  std::size_t context = decoder_.lm_ ? static_cast<std::size_t>(std::max(decoder_.lm_->order() - 1, 0)) : 0;
  std::vector<std::string> groups;
  for (const Node& n : g.nodes()) {
    if (!is_nonterminal(n.label)) continue;
    std::string s;
    for (NodeId c : n.covers) s += std::to_string(c) + ',';
    s += '@' + std::to_string(n.origin);
    if (context > 0 && n.translation) {
      const Tokens& t = *n.translation;
      std::size_t head = std::min(context, t.size());
      s += '[';
      for (std::size_t i = 0; i < head; ++i) s += t[i] + ' ';
      s += '|';
      for (std::size_t i = t.size() - std::min(context, t.size()); i < t.size(); ++i) s += t[i] + ' ';
      s += ']';
    }
    groups.push_back(std::move(s));
  }
  std::sort(groups.begin(), groups.end());
  std::vector<std::int32_t> edges;
  for (const Edge& e : g.edges()) edges.push_back(e.origin);
  std::sort(edges.begin(), edges.end());
  std::string key;
  for (const auto& s : groups) key += s + ';';
  key += '/';
  for (auto e : edges) key += std::to_string(e) + ',';
  if (decoder_.options_.use_moving_distance) key += "/" + std::to_string(hyp.last_root);
  return key;
}

KBestEntry DecodeSession::fallback(const Hypothesis& hyp) const {
  KBestEntry out;
  std::vector<std::pair<int, const Node*>> nts;
  for (const Node& n : hyp.graph.nodes())
    if (is_nonterminal(n.label)) nts.emplace_back(nonterminal_index(n.label), &n);
  std::sort(nts.begin(), nts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [k, n] : nts)
    if (n->translation) out.words.insert(out.words.end(), n->translation->begin(), n->translation->end());
  out.features = hyp.features;
  if (decoder_.lm_) out.features[kLanguageModel] = decoder_.lm_->score(out.words);
  out.score = score_hypothesis(out.features, decoder_.weights_);
  out.derivation = hyp.derivation();
  out.complete = false;
  return out;
}

namespace {

struct Ranked {
  Hypothesis hyp;
  std::string text;
};

bool better(const Ranked& a, const Ranked& b) {
  if (a.hyp.score != b.hyp.score) return a.hyp.score > b.hyp.score;
  if (a.hyp.rules != b.hyp.rules) return a.hyp.rules < b.hyp.rules;
  return a.text < b.text;
}

}  // namespace

DecodeResult DecodeSession::search() const {
  const DecoderOptions& opt = decoder_.options_;
  DecodeResult result;
  auto beam_key = [&](const Hypothesis& h) {
    return std::make_pair(h.coverage(), opt.pair_beams ? h.collapsed_edges : 0);
  };
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Hypothesis>> beams;
  Hypothesis start = initial();
  beams[beam_key(start)].push_back(start);
  std::vector<Ranked> finals;
  std::optional<Ranked> furthest;

  while (!beams.empty()) {
    std::vector<Hypothesis> level = std::move(beams.begin()->second);
    beams.erase(beams.begin());

    std::vector<Ranked> ranked;
    ranked.reserve(level.size());
    if (opt.recombine) {
      // States with equal keys have equal futures. Up to k distinct partial
      // strings survive per key so the k-best list keeps its variety.
      std::unordered_map<std::string, std::vector<Ranked>> groups;
      std::vector<std::string> order;
      for (Hypothesis& h : level) {
        Ranked r{std::move(h), {}};
        r.text = partial_text(r.hyp.graph);
        std::string key = recombination_key(r.hyp);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) order.push_back(key);
        auto& kept = it->second;
        auto same = std::find_if(kept.begin(), kept.end(), [&](const Ranked& o) { return o.text == r.text; });
        if (same != kept.end()) {
          if (better(r, *same)) *same = std::move(r);
        } else {
          kept.push_back(std::move(r));
        }
      }
      for (const std::string& key : order) {
        auto& kept = groups[key];
        std::sort(kept.begin(), kept.end(), better);
        if (kept.size() > opt.k) kept.resize(opt.k);
        for (Ranked& r : kept) ranked.push_back(std::move(r));
      }
    } else {
      for (Hypothesis& h : level) {
        Ranked r{std::move(h), {}};
        r.text = partial_text(r.hyp.graph);
        ranked.push_back(std::move(r));
      }
    }
    std::sort(ranked.begin(), ranked.end(), better);
    if (opt.beam_size > 0 && ranked.size() > opt.beam_size) ranked.resize(opt.beam_size);

    for (Ranked& r : ranked) {
      if (!furthest || r.hyp.coverage() > furthest->hyp.coverage() ||
          (r.hyp.coverage() == furthest->hyp.coverage() && better(r, *furthest)))
        furthest = r;
      if (r.hyp.is_goal()) {
        Ranked done{finish(r.hyp), {}};
        done.text = join(*done.hyp.graph.node(0).translation);
        finals.push_back(std::move(done));
        continue;
      }
      for (const DerivationStep& step : expansions(r.hyp)) {
        ++result.expansions;
        Hypothesis next = apply(r.hyp, step);
        beams[beam_key(next)].push_back(std::move(next));
      }
    }
  }

  std::sort(finals.begin(), finals.end(), better);
  std::unordered_map<std::string, bool> emitted;
  for (Ranked& r : finals) {
    if (result.kbest.size() >= opt.k) break;
    if (!emitted.emplace(r.text, true).second) continue;
    KBestEntry e;
    e.words = *r.hyp.graph.node(0).translation;
    e.features = r.hyp.features;
    e.score = r.hyp.score;
    e.derivation = r.hyp.derivation();
    result.kbest.push_back(std::move(e));
  }
  if (result.kbest.empty()) {
    result.complete = false;
    result.kbest.push_back(fallback(furthest->hyp));
  }
  return result;
}

KBestEntry DecodeSession::replay(const std::vector<DerivationStep>& derivation) const {
  Hypothesis h = initial();
  for (const DerivationStep& step : derivation) h = apply(h, step);
  if (!h.is_goal()) return fallback(h);
  Hypothesis done = finish(h);
  KBestEntry e;
  e.words = *done.graph.node(0).translation;
  e.features = done.features;
  e.score = done.score;
  e.derivation = derivation;
  return e;
}

// ---------------------------------------------------------------- k-best files

void write_kbest(std::ostream& out, const std::string& id, const std::vector<KBestEntry>& kbest) {
  for (const KBestEntry& e : kbest) {
    out << id << " ||| " << e.text() << " |||";
    for (double f : e.features) out << ' ' << format_double(f);
    out << " ||| " << format_double(e.score) << '\n';
  }
}

std::vector<KBestLine> read_kbest(std::istream& in, const std::string& name) {
  std::vector<KBestLine> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, "|||");
    if (fields.size() != 4) throw FormatError(name, line_no, "expected '<id> ||| <string> ||| <features> ||| <score>'");
    KBestLine k;
    k.id = fields[0];
    k.words = split_whitespace(fields[1]);
    Tokens feats = split_whitespace(fields[2]);
    if (feats.size() != kFeatureCount) throw FormatError(name, line_no, "expected 9 feature values");
    try {
      for (std::size_t i = 0; i < kFeatureCount; ++i) k.features[i] = parse_double(feats[i]);
      k.score = parse_double(fields[3]);
    } catch (const std::exception&) {
      throw FormatError(name, line_no, "bad number");
    }
    out.push_back(std::move(k));
  }
  return out;
}

UsageLog derivation_usage(const std::vector<DerivationStep>& derivation) {
  UsageLog log;
  for (const DerivationStep& s : derivation) log.record(usage_class(*s.rule));
  return log;
}

}  // namespace snrg
