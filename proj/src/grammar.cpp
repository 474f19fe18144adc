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

#include "snrg/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "snrg/error.hpp"

namespace snrg {

std::string rule_kind_name(RuleKind kind) {
  switch (kind) {
    case RuleKind::kInducedInitial: return "induced-initial";
    case RuleKind::kInducedCollapsed: return "induced-collapsed";
    case RuleKind::kConcept: return "concept";
    case RuleKind::kGlue: return "glue";
  }
  return "?";
}

RuleKind parse_rule_kind(const std::string& name) {
  if (name == "induced-initial") return RuleKind::kInducedInitial;
  if (name == "induced-collapsed") return RuleKind::kInducedCollapsed;
  if (name == "concept") return RuleKind::kConcept;
  if (name == "glue") return RuleKind::kGlue;
  throw std::invalid_argument("unknown rule kind '" + name + "'");
}

namespace {

struct CanonicalFragment {
  AmrFragment fragment;
  std::string key;
  std::map<int, int> renumber;  // marker index in the input F -> canonical index
};

CanonicalFragment canonical_fragment(const AmrFragment& fragment) {
  CanonicalForm form = canonicalize(fragment);
  CanonicalFragment out;
  for (NodeId v = 0; v < static_cast<NodeId>(fragment.node_count()); ++v) {
    int old = nonterminal_index(fragment.node(v).label);
    if (old < 0) continue;
    if (!out.renumber.emplace(old, form.nonterminal[static_cast<std::size_t>(v)]).second)
      throw ContractError("nonterminal marker " + fragment.node(v).label + " used twice in F");
  }
  out.fragment = parse_penman(form.text);
  out.key = std::move(form.text);
  return out;
}

SynchronousRule build_rule(const CanonicalFragment& cf, Tokens phrase, RuleKind kind) {
  for (std::string& tok : phrase) {
    int old = nonterminal_index(tok);
    if (old < 0) continue;
    auto it = cf.renumber.find(old);
    if (it == cf.renumber.end()) throw ContractError("phrase nonterminal " + tok + " has no node in F");
    tok = nonterminal_marker(it->second);
  }
  SynchronousRule rule;
  rule.fragment = cf.fragment;
  rule.key = cf.key;
  rule.phrase = std::move(phrase);
  rule.kind = kind;
  validate_rule(rule);
  return rule;
}

}  // namespace

SynchronousRule make_rule(const AmrFragment& fragment, Tokens phrase, RuleKind kind) {
  return build_rule(canonical_fragment(fragment), std::move(phrase), kind);
}

void validate_rule(const SynchronousRule& rule) {
  rule.fragment.validate();
  std::set<int> in_f, in_e;
  for (const Node& n : rule.fragment.nodes()) {
    int k = nonterminal_index(n.label);
    if (k >= 0 && !in_f.insert(k).second) throw ContractError("duplicate nonterminal in F: " + n.label);
  }
  for (const std::string& tok : rule.phrase) {
    int k = nonterminal_index(tok);
    if (k >= 0 && !in_e.insert(k).second) throw ContractError("duplicate nonterminal in E: " + tok);
  }
  if (in_f != in_e) throw ContractError("nonterminals of F and E do not correspond: " + rule.key);
  std::size_t nts = in_f.size();
  if (rule.kind == RuleKind::kInducedInitial && nts != 0) throw ContractError("initial rule with a nonterminal");
  if (rule.kind == RuleKind::kInducedCollapsed && nts != 1) throw ContractError("collapsed rule needs one nonterminal");
  const RuleFeatures& f = rule.features;
  for (double p : {f.p_f_given_e, f.p_e_given_f, f.pw_f_given_e, f.pw_e_given_f})
    if (!(p > 0.0 && p <= 1.0)) throw ContractError("rule probability outside (0, 1]: " + rule.key);
}

std::vector<std::string> fragment_labels(const AmrFragment& fragment) {
  std::vector<std::string> out;
  for (const Node& n : fragment.nodes())
    if (!is_nonterminal(n.label)) out.push_back(n.label);
  for (const Edge& e : fragment.edges()) out.push_back(e.label);
  return out;
}

std::size_t terminal_node_count(const AmrFragment& fragment) {
  return fragment.node_count() - fragment.nonterminal_count();
}

bool has_nonterminal(const SynchronousRule& rule) {
  return rule.fragment.nonterminal_count() > 0;
}

// ---------------------------------------------------------------- extraction

namespace {

// Smallest rooted connector of `required` that passes only through `free`
// nodes. Paths are grown from each candidate root by 0-1 BFS (entering a
// free node costs 1); the union of the paths is the node set.
std::optional<std::pair<NodeId, std::vector<NodeId>>> connect(const AmrGraph& g, const std::vector<NodeId>& required,
                                                              const std::vector<char>& is_free) {
  std::size_t n = g.node_count();
  std::vector<char> need(n, 0);
  for (NodeId v : required) need[static_cast<std::size_t>(v)] = 1;
  auto allowed = [&](NodeId v) { return need[static_cast<std::size_t>(v)] || is_free[static_cast<std::size_t>(v)]; };

  std::optional<std::pair<NodeId, std::vector<NodeId>>> best;
  std::vector<int> cost(n);
  std::vector<NodeId> parent(n);
  for (NodeId r = 0; r < static_cast<NodeId>(n); ++r) {
    if (!allowed(r)) continue;
    std::fill(cost.begin(), cost.end(), std::numeric_limits<int>::max());
    std::fill(parent.begin(), parent.end(), kNoNode);
    std::deque<NodeId> queue{r};
    cost[static_cast<std::size_t>(r)] = need[static_cast<std::size_t>(r)] ? 0 : 1;
    while (!queue.empty()) {
      NodeId v = queue.front();
      queue.pop_front();
      for (std::size_t e : g.out_edges(v)) {
        NodeId t = g.edge(e).target;
        if (!allowed(t)) continue;
        int step = need[static_cast<std::size_t>(t)] ? 0 : 1;
        int c = cost[static_cast<std::size_t>(v)] + step;
        if (c >= cost[static_cast<std::size_t>(t)]) continue;
        cost[static_cast<std::size_t>(t)] = c;
        parent[static_cast<std::size_t>(t)] = v;
        if (step == 0) queue.push_front(t); else queue.push_back(t);
      }
    }
    std::vector<char> in(n, 0);
    in[static_cast<std::size_t>(r)] = 1;
    bool ok = true;
    for (NodeId v : required) {
      if (cost[static_cast<std::size_t>(v)] == std::numeric_limits<int>::max()) {
        ok = false;
        break;
      }
      for (NodeId u = v; u != kNoNode && !in[static_cast<std::size_t>(u)]; u = parent[static_cast<std::size_t>(u)])
        in[static_cast<std::size_t>(u)] = 1;
    }
    if (!ok) continue;
    std::vector<NodeId> nodes;
    for (std::size_t v = 0; v < n; ++v)
      if (in[v]) nodes.push_back(static_cast<NodeId>(v));
    if (!best || nodes.size() < best->second.size()) best = std::make_pair(r, std::move(nodes));
  }
  return best;
}

AmrFragment induced_fragment(const AmrGraph& g, NodeId root, const std::vector<NodeId>& nodes) {
  AmrFragment f;
  std::vector<NodeId> remap(g.node_count(), kNoNode);
  // Root first so the fragment root is node 0.
  remap[static_cast<std::size_t>(root)] = f.add_node(g.node(root).label, {}, g.node(root).constant);
  for (NodeId v : nodes)
    if (v != root) remap[static_cast<std::size_t>(v)] = f.add_node(g.node(v).label, {}, g.node(v).constant);
  for (const Edge& e : g.edges()) {
    NodeId s = remap[static_cast<std::size_t>(e.source)], t = remap[static_cast<std::size_t>(e.target)];
    if (s != kNoNode && t != kNoNode) f.add_edge(s, e.label, t);
  }
  f.set_root(0);
  return f;
}

}  // namespace

std::vector<SynchronousRule> extract_initial_rules(const Instance& inst, const ExtractOptions& options) {
  std::vector<SynchronousRule> out;
  const AmrGraph& g = inst.graph;
  std::size_t len = inst.tokens.size();
  std::vector<std::set<NodeId>> token_nodes(len);
  std::vector<std::size_t> first_token(g.node_count(), len), last_token(g.node_count(), 0);
  std::vector<char> node_aligned(g.node_count(), 0);
  for (const AlignmentLink& l : inst.alignment) {
    if (!g.contains(l.node) || l.end > len || l.begin >= l.end) throw ContractError("alignment link outside instance");
    auto v = static_cast<std::size_t>(l.node);
    node_aligned[v] = 1;
    first_token[v] = std::min(first_token[v], l.begin);
    last_token[v] = std::max(last_token[v], l.end - 1);
    for (std::size_t i = l.begin; i < l.end; ++i) token_nodes[i].insert(l.node);
  }
  std::vector<char> is_free(g.node_count());
  for (std::size_t v = 0; v < is_free.size(); ++v) is_free[v] = !node_aligned[v];
  auto unaligned = [&](std::size_t i) { return token_nodes[i].empty(); };

  for (std::size_t i = 0; i < len; ++i) {
    if (unaligned(i)) continue;
    std::set<NodeId> closure;
    for (std::size_t j = i; j < len; ++j) {
      closure.insert(token_nodes[j].begin(), token_nodes[j].end());
      if (closure.size() > options.max_fragment_nodes) break;
      if (unaligned(j)) continue;
      bool consistent = std::all_of(closure.begin(), closure.end(), [&](NodeId v) {
        return first_token[static_cast<std::size_t>(v)] >= i && last_token[static_cast<std::size_t>(v)] <= j;
      });
      if (!consistent) continue;
      std::vector<NodeId> required(closure.begin(), closure.end());
      auto connector = connect(g, required, is_free);
      if (!connector || connector->second.size() > options.max_fragment_nodes) continue;
      SynchronousRule base = make_rule(induced_fragment(g, connector->first, connector->second), {}, RuleKind::kInducedInitial);
      for (std::size_t left = 0; left <= options.max_absorbed && left <= i; ++left) {
        if (left > 0 && !unaligned(i - left)) break;
        for (std::size_t right = 0; right <= options.max_absorbed && j + right < len; ++right) {
          if (right > 0 && !unaligned(j + right)) break;
          SynchronousRule r = base;
          r.phrase.assign(inst.tokens.begin() + static_cast<std::ptrdiff_t>(i - left),
                          inst.tokens.begin() + static_cast<std::ptrdiff_t>(j + right + 1));
          out.push_back(std::move(r));
        }
      }
    }
  }
  return out;
}

namespace {

std::ptrdiff_t find_phrase(const Tokens& haystack, const Tokens& needle) {
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end());
  return it == haystack.end() && !needle.empty() ? -1 : it - haystack.begin();
}

}  // namespace

bool rule_contains(const SynchronousRule& r_i, const SynchronousRule& r_j) {
  if (has_nonterminal(r_i) || has_nonterminal(r_j)) throw ContractError("containment is defined on initial rules");
  if (r_i.key == r_j.key && r_i.phrase == r_j.phrase) return false;
  if (r_j.phrase.size() > r_i.phrase.size() || r_j.fragment.node_count() > r_i.fragment.node_count() ||
      r_j.fragment.edge_count() > r_i.fragment.edge_count())
    return false;
  if (find_phrase(r_i.phrase, r_j.phrase) < 0) return false;
  return !match_fragment(r_i.fragment, r_j.fragment).empty();
}

SynchronousRule collapse_rules(const SynchronousRule& r_i, const SynchronousRule& r_j) {
  if (!rule_contains(r_i, r_j)) throw ContractError("collapse_rules: r_i does not contain r_j");
  FragmentMatch m = match_fragment(r_i.fragment, r_j.fragment).front();
  int index = r_i.fragment.max_nonterminal_index() + 1;
  AmrGraph collapsed = collapse_match(r_i.fragment, m, {});
  auto pos = static_cast<std::size_t>(find_phrase(r_i.phrase, r_j.phrase));
  Tokens phrase(r_i.phrase.begin(), r_i.phrase.begin() + static_cast<std::ptrdiff_t>(pos));
  phrase.push_back(nonterminal_marker(index));
  phrase.insert(phrase.end(), r_i.phrase.begin() + static_cast<std::ptrdiff_t>(pos + r_j.phrase.size()), r_i.phrase.end());
  return make_rule(collapsed, std::move(phrase), RuleKind::kInducedCollapsed);
}

std::vector<SynchronousRule> induce_instance(const Instance& inst, const ExtractOptions& options) {
  std::vector<SynchronousRule> cur = extract_initial_rules(inst, options);
  std::vector<SynchronousRule> out;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    out.push_back(cur[i]);
    for (std::size_t j = 0; j < cur.size(); ++j)
      if (j != i && rule_contains(cur[i], cur[j])) out.push_back(collapse_rules(cur[i], cur[j]));
  }
  return out;
}

std::vector<SynchronousRule> induce_grammar(const std::vector<Instance>& corpus, const ExtractOptions& options) {
  std::vector<SynchronousRule> out;
  for (const Instance& inst : corpus) {
    auto rules = induce_instance(inst, options);
    std::move(rules.begin(), rules.end(), std::back_inserter(out));
  }
  return out;
}

void write_rule_instances(std::ostream& out, const std::vector<SynchronousRule>& rules) {
  for (const SynchronousRule& r : rules) out << r.key << " ||| " << join(r.phrase) << " ||| " << rule_kind_name(r.kind) << '\n';
}

std::vector<SynchronousRule> read_rule_instances(std::istream& in, const std::string& name) {
  std::vector<SynchronousRule> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, "|||");
    if (fields.size() != 3) throw FormatError(name, line_no, "expected '<F> ||| <E> ||| <kind>'");
    try {
      out.push_back(make_rule(parse_penman(fields[0]), split_whitespace(fields[1]), parse_rule_kind(fields[2])));
    } catch (const std::exception& e) {
      throw FormatError(name, line_no, e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------- estimation

void LexicalTable::add(const std::string& label, const std::string& word, double count) {
  joint_[{label, word}] += count;
}

void LexicalTable::normalize() {
  std::unordered_map<std::string, double> by_word, by_label;
  for (const auto& [key, c] : joint_) {
    by_label[key.first] += c;
    by_word[key.second] += c;
  }
  l_given_w_.clear();
  w_given_l_.clear();
  for (const auto& [key, c] : joint_) {
    l_given_w_[key.second][key.first] = c / by_word[key.second];
    w_given_l_[key.first][key.second] = c / by_label[key.first];
  }
}

double LexicalTable::label_given_word(const std::string& label, const std::string& word) const {
  auto w = l_given_w_.find(word);
  if (w == l_given_w_.end()) return 0.0;
  auto l = w->second.find(label);
  return l == w->second.end() ? 0.0 : l->second;
}

double LexicalTable::word_given_label(const std::string& word, const std::string& label) const {
  auto l = w_given_l_.find(label);
  if (l == w_given_l_.end()) return 0.0;
  auto w = l->second.find(word);
  return w == l->second.end() ? 0.0 : w->second;
}

namespace {

constexpr double kLexicalFloor = 1e-12;

Tokens terminal_words(const Tokens& phrase) {
  Tokens out;
  for (const std::string& w : phrase)
    if (!is_nonterminal(w)) out.push_back(w);
  return out;
}

double clamp_probability(double p) { return std::clamp(p, kLexicalFloor, 1.0); }

}  // namespace

double lexical_f_given_e(const LexicalTable& lex, const AmrFragment& fragment, const Tokens& phrase) {
  Tokens words = terminal_words(phrase);
  double p = 1.0;
  for (const std::string& l : fragment_labels(fragment)) {
    double sum = 0.0;
    for (const std::string& w : words) sum += lex.label_given_word(l, w);
    p *= sum;
  }
  return clamp_probability(p);
}

double lexical_e_given_f(const LexicalTable& lex, const AmrFragment& fragment, const Tokens& phrase) {
  std::vector<std::string> labels = fragment_labels(fragment);
  double p = 1.0;
  for (const std::string& w : terminal_words(phrase)) {
    double sum = 0.0;
    for (const std::string& l : labels) sum += lex.word_given_label(w, l);
    p *= sum;
  }
  return clamp_probability(p);
}

std::size_t RuleTable::add(SynchronousRule rule) {
  std::size_t i = rules_.size();
  index_[rule.key].push_back(i);
  rules_.push_back(std::move(rule));
  return i;
}

std::vector<std::size_t> RuleTable::lookup(const AmrFragment& query) const {
  return lookup(canonical_form(query));
}

std::vector<std::size_t> RuleTable::lookup(const std::string& canonical) const {
  auto it = index_.find(canonical);
  return it == index_.end() ? std::vector<std::size_t>{} : it->second;
}

std::vector<std::string> RuleTable::keys() const {
  std::vector<std::string> out;
  out.reserve(index_.size());
  for (const auto& kv : index_) out.push_back(kv.first);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> RuleTable::edge_labels() const {
  std::set<std::string> labels;
  for (const SynchronousRule& r : rules_)
    for (const Edge& e : r.fragment.edges()) labels.insert(e.label);
  return {labels.begin(), labels.end()};
}

RuleTable estimate_probabilities(const std::vector<SynchronousRule>& raw) {
  RuleTable table;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  std::vector<SynchronousRule> unique;
  std::unordered_map<std::string, double> per_phrase, per_fragment;
  for (const SynchronousRule& r : raw) {
    std::string phrase = join(r.phrase);
    auto [it, fresh] = seen.emplace(std::make_pair(r.key, phrase), unique.size());
    if (fresh) {
      unique.push_back(r);
      unique.back().count = 0.0;
    }
    unique[it->second].count += 1.0;
    per_phrase[phrase] += 1.0;
    per_fragment[r.key] += 1.0;
    if (r.kind == RuleKind::kInducedInitial && !r.phrase.empty()) {
      double share = 1.0 / static_cast<double>(r.phrase.size());
      for (const std::string& l : fragment_labels(r.fragment))
        for (const std::string& w : r.phrase) table.lexical.add(l, w, share);
    }
  }
  table.lexical.normalize();
  for (SynchronousRule& r : unique) {
    r.features.p_f_given_e = r.count / per_phrase[join(r.phrase)];
    r.features.p_e_given_f = r.count / per_fragment[r.key];
    r.features.pw_f_given_e = lexical_f_given_e(table.lexical, r.fragment, r.phrase);
    r.features.pw_e_given_f = lexical_e_given_f(table.lexical, r.fragment, r.phrase);
    table.add(std::move(r));
  }
  return table;
}

// ---------------------------------------------------------------- concept and glue rules

std::string concept_surface(const std::string& label) {
  if (label.size() >= 2 && label.front() == '"' && label.back() == '"') return to_lower(label.substr(1, label.size() - 2));
  if (is_literal_label(label)) return label;
  std::size_t dash = label.find_last_of('-');
  if (dash != std::string::npos && dash > 0 && dash + 1 < label.size() &&
      std::all_of(label.begin() + static_cast<std::ptrdiff_t>(dash + 1), label.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return label.substr(0, dash);
  return label;
}

void VerbalizationLexicon::add(const AmrFragment& pattern, Tokens phrase) {
  pattern.validate();
  entries_.emplace_back(pattern, std::move(phrase));
}

VerbalizationLexicon read_verbalization(std::istream& in, const std::string& name) {
  VerbalizationLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_fields(t, "|||");
    if (fields.size() != 2) throw FormatError(name, line_no, "expected '<PENMAN pattern> ||| <phrase>'");
    try {
      lex.add(parse_penman(fields[0]), split_whitespace(fields[1]));
    } catch (const std::exception& e) {
      throw FormatError(name, line_no, e.what());
    }
  }
  return lex;
}

VerbalizationLexicon load_verbalization(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, 0, "cannot open verbalization lexicon");
  return read_verbalization(in, path);
}

namespace {

void set_fixed_features(SynchronousRule& r) {
  r.features = {kFixedRuleProbability, kFixedRuleProbability, kFixedRuleProbability, kFixedRuleProbability};
}

}  // namespace

std::vector<SynchronousRule> make_concept_rules(const AmrGraph& g, const VerbalizationLexicon* lexicon) {
  std::vector<SynchronousRule> out;
  std::set<std::pair<std::string, Tokens>> seen;
  auto emit = [&](const AmrFragment& f, Tokens phrase) {
    SynchronousRule r = make_rule(f, std::move(phrase), RuleKind::kConcept);
    set_fixed_features(r);
    if (seen.emplace(r.key, r.phrase).second) out.push_back(std::move(r));
  };
  for (const Node& n : g.nodes()) {
    if (is_nonterminal(n.label)) continue;
    AmrFragment f;
    f.add_node(n.label, {}, n.constant);
    emit(f, split_whitespace(concept_surface(n.label)));
  }
  if (lexicon)
    for (const auto& [pattern, phrase] : lexicon->entries())
      if (!match_fragment(g, pattern).empty()) emit(pattern, phrase);
  return out;
}

std::vector<SynchronousRule> make_glue_rules(const std::vector<std::string>& labels) {
  std::set<std::string> unique(labels.begin(), labels.end());
  std::vector<SynchronousRule> out;
  for (const std::string& l : unique) {
    AmrFragment pair;
    pair.add_node("#X1#", "X1");
    pair.add_node("#X2#", "X2");
    pair.add_edge(0, l, 1);
    AmrFragment loop;
    loop.add_node("#X1#", "X1");
    loop.add_edge(0, l, 0);
    for (SynchronousRule r : {make_rule(pair, {"#X1#", "#X2#"}, RuleKind::kGlue),
                              make_rule(pair, {"#X2#", "#X1#"}, RuleKind::kGlue),
                              make_rule(loop, {"#X1#"}, RuleKind::kGlue)}) {
      set_fixed_features(r);
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::optional<GlueShape> glue_shape(const SynchronousRule& rule) {
  const AmrFragment& f = rule.fragment;
  if (rule.kind != RuleKind::kGlue || f.edge_count() != 1 || f.nonterminal_count() != f.node_count()) return std::nullopt;
  const Edge& e = f.edge(0);
  GlueShape shape{e.label, std::nullopt};
  if (f.node_count() == 1) {
    if (rule.phrase.size() != 1) return std::nullopt;
    return shape;
  }
  if (f.node_count() != 2 || e.source != f.root() || rule.phrase.size() != 2) return std::nullopt;
  const std::string& head = f.node(e.source).label;
  const std::string& tail = f.node(e.target).label;
  if (rule.phrase[0] == head && rule.phrase[1] == tail) shape.orientation = Orientation::kMonotonic;
  else if (rule.phrase[0] == tail && rule.phrase[1] == head) shape.orientation = Orientation::kInverse;
  else return std::nullopt;
  return shape;
}

// ---------------------------------------------------------------- persistence

void write_grammar(std::ostream& out, const RuleTable& table) {
  for (const SynchronousRule& r : table.rules()) {
    const RuleFeatures& f = r.features;
    out << r.lhs << " ||| " << r.key << " ||| " << join(r.phrase) << " ||| " << format_double(f.p_f_given_e) << ' '
        << format_double(f.p_e_given_f) << ' ' << format_double(f.pw_f_given_e) << ' ' << format_double(f.pw_e_given_f)
        << " ||| " << rule_kind_name(r.kind) << '\n';
  }
}

RuleTable read_grammar(std::istream& in, const std::string& name) {
  RuleTable table;
  std::unordered_map<std::string, CanonicalFragment> canonical;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, "|||");
    if (fields.size() != 5) throw FormatError(name, line_no, "expected 5 '|||'-separated fields, got " + std::to_string(fields.size()));
    try {
      Tokens probs = split_whitespace(fields[3]);
      if (probs.size() != 4) throw std::invalid_argument("expected 4 probabilities");
      auto cached = canonical.find(fields[1]);
      if (cached == canonical.end()) cached = canonical.emplace(fields[1], canonical_fragment(parse_penman(fields[1]))).first;
      SynchronousRule r = build_rule(cached->second, split_whitespace(fields[2]), parse_rule_kind(fields[4]));
      r.lhs = fields[0];
      r.features = {parse_double(probs[0]), parse_double(probs[1]), parse_double(probs[2]), parse_double(probs[3])};
      validate_rule(r);
      table.add(std::move(r));
    } catch (const std::exception& e) {
      throw FormatError(name, line_no, e.what());
    }
  }
  return table;
}

void save_grammar(const RuleTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path, 0, "cannot write grammar");
  write_grammar(out, table);
  if (!out) throw FormatError(path, 0, "write failed");
}

RuleTable load_grammar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, 0, "cannot open grammar");
  return read_grammar(in, path);
}

// ---------------------------------------------------------------- statistics

UsageClass usage_class(const SynchronousRule& rule) {
  if (rule.kind == RuleKind::kGlue) return UsageClass::kGlue;
  return has_nonterminal(rule) ? UsageClass::kNonterminal : UsageClass::kTerminal;
}

std::string usage_class_name(UsageClass c) {
  switch (c) {
    case UsageClass::kGlue: return "glue";
    case UsageClass::kNonterminal: return "nonterminal";
    case UsageClass::kTerminal: return "terminal";
  }
  return "?";
}

void UsageLog::record(UsageClass c) {
  switch (c) {
    case UsageClass::kGlue: ++glue; break;
    case UsageClass::kNonterminal: ++nonterminal; break;
    case UsageClass::kTerminal: ++terminal; break;
  }
}

UsageLog read_usage(std::istream& in, const std::string& name) {
  UsageLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Tokens fields = split_whitespace(line);
    if (fields.empty()) continue;
    const std::string& c = fields.back();
    if (c == "glue") log.record(UsageClass::kGlue);
    else if (c == "nonterminal") log.record(UsageClass::kNonterminal);
    else if (c == "terminal") log.record(UsageClass::kTerminal);
    else throw FormatError(name, line_no, "unknown usage class '" + c + "'");
  }
  return log;
}

double GrammarStats::percent(UsageClass c) const {
  if (!usage || usage->total() == 0) return 0.0;
  std::size_t k = c == UsageClass::kGlue ? usage->glue : c == UsageClass::kNonterminal ? usage->nonterminal : usage->terminal;
  return 100.0 * static_cast<double>(k) / static_cast<double>(usage->total());
}

GrammarStats grammar_stats(const RuleTable& table, const UsageLog* usage) {
  GrammarStats s;
  s.rules = table.size();
  for (const SynchronousRule& r : table.rules()) ++s.histogram[{terminal_node_count(r.fragment), has_nonterminal(r)}];
  if (usage) s.usage = *usage;
  return s;
}

void write_stats(std::ostream& out, const GrammarStats& stats) {
  out << "rules\t" << stats.rules << '\n';
  out << "terminals\tnonterminal\tcount\n";
  for (const auto& [bin, count] : stats.histogram)
    out << bin.first << '\t' << (bin.second ? "yes" : "no") << '\t' << count << '\n';
  if (stats.usage) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "usage\tglue %.1f%%\tnonterminal %.1f%%\tterminal %.1f%%\t(%zu applications)\n",
                  stats.percent(UsageClass::kGlue), stats.percent(UsageClass::kNonterminal),
                  stats.percent(UsageClass::kTerminal), stats.usage->total());
    out << buf;
  }
}

}  // namespace snrg
