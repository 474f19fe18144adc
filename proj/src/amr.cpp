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

#include "snrg/amr.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "snrg/error.hpp"

namespace snrg {

bool is_nonterminal(std::string_view label) {
  return nonterminal_index(label) >= 0;
}

int nonterminal_index(std::string_view label) {
  if (label.size() < 3 || label.front() != '#' || label.back() != '#' || label[1] != 'X') return -1;
  std::string_view digits = label.substr(2, label.size() - 3);
  if (digits.empty()) return 0;
  int value = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
    value = value * 10 + (c - '0');
  }
  return value;
}

std::string nonterminal_marker(int index) {
  return "#X" + std::to_string(index) + "#";
}

bool is_literal_label(std::string_view label) {
  if (label.empty()) return false;
  if (label.front() == '"') return true;
  if (label == "-" || label == "+") return true;
  bool digit = false;
  for (std::size_t i = 0; i < label.size(); ++i) {
    char c = label[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (!(c == '.' || ((c == '-' || c == '+') && i == 0))) {
      return false;
    }
  }
  return digit;
}

// ---------------------------------------------------------------- AmrGraph

NodeId AmrGraph::add_node(std::string label, std::string variable, bool constant) {
  Node n;
  n.label = std::move(label);
  n.variable = std::move(variable);
  n.constant = constant;
  return add_node(std::move(n));
}

NodeId AmrGraph::add_node(Node node) {
  auto id = static_cast<NodeId>(nodes_.size());
  if (node.origin == kNoNode) {
    node.origin = id;
    node.covers = {id};
  }
  nodes_.push_back(std::move(node));
  out_.emplace_back();
  in_.emplace_back();
  if (root_ == kNoNode) root_ = id;
  return id;
}

std::size_t AmrGraph::add_edge(NodeId source, std::string label, NodeId target) {
  Edge e;
  e.source = source;
  e.label = std::move(label);
  e.target = target;
  return add_edge(std::move(e));
}

std::size_t AmrGraph::add_edge(Edge edge) {
  if (!contains(edge.source) || !contains(edge.target))
    throw ContractError("edge endpoint is not a node of the graph");
  std::size_t index = edges_.size();
  if (edge.origin < 0) edge.origin = static_cast<std::int32_t>(index);
  out_[static_cast<std::size_t>(edge.source)].push_back(index);
  in_[static_cast<std::size_t>(edge.target)].push_back(index);
  edges_.push_back(std::move(edge));
  return index;
}

void AmrGraph::set_root(NodeId root) {
  if (!contains(root)) throw ContractError("root is not a node of the graph");
  root_ = root;
}

std::size_t AmrGraph::nonterminal_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(),
                                                [](const Node& n) { return is_nonterminal(n.label); }));
}

int AmrGraph::max_nonterminal_index() const {
  int best = 0;
  for (const Node& n : nodes_) best = std::max(best, nonterminal_index(n.label));
  return best;
}

std::vector<std::string> AmrGraph::edge_labels() const {
  std::set<std::string> labels;
  for (const Edge& e : edges_) labels.insert(e.label);
  return {labels.begin(), labels.end()};
}

void AmrGraph::validate() const {
  if (nodes_.empty()) throw ContractError("graph has no nodes");
  if (!contains(root_)) throw ContractError("graph has no root");
  std::unordered_set<std::string> vars;
  for (const Node& n : nodes_) {
    if (!n.variable.empty() && !vars.insert(n.variable).second)
      throw ContractError("duplicate variable '" + n.variable + "'");
    if (n.translation && !is_nonterminal(n.label))
      throw ContractError("terminal node '" + n.label + "' carries a translation");
  }
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<NodeId> stack{root_};
  seen[static_cast<std::size_t>(root_)] = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (std::size_t e : out_edges(v)) {
      NodeId t = edges_[e].target;
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = 1;
        stack.push_back(t);
      }
    }
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!seen[i]) throw ContractError("node '" + nodes_[i].label + "' is unreachable from the root");
}

// ---------------------------------------------------------------- parsing

namespace {

enum class Tok { kOpen, kClose, kSlash, kRole, kString, kSymbol, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

bool starts_with_marker(std::string_view line) {
  std::size_t end = 0;
  while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end])) && line[end] != '(' &&
         line[end] != ')')
    ++end;
  return is_nonterminal(line.substr(0, end));
}

// Comment lines become blanks so offsets stay valid.
std::string blank_comments(std::string_view text) {
  std::string out(text);
  std::size_t pos = 0;
  while (pos <= out.size()) {
    std::size_t eol = out.find('\n', pos);
    if (eol == std::string::npos) eol = out.size();
    std::size_t first = pos;
    while (first < eol && std::isspace(static_cast<unsigned char>(out[first]))) ++first;
    if (first < eol && out[first] == '#' && !starts_with_marker(std::string_view(out).substr(first, eol - first)))
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(first), out.begin() + static_cast<std::ptrdiff_t>(eol), ' ');
    pos = eol + 1;
  }
  return out;
}

bool is_delimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '/' || c == '"';
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (true) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    char c = text[i];
    if (c == '(') {
      out.push_back({Tok::kOpen, "(", i++});
    } else if (c == ')') {
      out.push_back({Tok::kClose, ")", i++});
    } else if (c == '/') {
      out.push_back({Tok::kSlash, "/", i++});
    } else if (c == '"') {
      std::size_t start = i++;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        ++i;
      }
      if (i >= text.size()) throw ParseError("unterminated string literal", start);
      ++i;
      out.push_back({Tok::kString, text.substr(start, i - start), start});
    } else {
      std::size_t start = i;
      while (i < text.size() && !is_delimiter(text[i])) ++i;
      std::string word = text.substr(start, i - start);
      if (word.front() == ':')
        out.push_back({Tok::kRole, word.substr(1), start});
      else
        out.push_back({Tok::kSymbol, std::move(word), start});
    }
  }
  out.push_back({Tok::kEnd, "", text.size()});
  return out;
}

class PenmanParser {
 public:
  explicit PenmanParser(std::string_view text) : text_(blank_comments(text)), tokens_(tokenize(text_)) {}

  AddressedGraph parse() {
    if (tokens_.front().kind == Tok::kEnd) throw ParseError("empty input", 0);
    // Variables may be referenced before their definition.
    for (std::size_t i = 0; i + 2 < tokens_.size(); ++i)
      if (tokens_[i].kind == Tok::kOpen && tokens_[i + 1].kind == Tok::kSymbol && tokens_[i + 2].kind == Tok::kSlash)
        declared_.insert(tokens_[i + 1].text);

    expect(Tok::kOpen, "expected '('");
    NodeId root = parse_node("0");
    if (peek().kind != Tok::kEnd) throw ParseError("trailing input after graph", peek().offset);

    for (const Pending& p : pending_) {
      NodeId target = p.target;
      if (target == kNoNode) {
        auto it = variables_.find(p.symbol);
        if (it == variables_.end()) throw ParseError("undefined variable '" + p.symbol + "'", p.offset);
        target = it->second;
        result_.addresses.emplace(p.address, target);
      }
      result_.graph.add_edge(p.source, p.role, target);
    }
    result_.graph.set_root(root);
    return std::move(result_);
  }

 private:
  struct Pending {
    NodeId source;
    std::string role;
    NodeId target;       // kNoNode until a forward reference is resolved
    std::string symbol;
    std::size_t offset;
    std::string address;
  };

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) throw ParseError(what, peek().offset);
    return next();
  }

  // Called after '(' has been consumed.
  NodeId parse_node(const std::string& address) {
    const Token& var = peek();
    if (var.kind != Tok::kSymbol) throw ParseError("expected variable", var.offset);
    next();
    if (variables_.count(var.text)) throw ParseError("duplicate variable '" + var.text + "'", var.offset);
    expect(Tok::kSlash, "missing '/' after variable");
    const Token& head = peek();
    if (head.kind != Tok::kSymbol && head.kind != Tok::kString)
      throw ParseError("expected concept", head.offset);
    next();
    NodeId id = result_.graph.add_node(head.text, var.text, false);
    variables_.emplace(var.text, id);
    result_.addresses.emplace(address, id);

    int child = 0;
    while (peek().kind == Tok::kRole) {
      const Token& role = next();
      if (role.text.empty()) throw ParseError("empty role", role.offset);
      std::string child_address = address + "." + std::to_string(child++);
      const Token& target = peek();
      Pending p{id, role.text, kNoNode, {}, target.offset, child_address};
      if (target.kind == Tok::kOpen) {
        next();
        p.target = parse_node(child_address);
      } else if (target.kind == Tok::kString) {
        next();
        p.target = result_.graph.add_node(target.text, {}, true);
        result_.addresses.emplace(child_address, p.target);
      } else if (target.kind == Tok::kSymbol) {
        next();
        if (declared_.count(target.text)) {
          p.symbol = target.text;
        } else {
          p.target = result_.graph.add_node(target.text, {}, true);
          result_.addresses.emplace(child_address, p.target);
        }
      } else {
        throw ParseError("missing target for role ':" + role.text + "'", target.offset);
      }
      pending_.push_back(std::move(p));
    }
    if (peek().kind == Tok::kEnd) throw ParseError("unbalanced parentheses", peek().offset);
    expect(Tok::kClose, "expected ')' or role");
    return id;
  }

  std::string text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::unordered_set<std::string> declared_;
  std::unordered_map<std::string, NodeId> variables_;
  std::vector<Pending> pending_;
  AddressedGraph result_;
};

bool valid_variable(const std::string& v) {
  if (v.empty() || v.front() == ':') return false;
  return std::none_of(v.begin(), v.end(), [](char c) { return is_delimiter(c); });
}

char variable_letter(const std::string& label) {
  for (char c : label)
    if (std::isalpha(static_cast<unsigned char>(c)))
      return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return 'x';
}

bool prints_inline(const AmrGraph& g, NodeId v, bool honour_constant_flag) {
  const Node& n = g.node(v);
  bool literal = is_literal_label(n.label) || (honour_constant_flag && n.constant);
  return literal && v != g.root() && g.out_edges(v).empty() && g.in_edges(v).size() == 1;
}

}  // namespace

AmrGraph parse_penman(std::string_view text) {
  return PenmanParser(text).parse().graph;
}

AddressedGraph parse_penman_addressed(std::string_view text) {
  return PenmanParser(text).parse();
}

std::string serialize_penman(const AmrGraph& graph) {
  graph.validate();
  std::size_t n = graph.node_count();

  std::unordered_set<std::string> bare_constants;
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v)
    if (prints_inline(graph, v, true) && graph.node(v).label.front() != '"') bare_constants.insert(graph.node(v).label);

  std::vector<std::string> names(n);
  std::unordered_set<std::string> taken;
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
    const std::string& var = graph.node(v).variable;
    if (valid_variable(var) && !bare_constants.count(var) && taken.insert(var).second) names[static_cast<std::size_t>(v)] = var;
  }
  std::map<std::string, int> counters;
  for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
    auto& name = names[static_cast<std::size_t>(v)];
    if (!name.empty()) continue;
    const std::string& label = graph.node(v).label;
    std::string base = is_nonterminal(label) ? "X" : std::string(1, variable_letter(label));
    do {
      int k = ++counters[base];
      name = k == 1 && base != "X" ? base : base + std::to_string(k);
    } while (bare_constants.count(name) || !taken.insert(name).second);
  }

  std::string out;
  std::vector<char> visited(n, 0);
  std::function<void(NodeId)> emit = [&](NodeId v) {
    visited[static_cast<std::size_t>(v)] = 1;
    out += "(" + names[static_cast<std::size_t>(v)] + " / " + graph.node(v).label;
    for (std::size_t e : graph.out_edges(v)) {
      NodeId t = graph.edge(e).target;
      out += " :" + graph.edge(e).label + " ";
      if (visited[static_cast<std::size_t>(t)]) {
        out += names[static_cast<std::size_t>(t)];
      } else if (prints_inline(graph, t, true)) {
        visited[static_cast<std::size_t>(t)] = 1;
        out += graph.node(t).label;
      } else {
        emit(t);
      }
    }
    out += ")";
  };
  emit(graph.root());
  return out;
}

// ---------------------------------------------------------------- canonical form

namespace {

struct Signature {
  int self;
  std::vector<std::pair<std::string_view, int>> out;
  std::vector<std::pair<std::string_view, int>> in;
  bool operator<(const Signature& o) const { return std::tie(self, out, in) < std::tie(o.self, o.out, o.in); }
  bool operator==(const Signature& o) const { return self == o.self && out == o.out && in == o.in; }
};

int count_distinct(const std::vector<int>& colors) {
  return static_cast<int>(std::set<int>(colors.begin(), colors.end()).size());
}

// Colour refinement over labelled in/out neighbourhoods. Colours are ranks of
// sorted signatures, so they are isomorphism invariant.
std::vector<int> refine(const AmrGraph& g, std::vector<int> colors) {
  std::size_t n = g.node_count();
  int classes = count_distinct(colors);
  while (true) {
    std::vector<Signature> sig(n);
    for (std::size_t v = 0; v < n; ++v) {
      sig[v].self = colors[v];
      for (std::size_t e : g.out_edges(static_cast<NodeId>(v)))
        sig[v].out.emplace_back(g.edge(e).label, colors[static_cast<std::size_t>(g.edge(e).target)]);
      for (std::size_t e : g.in_edges(static_cast<NodeId>(v)))
        sig[v].in.emplace_back(g.edge(e).label, colors[static_cast<std::size_t>(g.edge(e).source)]);
      std::sort(sig[v].out.begin(), sig[v].out.end());
      std::sort(sig[v].in.begin(), sig[v].in.end());
    }
    std::vector<Signature> unique = sig;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    std::vector<int> next(n);
    for (std::size_t v = 0; v < n; ++v)
      next[v] = static_cast<int>(std::lower_bound(unique.begin(), unique.end(), sig[v]) - unique.begin());
    int next_classes = static_cast<int>(unique.size());
    colors = std::move(next);
    if (next_classes == classes) return colors;
    classes = next_classes;
  }
}

std::vector<std::pair<std::string_view, NodeId>> neighbourhood(const AmrGraph& g, NodeId v, bool outgoing) {
  std::vector<std::pair<std::string_view, NodeId>> out;
  for (std::size_t e : outgoing ? g.out_edges(v) : g.in_edges(v))
    out.emplace_back(g.edge(e).label, outgoing ? g.edge(e).target : g.edge(e).source);
  std::sort(out.begin(), out.end());
  return out;
}

// Non-adjacent nodes with identical label and neighbourhoods: swapping them
// is an automorphism.
bool twins(const AmrGraph& g, NodeId a, NodeId b) {
  return g.node(a).label == g.node(b).label && neighbourhood(g, a, true) == neighbourhood(g, b, true) &&
         neighbourhood(g, a, false) == neighbourhood(g, b, false);
}

CanonicalForm emit_canonical(const AmrGraph& g, const std::vector<int>& colors) {
  std::size_t n = g.node_count();
  CanonicalForm form;
  form.nonterminal.assign(n, 0);
  std::vector<std::string> names(n);
  std::vector<char> visited(n, 0);
  std::map<char, int> counters;
  int nt_count = 0;

  std::function<void(NodeId)> emit = [&](NodeId v) {
    auto vi = static_cast<std::size_t>(v);
    visited[vi] = 1;
    form.order.push_back(v);
    std::string label;
    if (is_nonterminal(g.node(v).label)) {
      form.nonterminal[vi] = ++nt_count;
      names[vi] = "X" + std::to_string(nt_count);
      label = nonterminal_marker(nt_count);
    } else {
      char letter = variable_letter(g.node(v).label);
      int k = ++counters[letter];
      names[vi] = k == 1 ? std::string(1, letter) : letter + std::to_string(k);
      label = g.node(v).label;
    }
    form.text += "(" + names[vi] + " / " + label;
    std::vector<std::size_t> children = g.out_edges(v);
    std::sort(children.begin(), children.end(), [&](std::size_t a, std::size_t b) {
      const Edge& ea = g.edge(a);
      const Edge& eb = g.edge(b);
      return std::tie(ea.label, colors[static_cast<std::size_t>(ea.target)]) <
             std::tie(eb.label, colors[static_cast<std::size_t>(eb.target)]);
    });
    for (std::size_t e : children) {
      NodeId t = g.edge(e).target;
      form.text += " :" + g.edge(e).label + " ";
      if (visited[static_cast<std::size_t>(t)]) {
        form.text += names[static_cast<std::size_t>(t)];
      } else if (prints_inline(g, t, false)) {
        visited[static_cast<std::size_t>(t)] = 1;
        form.order.push_back(t);
        form.text += g.node(t).label;
      } else {
        emit(t);
      }
    }
    form.text += ")";
  };
  emit(g.root());
  return form;
}

void canonical_search(const AmrGraph& g, std::vector<int> colors, std::optional<CanonicalForm>& best) {
  colors = refine(g, std::move(colors));
  std::size_t n = g.node_count();
  std::map<int, std::vector<NodeId>> cells;
  for (std::size_t v = 0; v < n; ++v) cells[colors[v]].push_back(static_cast<NodeId>(v));
  auto cell = std::find_if(cells.begin(), cells.end(), [](const auto& kv) { return kv.second.size() > 1; });
  if (cell == cells.end()) {
    CanonicalForm form = emit_canonical(g, colors);
    if (!best || form.text < best->text) best = std::move(form);
    return;
  }
  int fresh = static_cast<int>(cells.size());
  std::vector<NodeId> tried;
  for (NodeId v : cell->second) {
    if (std::any_of(tried.begin(), tried.end(), [&](NodeId u) { return twins(g, u, v); })) continue;
    tried.push_back(v);
    std::vector<int> individualized = colors;
    individualized[static_cast<std::size_t>(v)] = fresh;
    canonical_search(g, std::move(individualized), best);
  }
}

}  // namespace

CanonicalForm canonicalize(const AmrGraph& fragment) {
  fragment.validate();
  std::vector<std::string> keys;
  keys.reserve(fragment.node_count());
  for (NodeId v = 0; v < static_cast<NodeId>(fragment.node_count()); ++v) {
    const std::string& label = fragment.node(v).label;
    std::string key = is_nonterminal(label) ? std::string("\x01") : "\x02" + label;
    if (v == fragment.root()) key.insert(key.begin(), '\x00');
    keys.push_back(std::move(key));
  }
  std::vector<std::string> unique = keys;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<int> colors;
  for (const auto& k : keys)
    colors.push_back(static_cast<int>(std::lower_bound(unique.begin(), unique.end(), k) - unique.begin()));
  std::optional<CanonicalForm> best;
  canonical_search(fragment, std::move(colors), best);
  return std::move(*best);
}

std::string canonical_form(const AmrGraph& fragment) {
  return canonicalize(fragment).text;
}

bool isomorphic(const AmrGraph& a, const AmrGraph& b) {
  return a.node_count() == b.node_count() && a.edge_count() == b.edge_count() &&
         canonical_form(a) == canonical_form(b);
}

// ---------------------------------------------------------------- matching

FragmentPattern::FragmentPattern(const AmrFragment& fragment) {
  if (fragment.empty()) throw ContractError("empty fragment");
  std::size_t n = fragment.node_count();
  for (const Node& node : fragment.nodes()) {
    labels_.push_back(node.label);
    nonterminal_.push_back(is_nonterminal(node.label));
  }
  for (const Edge& e : fragment.edges()) edges_.push_back({e.source, e.label, e.target});
  root_ = fragment.root();

  // Breadth-first over undirected adjacency so every later node hangs off an
  // already bound one.
  std::vector<char> seen(n, 0);
  std::deque<NodeId> queue{root_};
  seen[static_cast<std::size_t>(root_)] = 1;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    auto visit = [&](std::size_t e, NodeId other, bool outgoing) {
      if (seen[static_cast<std::size_t>(other)]) return;
      seen[static_cast<std::size_t>(other)] = 1;
      plan_.push_back({other, v, e, outgoing});
      queue.push_back(other);
    };
    for (std::size_t e : fragment.out_edges(v)) visit(e, fragment.edge(e).target, true);
    for (std::size_t e : fragment.in_edges(v)) visit(e, fragment.edge(e).source, false);
  }
  if (plan_.size() + 1 != n) throw ContractError("fragment is not connected");
}

bool FragmentPattern::compatible(NodeId fragment_node, const AmrGraph& graph, NodeId graph_node) const {
  const std::string& label = graph.node(graph_node).label;
  if (nonterminal_[static_cast<std::size_t>(fragment_node)]) return is_nonterminal(label);
  return labels_[static_cast<std::size_t>(fragment_node)] == label;
}

bool FragmentPattern::assign_edges(const AmrGraph& graph, const std::vector<NodeId>& binding,
                                   std::vector<std::size_t>& assigned) const {
  assigned.assign(edges_.size(), 0);
  std::vector<std::size_t> taken;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const FragEdge& fe = edges_[i];
    NodeId s = binding[static_cast<std::size_t>(fe.source)];
    NodeId t = binding[static_cast<std::size_t>(fe.target)];
    bool found = false;
    for (std::size_t e : graph.out_edges(s)) {
      const Edge& ge = graph.edge(e);
      if (ge.target != t || ge.label != fe.label) continue;
      if (std::find(taken.begin(), taken.end(), e) != taken.end()) continue;
      assigned[i] = e;
      taken.push_back(e);
      found = true;
      break;
    }
    if (!found) return false;
  }
  return true;
}

void FragmentPattern::extend(const AmrGraph& graph, std::size_t step, std::vector<NodeId>& binding,
                             std::vector<char>& used, std::vector<FragmentMatch>& out) const {
  if (step == plan_.size()) {
    FragmentMatch m;
    if (!assign_edges(graph, binding, m.edges)) return;
    m.binding = binding;
    m.root_image = binding[static_cast<std::size_t>(root_)];
    out.push_back(std::move(m));
    return;
  }
  const Step& s = plan_[step];
  const FragEdge& via = edges_[s.via];
  NodeId anchor = binding[static_cast<std::size_t>(s.earlier)];
  std::vector<NodeId> candidates;
  for (std::size_t e : s.outgoing ? graph.out_edges(anchor) : graph.in_edges(anchor)) {
    const Edge& ge = graph.edge(e);
    if (ge.label != via.label) continue;
    candidates.push_back(s.outgoing ? ge.target : ge.source);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (NodeId c : candidates) {
    if (used[static_cast<std::size_t>(c)] || !compatible(s.node, graph, c)) continue;
    binding[static_cast<std::size_t>(s.node)] = c;
    used[static_cast<std::size_t>(c)] = 1;
    extend(graph, step + 1, binding, used, out);
    used[static_cast<std::size_t>(c)] = 0;
    binding[static_cast<std::size_t>(s.node)] = kNoNode;
  }
}

std::vector<FragmentMatch> FragmentPattern::match_at(const AmrGraph& graph, NodeId anchor) const {
  std::vector<FragmentMatch> out;
  if (!graph.contains(anchor) || !compatible(root_, graph, anchor)) return out;
  if (labels_.size() > graph.node_count() || edges_.size() > graph.edge_count()) return out;
  std::vector<NodeId> binding(labels_.size(), kNoNode);
  std::vector<char> used(graph.node_count(), 0);
  binding[static_cast<std::size_t>(root_)] = anchor;
  used[static_cast<std::size_t>(anchor)] = 1;
  extend(graph, 0, binding, used, out);
  std::sort(out.begin(), out.end(), [](const FragmentMatch& a, const FragmentMatch& b) { return a.binding < b.binding; });
  return out;
}

std::vector<FragmentMatch> FragmentPattern::match(const AmrGraph& graph) const {
  std::vector<FragmentMatch> out;
  for (NodeId v = 0; v < static_cast<NodeId>(graph.node_count()); ++v) {
    auto here = match_at(graph, v);
    std::move(here.begin(), here.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<FragmentMatch> match_fragment(const AmrGraph& graph, const AmrFragment& fragment) {
  return FragmentPattern(fragment).match(graph);
}

// ---------------------------------------------------------------- collapse

AmrGraph collapse_match(const AmrGraph& graph, const FragmentMatch& match, Tokens translation) {
  std::size_t n = graph.node_count();
  if (match.binding.empty()) throw ContractError("empty match");
  std::vector<char> matched(n, 0);
  for (NodeId v : match.binding) {
    if (!graph.contains(v)) throw ContractError("match binds a node outside the graph");
    if (matched[static_cast<std::size_t>(v)]) throw ContractError("match binding is not injective");
    matched[static_cast<std::size_t>(v)] = 1;
  }
  if (!graph.contains(match.root_image) || !matched[static_cast<std::size_t>(match.root_image)])
    throw ContractError("match root image is not bound");
  std::vector<char> consumed(graph.edge_count(), 0);
  for (std::size_t e : match.edges) {
    if (e >= graph.edge_count()) throw ContractError("match uses an edge outside the graph");
    if (consumed[e]) throw ContractError("match uses an edge twice");
    const Edge& ge = graph.edge(e);
    if (!matched[static_cast<std::size_t>(ge.source)] || !matched[static_cast<std::size_t>(ge.target)])
      throw ContractError("matched edge leaves the matched node set");
    consumed[e] = 1;
  }

  Node fresh;
  int index = graph.max_nonterminal_index() + 1;
  fresh.label = nonterminal_marker(index);
  fresh.variable = "X" + std::to_string(index);
  fresh.origin = graph.node(match.root_image).origin;
  for (NodeId v : match.binding) {
    const auto& c = graph.node(v).covers;
    fresh.covers.insert(fresh.covers.end(), c.begin(), c.end());
  }
  std::sort(fresh.covers.begin(), fresh.covers.end());
  fresh.translation = std::move(translation);

  AmrGraph out;
  std::vector<NodeId> remap(n, kNoNode);
  NodeId fresh_id = kNoNode;
  for (std::size_t v = 0; v < n; ++v) {
    if (matched[v]) {
      if (fresh_id == kNoNode) fresh_id = out.add_node(fresh);
      remap[v] = fresh_id;
    } else {
      remap[v] = out.add_node(graph.node(static_cast<NodeId>(v)));
    }
  }
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    if (consumed[e]) continue;
    Edge copy = graph.edge(e);
    copy.source = remap[static_cast<std::size_t>(copy.source)];
    copy.target = remap[static_cast<std::size_t>(copy.target)];
    out.add_edge(std::move(copy));
  }
  out.set_root(remap[static_cast<std::size_t>(graph.root())]);
  return out;
}

// ---------------------------------------------------------------- distances

namespace {

std::vector<int> bfs_distances(const AmrGraph& g, NodeId source) {
  std::vector<int> dist(g.node_count(), -1);
  std::deque<NodeId> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    auto relax = [&](NodeId u) {
      if (dist[static_cast<std::size_t>(u)] >= 0) return;
      dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
      queue.push_back(u);
    };
    for (std::size_t e : g.out_edges(v)) relax(g.edge(e).target);
    for (std::size_t e : g.in_edges(v)) relax(g.edge(e).source);
  }
  return dist;
}

}  // namespace

int graph_distance(const AmrGraph& graph, NodeId a, NodeId b) {
  if (!graph.contains(a) || !graph.contains(b)) throw ContractError("unknown node id");
  return bfs_distances(graph, a)[static_cast<std::size_t>(b)];
}

std::vector<std::vector<int>> all_pair_distances(const AmrGraph& graph) {
  std::vector<std::vector<int>> out;
  out.reserve(graph.node_count());
  for (NodeId v = 0; v < static_cast<NodeId>(graph.node_count()); ++v) out.push_back(bfs_distances(graph, v));
  return out;
}

}  // namespace snrg
