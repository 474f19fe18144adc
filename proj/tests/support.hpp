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

// Random generators and brute-force oracles shared by the test binaries.
// Nothing here calls the matching, canonicalization or search code it is
// used to check.

#ifndef SNRG_TESTS_SUPPORT_HPP_
#define SNRG_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "snrg/amr.hpp"
#include "snrg/corpus.hpp"
#include "snrg/grammar.hpp"

namespace snrg::testing {

inline const char* kWantGoAmr = "(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-01 :ARG0 b))";

struct GraphShape {
  int min_nodes = 1;
  int max_nodes = 8;
  int extra_edges = 3;
  int concept_vocab = 20;
  int label_vocab = 4;
  bool allow_self_loops = false;
};

inline std::string concept_name(int i) { return "c" + std::to_string(i); }
inline std::string role_name(int i) { return "ARG" + std::to_string(i); }

// Random rooted graph: a random spanning arborescence from node 0 plus a few
// extra edges (re-entrancies, possibly cycles).
inline AmrGraph random_graph(std::mt19937& rng, const GraphShape& shape) {
  std::uniform_int_distribution<int> size(shape.min_nodes, shape.max_nodes);
  std::uniform_int_distribution<int> concept_dist(0, shape.concept_vocab - 1);
  std::uniform_int_distribution<int> label(0, shape.label_vocab - 1);
  int n = size(rng);
  AmrGraph g;
  for (int i = 0; i < n; ++i) g.add_node(concept_name(concept_dist(rng)), "n" + std::to_string(i));
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    g.add_edge(parent(rng), role_name(label(rng)), i);
  }
  if (n > 1) {
    std::uniform_int_distribution<int> any(0, n - 1);
    std::uniform_int_distribution<int> extra(0, shape.extra_edges);
    for (int k = extra(rng); k > 0; --k) {
      int a = any(rng), b = any(rng);
      if (a == b && !shape.allow_self_loops) continue;
      g.add_edge(a, role_name(label(rng)), b);
    }
  }
  g.set_root(0);
  return g;
}

// Same graph structure with nodes and edges inserted in a shuffled order.
inline AmrGraph shuffled_copy(const AmrGraph& g, std::mt19937& rng) {
  std::vector<NodeId> perm(g.node_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<NodeId> inverse(perm.size());
  AmrGraph out;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const Node& src = g.node(perm[i]);
    inverse[static_cast<std::size_t>(perm[i])] = out.add_node(src.label, "q" + std::to_string(i), src.constant);
  }
  std::vector<std::size_t> order(g.edge_count());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t e : order)
    out.add_edge(inverse[static_cast<std::size_t>(g.edge(e).source)], g.edge(e).label,
                 inverse[static_cast<std::size_t>(g.edge(e).target)]);
  out.set_root(inverse[static_cast<std::size_t>(g.root())]);
  return out;
}

inline std::string node_class(const AmrGraph& g, NodeId v) {
  return is_nonterminal(g.node(v).label) ? std::string("#NT#") : g.node(v).label;
}

inline std::multiset<std::tuple<NodeId, std::string, NodeId>> edge_multiset(const AmrGraph& g,
                                                                          const std::vector<NodeId>& map) {
  std::multiset<std::tuple<NodeId, std::string, NodeId>> out;
  for (const Edge& e : g.edges())
    out.emplace(map[static_cast<std::size_t>(e.source)], e.label, map[static_cast<std::size_t>(e.target)]);
  return out;
}

// Root-preserving isomorphism by trying every permutation.
inline bool brute_force_isomorphic(const AmrGraph& a, const AmrGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  std::size_t n = a.node_count();
  std::vector<NodeId> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  auto target = edge_multiset(b, identity);
  std::vector<NodeId> perm = identity;
  do {
    if (perm[static_cast<std::size_t>(a.root())] != b.root()) continue;
    bool ok = true;
    for (std::size_t v = 0; v < n && ok; ++v)
      ok = node_class(a, static_cast<NodeId>(v)) == node_class(b, perm[v]);
    if (ok && edge_multiset(a, perm) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Every injective node map under which labels agree (nonterminal to
// nonterminal) and each fragment edge finds its own graph edge.
inline std::set<std::vector<NodeId>> brute_force_embeddings(const AmrGraph& g, const AmrGraph& f) {
  std::set<std::vector<NodeId>> out;
  std::size_t k = f.node_count(), n = g.node_count();
  if (k > n) return out;
  std::vector<NodeId> binding(k);
  std::vector<char> used(n, 0);
  auto edges_fit = [&]() {
    std::map<std::tuple<NodeId, std::string, NodeId>, int> need;
    for (const Edge& e : f.edges())
      ++need[{binding[static_cast<std::size_t>(e.source)], e.label, binding[static_cast<std::size_t>(e.target)]}];
    for (auto& [key, count] : need) {
      int have = 0;
      for (const Edge& e : g.edges())
        if (std::tie(e.source, e.label, e.target) == std::tie(std::get<0>(key), std::get<1>(key), std::get<2>(key)))
          ++have;
      if (have < count) return false;
    }
    return true;
  };
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == k) {
      if (edges_fit()) out.insert(binding);
      return;
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (used[v]) continue;
      bool fnt = is_nonterminal(f.node(static_cast<NodeId>(i)).label);
      bool gnt = is_nonterminal(g.node(static_cast<NodeId>(v)).label);
      if (fnt != gnt) continue;
      if (!fnt && f.node(static_cast<NodeId>(i)).label != g.node(static_cast<NodeId>(v)).label) continue;
      used[v] = 1;
      binding[i] = static_cast<NodeId>(v);
      rec(i + 1);
      used[v] = 0;
    }
  };
  rec(0);
  return out;
}

// Floyd-Warshall over the undirected skeleton.
inline std::vector<std::vector<int>> floyd_warshall(const AmrGraph& g) {
  std::size_t n = g.node_count();
  const int inf = 1 << 20;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const Edge& e : g.edges()) {
    auto s = static_cast<std::size_t>(e.source), t = static_cast<std::size_t>(e.target);
    if (s != t) d[s][t] = d[t][s] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto& row : d)
    for (int& x : row)
      if (x >= inf) x = -1;
  return d;
}

// Rooted sub-fragment: BFS-connected node subset of a random graph.
inline AmrGraph random_subfragment(const AmrGraph& g, std::mt19937& rng, std::size_t max_nodes) {
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.node_count()) - 1);
  NodeId root = pick(rng);
  std::vector<NodeId> chosen{root};
  std::vector<char> in(g.node_count(), 0);
  in[static_cast<std::size_t>(root)] = 1;
  std::uniform_int_distribution<std::size_t> want(1, max_nodes);
  std::size_t target = want(rng);
  for (std::size_t guard = 0; chosen.size() < target && guard < 50; ++guard) {
    NodeId from = chosen[std::uniform_int_distribution<std::size_t>(0, chosen.size() - 1)(rng)];
    const auto& outs = g.out_edges(from);
    if (outs.empty()) continue;
    NodeId to = g.edge(outs[std::uniform_int_distribution<std::size_t>(0, outs.size() - 1)(rng)]).target;
    if (in[static_cast<std::size_t>(to)]) continue;
    in[static_cast<std::size_t>(to)] = 1;
    chosen.push_back(to);
  }
  AmrGraph f;
  std::vector<NodeId> remap(g.node_count(), kNoNode);
  for (NodeId v : chosen) remap[static_cast<std::size_t>(v)] = f.add_node(g.node(v).label);
  for (const Edge& e : g.edges()) {
    NodeId s = remap[static_cast<std::size_t>(e.source)], t = remap[static_cast<std::size_t>(e.target)];
    if (s != kNoNode && t != kNoNode && std::bernoulli_distribution(0.8)(rng)) f.add_edge(s, e.label, t);
  }
  f.set_root(0);
  // Keep only what stays reachable from the root along kept edges.
  std::vector<char> seen(f.node_count(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (std::size_t e : f.out_edges(v))
      if (!seen[static_cast<std::size_t>(f.edge(e).target)]) {
        seen[static_cast<std::size_t>(f.edge(e).target)] = 1;
        stack.push_back(f.edge(e).target);
      }
  }
  AmrGraph trimmed;
  std::vector<NodeId> keep(f.node_count(), kNoNode);
  for (NodeId v = 0; v < static_cast<NodeId>(f.node_count()); ++v)
    if (seen[static_cast<std::size_t>(v)]) keep[static_cast<std::size_t>(v)] = trimmed.add_node(f.node(v).label);
  for (const Edge& e : f.edges())
    if (keep[static_cast<std::size_t>(e.source)] != kNoNode && keep[static_cast<std::size_t>(e.target)] != kNoNode)
      trimmed.add_edge(keep[static_cast<std::size_t>(e.source)], e.label, keep[static_cast<std::size_t>(e.target)]);
  trimmed.set_root(0);
  return trimmed;
}


// "the boy wants to go" with links the boy -> boy, wants -> want-01, go -> go-01.
inline Instance want_go_instance() {
  Instance inst;
  inst.id = "want-go";
  inst.tokens = {"the", "boy", "wants", "to", "go"};
  inst.graph = parse_penman(kWantGoAmr);  // w = 0, b = 1, g = 2
  inst.alignment = {{0, 2, 1}, {2, 3, 0}, {4, 5, 2}};
  return inst;
}

// The four hand-derived rules of the running example: boy, want over a
// nonterminal, go over a nonterminal, and "the boy wants".
inline std::vector<SynchronousRule> want_go_rules() {
  return {
      make_rule(parse_penman("(b / boy)"), {"the", "boy"}, RuleKind::kInducedInitial),
      make_rule(parse_penman("(w / want-01 :ARG0 (X / #X#))"), {"#X#", "wants"}, RuleKind::kInducedCollapsed),
      make_rule(parse_penman("(X / #X# :ARG1 (g / go-01 :ARG0 X))"), {"#X#", "to", "go"}, RuleKind::kInducedCollapsed),
      make_rule(parse_penman("(w / want-01 :ARG0 (b / boy))"), {"the", "boy", "wants"}, RuleKind::kInducedInitial),
  };
}

// Random aligned instance: each aligned node owns a block of one or two
// tokens; blocks are shuffled and unaligned filler words are sprinkled in.
inline Instance random_instance(std::mt19937& rng, const GraphShape& shape, double align_prob = 0.8,
                                int max_filler = 3) {
  Instance inst;
  inst.graph = random_graph(rng, shape);
  std::vector<NodeId> aligned;
  for (NodeId v = 0; v < static_cast<NodeId>(inst.graph.node_count()); ++v)
    if (std::bernoulli_distribution(align_prob)(rng)) aligned.push_back(v);
  std::shuffle(aligned.begin(), aligned.end(), rng);
  std::uniform_int_distribution<int> filler(0, max_filler);
  std::uniform_int_distribution<int> filler_word(0, 2);
  auto sprinkle = [&]() {
    for (int k = filler(rng) / 2; k > 0; --k) inst.tokens.push_back("u" + std::to_string(filler_word(rng)));
  };
  for (NodeId v : aligned) {
    sprinkle();
    std::size_t begin = inst.tokens.size();
    const std::string& label = inst.graph.node(v).label;
    if (std::bernoulli_distribution(0.3)(rng)) inst.tokens.push_back("the");
    inst.tokens.push_back("w" + label.substr(1));
    inst.alignment.push_back({begin, inst.tokens.size(), v});
  }
  sprinkle();
  return inst;
}

// Bigram ARPA text over vocab plus <s>, </s> and <unk>. Unigrams are a random
// proper distribution; each seen bigram gets a random probability and every
// history a random back-off weight, so scores are arbitrary but well formed.
inline std::string bigram_arpa(std::vector<std::string> vocab, std::mt19937& rng, double bigram_density = 0.3) {
  vocab.push_back("</s>");
  vocab.push_back("<unk>");
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(vocab.size());
  for (double& x : w) x = u(rng);
  double total = std::accumulate(w.begin(), w.end(), 0.0);

  std::vector<std::string> histories = vocab;
  histories.push_back("<s>");
  std::vector<std::string> bigrams;
  for (const auto& h : histories) {
    if (h == "</s>") continue;
    for (const auto& x : vocab)
      if (std::bernoulli_distribution(bigram_density)(rng))
        bigrams.push_back(std::to_string(std::log10(u(rng))) + "\t" + h + " " + x);
  }
  std::string out = "\\data\\\nngram 1=" + std::to_string(vocab.size() + 1) + "\nngram 2=" +
                    std::to_string(bigrams.size()) + "\n\n\\1-grams:\n";
  out += "-99\t<s>\t" + std::to_string(std::log10(u(rng))) + "\n";
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out += std::to_string(std::log10(w[i] / total)) + "\t" + vocab[i];
    if (vocab[i] != "</s>") out += "\t" + std::to_string(std::log10(u(rng)));
    out += "\n";
  }
  out += "\n\\2-grams:\n";
  for (const auto& b : bigrams) out += b + "\n";
  out += "\n\\end\\\n";
  return out;
}

}  // namespace snrg::testing

#endif  // SNRG_TESTS_SUPPORT_HPP_
