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

#ifndef SNRG_AMR_HPP_
#define SNRG_AMR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "snrg/text.hpp"

namespace snrg {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// Nonterminal markers are "#X#" or "#X<k>#".
bool is_nonterminal(std::string_view label);
std::string nonterminal_marker(int index);
// Returns k for "#X<k>#", 0 for "#X#", -1 for anything else.
int nonterminal_index(std::string_view label);

// Quoted strings, numbers, "-" and "+". Printed inline as PENMAN constants.
bool is_literal_label(std::string_view label);

struct Node {
  std::string variable;
  std::string label;
  bool constant = false;
  // Node of the uncollapsed input graph this node stands for.
  NodeId origin = kNoNode;
  // Input-graph nodes collapsed into this node, sorted.
  std::vector<NodeId> covers;
  // Partial translation carried by a nonterminal during decoding.
  std::optional<Tokens> translation;
};

struct Edge {
  NodeId source = kNoNode;
  std::string label;
  NodeId target = kNoNode;
  // Index of the input-graph edge this edge stems from.
  std::int32_t origin = -1;
};

// Rooted, directed, edge-labelled graph. Doubles as a rule fragment and as a
// partially collapsed decoding graph.
class AmrGraph {
 public:
  NodeId add_node(std::string label, std::string variable = {}, bool constant = false);
  // Nodes without tracking information get origin = own id, covers = {id}.
  NodeId add_node(Node node);
  std::size_t add_edge(NodeId source, std::string label, NodeId target);
  std::size_t add_edge(Edge edge);
  void set_root(NodeId root);

  NodeId root() const { return root_; }
  bool empty() const { return nodes_.empty(); }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const Edge& edge(std::size_t index) const { return edges_.at(index); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& out_edges(NodeId id) const { return out_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::size_t>& in_edges(NodeId id) const { return in_.at(static_cast<std::size_t>(id)); }
  bool contains(NodeId id) const { return id >= 0 && static_cast<std::size_t>(id) < nodes_.size(); }

  std::size_t nonterminal_count() const;
  int max_nonterminal_index() const;
  std::vector<std::string> edge_labels() const;

  // Throws ContractError on a broken invariant: missing root, dangling edge,
  // node unreachable from the root, duplicate variable, or a translation on a
  // terminal node.
  void validate() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  NodeId root_ = kNoNode;
};

// A rule's source side. Same representation, restricted to rooted and
// connected graphs.
using AmrFragment = AmrGraph;

struct FragmentMatch {
  std::vector<NodeId> binding;       // fragment node -> graph node
  std::vector<std::size_t> edges;    // fragment edge -> graph edge
  NodeId root_image = kNoNode;

  friend bool operator==(const FragmentMatch&, const FragmentMatch&) = default;
};

// PENMAN text. '#' comment lines are ignored; bare symbols that are not
// defined variables become constant nodes.
AmrGraph parse_penman(std::string_view text);

struct AddressedGraph {
  AmrGraph graph;
  // Root-relative child-index paths ("0", "0.1", "0.1.0") in source order.
  std::map<std::string, NodeId> addresses;
};
AddressedGraph parse_penman_addressed(std::string_view text);

// Single-line PENMAN. Re-entrant nodes are defined once and referenced by
// variable afterwards.
std::string serialize_penman(const AmrGraph& graph);

struct CanonicalForm {
  std::string text;
  std::vector<NodeId> order;         // nodes in discovery order
  std::vector<int> nonterminal;      // node -> renumbered marker index (0 = terminal)
};

// Label-only canonical PENMAN: isomorphic fragments give identical strings.
CanonicalForm canonicalize(const AmrGraph& fragment);
std::string canonical_form(const AmrGraph& fragment);
bool isomorphic(const AmrGraph& a, const AmrGraph& b);

// Precompiled search plan for one fragment.
class FragmentPattern {
 public:
  explicit FragmentPattern(const AmrFragment& fragment);

  std::size_t node_count() const { return labels_.size(); }
  const std::string& root_label() const { return labels_[static_cast<std::size_t>(root_)]; }
  bool root_is_nonterminal() const { return nonterminal_[static_cast<std::size_t>(root_)]; }

  std::vector<FragmentMatch> match(const AmrGraph& graph) const;
  std::vector<FragmentMatch> match_at(const AmrGraph& graph, NodeId anchor) const;

 private:
  struct Step {
    NodeId node;
    NodeId earlier;
    std::size_t via;     // fragment edge linking node to an earlier node
    bool outgoing;       // earlier --via--> node
  };
  struct FragEdge {
    NodeId source;
    std::string label;
    NodeId target;
  };

  bool compatible(NodeId fragment_node, const AmrGraph& graph, NodeId graph_node) const;
  void extend(const AmrGraph& graph, std::size_t step, std::vector<NodeId>& binding,
              std::vector<char>& used, std::vector<FragmentMatch>& out) const;
  bool assign_edges(const AmrGraph& graph, const std::vector<NodeId>& binding,
                    std::vector<std::size_t>& assigned) const;

  std::vector<std::string> labels_;
  std::vector<char> nonterminal_;
  std::vector<FragEdge> edges_;
  std::vector<Step> plan_;
  NodeId root_ = 0;
};

// All root-anchored embeddings, sorted by root image then binding.
std::vector<FragmentMatch> match_fragment(const AmrGraph& graph, const AmrFragment& fragment);

// Replaces every matched node by one fresh nonterminal carrying translation.
// Unmatched edges touching the matched set are re-attached to the fresh
// node; unmatched edges inside it become self-loops.
AmrGraph collapse_match(const AmrGraph& graph, const FragmentMatch& match, Tokens translation);

// Undirected shortest-path length; -1 when b is unreachable from a.
// Throws ContractError for unknown node ids.
int graph_distance(const AmrGraph& graph, NodeId a, NodeId b);
std::vector<std::vector<int>> all_pair_distances(const AmrGraph& graph);

}  // namespace snrg

#endif  // SNRG_AMR_HPP_
