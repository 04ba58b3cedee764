// Copyright 2026 The causalkit Authors.
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

#ifndef CAUSALKIT_GRAPH_HPP
#define CAUSALKIT_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "causalkit/error.hpp"
#include "causalkit/event_type_path.hpp"

namespace causalkit {

enum class NodeKind { Event, Participant };

enum class Relation { Enables, Blocks };

// Fine-grained causal sub-relations, grouped by the coarse relation they
// refine. WithoutEffect and Unknown exist under both relations.
enum class SubRelation {
  Begins,
  Adds,
  AllowsLetsAction,
  PreventsRest,
  WithoutEffect,
  Unknown,
  Ends,
  Disrupts,
  AllowsLetsRest,
  PreventsAction,
};

inline std::string_view relation_name(Relation r) {
  return r == Relation::Enables ? "ENABLES" : "BLOCKS";
}

inline std::string_view sub_relation_name(SubRelation s) {
  switch (s) {
    case SubRelation::Begins: return "BEGINS";
    case SubRelation::Adds: return "ADDS";
    case SubRelation::AllowsLetsAction: return "ALLOWS_LETS_ACTION";
    case SubRelation::PreventsRest: return "PREVENTS_REST";
    case SubRelation::WithoutEffect: return "WITHOUT_EFFECT";
    case SubRelation::Unknown: return "UNKNOWN";
    case SubRelation::Ends: return "ENDS";
    case SubRelation::Disrupts: return "DISRUPTS";
    case SubRelation::AllowsLetsRest: return "ALLOWS_LETS_REST";
    case SubRelation::PreventsAction: return "PREVENTS_ACTION";
  }
  return "UNKNOWN";
}

inline bool is_compatible(Relation r, SubRelation s) {
  switch (s) {
    case SubRelation::WithoutEffect:
    case SubRelation::Unknown:
      return true;
    case SubRelation::Begins:
    case SubRelation::Adds:
    case SubRelation::AllowsLetsAction:
    case SubRelation::PreventsRest:
      return r == Relation::Enables;
    case SubRelation::Ends:
    case SubRelation::Disrupts:
    case SubRelation::AllowsLetsRest:
    case SubRelation::PreventsAction:
      return r == Relation::Blocks;
  }
  return false;
}

namespace detail {

// Uppercase with every non-alphanumeric character dropped, so that
// "Allows/lets action", "ALLOWS_LETS_ACTION" and "allowsLetsAction" agree.
inline std::string relation_key(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) out += static_cast<char>(std::toupper(c));
  }
  return out;
}

}  // namespace detail

/// Case-insensitive relation lookup; "CAUSES" and friends are rejected.
inline Relation parse_relation(std::string_view text) {
  const std::string key = detail::relation_key(text);
  if (key == "ENABLES") return Relation::Enables;
  if (key == "BLOCKS") return Relation::Blocks;
  throw Error("unknown relation '" + std::string(text) + "'");
}

inline SubRelation parse_sub_relation(std::string_view text) {
  static const std::map<std::string, SubRelation> table = {
      {"BEGINS", SubRelation::Begins},
      {"ADDS", SubRelation::Adds},
      {"ALLOWSLETSACTION", SubRelation::AllowsLetsAction},
      {"PREVENTSREST", SubRelation::PreventsRest},
      {"WITHOUTEFFECT", SubRelation::WithoutEffect},
      {"UNKNOWN", SubRelation::Unknown},
      {"ENDS", SubRelation::Ends},
      {"DISRUPTS", SubRelation::Disrupts},
      {"ALLOWSLETSREST", SubRelation::AllowsLetsRest},
      {"PREVENTSACTION", SubRelation::PreventsAction},
  };
  const auto it = table.find(detail::relation_key(text));
  if (it == table.end()) {
    throw Error("unknown sub-relation '" + std::string(text) + "'");
  }
  return it->second;
}

/// Parses `ENABLES`, `Blocks`, `ENABLES-BEGINS`, ... into the coarse relation
/// and optional sub-relation. Compatibility is checked by validate(), not here.
inline std::pair<Relation, std::optional<SubRelation>> parse_relation_label(
    std::string_view text) {
  const std::size_t dash = text.find('-');
  if (dash == std::string_view::npos) return {parse_relation(text), {}};
  return {parse_relation(text.substr(0, dash)),
          parse_sub_relation(text.substr(dash + 1))};
}

inline double edge_scalar(Relation r) {
  return r == Relation::Enables ? 1.0 : -1.0;
}

inline double edge_scalar(std::string_view relation) {
  return edge_scalar(parse_relation(relation));
}

struct CausalNode {
  std::string id;
  std::string label;
  NodeKind kind = NodeKind::Event;
  std::vector<EventTypePath> event_types;

  friend bool operator==(const CausalNode&, const CausalNode&) = default;
};

struct CausalEdge {
  std::string head;
  std::string tail;
  Relation relation = Relation::Enables;
  std::optional<SubRelation> sub_relation;
  bool salience = false;

  friend bool operator==(const CausalEdge&, const CausalEdge&) = default;
};

/// Directed, possibly cyclic graph of event and participant nodes joined by
/// signed causal edges. Nodes are kept in insertion order; the id index
/// points at the first node carrying a given id.
class CausalGraph {
 public:
  CausalGraph() = default;
  explicit CausalGraph(std::string id) : id_(std::move(id)) {}

  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  const std::vector<CausalNode>& nodes() const { return nodes_; }
  const std::vector<CausalEdge>& edges() const { return edges_; }
  const std::map<std::string, std::string>& metadata() const {
    return metadata_;
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  void add_node(CausalNode node) {
    index_.try_emplace(node.id, nodes_.size());
    nodes_.push_back(std::move(node));
  }

  void add_edge(CausalEdge edge) { edges_.push_back(std::move(edge)); }

  void set_metadata(const std::string& key, std::string value) {
    metadata_[key] = std::move(value);
  }

  std::optional<std::string> metadata_value(const std::string& key) const {
    const auto it = metadata_.find(key);
    if (it == metadata_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::string& node_id) const {
    return index_.count(node_id) != 0;
  }

  std::optional<std::size_t> index_of(const std::string& node_id) const {
    const auto it = index_.find(node_id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const CausalNode& node(const std::string& node_id) const {
    const auto it = index_.find(node_id);
    if (it == index_.end()) throw Error("no node '" + node_id + "'");
    return nodes_[it->second];
  }

  CausalNode& mutable_node(std::size_t i) { return nodes_[i]; }

  friend bool operator==(const CausalGraph& a, const CausalGraph& b) {
    return a.id_ == b.id_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_ &&
           a.metadata_ == b.metadata_;
  }

 private:
  std::string id_;
  std::vector<CausalNode> nodes_;
  std::vector<CausalEdge> edges_;
  std::map<std::string, std::string> metadata_;
  std::unordered_map<std::string, std::size_t> index_;
};

// A schema graph has the same shape as an instance graph; its node labels are
// event-type names. See schema_label_issues() in ontology.hpp.
using SchemaGraph = CausalGraph;

struct Violation {
  std::string locus;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

inline ValidationReport validate(const CausalGraph& graph) {
  ValidationReport report;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < graph.nodes().size(); ++i) {
    const CausalNode& n = graph.nodes()[i];
    const std::string locus = "node " + std::to_string(i);
    if (n.id.empty()) report.push_back({locus, "empty node id"});
    if (n.label.empty()) report.push_back({locus, "empty label " + n.id});
    if (!seen.insert(n.id).second) {
      report.push_back({locus, "duplicate node id " + n.id});
    }
  }
  std::set<std::tuple<std::string, Relation, std::string>> triples;
  for (std::size_t i = 0; i < graph.edges().size(); ++i) {
    const CausalEdge& e = graph.edges()[i];
    const std::string locus =
        "edge " + std::to_string(i) + " (" + e.head + " -> " + e.tail + ")";
    if (!graph.contains(e.head)) {
      report.push_back({locus, "dangling head " + e.head});
    }
    if (!graph.contains(e.tail)) {
      report.push_back({locus, "dangling tail " + e.tail});
    }
    if (e.head == e.tail) report.push_back({locus, "self-loop " + e.head});
    if (e.sub_relation && !is_compatible(e.relation, *e.sub_relation)) {
      report.push_back({locus, "incompatible sub-relation"});
    }
    if (!triples.emplace(e.head, e.relation, e.tail).second) {
      report.push_back({locus, "duplicate triple"});
    }
  }
  return report;
}

inline void require_valid(const CausalGraph& graph) {
  const ValidationReport report = validate(graph);
  if (!report.empty()) {
    throw Error("graph '" + graph.id() + "' invalid: " +
                report.front().locus + ": " + report.front().message);
  }
}

/// Breadth-first linearization of a graph: nodes in visit order, then edges in
/// the order they were discovered while expanding nodes.
struct Linearization {
  std::vector<CausalNode> nodes;
  std::vector<CausalEdge> edges;
};

inline Linearization bfs_linearize(const CausalGraph& graph) {
  const std::size_t n = graph.node_count();
  // Work on the sorted id list so the result does not depend on storage order.
  std::vector<std::size_t> by_id(n);
  for (std::size_t i = 0; i < n; ++i) by_id[i] = i;
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
    return graph.nodes()[a].id < graph.nodes()[b].id;
  });

  std::vector<std::vector<std::size_t>> out_edges(n);
  std::vector<std::size_t> in_degree(n, 0);
  for (std::size_t i = 0; i < graph.edge_count(); ++i) {
    const CausalEdge& e = graph.edges()[i];
    const auto h = graph.index_of(e.head);
    const auto t = graph.index_of(e.tail);
    if (!h || !t) continue;
    out_edges[*h].push_back(i);
    ++in_degree[*t];
  }
  for (auto& list : out_edges) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      const CausalEdge& ea = graph.edges()[a];
      const CausalEdge& eb = graph.edges()[b];
      return std::tie(ea.tail, ea.relation) < std::tie(eb.tail, eb.relation);
    });
  }

  Linearization out;
  std::vector<bool> visited(n, false);
  auto run_from = [&](std::size_t root) {
    std::queue<std::size_t> frontier;
    visited[root] = true;
    frontier.push(root);
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop();
      out.nodes.push_back(graph.nodes()[u]);
      for (std::size_t ei : out_edges[u]) {
        const CausalEdge& e = graph.edges()[ei];
        out.edges.push_back(e);
        const std::size_t v = *graph.index_of(e.tail);
        if (!visited[v]) {
          visited[v] = true;
          frontier.push(v);
        }
      }
    }
  };

  for (std::size_t i : by_id) {
    if (in_degree[i] == 0 && !visited[i]) run_from(i);
  }
  for (std::size_t i : by_id) {
    if (!visited[i]) run_from(i);
  }
  return out;
}

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t enables_count = 0;
  std::size_t blocks_count = 0;
  double mean_degree = 0.0;
  double mean_clustering = 0.0;
  double transitivity = 0.0;
};

namespace detail {

// Undirected simple view: parallel and antiparallel edges collapse.
inline std::vector<std::set<std::size_t>> undirected_adjacency(
    const CausalGraph& graph) {
  std::vector<std::set<std::size_t>> adj(graph.node_count());
  for (const CausalEdge& e : graph.edges()) {
    const auto h = graph.index_of(e.head);
    const auto t = graph.index_of(e.tail);
    if (!h || !t || *h == *t) continue;
    adj[*h].insert(*t);
    adj[*t].insert(*h);
  }
  return adj;
}

}  // namespace detail

inline GraphStats graph_stats(const CausalGraph& graph) {
  if (graph.node_count() == 0) {
    throw Error("graph_stats: graph '" + graph.id() + "' has no nodes");
  }
  GraphStats s;
  s.node_count = graph.node_count();
  s.edge_count = graph.edge_count();
  for (const CausalEdge& e : graph.edges()) {
    (e.relation == Relation::Enables ? s.enables_count : s.blocks_count)++;
  }

  const auto adj = detail::undirected_adjacency(graph);
  std::size_t undirected_edges = 0;
  double clustering_sum = 0.0;
  double triangle_sum = 0.0;  // each triangle counted once per corner
  double triad_sum = 0.0;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    const std::size_t k = adj[v].size();
    undirected_edges += k;
    if (k < 2) continue;
    std::size_t links = 0;
    for (auto a = adj[v].begin(); a != adj[v].end(); ++a) {
      for (auto b = std::next(a); b != adj[v].end(); ++b) {
        if (adj[*a].count(*b)) ++links;
      }
    }
    const double pairs = static_cast<double>(k) * (k - 1) / 2.0;
    clustering_sum += static_cast<double>(links) / pairs;
    triangle_sum += static_cast<double>(links);
    triad_sum += pairs;
  }
  undirected_edges /= 2;
  const double n = static_cast<double>(s.node_count);
  s.mean_degree = 2.0 * static_cast<double>(undirected_edges) / n;
  s.mean_clustering = clustering_sum / n;
  s.transitivity = triad_sum > 0.0 ? triangle_sum / triad_sum : 0.0;
  return s;
}

/// Keeps only the salient edges and the nodes they touch.
inline CausalGraph salient_subgraph(const CausalGraph& graph) {
  CausalGraph out(graph.id());
  for (const auto& [k, v] : graph.metadata()) out.set_metadata(k, v);
  std::set<std::string> keep;
  for (const CausalEdge& e : graph.edges()) {
    if (e.salience) {
      keep.insert(e.head);
      keep.insert(e.tail);
    }
  }
  for (const CausalNode& n : graph.nodes()) {
    if (keep.count(n.id) && !out.contains(n.id)) out.add_node(n);
  }
  for (const CausalEdge& e : graph.edges()) {
    if (e.salience) out.add_edge(e);
  }
  return out;
}

}  // namespace causalkit

#endif  // CAUSALKIT_GRAPH_HPP
