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

#ifndef CAUSALKIT_DOT_HPP
#define CAUSALKIT_DOT_HPP

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "causalkit/graph.hpp"

namespace causalkit {

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

// DOT export. Nodes are sorted by id and edges by (head, tail, relation) so
// the text is byte-identical for equal graphs. Participants are orange
// ellipses, events red boxes, Blocks edges dashed.
inline std::string to_dot(const CausalGraph& graph) {
  std::string out = "digraph " + detail::dot_quote(graph.id()) + " {\n";
  if (graph.node_count() > 0) out += "  node [style=filled];\n";

  std::vector<const CausalNode*> nodes;
  for (const auto& n : graph.nodes()) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(),
            [](const CausalNode* a, const CausalNode* b) { return a->id < b->id; });
  for (const CausalNode* n : nodes) {
    out += "  " + detail::dot_quote(n->id) + " [label=" +
           detail::dot_quote(n->label);
    if (n->kind == NodeKind::Participant) {
      out += ", shape=ellipse, fillcolor=\"#f4a460\"";
    } else {
      out += ", shape=box, fillcolor=\"#f08080\"";
    }
    out += "];\n";
  }

  std::vector<const CausalEdge*> edges;
  for (const auto& e : graph.edges()) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(),
            [](const CausalEdge* a, const CausalEdge* b) {
              return std::tie(a->head, a->tail, a->relation) <
                     std::tie(b->head, b->tail, b->relation);
            });
  for (const CausalEdge* e : edges) {
    std::string label(relation_name(e->relation));
    if (e->sub_relation) {
      label += "-";
      label += sub_relation_name(*e->sub_relation);
    }
    out += "  " + detail::dot_quote(e->head) + " -> " +
           detail::dot_quote(e->tail) + " [label=" + detail::dot_quote(label);
    if (e->relation == Relation::Blocks) out += ", style=dashed";
    if (e->salience) out += ", penwidth=2";
    out += "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace causalkit

#endif  // CAUSALKIT_DOT_HPP
