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

#ifndef CAUSALKIT_PAGERANK_HPP
#define CAUSALKIT_PAGERANK_HPP

#include <map>
#include <string>
#include <vector>

#include "causalkit/error.hpp"
#include "causalkit/graph.hpp"

namespace causalkit {

/// PageRank weights in node storage order. Parallel edges add weight;
/// dangling mass is spread uniformly.
inline std::vector<double> pagerank_vector(const CausalGraph& graph,
                                           double damping = 0.85,
                                           int iterations = 100) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw Error("pagerank: graph has no nodes");
  std::vector<std::vector<std::size_t>> out(n);
  for (const CausalEdge& e : graph.edges()) {
    const auto h = graph.index_of(e.head);
    const auto t = graph.index_of(e.tail);
    if (h && t) out[*h].push_back(*t);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> x(n, inv_n), next(n);
  for (int it = 0; it < iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (out[u].empty()) dangling += x[u];
    }
    const double base = (1.0 - damping) * inv_n + damping * dangling * inv_n;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t u = 0; u < n; ++u) {
      if (out[u].empty()) continue;
      const double share = damping * x[u] / static_cast<double>(out[u].size());
      for (std::size_t v : out[u]) next[v] += share;
    }
    x.swap(next);
  }
  double total = 0.0;
  for (double w : x) total += w;
  for (double& w : x) w /= total;
  return x;
}

inline std::map<std::string, double> pagerank(const CausalGraph& graph,
                                              double damping = 0.85,
                                              int iterations = 100) {
  const std::vector<double> x = pagerank_vector(graph, damping, iterations);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < x.size(); ++i) out[graph.nodes()[i].id] = x[i];
  return out;
}

}  // namespace causalkit

#endif  // CAUSALKIT_PAGERANK_HPP
