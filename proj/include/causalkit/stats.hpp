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

#ifndef CAUSALKIT_STATS_HPP
#define CAUSALKIT_STATS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "causalkit/graph.hpp"

namespace causalkit {

struct Summary {
  double mean = 0.0;
  double max = 0.0;
  double stddev = 0.0;  // population
};

// Corpus-level statistics in the layout of a per-slice data table.
struct CorpusStats {
  std::size_t graphs = 0;
  Summary nodes;
  Summary edges;
  double mean_enables = 0.0;
  double mean_blocks = 0.0;
  double mean_degree = 0.0;
  double mean_clustering = 0.0;
  double mean_transitivity = 0.0;
};

namespace detail {

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  s.max = *std::max_element(xs.begin(), xs.end());
  double sq = 0.0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
  return s;
}

inline double mean_of(const std::vector<double>& xs) {
  return summarize(xs).mean;
}

}  // namespace detail

inline CorpusStats corpus_stats(std::span<const CausalGraph> graphs) {
  CorpusStats out;
  out.graphs = graphs.size();
  std::vector<double> nodes, edges, enables, blocks, degree, clustering, trans;
  for (const CausalGraph& g : graphs) {
    const GraphStats s = graph_stats(g);
    nodes.push_back(static_cast<double>(s.node_count));
    edges.push_back(static_cast<double>(s.edge_count));
    enables.push_back(static_cast<double>(s.enables_count));
    blocks.push_back(static_cast<double>(s.blocks_count));
    degree.push_back(s.mean_degree);
    clustering.push_back(s.mean_clustering);
    trans.push_back(s.transitivity);
  }
  out.nodes = detail::summarize(nodes);
  out.edges = detail::summarize(edges);
  out.mean_enables = detail::mean_of(enables);
  out.mean_blocks = detail::mean_of(blocks);
  out.mean_degree = detail::mean_of(degree);
  out.mean_clustering = detail::mean_of(clustering);
  out.mean_transitivity = detail::mean_of(trans);
  return out;
}

}  // namespace causalkit

#endif  // CAUSALKIT_STATS_HPP
