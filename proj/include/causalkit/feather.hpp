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

#ifndef CAUSALKIT_FEATHER_HPP
#define CAUSALKIT_FEATHER_HPP

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "causalkit/error.hpp"
#include "causalkit/features.hpp"
#include "causalkit/graph.hpp"

namespace causalkit {

struct FeatherConfig {
  std::vector<int> scales = {1, 2};
  std::vector<double> theta = default_theta();

  // 8 evaluation points evenly spaced on (0, 5].
  static std::vector<double> default_theta() {
    std::vector<double> t;
    for (int i = 1; i <= 8; ++i) t.push_back(5.0 * i / 8.0);
    return t;
  }
};

/// Row-stochastic random-walk transition matrix on the undirected simple
/// view; isolated nodes stay in place.
inline Eigen::MatrixXd undirected_transition(const CausalGraph& graph) {
  const auto adj = detail::undirected_adjacency(graph);
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    const auto& nbrs = adj[static_cast<std::size_t>(u)];
    if (nbrs.empty()) {
      p(u, u) = 1.0;
      continue;
    }
    const double w = 1.0 / static_cast<double>(nbrs.size());
    for (std::size_t v : nbrs) p(u, static_cast<Eigen::Index>(v)) = w;
  }
  return p;
}

/// FEATHER graph embedding: for each walk scale r, feature f and point t,
/// the node-averaged characteristic function values
/// E[cos(t x_f(v))], E[sin(t x_f(v))] with v drawn from the r-step walk.
/// Layout is scale-major, then feature, then point, then (cos, sin).
inline Eigen::VectorXd feather_embed(const CausalGraph& graph,
                                     const NodeFeatures& features,
                                     const FeatherConfig& config = {}) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw Error("feather_embed: graph has no nodes");
  for (int r : config.scales) {
    if (r < 1) throw Error("feather_embed: walk scales must be >= 1");
  }
  const Eigen::MatrixXd x = features.matrix(graph);
  const Eigen::Index d = x.cols();
  const Eigen::MatrixXd p = undirected_transition(graph);

  const auto n_i = static_cast<Eigen::Index>(n);
  const auto points = static_cast<Eigen::Index>(config.theta.size());
  Eigen::VectorXd out(static_cast<Eigen::Index>(config.scales.size()) * d *
                      points * 2);
  Eigen::Index k = 0;
  for (int r : config.scales) {
    // Mean over start nodes of the r-step distribution: (1/n) 1^T P^r.
    Eigen::RowVectorXd reach = Eigen::RowVectorXd::Constant(n_i, 1.0 / n);
    for (int step = 0; step < r; ++step) reach = reach * p;
    for (Eigen::Index f = 0; f < d; ++f) {
      for (double t : config.theta) {
        double c = 0.0;
        double s = 0.0;
        for (Eigen::Index v = 0; v < n_i; ++v) {
          c += reach[v] * std::cos(t * x(v, f));
          s += reach[v] * std::sin(t * x(v, f));
        }
        out[k++] = c;
        out[k++] = s;
      }
    }
  }
  return out;
}

}  // namespace causalkit

#endif  // CAUSALKIT_FEATHER_HPP
