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

#ifndef CAUSALKIT_FEATURES_HPP
#define CAUSALKIT_FEATURES_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "causalkit/error.hpp"
#include "causalkit/event_type_path.hpp"
#include "causalkit/graph.hpp"

namespace causalkit {

/// Per-node feature vectors of one shared dimension, keyed by node id.
class NodeFeatures {
 public:
  explicit NodeFeatures(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }
  bool contains(const std::string& id) const { return values_.count(id) != 0; }

  void set(const std::string& id, Eigen::VectorXd v) {
    if (static_cast<std::size_t>(v.size()) != dim_) {
      throw Error("node features: dimension mismatch for '" + id + "': " +
                  std::to_string(v.size()) + " vs " + std::to_string(dim_));
    }
    if (!v.allFinite()) {
      throw Error("node features: non-finite value for '" + id + "'");
    }
    values_[id] = std::move(v);
  }

  const Eigen::VectorXd& at(const std::string& id) const {
    const auto it = values_.find(id);
    if (it == values_.end()) throw Error("node features: no vector for '" + id + "'");
    return it->second;
  }

  const std::map<std::string, Eigen::VectorXd>& values() const { return values_; }

  /// Rows in the graph's node storage order.
  Eigen::MatrixXd matrix(const CausalGraph& graph) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(graph.node_count()),
                        static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
      out.row(static_cast<Eigen::Index>(i)) = at(graph.nodes()[i].id).transpose();
    }
    return out;
  }

 private:
  std::size_t dim_;
  std::map<std::string, Eigen::VectorXd> values_;
};

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Signed feature hashing of character 3- to 5-grams of the lowercased label
/// (padded with `<` and `>`), l2-normalized. The empty label maps to zero.
inline Eigen::VectorXd hash_encode(std::string_view label, std::size_t dim) {
  if (dim < 8) throw Error("hash_encode: dimension must be >= 8");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  if (label.empty()) return v;
  const std::string padded = "<" + detail::to_lower(label) + ">";
  for (std::size_t n = 3; n <= 5; ++n) {
    if (padded.size() < n) break;
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      const std::uint64_t h =
          detail::fnv1a64(std::string_view(padded).substr(i, n));
      const auto bucket = static_cast<Eigen::Index>(h % dim);
      v[bucket] += (h >> 63) ? -1.0 : 1.0;
    }
  }
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

inline NodeFeatures hash_features(const CausalGraph& graph, std::size_t dim) {
  NodeFeatures f(dim);
  for (const CausalNode& n : graph.nodes()) f.set(n.id, hash_encode(n.label, dim));
  return f;
}

inline constexpr std::size_t kStructuralFeatureDim = 6;

/// Label-free node descriptors: log in/out/total degree, local clustering
/// coefficient, share of incident Blocks edges, participant flag.
inline NodeFeatures structural_features(const CausalGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<double> in(n, 0.0), out(n, 0.0), blocks(n, 0.0);
  for (const CausalEdge& e : graph.edges()) {
    const auto h = graph.index_of(e.head);
    const auto t = graph.index_of(e.tail);
    if (!h || !t) continue;
    out[*h] += 1.0;
    in[*t] += 1.0;
    if (e.relation == Relation::Blocks) {
      blocks[*h] += 1.0;
      blocks[*t] += 1.0;
    }
  }
  const auto adj = detail::undirected_adjacency(graph);
  NodeFeatures f(kStructuralFeatureDim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = adj[i].size();
    double clustering = 0.0;
    if (k >= 2) {
      std::size_t links = 0;
      for (auto a = adj[i].begin(); a != adj[i].end(); ++a) {
        for (auto b = std::next(a); b != adj[i].end(); ++b) {
          if (adj[*a].count(*b)) ++links;
        }
      }
      clustering = 2.0 * static_cast<double>(links) /
                   (static_cast<double>(k) * static_cast<double>(k - 1));
    }
    const double incident = in[i] + out[i];
    Eigen::VectorXd v(kStructuralFeatureDim);
    v << std::log1p(in[i]), std::log1p(out[i]),
        std::log1p(static_cast<double>(k)), clustering,
        incident > 0.0 ? blocks[i] / incident : 0.0,
        graph.nodes()[i].kind == NodeKind::Participant ? 1.0 : 0.0;
    f.set(graph.nodes()[i].id, std::move(v));
  }
  return f;
}

}  // namespace causalkit

#endif  // CAUSALKIT_FEATURES_HPP
