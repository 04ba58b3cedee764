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

#ifndef CAUSALKIT_KMEANS_HPP
#define CAUSALKIT_KMEANS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causalkit/error.hpp"
#include "causalkit/random.hpp"

namespace causalkit {

struct KMeansConfig {
  std::size_t k = 6;
  std::uint64_t seed = 0;
  int max_iterations = 300;
  double tolerance = 1e-4;  // max centroid shift
};

struct ClusterAssignment {
  std::map<std::string, std::size_t> assignment;
  std::vector<Eigen::VectorXd> centroids;
  double inertia = 0.0;
  // Inertia after every assignment step, in order.
  std::vector<double> inertia_trace;
  int iterations = 0;
};

namespace detail {

inline std::size_t nearest(const std::vector<Eigen::VectorXd>& centroids,
                           const Eigen::VectorXd& x, double* dist = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = (x - centroids[c]).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

}  // namespace detail

/// Lloyd's algorithm with greedy k-means++ seeding over items sorted by id. Empty
/// clusters take the point farthest from its current centroid.
inline ClusterAssignment kmeans(const std::map<std::string, Eigen::VectorXd>& items,
                                const KMeansConfig& config = {}) {
  const std::size_t k = config.k;
  if (k == 0) throw Error("kmeans: k must be >= 1");
  if (items.size() < k) {
    throw Error("kmeans: " + std::to_string(items.size()) +
                " items is fewer than k = " + std::to_string(k));
  }
  std::vector<const std::string*> ids;
  std::vector<Eigen::VectorXd> points;
  for (const auto& [id, v] : items) {
    if (!points.empty() && v.size() != points.front().size()) {
      throw Error("kmeans: dimension mismatch at '" + id + "'");
    }
    ids.push_back(&id);
    points.push_back(v);
  }
  const std::size_t n = points.size();

  Rng rng(config.seed);
  std::vector<Eigen::VectorXd> centroids;
  centroids.push_back(points[rng.uniform_index(n)]);
  // Greedy k-means++: draw several D^2-weighted candidates per step and keep
  // the one that leaves the lowest potential.
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = (points[i] - centroids[0]).squaredNorm();
  while (centroids.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t best = n;
    double best_potential = std::numeric_limits<double>::infinity();
    std::vector<double> best_d2;
    for (std::size_t t = 0; t < trials; ++t) {
      // All remaining points coincide with centroids: fall back to uniform.
      const std::size_t pick = total > 0.0 ? rng.weighted_index(d2) : rng.uniform_index(n);
      std::vector<double> cand(n);
      double potential = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cand[i] = std::min(d2[i], (points[i] - points[pick]).squaredNorm());
        potential += cand[i];
      }
      if (potential < best_potential) {
        best_potential = potential;
        best = pick;
        best_d2 = std::move(cand);
      }
    }
    centroids.push_back(points[best]);
    d2 = std::move(best_d2);
  }

  ClusterAssignment out;
  std::vector<std::size_t> label(n, 0);
  std::vector<double> dist(n, 0.0);
  auto assign = [&]() {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      label[i] = detail::nearest(centroids, points[i], &dist[i]);
      inertia += dist[i];
    }
    return inertia;
  };

  for (int it = 0; it < config.max_iterations; ++it) {
    out.inertia_trace.push_back(assign());
    ++out.iterations;

    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) ++sizes[label[i]];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      // Steal the point farthest from its centroid from a cluster that can
      // spare it.
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[label[i]] < 2) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) break;
      --sizes[label[far]];
      label[far] = c;
      dist[far] = 0.0;
      sizes[c] = 1;
    }

    std::vector<Eigen::VectorXd> next(k, Eigen::VectorXd::Zero(points[0].size()));
    for (std::size_t i = 0; i < n; ++i) next[label[i]] += points[i];
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) {
        next[c] = centroids[c];
        continue;
      }
      next[c] /= static_cast<double>(sizes[c]);
      shift = std::max(shift, (next[c] - centroids[c]).norm());
    }
    centroids.swap(next);
    if (shift < config.tolerance) break;
  }
  // Final assignment against the final centroids, so every item sits at its
  // nearest centroid.
  out.inertia = assign();
  out.inertia_trace.push_back(out.inertia);
  for (std::size_t i = 0; i < n; ++i) out.assignment[*ids[i]] = label[i];
  out.centroids = std::move(centroids);
  return out;
}

/// Ids of the `per_cluster` members nearest each centroid (ties by id).
inline std::vector<std::string> evaluation_subset(
    const ClusterAssignment& clusters,
    const std::map<std::string, Eigen::VectorXd>& items,
    std::size_t per_cluster = 25) {
  std::vector<std::vector<std::pair<double, std::string>>> members(
      clusters.centroids.size());
  for (const auto& [id, c] : clusters.assignment) {
    const auto it = items.find(id);
    if (it == items.end()) throw Error("evaluation_subset: no vector for '" + id + "'");
    members[c].emplace_back((it->second - clusters.centroids[c]).squaredNorm(), id);
  }
  std::vector<std::string> out;
  for (auto& m : members) {
    std::sort(m.begin(), m.end());
    for (std::size_t i = 0; i < std::min(per_cluster, m.size()); ++i) {
      out.push_back(m[i].second);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace causalkit

#endif  // CAUSALKIT_KMEANS_HPP
