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

#ifndef CAUSALKIT_TRAIN_HPP
#define CAUSALKIT_TRAIN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "causalkit/error.hpp"
#include "causalkit/features.hpp"
#include "causalkit/gat.hpp"
#include "causalkit/graph.hpp"
#include "causalkit/pagerank.hpp"
#include "causalkit/random.hpp"
#include "causalkit/similarity.hpp"

namespace causalkit {

enum class MaskingMode { Uniform, PageRank };

struct TrainConfig {
  int epochs = 3;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double dropout = 0.5;
  double mask_rate = 0.15;
  std::size_t masked_variants_sampled = 10;
  std::size_t masked_variants_used = 5;
  MaskingMode masking_mode = MaskingMode::Uniform;
  std::size_t hidden1 = 128;
  std::size_t hidden2 = 128;
  std::size_t output_dim = 128;
  std::uint64_t seed = 0;

  void check() const {
    if (!(mask_rate > 0.0 && mask_rate < 1.0)) {
      throw Error("train config: mask_rate must be in (0, 1)");
    }
    if (masked_variants_used == 0 ||
        masked_variants_used > masked_variants_sampled) {
      throw Error("train config: need 1 <= variants used <= variants sampled");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
      throw Error("train config: dropout must be in [0, 1)");
    }
    if (epochs < 1) throw Error("train config: epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw Error("train config: learning rate must be > 0");
  }
};

/// ceil(rate * n) with a floor of one node.
inline std::size_t mask_count(std::size_t n, double rate) {
  const auto c = static_cast<std::size_t>(
      std::ceil(rate * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(c, 1, n);
}

/// Draws the node indices to hide, sorted ascending. `weights` holds PageRank
/// weights in node order and is only read in PageRank mode.
inline std::vector<std::size_t> draw_mask(std::size_t n, const TrainConfig& config,
                                          const std::vector<double>& weights,
                                          Rng& rng) {
  if (n == 0) throw Error("mask: graph has no nodes");
  const std::size_t count = mask_count(n, config.mask_rate);
  std::vector<std::size_t> picked;
  if (config.masking_mode == MaskingMode::Uniform) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t k = 0; k < count; ++k) {
      std::swap(idx[k], idx[k + rng.uniform_index(n - k)]);
      picked.push_back(idx[k]);
    }
  } else {
    std::vector<double> w = weights;
    if (w.size() != n) throw Error("mask: PageRank weights do not cover the graph");
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t i = rng.weighted_index(w);
      picked.push_back(i);
      w[i] = 0.0;
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

struct MaskedFeatures {
  NodeFeatures features;
  std::vector<std::size_t> masked;  // node indices in storage order
};

/// Replaces the feature vectors of ceil(mask_rate * n) nodes (at least one)
/// with zeros, chosen uniformly or by PageRank weight.
inline MaskedFeatures mask_nodes(const NodeFeatures& features,
                                 const CausalGraph& graph,
                                 const TrainConfig& config, Rng& rng) {
  const std::vector<double> weights =
      config.masking_mode == MaskingMode::PageRank ? pagerank_vector(graph)
                                                   : std::vector<double>{};
  MaskedFeatures out{features, draw_mask(graph.node_count(), config, weights, rng)};
  for (std::size_t i : out.masked) {
    out.features.set(graph.nodes()[i].id,
                     Eigen::VectorXd::Zero(static_cast<Eigen::Index>(features.dim())));
  }
  return out;
}

/// One masked view of a graph: zeroed feature matrix plus the dropout draw
/// used for its forward pass.
struct MaskedView {
  Eigen::MatrixXd x;
  DropoutMasks dropout;
  bool dropout_active = false;
};

/// Mean of |1 - cos(y*, y)| over the views, with `target` held fixed.
inline double masked_loss(const GnnParams& params, const AttentionGraph& ag,
                          const std::vector<MaskedView>& views,
                          const Eigen::VectorXd& target) {
  double total = 0.0;
  GatCache cache;
  for (const MaskedView& v : views) {
    const Eigen::VectorXd y =
        gat_forward(params, ag, v.x, v.dropout_active ? &v.dropout : nullptr, cache);
    total += loss_cos_diff(y, target);
  }
  return total / static_cast<double>(views.size());
}

/// masked_loss and its analytic gradient.
inline std::pair<double, GnnParams> masked_loss_and_grad(
    const GnnParams& params, const AttentionGraph& ag,
    const std::vector<MaskedView>& views, const Eigen::VectorXd& target) {
  GnnParams grad = zero_like(params);
  double total = 0.0;
  const double scale = 1.0 / static_cast<double>(views.size());
  GatCache cache;
  for (const MaskedView& v : views) {
    const Eigen::VectorXd y =
        gat_forward(params, ag, v.x, v.dropout_active ? &v.dropout : nullptr, cache);
    total += loss_cos_diff(y, target);
    gat_backward(params, ag, cache, scale * loss_cos_diff_grad(y, target), grad);
  }
  return {total * scale, std::move(grad)};
}

/// Draws the sampled masked variants of one graph and keeps the first
/// `masked_variants_used`, each with its own dropout draw.
inline std::vector<MaskedView> draw_views(const AttentionGraph& ag,
                                          const Eigen::MatrixXd& x,
                                          const std::vector<double>& weights,
                                          const TrainConfig& config, Rng& rng) {
  std::vector<std::vector<std::size_t>> masks;
  for (std::size_t s = 0; s < config.masked_variants_sampled; ++s) {
    masks.push_back(draw_mask(ag.size(), config, weights, rng));
  }
  std::vector<MaskedView> views;
  for (std::size_t s = 0; s < config.masked_variants_used; ++s) {
    MaskedView v;
    v.x = x;
    for (std::size_t i : masks[s]) v.x.row(static_cast<Eigen::Index>(i)).setZero();
    v.dropout_active = config.dropout > 0.0;
    if (v.dropout_active) v.dropout = DropoutMasks::draw(ag, config.dropout, rng);
    views.push_back(std::move(v));
  }
  return views;
}

class AdamOptimizer {
 public:
  AdamOptimizer(const GnnParams& like, double lr, double beta1, double beta2,
                double eps)
      : m_(zero_like(like)), v_(zero_like(like)), lr_(lr), beta1_(beta1),
        beta2_(beta2), eps_(eps) {}

  void step(GnnParams& params, GnnParams& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    const auto p_ptr = slots(params);
    const auto g_ptr = slots(grad);
    const auto m_ptr = slots(m_);
    const auto v_ptr = slots(v_);
    for (std::size_t k = 0; k < p_ptr.size(); ++k) {
      for (Eigen::Index i = 0; i < p_ptr[k].second; ++i) {
        const double g = g_ptr[k].first[i];
        double& m = m_ptr[k].first[i];
        double& v = v_ptr[k].first[i];
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g * g;
        p_ptr[k].first[i] -= lr_ * (m / c1) / (std::sqrt(v / c2) + eps_);
      }
    }
  }

 private:
  static std::vector<std::pair<double*, Eigen::Index>> slots(GnnParams& p) {
    std::vector<std::pair<double*, Eigen::Index>> out;
    for_each_tensor(p, [&](const std::string&, double* d, Eigen::Index r,
                           Eigen::Index c) { out.emplace_back(d, r * c); });
    return out;
  }

  GnnParams m_;
  GnnParams v_;
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  int t_ = 0;
};

struct TrainingItem {
  CausalGraph graph;
  NodeFeatures features;
};

struct TrainResult {
  GnnParams params;
  // One entry per optimizer step (one graph per step).
  std::vector<double> loss_trace;
};

/// Self-supervised training. Each epoch visits the corpus in a seeded order;
/// each visit is one optimizer step on the mean masked-view loss against the
/// dropout-free, gradient-blocked full-graph embedding.
inline TrainResult train_gnn(const std::vector<TrainingItem>& corpus,
                             const TrainConfig& config) {
  config.check();
  if (corpus.empty()) throw Error("train_gnn: empty corpus");
  const std::size_t input_dim = corpus.front().features.dim();
  struct Prepared {
    AttentionGraph ag;
    Eigen::MatrixXd x;
    std::vector<double> weights;
  };
  std::vector<Prepared> items;
  for (const TrainingItem& item : corpus) {
    if (item.features.dim() != input_dim) {
      throw Error("train_gnn: graph '" + item.graph.id() +
                  "' has a different feature dimension");
    }
    if (item.graph.node_count() == 0) {
      throw Error("train_gnn: graph '" + item.graph.id() + "' has no nodes");
    }
    Prepared p{AttentionGraph::from(item.graph), item.features.matrix(item.graph),
               {}};
    if (config.masking_mode == MaskingMode::PageRank) {
      p.weights = pagerank_vector(item.graph);
    }
    items.push_back(std::move(p));
  }

  TrainResult result;
  result.params = init_params(
      {input_dim, config.hidden1, config.hidden2, config.output_dim}, config.seed);
  AdamOptimizer adam(result.params, config.learning_rate, config.beta1,
                     config.beta2, config.adam_eps);
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  GatCache cache;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const Prepared& item = items[idx];
      const Eigen::VectorXd target =
          gat_forward(result.params, item.ag, item.x, nullptr, cache);
      const std::vector<MaskedView> views =
          draw_views(item.ag, item.x, item.weights, config, rng);
      auto [loss, grad] = masked_loss_and_grad(result.params, item.ag, views, target);
      if (!std::isfinite(loss)) {
        throw Error("train_gnn: non-finite loss at step " +
                    std::to_string(result.loss_trace.size()));
      }
      result.loss_trace.push_back(loss);
      adam.step(result.params, grad);
    }
  }
  return result;
}

}  // namespace causalkit

#endif  // CAUSALKIT_TRAIN_HPP
