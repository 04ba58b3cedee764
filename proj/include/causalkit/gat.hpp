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

#ifndef CAUSALKIT_GAT_HPP
#define CAUSALKIT_GAT_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causalkit/embedding_io.hpp"
#include "causalkit/error.hpp"
#include "causalkit/features.hpp"
#include "causalkit/graph.hpp"
#include "causalkit/random.hpp"

namespace causalkit {

inline constexpr double kLeakySlope = 0.2;

struct GnnShape {
  std::size_t input_dim = 256;
  std::size_t hidden1 = 128;
  std::size_t hidden2 = 128;
  std::size_t output_dim = 128;
};

// Single-head graph attention layer. The attention logit for a message from
// `head` to `tail` is att_head.z_head + att_tail.z_tail + att_edge * sign.
struct GatLayer {
  Eigen::MatrixXd weight;    // in x out
  Eigen::VectorXd att_head;  // out
  Eigen::VectorXd att_tail;  // out
  Eigen::VectorXd att_edge;  // 1
  Eigen::VectorXd bias;      // out
};

struct GnnParams {
  GatLayer layer1;
  GatLayer layer2;
  Eigen::MatrixXd out_weight;  // hidden2 x output
  Eigen::VectorXd out_bias;    // output

  std::size_t input_dim() const {
    return static_cast<std::size_t>(layer1.weight.rows());
  }
  std::size_t output_dim() const {
    return static_cast<std::size_t>(out_weight.cols());
  }
};

/// Calls f(name, data, rows, cols) for every tensor, in a fixed order.
template <typename Params, typename F>
void for_each_tensor(Params& p, F&& f) {
  auto layer = [&](auto& l, const std::string& prefix) {
    f(prefix + ".weight", l.weight.data(), l.weight.rows(), l.weight.cols());
    f(prefix + ".att_head", l.att_head.data(), l.att_head.size(), Eigen::Index{1});
    f(prefix + ".att_tail", l.att_tail.data(), l.att_tail.size(), Eigen::Index{1});
    f(prefix + ".att_edge", l.att_edge.data(), l.att_edge.size(), Eigen::Index{1});
    f(prefix + ".bias", l.bias.data(), l.bias.size(), Eigen::Index{1});
  };
  layer(p.layer1, "layer1");
  layer(p.layer2, "layer2");
  f(std::string("out.weight"), p.out_weight.data(), p.out_weight.rows(),
    p.out_weight.cols());
  f(std::string("out.bias"), p.out_bias.data(), p.out_bias.size(), Eigen::Index{1});
}

inline GnnParams zero_like(const GnnParams& p) {
  GnnParams z = p;
  for_each_tensor(z, [](const std::string&, double* d, Eigen::Index r,
                        Eigen::Index c) { std::fill(d, d + r * c, 0.0); });
  return z;
}

inline std::size_t parameter_count(const GnnParams& p) {
  std::size_t n = 0;
  for_each_tensor(const_cast<GnnParams&>(p),
                  [&](const std::string&, double*, Eigen::Index r, Eigen::Index c) {
                    n += static_cast<std::size_t>(r * c);
                  });
  return n;
}

namespace detail {

inline GatLayer init_layer(std::size_t in, std::size_t out, Rng& rng) {
  auto glorot = [&](Eigen::Index rows, Eigen::Index cols, double fan_in,
                    double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-limit, limit);
    }
    return m;
  };
  const auto o = static_cast<Eigen::Index>(out);
  GatLayer l;
  l.weight = glorot(static_cast<Eigen::Index>(in), o, double(in), double(out));
  l.att_head = glorot(o, 1, 1.0, double(out));
  l.att_tail = glorot(o, 1, 1.0, double(out));
  l.att_edge = glorot(1, 1, 1.0, 1.0);
  l.bias = Eigen::VectorXd::Zero(o);
  return l;
}

}  // namespace detail

/// Glorot-uniform weights and attention vectors, zero biases.
inline GnnParams init_params(const GnnShape& shape, std::uint64_t seed) {
  if (shape.input_dim == 0 || shape.hidden1 == 0 || shape.hidden2 == 0 ||
      shape.output_dim == 0) {
    throw Error("init_params: all widths must be positive");
  }
  Rng rng(seed);
  GnnParams p;
  p.layer1 = detail::init_layer(shape.input_dim, shape.hidden1, rng);
  p.layer2 = detail::init_layer(shape.hidden1, shape.hidden2, rng);
  const double limit =
      std::sqrt(6.0 / static_cast<double>(shape.hidden2 + shape.output_dim));
  p.out_weight.resize(static_cast<Eigen::Index>(shape.hidden2),
                      static_cast<Eigen::Index>(shape.output_dim));
  for (Eigen::Index j = 0; j < p.out_weight.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.out_weight.rows(); ++i) {
      p.out_weight(i, j) = rng.uniform(-limit, limit);
    }
  }
  p.out_bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(shape.output_dim));
  return p;
}

/// Incoming message lists per target node, self-loop first (sign +1), then
/// in-edges in edge storage order.
struct AttentionGraph {
  struct Message {
    Eigen::Index source;
    double sign;
  };
  std::vector<std::vector<Message>> incoming;

  std::size_t size() const { return incoming.size(); }

  static AttentionGraph from(const CausalGraph& graph) {
    AttentionGraph ag;
    ag.incoming.resize(graph.node_count());
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
      ag.incoming[i].push_back({static_cast<Eigen::Index>(i), 1.0});
    }
    for (const CausalEdge& e : graph.edges()) {
      const auto h = graph.index_of(e.head);
      const auto t = graph.index_of(e.tail);
      if (!h || !t) continue;
      ag.incoming[*t].push_back(
          {static_cast<Eigen::Index>(*h), edge_scalar(e.relation)});
    }
    return ag;
  }
};

/// Per-layer dropout multipliers on attention coefficients (0 or 1/(1-p)),
/// shaped like AttentionGraph::incoming.
struct DropoutMasks {
  std::vector<std::vector<double>> layer1;
  std::vector<std::vector<double>> layer2;

  static DropoutMasks draw(const AttentionGraph& ag, double rate, Rng& rng) {
    DropoutMasks m;
    auto fill = [&](std::vector<std::vector<double>>& layer) {
      layer.resize(ag.size());
      for (std::size_t i = 0; i < ag.size(); ++i) {
        layer[i].resize(ag.incoming[i].size());
        for (double& k : layer[i]) {
          k = rng.uniform01() < rate ? 0.0 : 1.0 / (1.0 - rate);
        }
      }
    };
    fill(m.layer1);
    fill(m.layer2);
    return m;
  }
};

struct GatLayerCache {
  Eigen::MatrixXd input;
  Eigen::MatrixXd z;
  Eigen::MatrixXd pre;
  Eigen::MatrixXd output;
  std::vector<std::vector<double>> logit;
  std::vector<std::vector<double>> alpha;
  std::vector<std::vector<double>> keep;  // empty when dropout is off
};

struct GatCache {
  GatLayerCache layer1;
  GatLayerCache layer2;
  Eigen::VectorXd pooled;
  Eigen::VectorXd output;
};

namespace detail {

inline double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
inline double elu_grad(double x) { return x > 0.0 ? 1.0 : std::exp(x); }
inline double leaky(double x) { return x > 0.0 ? x : kLeakySlope * x; }
inline double leaky_grad(double x) { return x > 0.0 ? 1.0 : kLeakySlope; }

inline void layer_forward(const GatLayer& layer, const AttentionGraph& ag,
                          const Eigen::MatrixXd& input,
                          const std::vector<std::vector<double>>* keep,
                          GatLayerCache& c) {
  c.input = input;
  c.z = input * layer.weight;
  const Eigen::VectorXd head_score = c.z * layer.att_head;
  const Eigen::VectorXd tail_score = c.z * layer.att_tail;
  const double edge_w = layer.att_edge[0];
  const auto n = static_cast<Eigen::Index>(ag.size());
  c.pre.resize(n, c.z.cols());
  c.logit.assign(ag.size(), {});
  c.alpha.assign(ag.size(), {});
  c.keep = keep ? *keep : std::vector<std::vector<double>>{};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& msgs = ag.incoming[static_cast<std::size_t>(i)];
    auto& logit = c.logit[static_cast<std::size_t>(i)];
    auto& alpha = c.alpha[static_cast<std::size_t>(i)];
    logit.resize(msgs.size());
    alpha.resize(msgs.size());
    double peak = -INFINITY;
    for (std::size_t k = 0; k < msgs.size(); ++k) {
      logit[k] = head_score[msgs[k].source] + tail_score[i] + edge_w * msgs[k].sign;
      peak = std::max(peak, leaky(logit[k]));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < msgs.size(); ++k) {
      alpha[k] = std::exp(leaky(logit[k]) - peak);
      total += alpha[k];
    }
    Eigen::RowVectorXd acc = layer.bias.transpose();
    for (std::size_t k = 0; k < msgs.size(); ++k) {
      alpha[k] /= total;
      double a = alpha[k];
      if (keep) a *= (*keep)[static_cast<std::size_t>(i)][k];
      acc += a * c.z.row(msgs[k].source);
    }
    c.pre.row(i) = acc;
  }
  c.output = c.pre.unaryExpr([](double x) { return elu(x); });
}

// Accumulates parameter gradients into `grad` and returns dL/dinput.
inline Eigen::MatrixXd layer_backward(const GatLayer& layer,
                                      const AttentionGraph& ag,
                                      const GatLayerCache& c,
                                      const Eigen::MatrixXd& d_output,
                                      GatLayer& grad) {
  const Eigen::MatrixXd d_pre =
      d_output.cwiseProduct(c.pre.unaryExpr([](double x) { return elu_grad(x); }));
  grad.bias += d_pre.colwise().sum().transpose();

  Eigen::MatrixXd d_z = Eigen::MatrixXd::Zero(c.z.rows(), c.z.cols());
  const auto n = static_cast<Eigen::Index>(ag.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const auto& msgs = ag.incoming[ii];
    const auto& alpha = c.alpha[ii];
    const auto& logit = c.logit[ii];
    std::vector<double> d_alpha(msgs.size());
    double weighted = 0.0;
    for (std::size_t k = 0; k < msgs.size(); ++k) {
      const double keep = c.keep.empty() ? 1.0 : c.keep[ii][k];
      const Eigen::Index j = msgs[k].source;
      d_z.row(j) += (alpha[k] * keep) * d_pre.row(i);
      d_alpha[k] = keep * d_pre.row(i).dot(c.z.row(j));
      weighted += alpha[k] * d_alpha[k];
    }
    for (std::size_t k = 0; k < msgs.size(); ++k) {
      const double d_score = alpha[k] * (d_alpha[k] - weighted);
      const double d_logit = d_score * leaky_grad(logit[k]);
      const Eigen::Index j = msgs[k].source;
      grad.att_head += d_logit * c.z.row(j).transpose();
      grad.att_tail += d_logit * c.z.row(i).transpose();
      grad.att_edge[0] += d_logit * msgs[k].sign;
      d_z.row(j) += d_logit * layer.att_head.transpose();
      d_z.row(i) += d_logit * layer.att_tail.transpose();
    }
  }
  grad.weight += c.input.transpose() * d_z;
  return d_z * layer.weight.transpose();
}

}  // namespace detail

inline Eigen::VectorXd gat_forward(const GnnParams& params,
                                   const AttentionGraph& ag,
                                   const Eigen::MatrixXd& x,
                                   const DropoutMasks* dropout,
                                   GatCache& cache) {
  if (static_cast<std::size_t>(x.cols()) != params.input_dim()) {
    throw Error("gat: feature dimension " + std::to_string(x.cols()) +
                " does not match model input " +
                std::to_string(params.input_dim()));
  }
  if (ag.size() == 0) throw Error("gat: graph has no nodes");
  detail::layer_forward(params.layer1, ag, x, dropout ? &dropout->layer1 : nullptr,
                        cache.layer1);
  detail::layer_forward(params.layer2, ag, cache.layer1.output,
                        dropout ? &dropout->layer2 : nullptr, cache.layer2);
  cache.pooled = cache.layer2.output.colwise().mean().transpose();
  cache.output = params.out_weight.transpose() * cache.pooled + params.out_bias;
  return cache.output;
}

/// Backpropagates dL/d(output) through a cached forward pass, adding into
/// `grad`.
inline void gat_backward(const GnnParams& params, const AttentionGraph& ag,
                         const GatCache& cache, const Eigen::VectorXd& d_output,
                         GnnParams& grad) {
  grad.out_bias += d_output;
  grad.out_weight += cache.pooled * d_output.transpose();
  const Eigen::VectorXd d_pooled = params.out_weight * d_output;
  const auto n = static_cast<double>(ag.size());
  Eigen::MatrixXd d_h2 =
      (d_pooled.transpose() / n).replicate(static_cast<Eigen::Index>(ag.size()), 1);
  const Eigen::MatrixXd d_h1 =
      detail::layer_backward(params.layer2, ag, cache.layer2, d_h2, grad.layer2);
  detail::layer_backward(params.layer1, ag, cache.layer1, d_h1, grad.layer1);
}

/// Graph embedding from the two-layer attention network, mean pooling and
/// final linear map. Dropout on attention coefficients is drawn from
/// `dropout_seed` when active.
inline Eigen::VectorXd gat_embed(const GnnParams& params,
                                 const CausalGraph& graph,
                                 const NodeFeatures& features,
                                 bool dropout_active = false,
                                 std::uint64_t dropout_seed = 0,
                                 double dropout_rate = 0.5) {
  if (features.dim() != params.input_dim()) {
    throw Error("gat_embed: feature dimension " + std::to_string(features.dim()) +
                " does not match model input " +
                std::to_string(params.input_dim()));
  }
  const AttentionGraph ag = AttentionGraph::from(graph);
  GatCache cache;
  if (dropout_active) {
    Rng rng(dropout_seed);
    const DropoutMasks masks = DropoutMasks::draw(ag, dropout_rate, rng);
    return gat_forward(params, ag, features.matrix(graph), &masks, cache);
  }
  return gat_forward(params, ag, features.matrix(graph), nullptr, cache);
}

// Flat named-tensor file: `tensor <name> <rows> <cols>` followed by `rows`
// lines of `cols` values (column vectors are stored as N x 1).
inline void save_params(const GnnParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write parameter file '" + path + "'");
  for_each_tensor(const_cast<GnnParams&>(params),
                  [&](const std::string& name, double* d, Eigen::Index r,
                      Eigen::Index c) {
                    out << "tensor " << name << ' ' << r << ' ' << c << '\n';
                    for (Eigen::Index i = 0; i < r; ++i) {
                      for (Eigen::Index j = 0; j < c; ++j) {
                        if (j) out << ' ';
                        out << detail::format_double(d[j * r + i]);
                      }
                      out << '\n';
                    }
                  });
}

inline GnnParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open parameter file '" + path + "'");
  std::map<std::string, Eigen::MatrixXd> tensors;
  std::string word;
  while (in >> word) {
    if (word != "tensor") throw Error(path + ": expected 'tensor', got '" + word + "'");
    std::string name;
    Eigen::Index r = 0, c = 0;
    if (!(in >> name >> r >> c) || r < 1 || c < 1) {
      throw Error(path + ": bad tensor header");
    }
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) {
        std::string tok;
        double v = 0.0;
        if (!(in >> tok) || !detail::parse_double(tok, v) || !std::isfinite(v)) {
          throw Error(path + ": bad value in tensor '" + name + "'");
        }
        m(i, j) = v;
      }
    }
    tensors[name] = std::move(m);
  }
  auto take = [&](const std::string& name) -> Eigen::MatrixXd {
    const auto it = tensors.find(name);
    if (it == tensors.end()) throw Error(path + ": missing tensor '" + name + "'");
    return it->second;
  };
  auto vec = [&](const std::string& name) -> Eigen::VectorXd {
    const Eigen::MatrixXd m = take(name);
    if (m.cols() != 1) throw Error(path + ": tensor '" + name + "' is not a vector");
    return m.col(0);
  };
  auto layer = [&](const std::string& prefix) {
    GatLayer l;
    l.weight = take(prefix + ".weight");
    l.att_head = vec(prefix + ".att_head");
    l.att_tail = vec(prefix + ".att_tail");
    l.att_edge = vec(prefix + ".att_edge");
    l.bias = vec(prefix + ".bias");
    const Eigen::Index o = l.weight.cols();
    if (l.att_head.size() != o || l.att_tail.size() != o || l.bias.size() != o ||
        l.att_edge.size() != 1) {
      throw Error(path + ": inconsistent shapes in '" + prefix + "'");
    }
    return l;
  };
  GnnParams p;
  p.layer1 = layer("layer1");
  p.layer2 = layer("layer2");
  p.out_weight = take("out.weight");
  p.out_bias = vec("out.bias");
  if (p.layer2.weight.rows() != p.layer1.weight.cols() ||
      p.out_weight.rows() != p.layer2.weight.cols() ||
      p.out_bias.size() != p.out_weight.cols()) {
    throw Error(path + ": layer shapes do not chain");
  }
  return p;
}

}  // namespace causalkit

#endif  // CAUSALKIT_GAT_HPP
