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

#ifndef CAUSALKIT_SIMILARITY_HPP
#define CAUSALKIT_SIMILARITY_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "causalkit/error.hpp"

namespace causalkit {

inline constexpr double kCosineEps = 1e-8;

inline void require_same_dim(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             const char* what) {
  if (a.size() != b.size()) {
    throw Error(std::string(what) + ": dimension mismatch " +
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

/// dot(a, b) / max(|a| |b|, 1e-8).
inline double cosine_similarity(const Eigen::VectorXd& a,
                                const Eigen::VectorXd& b) {
  require_same_dim(a, b, "cosine_similarity");
  return a.dot(b) / std::max(a.norm() * b.norm(), kCosineEps);
}

/// |1 - cos(pred, target)|, in [0, 2].
inline double loss_cos_diff(const Eigen::VectorXd& pred,
                            const Eigen::VectorXd& target) {
  require_same_dim(pred, target, "loss_cos_diff");
  return std::abs(1.0 - cosine_similarity(pred, target));
}

/// Gradient of loss_cos_diff with respect to `pred`; `target` is held fixed.
inline Eigen::VectorXd loss_cos_diff_grad(const Eigen::VectorXd& pred,
                                          const Eigen::VectorXd& target) {
  require_same_dim(pred, target, "loss_cos_diff_grad");
  const double na = pred.norm();
  const double nb = target.norm();
  const double denom = na * nb;
  Eigen::VectorXd dcos;
  if (denom > kCosineEps) {
    const double c = pred.dot(target) / denom;
    dcos = target / denom - (c / (na * na)) * pred;
  } else {
    dcos = target / kCosineEps;
  }
  const double c = pred.dot(target) / std::max(denom, kCosineEps);
  const double sign = (1.0 - c) >= 0.0 ? 1.0 : -1.0;
  return -sign * dcos;
}

}  // namespace causalkit

#endif  // CAUSALKIT_SIMILARITY_HPP
