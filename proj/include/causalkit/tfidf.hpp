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

#ifndef CAUSALKIT_TFIDF_HPP
#define CAUSALKIT_TFIDF_HPP

#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "causalkit/error.hpp"
#include "causalkit/similarity.hpp"

namespace causalkit {

struct SparseVector {
  std::map<std::size_t, double> weights;

  double norm() const {
    double s = 0.0;
    for (const auto& [i, w] : weights) s += w * w;
    return std::sqrt(s);
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto ia = a.weights.begin();
  auto ib = b.weights.begin();
  while (ia != a.weights.end() && ib != b.weights.end()) {
    if (ia->first < ib->first) ++ia;
    else if (ib->first < ia->first) ++ib;
    else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

inline double cosine_similarity(const SparseVector& a, const SparseVector& b) {
  return dot(a, b) / std::max(a.norm() * b.norm(), kCosineEps);
}

/// Lowercased maximal alphanumeric runs. Bytes >= 0x80 count as word bytes so
/// UTF-8 words stay whole.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      cur += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

struct TfidfResult {
  std::vector<SparseVector> vectors;
  std::vector<std::string> vocabulary;  // lexicographic
  std::vector<double> idf;              // aligned with vocabulary
};

/// Raw term counts times smooth idf ln((1 + N) / (1 + df)) + 1, then
/// l2-normalized per document.
inline TfidfResult tfidf_fit_transform(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error("tfidf: no documents");
  std::vector<std::map<std::string, double>> counts(texts.size());
  std::map<std::string, std::size_t> df;
  for (std::size_t d = 0; d < texts.size(); ++d) {
    for (auto& tok : tokenize(texts[d])) counts[d][tok] += 1.0;
    for (const auto& [tok, c] : counts[d]) ++df[tok];
  }
  TfidfResult out;
  std::map<std::string, std::size_t> index;
  const double n = static_cast<double>(texts.size());
  for (const auto& [tok, f] : df) {
    index[tok] = out.vocabulary.size();
    out.vocabulary.push_back(tok);
    out.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(f))) + 1.0);
  }
  for (const auto& c : counts) {
    SparseVector v;
    for (const auto& [tok, tf] : c) {
      const std::size_t i = index[tok];
      v.weights[i] = tf * out.idf[i];
    }
    const double norm = v.norm();
    if (norm > 0.0) {
      for (auto& [i, w] : v.weights) w /= norm;
    }
    out.vectors.push_back(std::move(v));
  }
  return out;
}

inline Eigen::VectorXd to_dense(const SparseVector& v, std::size_t dim) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& [i, w] : v.weights) out[static_cast<Eigen::Index>(i)] = w;
  return out;
}

}  // namespace causalkit

#endif  // CAUSALKIT_TFIDF_HPP
