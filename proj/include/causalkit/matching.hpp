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

#ifndef CAUSALKIT_MATCHING_HPP
#define CAUSALKIT_MATCHING_HPP

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "causalkit/error.hpp"
#include "causalkit/similarity.hpp"
#include "causalkit/tfidf.hpp"

namespace causalkit {

struct RankedMatches {
  std::string query_id;
  std::vector<std::pair<std::string, double>> matches;  // best first
};

/// Ranks every library entry by cosine similarity to the query; ties go to
/// the lexicographically smaller id. Works for dense and sparse vectors.
template <typename Vector>
RankedMatches rank_matches(const std::string& query_id, const Vector& query,
                           const std::map<std::string, Vector>& library,
                           std::size_t top_k = 5) {
  if (library.empty()) throw Error("rank_matches: empty library");
  RankedMatches out;
  out.query_id = query_id;
  for (const auto& [id, v] : library) {
    out.matches.emplace_back(id, cosine_similarity(query, v));
  }
  std::stable_sort(out.matches.begin(), out.matches.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (out.matches.size() > top_k) out.matches.resize(top_k);
  return out;
}

template <typename Vector>
RankedMatches rank_matches(const Vector& query,
                           const std::map<std::string, Vector>& library,
                           std::size_t top_k = 5) {
  return rank_matches(std::string{}, query, library, top_k);
}

/// Independent ranking per query, keyed by query id.
template <typename Vector>
std::map<std::string, RankedMatches> match_corpus(
    const std::map<std::string, Vector>& queries,
    const std::map<std::string, Vector>& library, std::size_t top_k = 5) {
  std::map<std::string, RankedMatches> out;
  for (const auto& [id, q] : queries) {
    out.emplace(id, rank_matches(id, q, library, top_k));
  }
  return out;
}

}  // namespace causalkit

#endif  // CAUSALKIT_MATCHING_HPP
