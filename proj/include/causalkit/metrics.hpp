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

#ifndef CAUSALKIT_METRICS_HPP
#define CAUSALKIT_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "causalkit/error.hpp"
#include "causalkit/matching.hpp"
#include "causalkit/ontology.hpp"

namespace causalkit {

using Clusters = std::map<std::string, std::size_t>;

namespace detail {

template <typename A, typename B>
void require_aligned(const std::map<std::string, A>& a,
                     const std::map<std::string, B>& b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(std::string(what) + ": misaligned ids (" + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()) + ")");
  }
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) {
      throw Error(std::string(what) + ": misaligned ids at '" + ia->first + "'");
    }
  }
}

template <typename Label>
struct Contingency {
  std::map<std::pair<std::size_t, Label>, double> cells;
  std::map<std::size_t, double> cluster_sizes;
  std::map<Label, double> label_sizes;
  double n = 0.0;
};

template <typename Label>
Contingency<Label> contingency(const Clusters& clusters,
                               const std::map<std::string, Label>& labels,
                               const char* what) {
  require_aligned(clusters, labels, what);
  Contingency<Label> t;
  for (const auto& [id, c] : clusters) {
    const Label& l = labels.at(id);
    t.cells[{c, l}] += 1.0;
    t.cluster_sizes[c] += 1.0;
    t.label_sizes[l] += 1.0;
    t.n += 1.0;
  }
  return t;
}

inline double choose2(double x) { return x * (x - 1.0) / 2.0; }

template <typename Map>
double entropy(const Map& sizes, double n) {
  double h = 0.0;
  for (const auto& [k, s] : sizes) {
    if (s > 0.0) h -= (s / n) * std::log(s / n);
  }
  return h;
}

}  // namespace detail

template <typename Label>
double purity(const Clusters& clusters, const std::map<std::string, Label>& labels) {
  const auto t = detail::contingency(clusters, labels, "purity");
  if (t.n == 0.0) throw Error("purity: no items");
  std::map<std::size_t, double> best;
  for (const auto& [key, count] : t.cells) {
    best[key.first] = std::max(best[key.first], count);
  }
  double total = 0.0;
  for (const auto& [c, b] : best) total += b;
  return total / t.n;
}

/// Pair-counting Rand index corrected for chance. Returns 1 when both
/// partitions are trivial in the same way (expected index equals maximum).
template <typename Label>
double adjusted_rand_index(const Clusters& clusters,
                           const std::map<std::string, Label>& labels) {
  const auto t = detail::contingency(clusters, labels, "adjusted_rand_index");
  if (t.n < 2.0) throw Error("adjusted_rand_index: need at least 2 items");
  double index = 0.0;
  for (const auto& [key, count] : t.cells) index += detail::choose2(count);
  double sum_a = 0.0;
  for (const auto& [c, s] : t.cluster_sizes) sum_a += detail::choose2(s);
  double sum_b = 0.0;
  for (const auto& [l, s] : t.label_sizes) sum_b += detail::choose2(s);
  const double expected = sum_a * sum_b / detail::choose2(t.n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

struct VMeasure {
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v = 0.0;
};

template <typename Label>
VMeasure v_measure(const Clusters& clusters,
                   const std::map<std::string, Label>& labels) {
  const auto t = detail::contingency(clusters, labels, "v_measure");
  if (t.n == 0.0) throw Error("v_measure: no items");
  const double h_labels = detail::entropy(t.label_sizes, t.n);
  const double h_clusters = detail::entropy(t.cluster_sizes, t.n);
  double h_labels_given_clusters = 0.0;
  double h_clusters_given_labels = 0.0;
  for (const auto& [key, count] : t.cells) {
    const double p = count / t.n;
    h_labels_given_clusters -= p * std::log(count / t.cluster_sizes.at(key.first));
    h_clusters_given_labels -= p * std::log(count / t.label_sizes.at(key.second));
  }
  VMeasure out;
  out.homogeneity = h_labels == 0.0 ? 1.0 : 1.0 - h_labels_given_clusters / h_labels;
  out.completeness =
      h_clusters == 0.0 ? 1.0 : 1.0 - h_clusters_given_labels / h_clusters;
  const double s = out.homogeneity + out.completeness;
  out.v = s == 0.0 ? 0.0 : 2.0 * out.homogeneity * out.completeness / s;
  return out;
}

/// Per cluster, the j event types present in the most member graphs (ties to
/// the lower vocabulary index); each graph scores the size of its overlap with
/// its cluster's set. Returns the mean score over all graphs. The OOV bucket
/// does not count as a type.
inline double event_cluster_purity(const Clusters& clusters,
                                   const std::map<std::string, EventVector>& vectors,
                                   std::size_t j = 10) {
  if (j < 1) throw Error("event_cluster_purity: j must be >= 1");
  detail::require_aligned(clusters, vectors, "event_cluster_purity");
  if (clusters.empty()) throw Error("event_cluster_purity: no items");

  std::map<std::size_t, std::map<std::size_t, std::size_t>> freq;
  for (const auto& [id, c] : clusters) {
    auto& f = freq[c];
    for (std::size_t t : vectors.at(id).known_types()) ++f[t];
  }
  std::map<std::size_t, std::set<std::size_t>> top;
  for (const auto& [c, f] : freq) {
    std::vector<std::pair<std::size_t, std::size_t>> ranked(f.begin(), f.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    auto& chosen = top[c];
    for (std::size_t i = 0; i < std::min(j, ranked.size()); ++i) {
      chosen.insert(ranked[i].first);
    }
  }
  double total = 0.0;
  for (const auto& [id, c] : clusters) {
    const auto& chosen = top[c];
    for (std::size_t t : vectors.at(id).known_types()) total += chosen.count(t);
  }
  return total / static_cast<double>(clusters.size());
}

/// Sum over relevant hit ranks r of precision@r, divided by
/// min(|relevant|, |ranked|).
inline double average_precision(const RankedMatches& ranked,
                                const std::set<std::string>& relevant) {
  if (relevant.empty()) throw Error("average_precision: empty relevant set");
  if (ranked.matches.empty()) return 0.0;
  double hits = 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < ranked.matches.size(); ++r) {
    if (relevant.count(ranked.matches[r].first)) {
      hits += 1.0;
      sum += hits / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(std::min(relevant.size(), ranked.matches.size()));
}

/// 1-based rank of the first relevant match, if any was retrieved.
inline std::optional<std::size_t> first_relevant_rank(
    const RankedMatches& ranked, const std::set<std::string>& relevant) {
  for (std::size_t r = 0; r < ranked.matches.size(); ++r) {
    if (relevant.count(ranked.matches[r].first)) return r + 1;
  }
  return std::nullopt;
}

inline double map_score(const std::vector<double>& average_precisions) {
  if (average_precisions.empty()) throw Error("map_score: no queries");
  double s = 0.0;
  for (double ap : average_precisions) s += ap;
  return s / static_cast<double>(average_precisions.size());
}

inline double mrr(const std::vector<std::optional<std::size_t>>& first_ranks) {
  if (first_ranks.empty()) throw Error("mrr: no queries");
  double s = 0.0;
  for (const auto& r : first_ranks) {
    if (r) s += 1.0 / static_cast<double>(*r);
  }
  return s / static_cast<double>(first_ranks.size());
}

/// Library ids whose topic equals the query topic.
inline std::set<std::string> topic_relevance(
    const std::string& query_topic,
    const std::map<std::string, std::string>& library_topics) {
  std::set<std::string> out;
  for (const auto& [id, topic] : library_topics) {
    if (topic == query_topic) out.insert(id);
  }
  return out;
}

/// Library ids sharing at least `threshold` known event types with the query.
inline std::set<std::string> event_overlap_relevance(
    const EventVector& query, const std::map<std::string, EventVector>& library,
    std::size_t threshold = 1) {
  const auto q = query.known_types();
  const std::set<std::size_t> qs(q.begin(), q.end());
  std::set<std::string> out;
  for (const auto& [id, v] : library) {
    std::size_t shared = 0;
    for (std::size_t t : v.known_types()) shared += qs.count(t);
    if (shared >= threshold && shared > 0) out.insert(id);
  }
  return out;
}

}  // namespace causalkit

#endif  // CAUSALKIT_METRICS_HPP
