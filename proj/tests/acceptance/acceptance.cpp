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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "causalkit.hpp"
#include "cli.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace ck = causalkit;
namespace fs = std::filesystem;
using ck::testing::data_path;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

std::string item(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "i%03zu", i);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome metric_oracles() {
  constexpr double kTol = 1e-9;
  constexpr double kBudget = 10.0;
  const auto t0 = Clock::now();
  ck::Rng rng(101);
  double worst = 0.0;
  std::size_t event_mismatch = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(11);
    std::vector<int> c(n), y(n);
    const std::size_t kc = 1 + rng.uniform_index(4), ky = 1 + rng.uniform_index(4);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = static_cast<int>(rng.uniform_index(kc));
      y[i] = static_cast<int>(rng.uniform_index(ky));
    }
    ck::Clusters clusters;
    std::map<std::string, int> labels;
    std::map<std::string, ck::EventVector> events;
    std::vector<std::set<int>> types(n);
    const std::size_t vocab = 6;
    for (std::size_t i = 0; i < n; ++i) {
      clusters[item(i)] = static_cast<std::size_t>(c[i]);
      labels[item(i)] = y[i];
      ck::EventVector v;
      v.bits.assign(vocab + 1, false);
      for (std::size_t t = 0; t < vocab; ++t) {
        if (rng.uniform01() < 0.35) {
          v.bits[t] = true;
          types[i].insert(static_cast<int>(t));
        }
      }
      v.bits[vocab] = rng.uniform01() < 0.2;
      events[item(i)] = v;
    }
    const auto vm = ck::v_measure(clusters, labels);
    const auto ovm = ck::oracle::v_measure(c, y);
    worst = std::max({worst, std::abs(ck::purity(clusters, labels) - ck::oracle::purity(c, y)),
                      std::abs(ck::adjusted_rand_index(clusters, labels) - ck::oracle::ari(c, y)),
                      std::abs(vm.homogeneity - ovm.h), std::abs(vm.completeness - ovm.c),
                      std::abs(vm.v - ovm.v)});
    const int j = 1 + static_cast<int>(rng.uniform_index(6));
    if (ck::event_cluster_purity(clusters, events, static_cast<std::size_t>(j)) !=
        ck::oracle::event_purity(c, types, j)) {
      ++event_mismatch;
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = worst <= kTol && event_mismatch == 0 && elapsed < kBudget;
  o.detail = "200 partitions, max |diff| " + fmt("%.3g", worst) + " (tol 1e-9), event purity mismatches " +
             std::to_string(event_mismatch) + " (exact), " + fmt("%.2f", elapsed) + " s (< 10 s)";
  return o;
}

Outcome loss_properties() {
  constexpr double kTol = 1e-12;
  ck::Rng rng(202);
  std::size_t bad = 0;
  double worst_self = 0, worst_neg = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform_index(64));
    Eigen::VectorXd a(d), b(d);
    const double sa = std::exp(rng.uniform(-10, 10)), sb = std::exp(rng.uniform(-10, 10));
    for (Eigen::Index k = 0; k < d; ++k) {
      a[k] = sa * rng.normal();
      b[k] = sb * rng.normal();
    }
    const double l = ck::loss_cos_diff(a, b);
    if (!(l >= 0.0 && l <= 2.0)) ++bad;
    worst_self = std::max(worst_self, std::abs(ck::loss_cos_diff(a, a)));
    worst_neg = std::max(worst_neg, std::abs(ck::loss_cos_diff(a, Eigen::VectorXd(-a)) - 2.0));
    if (ck::cosine_similarity(Eigen::VectorXd::Zero(d), b) != 0.0) ++bad;
    if (ck::cosine_similarity(a, Eigen::VectorXd::Zero(d)) != 0.0) ++bad;
  }
  Outcome o;
  o.pass = bad == 0 && worst_self <= kTol && worst_neg <= kTol;
  o.detail = "1000 pairs, range violations " + std::to_string(bad) + ", max |loss(v,v)| " +
             fmt("%.3g", worst_self) + ", max |loss(v,-v)-2| " + fmt("%.3g", worst_neg) +
             " (tol 1e-12), zero-vector cosine exactly 0";
  return o;
}

Outcome gradient_fidelity() {
  constexpr double kTol = 1e-3;
  constexpr double kBudget = 30.0;
  const auto t0 = Clock::now();
  ck::Rng rng(303);
  double worst = 0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(6);
    const ck::CausalGraph g = ck::testing::random_graph(rng, n, 0.4, "grad-" + std::to_string(trial));
    ck::TrainConfig config;
    config.masking_mode = trial % 2 ? ck::MaskingMode::PageRank : ck::MaskingMode::Uniform;
    const auto check = ck::testing::finite_difference_check(
        ck::testing::small_params(8, static_cast<std::uint64_t>(trial)), g, ck::hash_features(g, 8),
        config, static_cast<std::uint64_t>(1000 + trial), 1e-4, 1e-6);
    worst = std::max(worst, check.max_rel_error);
    checked += check.checked;
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = worst < kTol && elapsed < kBudget;
  o.detail = "20 graphs (<= 6 nodes), " + std::to_string(checked) + " partials, h 1e-4, max rel err " +
             fmt("%.3g", worst) + " (< 1e-3, denominator floor 1e-6), " + fmt("%.2f", elapsed) +
             " s (< 30 s)";
  return o;
}

Outcome permutation_invariance() {
  constexpr double kTol = 1e-6;
  ck::Rng rng(404);
  const ck::GnnParams params = ck::init_params({32, 128, 128, 128}, 9);
  double worst_feather = 0, worst_gat = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const ck::CausalGraph g = ck::testing::random_graph(rng, 1 + rng.uniform_index(12), 0.3);
    const auto [h, names] = ck::testing::relabel(g, rng);
    const auto fg = ck::hash_features(g, 32), fh = ck::hash_features(h, 32);
    worst_feather = std::max(worst_feather,
                             (ck::feather_embed(g, fg) - ck::feather_embed(h, fh)).cwiseAbs().maxCoeff());
    worst_gat = std::max(worst_gat,
                         (ck::gat_embed(params, g, fg) - ck::gat_embed(params, h, fh)).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.pass = worst_feather <= kTol && worst_gat <= kTol;
  o.detail = "50 graphs, max |diff| FEATHER " + fmt("%.3g", worst_feather) + ", GAT " +
             fmt("%.3g", worst_gat) + " (tol 1e-6)";
  return o;
}

Outcome training_sanity() {
  constexpr double kRequired = 0.20;
  ck::TrainConfig config;
  config.epochs = 40;
  config.seed = 7;
  const auto corpus = ck::testing::toy_corpus(256);
  const auto a = ck::train_gnn(corpus, config);
  const auto b = ck::train_gnn(corpus, config);
  const std::size_t steps = a.loss_trace.size();
  const double first = ck::testing::mean(a.loss_trace, 0, corpus.size());
  const double last = ck::testing::mean(a.loss_trace, steps - corpus.size(), steps);
  const double reduction = 1.0 - last / first;
  const bool identical = a.loss_trace == b.loss_trace;
  Outcome o;
  o.pass = steps == 200 && reduction >= kRequired && identical;
  o.detail = "5 graphs, " + std::to_string(steps) + " steps, first-epoch mean " + fmt("%.4f", first) +
             " -> last-epoch mean " + fmt("%.4f", last) + ", reduction " + fmt("%.1f%%", 100 * reduction) +
             " (>= 20%), traces bitwise identical: " + (identical ? "yes" : "no");
  return o;
}

// Planted families: each member is a noisy copy of a family template over
// freshly drawn words.
struct Planted {
  std::vector<ck::CausalGraph> graphs;
  std::vector<std::string> texts;
  std::vector<int> family;
};

Planted planted_corpus(std::uint64_t seed) {
  ck::Rng rng(seed);
  std::vector<std::string> pool;
  for (int i = 0; i < 400; ++i) pool.push_back("w" + std::to_string(i));
  using Builder = std::function<std::vector<ck::testing::E>(std::size_t)>;
  const ck::Relation en = ck::Relation::Enables, bl = ck::Relation::Blocks;
  auto n = [](std::size_t i) { return "n" + std::to_string(i); };
  const std::vector<Builder> families = {
      // chain of enables
      [&](std::size_t k) {
        std::vector<ck::testing::E> e;
        for (std::size_t i = 0; i + 1 < k; ++i) e.push_back({n(i), n(i + 1), en});
        return e;
      },
      // one cause fanning out, half blocked
      [&](std::size_t k) {
        std::vector<ck::testing::E> e;
        for (std::size_t i = 1; i < k; ++i) e.push_back({n(0), n(i), i % 2 ? en : bl});
        return e;
      },
      // many causes converging on one outcome
      [&](std::size_t k) {
        std::vector<ck::testing::E> e;
        for (std::size_t i = 1; i < k; ++i) e.push_back({n(i), n(0), en});
        return e;
      },
      // feedback loop of blocks
      [&](std::size_t k) {
        std::vector<ck::testing::E> e;
        for (std::size_t i = 0; i < k; ++i) e.push_back({n(i), n((i + 1) % k), bl});
        return e;
      },
      // dense triangle-rich cluster
      [&](std::size_t k) {
        std::vector<ck::testing::E> e;
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = i + 1; j < k; ++j) e.push_back({n(i), n(j), en});
        }
        return e;
      },
      // two chains joined by a blocking bridge
      [&](std::size_t k) {
        std::vector<ck::testing::E> e;
        const std::size_t half = k / 2;
        for (std::size_t i = 0; i + 1 < half; ++i) e.push_back({n(i), n(i + 1), en});
        for (std::size_t i = half; i + 1 < k; ++i) e.push_back({n(i), n(i + 1), en});
        e.push_back({n(half - 1), n(half), bl});
        e.push_back({n(0), n(k - 1), bl});
        return e;
      },
  };
  Planted out;
  for (int f = 0; f < 6; ++f) {
    for (int m = 0; m < 10; ++m) {
      const std::size_t k = 5 + rng.uniform_index(3);
      std::vector<ck::testing::E> edges = families[static_cast<std::size_t>(f)](k);
      // Per-document vocabulary: every node gets two words drawn afresh.
      std::vector<std::string> words = pool;
      rng.shuffle(words);
      ck::CausalGraph g("planted-" + std::to_string(f) + "-" + std::to_string(m));
      std::string text;
      for (std::size_t i = 0; i < k; ++i) {
        const std::string label = words[2 * i] + " " + words[2 * i + 1];
        g.add_node({n(i), label, ck::NodeKind::Event, {}});
        text += label + ". ";
      }
      for (const auto& e : edges) g.add_edge({e.head, e.tail, e.rel, {}, false});
      out.graphs.push_back(g);
      out.texts.push_back(text);
      out.family.push_back(f);
    }
  }
  return out;
}

template <typename Vector>
double leave_one_out_map(const std::vector<Vector>& vectors, const std::vector<int>& family,
                         std::size_t top_k) {
  std::vector<double> aps;
  for (std::size_t q = 0; q < vectors.size(); ++q) {
    std::map<std::string, Vector> library;
    std::set<std::string> relevant;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (i == q) continue;
      library[item(i)] = vectors[i];
      if (family[i] == family[q]) relevant.insert(item(i));
    }
    aps.push_back(ck::average_precision(ck::rank_matches(vectors[q], library, top_k), relevant));
  }
  return ck::map_score(aps);
}

Outcome planted_retrieval() {
  constexpr double kMargin = 0.2;
  constexpr double kBudget = 60.0;
  constexpr std::size_t kTopK = 10;
  const auto t0 = Clock::now();
  const Planted p = planted_corpus(505);
  std::vector<Eigen::VectorXd> graph_vectors;
  for (const auto& g : p.graphs) graph_vectors.push_back(ck::feather_embed(g, ck::structural_features(g)));
  const auto tfidf = ck::tfidf_fit_transform(p.texts);
  const double graph_map = leave_one_out_map(graph_vectors, p.family, kTopK);
  const double text_map = leave_one_out_map(tfidf.vectors, p.family, kTopK);
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = graph_map >= text_map + kMargin && elapsed < kBudget;
  o.detail = "60 graphs / 6 families, leave-one-out top-" + std::to_string(kTopK) + ", graph MAP " +
             fmt("%.4f", graph_map) + " vs TF-IDF MAP " + fmt("%.4f", text_map) + " (margin >= 0.2), " +
             fmt("%.2f", elapsed) + " s (< 60 s)";
  return o;
}

Outcome clustering_separability() {
  constexpr double kMinAri = 0.99;
  ck::Rng rng(606);
  std::map<std::string, Eigen::VectorXd> items;
  std::map<std::string, int> truth;
  for (int b = 0; b < 6; ++b) {
    Eigen::VectorXd centre(16);
    for (Eigen::Index i = 0; i < 16; ++i) centre[i] = 10.0 * rng.normal();
    for (std::size_t i = 0; i < 25; ++i) {
      Eigen::VectorXd x = centre;
      for (Eigen::Index k = 0; k < 16; ++k) x[k] += rng.normal();
      const std::string name = item(static_cast<std::size_t>(b) * 25 + i);
      items[name] = x;
      truth[name] = b;
    }
  }
  double worst = 1.0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ck::KMeansConfig config;
    config.k = 6;
    config.seed = seed;
    const double ari = ck::adjusted_rand_index(ck::kmeans(items, config).assignment, truth);
    worst = std::min(worst, ari);
    per_seed += (seed ? ", " : "") + fmt("%.4f", ari);
  }
  Outcome o;
  o.pass = worst >= kMinAri;
  o.detail = "6 blobs x 25, k 6, seeds 0-4 ARI [" + per_seed + "] (each >= 0.99)";
  return o;
}

std::map<std::string, std::string> read_report(const fs::path& path) {
  std::map<std::string, std::string> kv;
  std::istringstream in(ck::testing::slurp(path.string()));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

Outcome corpus_statistics() {
  const fs::path out = fs::temp_directory_path() / "causalkit_acceptance_stats";
  fs::remove_all(out);
  std::ostringstream sink;
  Outcome o;
  if (ck::cli::dispatch({"stats", "--input", data_path("corpus20.jsonl"), "--out", out.string()}, sink,
                        sink) != 0) {
    o.pass = false;
    o.detail = "stats failed: " + sink.str();
    return o;
  }
  const auto kv = read_report(out / "stats.txt");
  const std::map<std::string, double> want = {
      {"mean_nodes", 5.4}, {"mean_edges", 6.25}, {"mean_enables", 5.0}, {"mean_blocks", 1.25}};
  std::string got;
  for (const auto& [key, value] : want) {
    const double v = std::stod(kv.at(key));
    if (v != value) o.pass = false;
    got += (got.empty() ? "" : ", ") + key + " " + kv.at(key);
  }
  o.detail = "fixture " + got + " (exact)";

  const char* release = std::getenv("CAUSALKIT_TORQUESTRA");
  if (release == nullptr || !fs::exists(release)) {
    o.detail += "; public release check skipped (set CAUSALKIT_TORQUESTRA to a record file)";
  } else {
    fs::remove_all(out);
    if (ck::cli::dispatch({"stats", "--input", release, "--out", out.string()}, sink, sink) != 0) {
      o.pass = false;
      o.detail += "; release stats failed: " + sink.str();
    } else {
      const auto rel = read_report(out / "stats.txt");
      const std::map<std::string, double> table = {
          {"mean_nodes", 5.81}, {"mean_edges", 5.2}, {"mean_enables", 4.3}, {"mean_blocks", 0.9}};
      std::string line;
      for (const auto& [key, value] : table) {
        const std::string k = "source.torque." + key;
        const double v = rel.count(k) ? std::stod(rel.at(k)) : NAN;
        if (!(std::abs(v - value) <= 0.05)) o.pass = false;
        line += (line.empty() ? "" : ", ") + key + " " + fmt("%.3f", v);
      }
      o.detail += "; release torque slice " + line + " (within 0.05 of 5.81 / 5.2 / 4.3 / 0.9)";
    }
  }
  fs::remove_all(out);
  return o;
}

Outcome prompt_goldens() {
  const auto torque = ck::read_records(data_path("torque_train_sample.jsonl")).front();
  const auto dense = ck::read_records(data_path("dense_example.jsonl")).front();
  ck::PromptConfig config;
  config.seed = 30;
  const bool t = ck::build_prompt_temporal(torque, config) ==
                 ck::testing::slurp(data_path("golden/prompt_temporal.txt"));
  const bool d = ck::build_prompt_dense(dense).text == ck::testing::slurp(data_path("golden/prompt_dense.txt"));
  Outcome o;
  o.pass = t && d;
  o.detail = std::string("temporal (seed 30) ") + (t ? "byte-exact" : "differs") + ", dense " +
             (d ? "byte-exact" : "differs");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric oracle equivalence", metric_oracles},
      {"loss and cosine properties", loss_properties},
      {"gradient fidelity", gradient_fidelity},
      {"permutation invariance", permutation_invariance},
      {"training sanity", training_sanity},
      {"planted-structure retrieval", planted_retrieval},
      {"clustering separability", clustering_separability},
      {"corpus statistics", corpus_statistics},
      {"prompt golden files", prompt_goldens},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
