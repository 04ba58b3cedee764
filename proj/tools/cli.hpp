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

#ifndef CAUSALKIT_TOOLS_CLI_HPP
#define CAUSALKIT_TOOLS_CLI_HPP

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "causalkit.hpp"

namespace causalkit::cli {

struct RunOptions {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = "out";

  std::string input;
  std::string library;
  std::string embedder = "hash";
  std::string node_embeddings;
  std::size_t dim = 256;
  std::string pipeline = "feather";
  std::string embeddings;
  std::string params;
  std::string assignments;
  std::string matches;

  std::size_t k = 6;
  std::size_t eval_n = 25;
  std::size_t top_k = 5;
  std::size_t j = 10;
  std::string relevance = "topic";
  std::size_t overlap_threshold = 1;

  std::size_t qa_min = 2;
  std::size_t qa_max = 3;
  std::vector<std::string> stoplist = {"was", "is",  "are", "be",
                                       "been", "had", "has", "have"};

  int epochs = 3;
  double learning_rate = 1e-3;
  double dropout = 0.5;
  double mask_rate = 0.15;
  std::string masking = "uniform";
  std::size_t hidden1 = 128;
  std::size_t hidden2 = 128;
  std::size_t output_dim = 128;
};

inline nlohmann::json options_json(const RunOptions& o) {
  return {{"seed", o.seed},           {"config", o.config},
          {"out", o.out},             {"input", o.input},
          {"library", o.library},     {"embedder", o.embedder},
          {"node_embeddings", o.node_embeddings},
          {"dim", o.dim},             {"pipeline", o.pipeline},
          {"embeddings", o.embeddings}, {"params", o.params},
          {"assignments", o.assignments}, {"matches", o.matches},
          {"k", o.k},                 {"eval_n", o.eval_n},
          {"top_k", o.top_k},         {"j", o.j},
          {"relevance", o.relevance}, {"overlap_threshold", o.overlap_threshold},
          {"qa_min", o.qa_min},       {"qa_max", o.qa_max},
          {"stoplist", o.stoplist},   {"epochs", o.epochs},
          {"lr", o.learning_rate},    {"dropout", o.dropout},
          {"mask_rate", o.mask_rate}, {"masking", o.masking},
          {"hidden1", o.hidden1},     {"hidden2", o.hidden2},
          {"out_dim", o.output_dim}};
}

namespace detail {

// Pipeline failure tagged with the module it came from.
class StageError : public Error {
 public:
  StageError(const std::string& module, const std::string& what)
      : Error(module + ": " + what) {}
};

template <typename F>
auto stage(const std::string& module, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(module, e.what());
  }
}

inline std::string num(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "' for digest");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  }
  return hex.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << body;
}

// Flat `key = value` report with a fixed key order.
class Report {
 public:
  void add(const std::string& key, const std::string& value) {
    lines_ += key + " = " + value + "\n";
  }
  void add(const std::string& key, double value) { add(key, num(value)); }
  void add(const std::string& key, std::size_t value) {
    add(key, std::to_string(value));
  }
  const std::string& str() const { return lines_; }

 private:
  std::string lines_;
};

// Flat config file: `key = value` lines, `#` comments.
inline std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = causalkit::detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = causalkit::detail::trim(t.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    out[key] = causalkit::detail::trim(t.substr(eq + 1));
  }
  return out;
}

inline std::string label_of(const CausalGraph& g) {
  if (auto t = g.metadata_value("topic")) return *t;
  if (auto s = g.metadata_value("source")) return *s;
  return "";
}

inline std::string graph_text(const CausalGraph& g) {
  std::string out;
  for (const auto& n : g.nodes()) {
    if (!out.empty()) out += ". ";
    out += n.label;
  }
  return out;
}

inline std::string file_stem_for(const std::string& id) {
  std::string out;
  for (char c : id) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
            c == '.')
               ? c
               : '_';
  }
  return out.empty() ? "graph" : out;
}

}  // namespace detail

/// Shared state of one invocation: options, output directory and manifest.
class Run {
 public:
  Run(std::string command, RunOptions opts)
      : command_(std::move(command)), opts_(std::move(opts)) {}

  const RunOptions& opts() const { return opts_; }

  std::filesystem::path out_path(const std::string& name) const {
    return std::filesystem::path(opts_.out) / name;
  }

  void prepare() {
    std::filesystem::create_directories(opts_.out);
    for (const std::string* p : {&opts_.input, &opts_.library, &opts_.node_embeddings,
                                 &opts_.embeddings, &opts_.params, &opts_.assignments,
                                 &opts_.matches, &opts_.config}) {
      if (p->empty()) continue;
      if (!std::filesystem::exists(*p)) throw Error("input file '" + *p + "' not found");
      inputs_[*p] = detail::sha256_file(*p);
    }
  }

  void emit(const std::string& name, const std::string& body) {
    detail::write_file(out_path(name), body);
    artifacts_.push_back(name);
  }

  void write_manifest() const {
    nlohmann::json m;
    m["tool"] = "causalkit";
    m["version"] = CAUSALKIT_VERSION;
    m["command"] = command_;
    m["seed"] = opts_.seed;
    m["options"] = options_json(opts_);
    m["inputs"] = inputs_;
    m["artifacts"] = artifacts_;
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    m["created"] = ts.str();
    detail::write_file(out_path("manifest.json"), m.dump(2) + "\n");
  }

  // -------- shared pipeline pieces --------

  std::vector<Record> records(const std::string& path) const {
    return detail::stage("ingest", [&] { return read_records(path); });
  }

  std::vector<CausalGraph> graphs(const std::vector<Record>& recs) const {
    return detail::stage("ingest", [&] {
      std::vector<CausalGraph> out;
      for (const Record& r : recs) out.push_back(record_to_graph(r));
      return out;
    });
  }

  NodeFeatures features(const CausalGraph& g) const {
    return detail::stage("embed", [&] {
      if (opts_.embedder == "hash") return hash_features(g, opts_.dim);
      if (opts_.embedder == "structural") return structural_features(g);
      if (opts_.embedder == "external") {
        if (!external_) {
          if (opts_.node_embeddings.empty()) {
            throw Error("--node-embeddings is required with --embedder external");
          }
          external_ = load_external_embeddings(opts_.node_embeddings);
        }
        return external_features(g, *external_);
      }
      throw Error("unknown embedder '" + opts_.embedder + "'");
    });
  }

  TrainConfig train_config() const {
    TrainConfig c;
    c.epochs = opts_.epochs;
    c.learning_rate = opts_.learning_rate;
    c.dropout = opts_.dropout;
    c.mask_rate = opts_.mask_rate;
    if (opts_.masking == "uniform") c.masking_mode = MaskingMode::Uniform;
    else if (opts_.masking == "pagerank") c.masking_mode = MaskingMode::PageRank;
    else throw StageErrorFactory("embed", "unknown masking mode '" + opts_.masking + "'");
    c.hidden1 = opts_.hidden1;
    c.hidden2 = opts_.hidden2;
    c.output_dim = opts_.output_dim;
    c.seed = opts_.seed;
    return c;
  }

  TrainResult train(const std::vector<CausalGraph>& gs) const {
    const TrainConfig config = train_config();
    return detail::stage("embed", [&] {
      std::vector<TrainingItem> corpus;
      for (const CausalGraph& g : gs) corpus.push_back({g, features(g)});
      return train_gnn(corpus, config);
    });
  }

  GnnParams gnn_params(const std::vector<CausalGraph>& training_graphs) const {
    if (!opts_.params.empty()) {
      return detail::stage("embed", [&] { return load_params(opts_.params); });
    }
    return train(training_graphs).params;
  }

  /// Graph embeddings for the feather or gnn pipeline.
  EmbeddingTable embed(const std::vector<CausalGraph>& gs,
                       const std::optional<GnnParams>& params) const {
    return detail::stage("embed", [&] {
      EmbeddingTable out;
      for (const CausalGraph& g : gs) {
        const NodeFeatures f = features(g);
        if (opts_.pipeline == "feather") out[g.id()] = feather_embed(g, f);
        else if (opts_.pipeline == "gnn") out[g.id()] = gat_embed(*params, g, f);
        else throw Error("pipeline '" + opts_.pipeline + "' has no graph embedding");
      }
      return out;
    });
  }

 private:
  static detail::StageError StageErrorFactory(const std::string& m, const std::string& w) {
    return detail::StageError(m, w);
  }

  std::string command_;
  RunOptions opts_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> artifacts_;
  mutable std::optional<LoadedEmbeddings> external_;
};

namespace detail {

inline std::string embedding_text(const EmbeddingTable& table) {
  std::size_t dim = table.empty() ? 0 : static_cast<std::size_t>(table.begin()->second.size());
  std::ostringstream out;
  out << "dim=" << dim << '\n';
  for (const auto& [id, v] : table) {
    out << id << '\t';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) out << ' ';
      out << causalkit::detail::format_double(v[i]);
    }
    out << '\n';
  }
  return out.str();
}

inline std::string params_text(const GnnParams& params, const std::filesystem::path& tmp) {
  save_params(params, tmp.string());
  std::ifstream in(tmp, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  in.close();
  const std::string body = ss.str();
  std::filesystem::remove(tmp);
  return body;
}

struct ClusterInputs {
  Clusters clusters;
  std::map<std::string, std::string> labels;
  std::map<std::string, EventVector> events;
};

inline ClusterInputs cluster_inputs(const Clusters& clusters,
                                    const std::vector<Record>& recs,
                                    const std::vector<CausalGraph>& gs) {
  ClusterInputs in;
  in.clusters = clusters;
  std::vector<EventTypePath> paths = collect_type_paths(recs);
  const EventTypeOntology ontology(paths);
  for (const CausalGraph& g : gs) {
    if (!clusters.count(g.id())) continue;
    in.labels[g.id()] = label_of(g);
    if (!ontology.empty()) in.events[g.id()] = khot(g, ontology);
    else in.events[g.id()] = EventVector{{false}};
  }
  return in;
}

inline Clusters restrict(const Clusters& c, const std::set<std::string>& keep) {
  Clusters out;
  for (const auto& [id, k] : c) {
    if (keep.count(id)) out[id] = k;
  }
  return out;
}

template <typename V>
std::map<std::string, V> restrict(const std::map<std::string, V>& m,
                                  const Clusters& keep) {
  std::map<std::string, V> out;
  for (const auto& [id, v] : m) {
    if (keep.count(id)) out[id] = v;
  }
  return out;
}

inline void add_cluster_metrics(Report& report, const std::string& prefix,
                                const ClusterInputs& in, std::size_t j) {
  report.add(prefix + "items", in.clusters.size());
  report.add(prefix + "purity", purity(in.clusters, in.labels));
  report.add(prefix + "ari", in.clusters.size() >= 2
                                 ? adjusted_rand_index(in.clusters, in.labels)
                                 : 1.0);
  const VMeasure vm = v_measure(in.clusters, in.labels);
  report.add(prefix + "homogeneity", vm.homogeneity);
  report.add(prefix + "completeness", vm.completeness);
  report.add(prefix + "v_measure", vm.v);
  report.add(prefix + "event_cluster_purity", event_cluster_purity(in.clusters, in.events, j));
}

inline Report cluster_report(const Run& run, const ClusterInputs& full,
                             const std::set<std::string>& evaluated) {
  Report r;
  r.add("seed", std::to_string(run.opts().seed));
  r.add("j", run.opts().j);
  ClusterInputs sub{restrict(full.clusters, evaluated), {}, {}};
  sub.labels = restrict(full.labels, sub.clusters);
  sub.events = restrict(full.events, sub.clusters);
  add_cluster_metrics(r, "", sub, run.opts().j);
  add_cluster_metrics(r, "all.", full, run.opts().j);
  return r;
}

}  // namespace detail

// -------- subcommands --------

inline void cmd_validate(Run& run) {
  const auto recs = run.records(run.opts().input);
  detail::Report summary;
  std::string body;
  std::size_t invalid = 0;
  for (const Record& r : recs) {
    ValidationReport report;
    try {
      report = validate(assemble_graph(r));
    } catch (const Error& e) {
      report.push_back({"record", e.what()});
    }
    if (!report.empty()) ++invalid;
    for (const Violation& v : report) {
      body += r.id + "\t" + v.locus + "\t" + v.message + "\n";
    }
  }
  summary.add("records", recs.size());
  summary.add("invalid", invalid);
  run.emit("validation.txt", summary.str() + body);
}

inline void cmd_stats(Run& run) {
  const auto recs = run.records(run.opts().input);
  const auto gs = run.graphs(recs);
  detail::Report report;
  report.add("seed", std::to_string(run.opts().seed));
  auto add = [&](const std::string& prefix, const std::vector<CausalGraph>& slice) {
    const CorpusStats s = detail::stage("graph-core", [&] { return corpus_stats(slice); });
    report.add(prefix + "graphs", s.graphs);
    report.add(prefix + "mean_nodes", s.nodes.mean);
    report.add(prefix + "max_nodes", s.nodes.max);
    report.add(prefix + "std_nodes", s.nodes.stddev);
    report.add(prefix + "mean_edges", s.edges.mean);
    report.add(prefix + "max_edges", s.edges.max);
    report.add(prefix + "std_edges", s.edges.stddev);
    report.add(prefix + "mean_enables", s.mean_enables);
    report.add(prefix + "mean_blocks", s.mean_blocks);
    report.add(prefix + "mean_degree", s.mean_degree);
    report.add(prefix + "mean_clustering", s.mean_clustering);
    report.add(prefix + "mean_transitivity", s.mean_transitivity);
  };
  add("", gs);
  std::map<std::string, std::vector<CausalGraph>> by_source;
  for (const CausalGraph& g : gs) {
    by_source[g.metadata_value("source").value_or("unknown")].push_back(g);
  }
  for (const auto& [src, slice] : by_source) add("source." + src + ".", slice);
  run.emit("stats.txt", report.str());
}

inline void cmd_prompt_temporal(Run& run) {
  const auto recs = run.records(run.opts().input);
  PromptConfig config;
  config.qa_min = run.opts().qa_min;
  config.qa_max = run.opts().qa_max;
  config.seed = run.opts().seed;
  config.light_verb_stoplist.clear();
  for (const auto& w : run.opts().stoplist) {
    config.light_verb_stoplist.insert(causalkit::detail::to_lower(w));
  }
  std::string body;
  std::vector<std::string> skipped;
  detail::stage("ingest", [&] {
    for (const Record& r : recs) {
      if (r.questions.empty()) {
        skipped.push_back(r.id);
        continue;
      }
      nlohmann::json line = {{"id", r.id}, {"prompt", build_prompt_temporal(r, config)}};
      body += line.dump() + "\n";
    }
    return 0;
  });
  run.emit("prompts_temporal.jsonl", body);
  if (!skipped.empty()) {
    std::string s;
    for (const auto& id : skipped) s += id + "\n";
    run.emit("prompts_temporal_skipped.txt", s);
  }
}

inline void cmd_prompt_dense(Run& run) {
  const auto recs = run.records(run.opts().input);
  std::string body;
  detail::stage("ingest", [&] {
    for (const Record& r : recs) {
      const DensePrompt p = build_prompt_dense(r);
      nlohmann::json line = {{"id", r.id}, {"prompt", p.text}, {"skipped_keys", p.skipped}};
      body += line.dump() + "\n";
    }
    return 0;
  });
  run.emit("prompts_dense.jsonl", body);
}

inline void cmd_embed_feather(Run& run) {
  const auto gs = run.graphs(run.records(run.opts().input));
  RunOptions o = run.opts();
  o.pipeline = "feather";
  const Run local("embed-feather", o);
  run.emit("graph_embeddings.txt", detail::embedding_text(local.embed(gs, std::nullopt)));
}

inline void cmd_train_gnn(Run& run) {
  const auto gs = run.graphs(run.records(run.opts().input));
  const TrainResult result = run.train(gs);
  run.emit("gnn_params.txt", detail::params_text(result.params, run.out_path(".params.tmp")));
  std::string trace;
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
    trace += std::to_string(i) + " " + detail::num(result.loss_trace[i]) + "\n";
  }
  run.emit("loss_trace.txt", trace);
}

inline void cmd_embed_gnn(Run& run) {
  const auto gs = run.graphs(run.records(run.opts().input));
  RunOptions o = run.opts();
  o.pipeline = "gnn";
  const Run local("embed-gnn", o);
  const GnnParams params = local.gnn_params(gs);
  run.emit("graph_embeddings.txt", detail::embedding_text(local.embed(gs, params)));
}

inline void cmd_tfidf(Run& run) {
  const auto recs = run.records(run.opts().input);
  std::vector<std::string> texts;
  for (const Record& r : recs) texts.push_back(r.text);
  const TfidfResult t = detail::stage("discover", [&] { return tfidf_fit_transform(texts); });
  EmbeddingTable table;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    table[recs[i].id] = to_dense(t.vectors[i], t.vocabulary.size());
  }
  run.emit("tfidf_embeddings.txt", detail::embedding_text(table));
  std::string vocab;
  for (std::size_t i = 0; i < t.vocabulary.size(); ++i) {
    vocab += t.vocabulary[i] + "\t" + detail::num(t.idf[i]) + "\n";
  }
  run.emit("tfidf_vocabulary.txt", vocab);
}

inline EmbeddingTable pipeline_embeddings(const Run& run, const std::vector<Record>& recs,
                                          const std::vector<CausalGraph>& gs) {
  const RunOptions& o = run.opts();
  if (!o.embeddings.empty()) {
    return detail::stage("embed", [&] { return load_external_embeddings(o.embeddings).table; });
  }
  if (o.pipeline == "tfidf") {
    std::vector<std::string> texts;
    for (const Record& r : recs) texts.push_back(r.text);
    const TfidfResult t = detail::stage("discover", [&] { return tfidf_fit_transform(texts); });
    EmbeddingTable table;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      table[recs[i].id] = to_dense(t.vectors[i], t.vocabulary.size());
    }
    return table;
  }
  std::optional<GnnParams> params;
  if (o.pipeline == "gnn") params = run.gnn_params(gs);
  return run.embed(gs, params);
}

inline void cmd_cluster(Run& run) {
  const auto recs = run.records(run.opts().input);
  const auto gs = run.graphs(recs);
  const EmbeddingTable items = pipeline_embeddings(run, recs, gs);
  KMeansConfig kc;
  kc.k = run.opts().k;
  kc.seed = run.opts().seed;
  const ClusterAssignment ca = detail::stage("discover", [&] { return kmeans(items, kc); });
  const auto subset = evaluation_subset(ca, items, run.opts().eval_n);
  const std::set<std::string> evaluated(subset.begin(), subset.end());
  std::string body;
  for (const auto& [id, c] : ca.assignment) {
    nlohmann::json line = {{"id", id}, {"cluster", c}, {"evaluated", evaluated.count(id) > 0}};
    body += line.dump() + "\n";
  }
  run.emit("assignments.jsonl", body);
  const auto inputs = detail::stage("metrics", [&] {
    return detail::cluster_inputs(ca.assignment, recs, gs);
  });
  detail::Report report = detail::stage("metrics", [&] {
    return detail::cluster_report(run, inputs, evaluated);
  });
  report.add("pipeline", run.opts().embeddings.empty() ? run.opts().pipeline : "external");
  report.add("k", run.opts().k);
  report.add("inertia", ca.inertia);
  report.add("iterations", std::to_string(ca.iterations));
  run.emit("cluster_report.txt", report.str());
}

inline Clusters read_assignments(const std::string& path, std::set<std::string>& evaluated) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open assignments '" + path + "'");
  Clusters out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (causalkit::detail::trim(line).empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      const std::string id = obj.at("id").get<std::string>();
      out[id] = obj.at("cluster").get<std::size_t>();
      if (obj.value("evaluated", true)) evaluated.insert(id);
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline void cmd_eval_cluster(Run& run) {
  const auto recs = run.records(run.opts().input);
  const auto gs = run.graphs(recs);
  std::set<std::string> evaluated;
  const Clusters clusters = detail::stage("metrics", [&] {
    return read_assignments(run.opts().assignments, evaluated);
  });
  const auto report = detail::stage("metrics", [&] {
    const auto inputs = detail::cluster_inputs(clusters, recs, gs);
    if (inputs.labels.size() != clusters.size()) {
      throw Error("assignments name items missing from the corpus");
    }
    return detail::cluster_report(run, inputs, evaluated);
  });
  run.emit("eval_cluster.txt", report.str());
}

struct MatchSides {
  std::vector<Record> query_records;
  std::vector<CausalGraph> queries;
  SchemaLibrary library;
};

inline MatchSides load_match_sides(const Run& run) {
  MatchSides s;
  s.query_records = run.records(run.opts().input);
  s.queries = run.graphs(s.query_records);
  if (run.opts().library.empty()) throw Error("--library is required");
  s.library = detail::stage("ingest", [&] { return load_schema_library(run.opts().library); });
  return s;
}

inline void cmd_match(Run& run) {
  const MatchSides sides = load_match_sides(run);
  const std::size_t top_k = run.opts().top_k;
  std::map<std::string, RankedMatches> ranked;
  if (run.opts().pipeline == "tfidf") {
    std::vector<std::string> texts;
    for (const Record& r : sides.query_records) texts.push_back(r.text);
    for (const SchemaEntry& e : sides.library.entries) {
      texts.push_back(e.text.empty() ? detail::graph_text(e.graph) : e.text);
    }
    const TfidfResult t = detail::stage("discover", [&] { return tfidf_fit_transform(texts); });
    std::map<std::string, SparseVector> q, lib;
    for (std::size_t i = 0; i < sides.query_records.size(); ++i) {
      q[sides.query_records[i].id] = t.vectors[i];
    }
    for (std::size_t i = 0; i < sides.library.entries.size(); ++i) {
      lib[sides.library.entries[i].schema_id] = t.vectors[sides.query_records.size() + i];
    }
    ranked = detail::stage("discover", [&] { return match_corpus(q, lib, top_k); });
  } else {
    std::vector<CausalGraph> lib_graphs;
    for (const SchemaEntry& e : sides.library.entries) lib_graphs.push_back(e.graph);
    std::optional<GnnParams> params;
    if (run.opts().pipeline == "gnn") {
      std::vector<CausalGraph> all = sides.queries;
      all.insert(all.end(), lib_graphs.begin(), lib_graphs.end());
      params = run.gnn_params(all);
    }
    const EmbeddingTable q = run.embed(sides.queries, params);
    const EmbeddingTable lib = run.embed(lib_graphs, params);
    ranked = detail::stage("discover", [&] { return match_corpus(q, lib, top_k); });
  }
  std::string body;
  for (const auto& [id, r] : ranked) {
    nlohmann::json m = nlohmann::json::array();
    for (const auto& [lib_id, score] : r.matches) {
      m.push_back({{"id", lib_id}, {"score", score}});
    }
    body += nlohmann::json({{"query", id}, {"matches", m}}).dump() + "\n";
  }
  run.emit("matches.jsonl", body);
}

inline std::map<std::string, RankedMatches> read_matches(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matches '" + path + "'");
  std::map<std::string, RankedMatches> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (causalkit::detail::trim(line).empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      RankedMatches r;
      r.query_id = obj.at("query").get<std::string>();
      for (const auto& m : obj.at("matches")) {
        r.matches.emplace_back(m.at("id").get<std::string>(), m.at("score").get<double>());
      }
      out[r.query_id] = std::move(r);
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline void cmd_eval_match(Run& run) {
  const MatchSides sides = load_match_sides(run);
  const auto ranked = detail::stage("metrics", [&] { return read_matches(run.opts().matches); });
  const std::string& mode = run.opts().relevance;
  if (mode != "topic" && mode != "event-overlap") {
    throw detail::StageError("metrics", "unknown relevance '" + mode + "'");
  }

  std::map<std::string, std::string> lib_topics;
  for (const SchemaEntry& e : sides.library.entries) {
    lib_topics[e.schema_id] = e.topic.value_or(detail::label_of(e.graph));
  }
  std::vector<EventTypePath> paths = collect_type_paths(sides.query_records);
  for (const SchemaEntry& e : sides.library.entries) {
    for (const auto& n : e.graph.nodes()) {
      for (const auto& p : n.event_types) paths.push_back(p);
      // Schema nodes are event types themselves.
      try {
        paths.push_back(parse_type_path(n.label));
      } catch (const Error&) {
      }
    }
  }
  const EventTypeOntology ontology(paths);
  std::map<std::string, EventVector> lib_events;
  auto schema_vector = [&](const CausalGraph& g) {
    EventVector v = khot(g, ontology);
    for (const auto& n : g.nodes()) {
      if (const auto idx = ontology.index_of(parse_type_path(n.label).leaf())) {
        v.bits[*idx] = true;
      }
    }
    return v;
  };
  if (mode == "event-overlap") {
    for (const SchemaEntry& e : sides.library.entries) lib_events[e.schema_id] = schema_vector(e.graph);
  }

  std::vector<double> aps;
  std::vector<std::optional<std::size_t>> firsts;
  std::string stream;
  std::size_t skipped = 0;
  detail::stage("metrics", [&] {
    for (const CausalGraph& q : sides.queries) {
      const auto it = ranked.find(q.id());
      if (it == ranked.end()) throw Error("no ranking for query '" + q.id() + "'");
      const std::set<std::string> relevant =
          mode == "topic"
              ? topic_relevance(detail::label_of(q), lib_topics)
              : event_overlap_relevance(khot(q, ontology), lib_events,
                                        run.opts().overlap_threshold);
      nlohmann::json line = {{"query", q.id()}, {"relevant", relevant.size()}};
      if (relevant.empty()) {
        ++skipped;
        line["evaluated"] = false;
      } else {
        const double ap = average_precision(it->second, relevant);
        const auto first = first_relevant_rank(it->second, relevant);
        aps.push_back(ap);
        firsts.push_back(first);
        line["evaluated"] = true;
        line["average_precision"] = ap;
        line["first_relevant_rank"] = first ? nlohmann::json(*first) : nlohmann::json();
      }
      stream += line.dump() + "\n";
    }
    return 0;
  });
  detail::Report report;
  report.add("seed", std::to_string(run.opts().seed));
  report.add("relevance", mode);
  report.add("queries", aps.size());
  report.add("skipped_no_relevant", skipped);
  if (!aps.empty()) {
    report.add("map", map_score(aps));
    report.add("mrr", mrr(firsts));
  }
  run.emit("eval_match.txt", report.str());
  run.emit("eval_match_queries.jsonl", stream);
}

inline void cmd_export_dot(Run& run) {
  const auto gs = run.graphs(run.records(run.opts().input));
  std::filesystem::create_directories(run.out_path("dot"));
  std::set<std::string> used;
  for (const CausalGraph& g : gs) {
    std::string stem = detail::file_stem_for(g.id());
    for (int i = 2; used.count(stem); ++i) stem = detail::file_stem_for(g.id()) + "_" + std::to_string(i);
    used.insert(stem);
    run.emit("dot/" + stem + ".dot", to_dot(g));
  }
}

struct Command {
  std::string name;
  std::string help;
  std::function<void(Run&)> fn;
};

inline const std::vector<Command>& commands() {
  static const std::vector<Command> table = {
      {"validate", "Check every record's causal graph for invariant violations", cmd_validate},
      {"stats", "Corpus graph statistics, overall and per source", cmd_stats},
      {"prompt-temporal", "Text plus seeded temporal QA prompt per record", cmd_prompt_temporal},
      {"prompt-dense", "Event-type dense paraphrase prompt per record", cmd_prompt_dense},
      {"embed-feather", "FEATHER graph embeddings", cmd_embed_feather},
      {"train-gnn", "Train the masked graph attention encoder", cmd_train_gnn},
      {"embed-gnn", "Graph embeddings from a trained attention encoder", cmd_embed_gnn},
      {"tfidf", "TF-IDF text vectors", cmd_tfidf},
      {"cluster", "K-means clustering of graph or text embeddings", cmd_cluster},
      {"eval-cluster", "Clustering metrics for an assignment file", cmd_eval_cluster},
      {"match", "Rank schema library entries for each query graph", cmd_match},
      {"eval-match", "MAP and MRR for a match file", cmd_eval_match},
      {"export-dot", "One DOT file per graph", cmd_export_dot},
  };
  return table;
}

/// Entry point shared by the executable and the tests. Returns the process
/// exit status.
inline int dispatch(std::vector<std::string> args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"causalkit: causal graph ingest, embedding, clustering and matching",
               "causalkit"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  RunOptions opts;
  app.add_option("--seed", opts.seed, "Random seed recorded in every artifact");
  app.add_option("--config", opts.config, "Flat key = value config file");
  app.add_option("--out", opts.out, "Output directory");
  app.fallthrough();

  std::map<std::string, CLI::App*> subs;
  for (const Command& c : commands()) subs[c.name] = app.add_subcommand(c.name, c.help);

  auto opt = [&](std::initializer_list<const char*> names, auto& target,
                 const std::string& flag, const std::string& help) {
    for (const char* n : names) subs.at(n)->add_option(flag, target, help);
  };
  const auto all = {"validate",     "stats", "prompt-temporal", "prompt-dense",
                    "embed-feather", "train-gnn", "embed-gnn",   "tfidf",
                    "cluster",      "eval-cluster", "match",     "eval-match",
                    "export-dot"};
  const auto featured = {"embed-feather", "train-gnn", "embed-gnn", "cluster", "match"};
  const auto trained = {"train-gnn", "embed-gnn", "cluster", "match"};
  opt(all, opts.input, "--input", "Line-delimited record file");
  opt({"match", "eval-match"}, opts.library, "--library", "Schema library file");
  opt(featured, opts.embedder, "--embedder", "Node encoder: hash, structural or external");
  opt(featured, opts.node_embeddings, "--node-embeddings", "Interchange file of node vectors");
  opt(featured, opts.dim, "--dim", "Hash encoder dimension");
  opt({"cluster", "match"}, opts.pipeline, "--pipeline", "feather, gnn or tfidf");
  opt({"cluster"}, opts.embeddings, "--embeddings", "Precomputed graph embeddings to cluster");
  opt({"embed-gnn", "cluster", "match"}, opts.params, "--params", "Trained encoder parameters");
  opt({"eval-cluster"}, opts.assignments, "--assignments", "Assignment file from cluster");
  opt({"eval-match"}, opts.matches, "--matches", "Match file from match");
  opt({"cluster"}, opts.k, "--k", "Number of clusters");
  opt({"cluster"}, opts.eval_n, "--eval-n", "Evaluated members per cluster");
  opt({"cluster", "eval-cluster"}, opts.j, "--j", "Top event types per cluster");
  opt({"match"}, opts.top_k, "--top-k", "Matches kept per query");
  opt({"eval-match"}, opts.relevance, "--relevance", "topic or event-overlap");
  opt({"eval-match"}, opts.overlap_threshold, "--overlap-threshold", "Shared event types for relevance");
  opt({"prompt-temporal"}, opts.qa_min, "--qa-min", "Fewest QA lines");
  opt({"prompt-temporal"}, opts.qa_max, "--qa-max", "Most QA lines");
  for (const char* n : {"prompt-temporal"}) {
    subs.at(n)->add_option("--stoplist", opts.stoplist, "Answers to drop")->delimiter(',');
  }
  opt(trained, opts.epochs, "--epochs", "Training epochs");
  opt(trained, opts.learning_rate, "--lr", "Learning rate");
  opt(trained, opts.dropout, "--dropout", "Attention dropout");
  opt(trained, opts.mask_rate, "--mask-rate", "Share of nodes masked");
  opt(trained, opts.masking, "--masking", "uniform or pagerank");
  opt(trained, opts.hidden1, "--hidden1", "First layer width");
  opt(trained, opts.hidden2, "--hidden2", "Second layer width");
  opt(trained, opts.output_dim, "--out-dim", "Embedding width");

  // Config keys become flags unless the command line already sets them.
  try {
    std::string config_path;
    std::string sub_name;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
      else if (sub_name.empty() && subs.count(args[i])) sub_name = args[i];
    }
    if (!config_path.empty()) {
      for (const auto& [key, value] : detail::read_config(config_path)) {
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args) {
          if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        }
        if (given) continue;
        const bool for_sub = !sub_name.empty() &&
                             subs.at(sub_name)->get_option_no_throw(flag) != nullptr;
        const bool global = app.get_option_no_throw(flag) != nullptr;
        if (!for_sub && !global) {
          bool known = false;
          for (const auto& [n, s] : subs) known |= s->get_option_no_throw(flag) != nullptr;
          if (!known) throw Error("config: unknown key '" + key + "'");
          continue;
        }
        args.push_back(flag + "=" + value);
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  for (const Command& c : commands()) {
    CLI::App* sub = subs.at(c.name);
    if (!sub->parsed()) continue;
    if (opts.input.empty()) {
      err << "error: --input is required\n" << sub->help();
      return 2;
    }
    Run run(c.name, opts);
    try {
      run.prepare();
      c.fn(run);
      run.write_manifest();
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
    return 0;
  }
  return 2;
}

}  // namespace causalkit::cli

#endif  // CAUSALKIT_TOOLS_CLI_HPP
