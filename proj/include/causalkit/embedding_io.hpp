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

#ifndef CAUSALKIT_EMBEDDING_IO_HPP
#define CAUSALKIT_EMBEDDING_IO_HPP

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causalkit/error.hpp"
#include "causalkit/event_type_path.hpp"
#include "causalkit/features.hpp"
#include "causalkit/graph.hpp"

namespace causalkit {

using EmbeddingTable = std::map<std::string, Eigen::VectorXd>;

namespace detail {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return end == token.c_str() + token.size();
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

// Interchange format: a `dim=<d>` header line, then `<id> <v1> ... <vd>` per
// entry. Ids may contain spaces; the writer then separates the id from the
// values with a tab. Lines without a tab take the first token as the id.
inline void write_embeddings(const EmbeddingTable& table, std::size_t dim,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write embedding file '" + path + "'");
  out << "dim=" << dim << '\n';
  for (const auto& [id, v] : table) {
    if (static_cast<std::size_t>(v.size()) != dim) {
      throw Error("write_embeddings: dimension mismatch for '" + id + "'");
    }
    if (id.empty() || id.find_first_of("\t\n\r") != std::string::npos) {
      throw Error("write_embeddings: id '" + id + "' is empty or has tab/newline");
    }
    out << id << '\t';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) out << ' ';
      out << detail::format_double(v[i]);
    }
    out << '\n';
  }
}

struct LoadedEmbeddings {
  std::size_t dim = 0;
  EmbeddingTable table;
};

inline LoadedEmbeddings load_external_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  LoadedEmbeddings out;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (!have_header) {
      const std::string t = detail::trim(line);
      if (t.rfind("dim=", 0) != 0) throw Error(where + "expected 'dim=<d>' header");
      double d = 0.0;
      if (!detail::parse_double(t.substr(4), d) || d < 1 || d != std::floor(d)) {
        throw Error(where + "bad dimension '" + t.substr(4) + "'");
      }
      out.dim = static_cast<std::size_t>(d);
      have_header = true;
      continue;
    }
    if (detail::trim(line).empty()) continue;

    std::string id;
    std::vector<std::string> values;
    if (const std::size_t tab = line.find('\t'); tab != std::string::npos) {
      id = line.substr(0, tab);
      values = detail::split_ws(line.substr(tab + 1));
    } else {
      values = detail::split_ws(line);
      id = values.front();
      values.erase(values.begin());
    }
    if (id.empty()) throw Error(where + "empty id");
    if (values.size() != out.dim) {
      throw Error(where + "dimension mismatch for '" + id + "': " +
                  std::to_string(values.size()) + " values, header says " +
                  std::to_string(out.dim));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(out.dim));
    for (std::size_t i = 0; i < values.size(); ++i) {
      double x = 0.0;
      if (!detail::parse_double(values[i], x) || !std::isfinite(x)) {
        throw Error(where + "non-finite or malformed value '" + values[i] +
                    "' for '" + id + "'");
      }
      v[static_cast<Eigen::Index>(i)] = x;
    }
    if (!out.table.emplace(id, std::move(v)).second) {
      throw Error(where + "duplicate id '" + id + "'");
    }
  }
  if (!have_header) throw Error(path + ": empty embedding file");
  return out;
}

/// Node features for a graph from an externally produced table, looked up by
/// node label.
inline NodeFeatures external_features(const CausalGraph& graph,
                                      const LoadedEmbeddings& loaded) {
  NodeFeatures f(loaded.dim);
  for (const CausalNode& n : graph.nodes()) {
    auto it = loaded.table.find(n.label);
    if (it == loaded.table.end()) it = loaded.table.find(n.id);
    if (it == loaded.table.end()) {
      throw Error("external embeddings: no vector for node '" + n.label + "'");
    }
    f.set(n.id, it->second);
  }
  return f;
}

}  // namespace causalkit

#endif  // CAUSALKIT_EMBEDDING_IO_HPP
