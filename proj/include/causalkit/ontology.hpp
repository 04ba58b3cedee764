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

#ifndef CAUSALKIT_ONTOLOGY_HPP
#define CAUSALKIT_ONTOLOGY_HPP

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "causalkit/error.hpp"
#include "causalkit/event_type_path.hpp"
#include "causalkit/graph.hpp"

namespace causalkit {

// Graph metadata key holding a record's document-level event type path.
inline constexpr const char* kDocumentEventTypesKey = "document_event_types";

/// Vocabulary of event-type names observed in a set of paths. Every level of
/// every path is a vocabulary entry; lookups are case-insensitive and the
/// ordering is lexicographic on the lowercased key.
class EventTypeOntology {
 public:
  EventTypeOntology() = default;

  explicit EventTypeOntology(std::span<const EventTypePath> paths) {
    for (const auto& p : paths) add(p);
    finalize();
  }

  explicit EventTypeOntology(const std::vector<EventTypePath>& paths)
      : EventTypeOntology(std::span<const EventTypePath>(paths)) {}

  bool empty() const { return vocabulary_.empty(); }
  std::size_t size() const { return vocabulary_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::set<EventTypePath>& paths() const { return paths_; }

  // Lowercased child -> lowercased parents, as observed in paths.
  const std::map<std::string, std::set<std::string>>& parents() const {
    return parents_;
  }

  std::optional<std::size_t> index_of(const std::string& name) const {
    const auto it = position_.find(detail::to_lower(name));
    if (it == position_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::string& name) const {
    return index_of(name).has_value();
  }

 private:
  void add(const EventTypePath& p) {
    paths_.insert(p);
    const auto& levels = p.levels();
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const std::string key = detail::to_lower(levels[i]);
      keys_.insert(key);
      if (i > 0) parents_[key].insert(detail::to_lower(levels[i - 1]));
    }
  }

  void finalize() {
    vocabulary_.assign(keys_.begin(), keys_.end());
    for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
      position_[vocabulary_[i]] = i;
    }
  }

  std::set<EventTypePath> paths_;
  std::set<std::string> keys_;
  std::vector<std::string> vocabulary_;
  std::map<std::string, std::size_t> position_;
  std::map<std::string, std::set<std::string>> parents_;
};

/// k-hot vector over an ontology vocabulary. The final slot is the
/// out-of-vocabulary bucket.
struct EventVector {
  std::vector<bool> bits;

  std::size_t size() const { return bits.size(); }
  bool oov() const { return !bits.empty() && bits.back(); }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
  }

  // Indices of set in-vocabulary bits (the OOV bucket is excluded).
  std::vector<std::size_t> known_types() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i + 1 < bits.size(); ++i) {
      if (bits[i]) out.push_back(i);
    }
    return out;
  }

  friend bool operator==(const EventVector&, const EventVector&) = default;
};

inline EventVector khot(const CausalGraph& graph,
                        const EventTypeOntology& ontology) {
  if (ontology.empty()) throw Error("khot: ontology is empty");
  EventVector v;
  v.bits.assign(ontology.size() + 1, false);
  auto mark = [&](const EventTypePath& p) {
    const auto idx = ontology.index_of(p.leaf());
    v.bits[idx ? *idx : ontology.size()] = true;
  };
  for (const CausalNode& n : graph.nodes()) {
    for (const EventTypePath& p : n.event_types) mark(p);
  }
  if (const auto doc = graph.metadata_value(kDocumentEventTypesKey)) {
    mark(parse_type_path(*doc));
  }
  return v;
}

/// Issues with a graph used as a schema: participant nodes, and labels whose
/// leaf does not resolve in the ontology (reported as free-form).
inline ValidationReport schema_label_issues(const SchemaGraph& graph,
                                            const EventTypeOntology& ontology) {
  ValidationReport report;
  for (std::size_t i = 0; i < graph.nodes().size(); ++i) {
    const CausalNode& n = graph.nodes()[i];
    const std::string locus = "node " + std::to_string(i);
    if (n.kind != NodeKind::Event) {
      report.push_back({locus, "participant node in schema " + n.id});
    }
    bool resolved = false;
    try {
      resolved = ontology.contains(parse_type_path(n.label).leaf());
    } catch (const Error&) {
      resolved = false;
    }
    if (!resolved) report.push_back({locus, "free-form label " + n.label});
  }
  return report;
}

inline EventTypeOntology load_ontology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open ontology file '" + path + "'");
  std::vector<EventTypePath> paths;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      paths.push_back(parse_type_path(t));
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return EventTypeOntology(paths);
}

inline void save_ontology(const EventTypeOntology& ontology,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write ontology file '" + path + "'");
  for (const auto& p : ontology.paths()) out << p.str() << '\n';
}

}  // namespace causalkit

#endif  // CAUSALKIT_ONTOLOGY_HPP
