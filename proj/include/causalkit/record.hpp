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

#ifndef CAUSALKIT_RECORD_HPP
#define CAUSALKIT_RECORD_HPP

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "causalkit/error.hpp"
#include "causalkit/event_type_path.hpp"
#include "causalkit/graph.hpp"
#include "causalkit/ontology.hpp"

namespace causalkit {

struct Triple {
  std::string head;
  std::string rel;
  std::string tail;
  std::optional<int> salience;

  friend bool operator==(const Triple&, const Triple&) = default;
};

/// One text / causal graph / QA record from a line-delimited corpus.
struct Record {
  std::string split;
  std::string source;
  std::string id;
  std::string notes;
  std::string topic;
  std::string text;
  std::vector<std::string> questions;
  std::vector<std::vector<std::string>> answers;
  // Node text -> semicolon-joined type path. Some sources carry a single
  // document-level path instead, kept separately.
  std::map<std::string, std::string> event_types;
  std::optional<std::string> document_event_types;
  std::optional<std::map<std::string, std::string>> noncausal_event_types;
  std::vector<Triple> triples;

  friend bool operator==(const Record&, const Record&) = default;
};

namespace detail {

using nlohmann::json;

inline std::string string_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw Error(std::string("field '") + key + "' is not a string");
  }
  return it->get<std::string>();
}

inline std::map<std::string, std::string> string_map(const json& obj,
                                                     const char* key) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : obj.items()) {
    if (!v.is_string()) {
      throw Error(std::string("field '") + key + "' entry '" + k +
                  "' is not a string");
    }
    out[k] = v.get<std::string>();
  }
  return out;
}

inline Triple parse_triple(const json& t, std::size_t index) {
  const std::string where = "malformed triple at index " + std::to_string(index);
  if (!t.is_object()) throw Error(where + ": not an object");
  Triple out;
  for (const char* key : {"head", "rel", "tail"}) {
    const auto it = t.find(key);
    if (it == t.end() || !it->is_string() || it->get<std::string>().empty()) {
      throw Error(where + ": missing or empty '" + key + "'");
    }
  }
  out.head = t["head"].get<std::string>();
  out.rel = t["rel"].get<std::string>();
  out.tail = t["tail"].get<std::string>();
  for (const char* key : {"saliency", "salience"}) {
    const auto it = t.find(key);
    if (it == t.end() || it->is_null()) continue;
    int v = -1;
    if (it->is_boolean()) v = it->get<bool>() ? 1 : 0;
    else if (it->is_number_integer()) v = it->get<int>();
    if (v != 0 && v != 1) throw Error(where + ": saliency must be 0 or 1");
    out.salience = v;
  }
  return out;
}

}  // namespace detail

inline Record record_from_json(const nlohmann::json& obj) {
  using detail::json;
  if (!obj.is_object()) throw Error("record is not an object");
  if (!obj.contains("text")) throw Error("record missing field 'text'");
  if (!obj.contains("causal_graph")) {
    throw Error("record missing field 'causal_graph'");
  }
  Record r;
  r.split = detail::string_field(obj, "split");
  r.source = detail::string_field(obj, "source");
  r.id = detail::string_field(obj, "@id");
  r.notes = detail::string_field(obj, "notes");
  r.topic = detail::string_field(obj, "topic");
  r.text = detail::string_field(obj, "text");

  if (const auto it = obj.find("questions"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw Error("field 'questions' is not a list");
    for (const auto& q : *it) {
      if (!q.is_string()) throw Error("field 'questions' holds a non-string");
      r.questions.push_back(q.get<std::string>());
    }
  }
  if (const auto it = obj.find("answers"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw Error("field 'answers' is not a list");
    for (const auto& a : *it) {
      // Answers are lists of mentions; a bare string is a one-item list.
      if (a.is_string()) {
        r.answers.push_back({a.get<std::string>()});
      } else if (a.is_array()) {
        std::vector<std::string> list;
        for (const auto& s : a) {
          if (!s.is_string()) throw Error("field 'answers' holds a non-string");
          list.push_back(s.get<std::string>());
        }
        r.answers.push_back(std::move(list));
      } else {
        throw Error("field 'answers' entry is neither list nor string");
      }
    }
  }
  if (!r.questions.empty() && !r.answers.empty() &&
      r.questions.size() != r.answers.size()) {
    throw Error("questions/answers length mismatch: " +
                std::to_string(r.questions.size()) + " vs " +
                std::to_string(r.answers.size()));
  }

  if (const auto it = obj.find("event_types"); it != obj.end() && !it->is_null()) {
    if (it->is_string()) r.document_event_types = it->get<std::string>();
    else if (it->is_object()) r.event_types = detail::string_map(*it, "event_types");
    else throw Error("field 'event_types' is neither map nor string");
  }
  if (const auto it = obj.find("noncausal_event_types");
      it != obj.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw Error("field 'noncausal_event_types' is not a map");
    }
    r.noncausal_event_types = detail::string_map(*it, "noncausal_event_types");
  }

  const json& cg = obj["causal_graph"];
  if (!cg.is_array()) throw Error("field 'causal_graph' is not a list");
  for (std::size_t i = 0; i < cg.size(); ++i) {
    r.triples.push_back(detail::parse_triple(cg[i], i));
  }
  return r;
}

inline Record parse_record(std::string_view text) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("record is not valid JSON: ") + e.what());
  }
  return record_from_json(obj);
}

inline nlohmann::json record_to_json(const Record& r) {
  nlohmann::json obj;
  obj["split"] = r.split;
  obj["source"] = r.source;
  obj["@id"] = r.id;
  obj["notes"] = r.notes;
  if (!r.topic.empty()) obj["topic"] = r.topic;
  obj["text"] = r.text;
  obj["questions"] = r.questions;
  obj["answers"] = r.answers;
  if (r.document_event_types) obj["event_types"] = *r.document_event_types;
  else obj["event_types"] = r.event_types;
  if (r.noncausal_event_types) {
    obj["noncausal_event_types"] = *r.noncausal_event_types;
  }
  nlohmann::json cg = nlohmann::json::array();
  for (const Triple& t : r.triples) {
    nlohmann::json e = {{"head", t.head}, {"rel", t.rel}, {"tail", t.tail}};
    if (t.salience) e["saliency"] = *t.salience;
    cg.push_back(std::move(e));
  }
  obj["causal_graph"] = std::move(cg);
  return obj;
}

/// One-line wire form of a record.
inline std::string serialize_record(const Record& r) {
  return record_to_json(r).dump();
}

namespace detail {

// Strips an `Entity::` marker. The released data also contains the
// single-colon spelling `Entity:`, accepted the same way.
inline std::optional<std::string> strip_entity_prefix(std::string_view s) {
  if (s.size() >= 7 && to_lower(s.substr(0, 7)) == "entity:") {
    std::string_view rest = s.substr(7);
    if (!rest.empty() && rest.front() == ':') rest.remove_prefix(1);
    return trim(rest);
  }
  return std::nullopt;
}

}  // namespace detail

/// Builds the graph for a record without running validation; unknown relation
/// strings are still rejected.
inline CausalGraph assemble_graph(const Record& record) {
  CausalGraph g(record.id);
  if (!record.split.empty()) g.set_metadata("split", record.split);
  if (!record.source.empty()) g.set_metadata("source", record.source);
  if (!record.notes.empty()) g.set_metadata("notes", record.notes);
  if (!record.topic.empty()) g.set_metadata("topic", record.topic);
  if (record.document_event_types) {
    g.set_metadata(kDocumentEventTypesKey, *record.document_event_types);
  }

  auto intern = [&](const std::string& raw) -> std::string {
    const auto stripped = detail::strip_entity_prefix(raw);
    const std::string label = stripped ? *stripped : raw;
    if (const auto idx = g.index_of(label)) {
      if (stripped) g.mutable_node(*idx).kind = NodeKind::Participant;
    } else {
      g.add_node({label, label,
                  stripped ? NodeKind::Participant : NodeKind::Event, {}});
    }
    return label;
  };

  for (std::size_t i = 0; i < record.triples.size(); ++i) {
    const Triple& t = record.triples[i];
    CausalEdge e;
    e.head = intern(t.head);
    e.tail = intern(t.tail);
    try {
      std::tie(e.relation, e.sub_relation) = parse_relation_label(t.rel);
    } catch (const Error& err) {
      throw Error("record '" + record.id + "' triple " + std::to_string(i) +
                  ": " + err.what());
    }
    e.salience = t.salience.value_or(0) == 1;
    g.add_edge(std::move(e));
  }

  for (const auto& [mention, path] : record.event_types) {
    const auto stripped = detail::strip_entity_prefix(mention);
    const auto idx = g.index_of(stripped ? *stripped : mention);
    if (!idx) continue;
    g.mutable_node(*idx).event_types.push_back(parse_type_path(path));
  }
  return g;
}

/// One node per distinct head/tail string (after `Entity::` stripping), one
/// edge per triple. The result is validated; duplicates and self-loops are
/// rejected.
inline CausalGraph record_to_graph(const Record& record) {
  CausalGraph g = assemble_graph(record);
  const ValidationReport report = validate(g);
  if (!report.empty()) {
    throw Error("record '" + record.id + "': " + report.front().locus + ": " +
                report.front().message);
  }
  return g;
}

/// Reads a line-delimited record file. Blank lines are skipped; errors carry
/// the 1-based line number.
inline std::vector<Record> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open record file '" + path + "'");
  std::vector<Record> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline void write_records(const std::vector<Record>& records,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write record file '" + path + "'");
  for (const Record& r : records) out << serialize_record(r) << '\n';
}

/// Every event type path a record set mentions: node-level maps, non-causal
/// maps and document-level paths.
inline std::vector<EventTypePath> collect_type_paths(
    const std::vector<Record>& records) {
  std::vector<EventTypePath> out;
  for (const Record& r : records) {
    for (const auto& [k, v] : r.event_types) out.push_back(parse_type_path(v));
    if (r.noncausal_event_types) {
      for (const auto& [k, v] : *r.noncausal_event_types) {
        out.push_back(parse_type_path(v));
      }
    }
    if (r.document_event_types) {
      out.push_back(parse_type_path(*r.document_event_types));
    }
  }
  return out;
}

}  // namespace causalkit

#endif  // CAUSALKIT_RECORD_HPP
