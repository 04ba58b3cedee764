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

#ifndef CAUSALKIT_SCHEMA_LIBRARY_HPP
#define CAUSALKIT_SCHEMA_LIBRARY_HPP

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "causalkit/error.hpp"
#include "causalkit/graph.hpp"
#include "causalkit/record.hpp"

namespace causalkit {

struct SchemaEntry {
  std::string schema_id;
  CausalGraph graph;
  std::optional<std::string> topic;
  std::string text;  // source text when the entry came from a record
};

struct SchemaLibrary {
  std::vector<SchemaEntry> entries;

  std::size_t size() const { return entries.size(); }
};

// Each line is either a full record (schema id from `schema_id`, else `@id`)
// or a bare schema entry {"schema_id", "topic", "causal_graph"}. The topic
// falls back to the record's topic metadata.
inline SchemaLibrary load_schema_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schema library '" + path + "'");
  SchemaLibrary lib;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    try {
      nlohmann::json obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw Error("entry is not an object");
      if (!obj.contains("text")) obj["text"] = "";
      if (!obj.contains("@id") && obj.contains("schema_id")) {
        obj["@id"] = obj["schema_id"];
      }
      const Record record = record_from_json(obj);
      SchemaEntry entry;
      entry.schema_id = obj.contains("schema_id")
                            ? obj["schema_id"].get<std::string>()
                            : record.id;
      if (entry.schema_id.empty()) throw Error("entry has no schema id");
      entry.graph = record_to_graph(record);
      entry.graph.set_id(entry.schema_id);
      entry.topic = entry.graph.metadata_value("topic");
      entry.text = record.text;
      if (!ids.insert(entry.schema_id).second) {
        throw Error("duplicate schema id '" + entry.schema_id + "'");
      }
      lib.entries.push_back(std::move(entry));
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + e.what());
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
  }
  return lib;
}

}  // namespace causalkit

#endif  // CAUSALKIT_SCHEMA_LIBRARY_HPP
