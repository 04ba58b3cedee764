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

#ifndef CAUSALKIT_PROMPT_HPP
#define CAUSALKIT_PROMPT_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "causalkit/error.hpp"
#include "causalkit/event_type_path.hpp"
#include "causalkit/random.hpp"
#include "causalkit/record.hpp"

namespace causalkit {

inline constexpr std::string_view kGenToken = "[GEN]";

struct PromptConfig {
  std::size_t qa_min = 2;
  std::size_t qa_max = 3;
  // Answers with little eventive meaning, dropped before rendering.
  std::set<std::string> light_verb_stoplist = {"was", "is",   "are", "be",
                                               "been", "had", "has", "have"};
  std::uint64_t seed = 0;

  void check() const {
    if (qa_min < 1 || qa_max < qa_min) {
      throw Error("prompt config: qa count range must satisfy 1 <= min <= max");
    }
  }
};

/// `TEXT: <text>` followed by a seeded selection of question/answer lines and
/// the generation marker.
inline std::string build_prompt_temporal(const Record& record,
                                         const PromptConfig& config) {
  config.check();
  if (record.questions.empty()) {
    throw Error("prompt-temporal: record '" + record.id + "' has no questions");
  }
  std::vector<std::vector<std::string>> filtered(record.questions.size());
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < record.questions.size(); ++i) {
    if (i < record.answers.size()) {
      for (const std::string& a : record.answers[i]) {
        const std::string key = detail::to_lower(detail::trim(a));
        if (key.empty() || config.light_verb_stoplist.count(key)) continue;
        filtered[i].push_back(a);
      }
    }
    if (!filtered[i].empty()) pool.push_back(i);
  }

  Rng rng(config.seed);
  const auto wanted = static_cast<std::size_t>(rng.uniform_int(
      static_cast<long long>(config.qa_min),
      static_cast<long long>(config.qa_max)));
  const std::size_t count = std::min(wanted, pool.size());

  std::string out = "TEXT: " + record.text + "\n";
  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t pick = rng.uniform_index(pool.size());
    const std::size_t q = pool[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    out += record.questions[q];
    out += ' ';
    for (std::size_t k = 0; k < filtered[q].size(); ++k) {
      if (k) out += ", ";
      out += filtered[q][k];
    }
    out += '\n';
  }
  out += kGenToken;
  return out;
}

struct DensePrompt {
  std::string text;
  // Map keys that were not found in the record text.
  std::vector<std::string> skipped;
};

namespace detail {

inline bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || u == '_';
}

// First occurrence of `needle` in `hay` that starts and ends on word
// boundaries.
inline std::size_t find_mention(std::string_view hay, std::string_view needle) {
  if (needle.empty()) return std::string_view::npos;
  std::size_t pos = hay.find(needle);
  while (pos != std::string_view::npos) {
    const bool left_ok = pos == 0 || !is_word_byte(hay[pos - 1]);
    const std::size_t end = pos + needle.size();
    const bool right_ok = end == hay.size() || !is_word_byte(hay[end]);
    if (left_ok && right_ok) return pos;
    pos = hay.find(needle, pos + 1);
  }
  return std::string_view::npos;
}

}  // namespace detail

/// Dense paraphrase: each typed mention found in the text gets its leaf type
/// (or `Entity`) and `::` prepended at its first occurrence. Overlapping
/// mentions resolve to the earliest, then longest, key.
inline DensePrompt build_prompt_dense(const Record& record) {
  struct Mention {
    std::size_t start;
    std::size_t length;
    std::string key;
    std::string prefix;
  };
  DensePrompt result;
  std::vector<Mention> found;

  auto consider = [&](const std::string& key, const std::string& path) {
    std::string needle = key;
    std::string prefix;
    if (const auto stripped = detail::strip_entity_prefix(key)) {
      needle = *stripped;
      prefix = "Entity::";
    } else if (detail::to_lower(detail::trim(path)) == "entity") {
      prefix = "Entity::";
    } else {
      prefix = parse_type_path(path).leaf() + "::";
    }
    const std::size_t at = detail::find_mention(record.text, needle);
    if (at == std::string_view::npos) {
      result.skipped.push_back(key);
      return;
    }
    found.push_back({at, needle.size(), key, prefix});
  };
  for (const auto& [k, v] : record.event_types) consider(k, v);
  if (record.noncausal_event_types) {
    for (const auto& [k, v] : *record.noncausal_event_types) consider(k, v);
  }

  std::sort(found.begin(), found.end(), [](const Mention& a, const Mention& b) {
    return std::make_tuple(a.start, b.length, a.key) <
           std::make_tuple(b.start, a.length, b.key);
  });
  std::vector<Mention> chosen;
  std::size_t covered_until = 0;
  for (const Mention& m : found) {
    if (!chosen.empty() && m.start < covered_until) continue;
    chosen.push_back(m);
    covered_until = m.start + m.length;
  }

  std::string body;
  std::size_t cursor = 0;
  for (const Mention& m : chosen) {
    body.append(record.text, cursor, m.start - cursor);
    body += m.prefix;
    cursor = m.start;
  }
  body.append(record.text, cursor, std::string::npos);

  result.text = "TEXT: " + body + "\n" + std::string(kGenToken);
  return result;
}

}  // namespace causalkit

#endif  // CAUSALKIT_PROMPT_HPP
