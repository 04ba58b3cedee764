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

#ifndef CAUSALKIT_EVENT_TYPE_PATH_HPP
#define CAUSALKIT_EVENT_TYPE_PATH_HPP

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "causalkit/error.hpp"

namespace causalkit {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::toupper(c));
  });
  return out;
}

}  // namespace detail

/// Hierarchical event type such as `Action;Legality;Legal_rulings`, most
/// general level first. Levels keep their original case.
class EventTypePath {
 public:
  EventTypePath() = default;
  explicit EventTypePath(std::vector<std::string> levels)
      : levels_(std::move(levels)) {
    if (levels_.empty()) throw Error("event type path: no levels");
    for (const auto& level : levels_) {
      if (level.empty()) throw Error("event type path: empty segment");
      if (level.find(';') != std::string::npos) {
        throw Error("event type path: embedded ';' in level '" + level + "'");
      }
    }
  }

  const std::vector<std::string>& levels() const { return levels_; }
  std::size_t depth() const { return levels_.size(); }
  bool empty() const { return levels_.empty(); }
  const std::string& leaf() const { return levels_.back(); }
  std::string leaf_key() const { return detail::to_lower(levels_.back()); }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (i) out += ';';
      out += levels_[i];
    }
    return out;
  }

  friend bool operator==(const EventTypePath&, const EventTypePath&) = default;
  friend auto operator<=>(const EventTypePath&, const EventTypePath&) = default;

 private:
  std::vector<std::string> levels_;
};

/// Splits on `;` and trims each level. Empty input or an empty segment is
/// rejected.
inline EventTypePath parse_type_path(std::string_view text) {
  const std::string trimmed = detail::trim(text);
  if (trimmed.empty()) throw Error("event type path: empty string");
  std::vector<std::string> levels;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = trimmed.find(';', start);
    const std::string level = detail::trim(std::string_view(trimmed).substr(
        start, pos == std::string::npos ? std::string::npos : pos - start));
    if (level.empty()) {
      throw Error("event type path: empty segment in '" + trimmed + "'");
    }
    levels.push_back(level);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return EventTypePath(std::move(levels));
}

inline EventTypePath truncate_to_level(const EventTypePath& path,
                                       std::size_t level) {
  if (level == 0) throw Error("truncate_to_level: level must be >= 1");
  const auto& levels = path.levels();
  const std::size_t keep = std::min(level, levels.size());
  return EventTypePath(
      std::vector<std::string>(levels.begin(), levels.begin() + keep));
}

}  // namespace causalkit

#endif  // CAUSALKIT_EVENT_TYPE_PATH_HPP
