/*
 * Copyright 2026 The georank Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GEORANK_JSON_UTIL_H_
#define GEORANK_JSON_UTIL_H_

#include <initializer_list>
#include <string>
#include <string_view>
#include <type_traits>

#include "georank/errors.h"
#include "nlohmann/json.hpp"

namespace georank {

inline void RequireObject(const nlohmann::json& j, std::string_view where) {
  if (!j.is_object()) {
    throw ConfigError(std::string(where) + ": expected a JSON object");
  }
}

inline void RejectUnknownKeys(const nlohmann::json& j,
                              std::initializer_list<std::string_view> known,
                              std::string_view where) {
  RequireObject(j, where);
  for (const auto& item : j.items()) {
    bool found = false;
    for (std::string_view k : known) found = found || item.key() == k;
    if (!found) {
      throw ConfigError("unknown key '" + item.key() + "' in " +
                        std::string(where));
    }
  }
}

// Leaves `out` untouched when the key is absent.
template <typename T>
void ReadOptional(const nlohmann::json& j, const char* key, T& out,
                  std::string_view where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!it->is_number_unsigned()) {
      throw ConfigError(std::string(where) + "." + key +
                        ": expected a non-negative integer");
    }
  }
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

}  // namespace georank

#endif  // GEORANK_JSON_UTIL_H_
