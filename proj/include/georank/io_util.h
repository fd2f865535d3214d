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

#ifndef GEORANK_IO_UTIL_H_
#define GEORANK_IO_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace georank {

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);
// Parses a full field as a double ("nan"/"inf" are accepted and returned
// as-is so that callers can report them). Throws DataError otherwise.
double ParseDouble(std::string_view field);
std::size_t ParseIndex(std::string_view field);

std::vector<std::string_view> SplitCsvLine(std::string_view line);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace georank

#endif  // GEORANK_IO_UTIL_H_
