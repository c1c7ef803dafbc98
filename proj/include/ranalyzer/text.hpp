// Copyright 2026 The RANalyzer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ranalyzer::text {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Full-string parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string lower(std::string_view s);

/// FNV-1a, 64 bit. Used for model fingerprints.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

/// Reads a whole file; throws DataError when unreadable.
std::string read_file(const std::string& path);
/// Writes atomically enough for CLI use (truncate + write); throws DataError on failure.
void write_file(const std::string& path, std::string_view content);

}  // namespace ranalyzer::text
