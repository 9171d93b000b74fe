// Copyright 2026 The faithedit Authors.
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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace faithedit::text {

bool is_space(char c) noexcept;
std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool icontains(std::string_view haystack, std::string_view needle) noexcept;

// Collapses every whitespace run to one space and trims the ends.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string_view> split_lines(std::string_view s);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view s) noexcept;
std::string hex64(std::uint64_t v);

// Git blob object id: sha1("blob <len>\0" + content), lowercase hex.
std::string git_blob_sha1(std::string_view content);

// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

std::string read_file(const std::string& path);
// Writes via a sibling temp file and rename.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace faithedit::text
