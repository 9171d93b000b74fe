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

// Parsing of critic and editor responses.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "faithedit/core.hpp"
#include "faithedit/prompt.hpp"

namespace faithedit {

// Throws NoScoreFound when no in-range score can be located.
CriticVerdict parse_critic(std::string_view raw, CriticMode mode);
// Same, but an unparseable response yields a verdict without a value.
CriticVerdict parse_critic_lenient(std::string_view raw, CriticMode mode);

enum class ParseStatus { Clean, Recovered, Failed };

std::string_view to_string(ParseStatus s);
std::optional<ParseStatus> parse_parse_status(std::string_view s);

struct EditorOutput {
  std::optional<std::string> span;
  std::optional<ErrorTypeSet> error_types;
  std::string edited_summary;
  std::optional<std::string> reasoning;
  ParseStatus parse_status = ParseStatus::Failed;
  std::string raw;

  bool operator==(const EditorOutput&) const = default;
};

EditorOutput parse_editor(std::string_view raw, EditorStrategy strategy);

// Splits on commas, semicolons, slashes, newlines and the word "and". Unknown
// tokens are dropped with a warning; "None" yields the empty set.
ErrorTypeSet parse_error_types(std::string_view fragment);

// Renders the fields present in `out` in the strategy's strict answer format.
std::string format_editor_response(const EditorOutput& out,
                                   EditorStrategy strategy);

// Lowercase phrases that mark a response as a refusal when no header parses.
const std::array<std::string_view, 9>& refusal_phrases();

}  // namespace faithedit
