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

// Critic and editor prompt construction.
//
// Every builder is a pure function of its arguments. In particular nothing
// here can see earlier rounds of a session: each critic or editor call gets a
// freshly rendered, self-contained message list.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faithedit/backend.hpp"
#include "faithedit/core.hpp"

namespace faithedit {

enum class EditorStrategy {
  Editor,
  EditorSpan,
  EditorType,
  EditorSpanType,
  GoldSpan,
  GoldType,
  GoldSpanType,
};

inline constexpr std::array<EditorStrategy, 7> kAllStrategies = {
    EditorStrategy::Editor,       EditorStrategy::EditorSpan,
    EditorStrategy::EditorType,   EditorStrategy::EditorSpanType,
    EditorStrategy::GoldSpan,     EditorStrategy::GoldType,
    EditorStrategy::GoldSpanType,
};

// "Editor", "EditorSpan", "EditorType", "EditorSpan+Type", "GoldSpan",
// "GoldType", "GoldSpan+Type".
std::string_view to_string(EditorStrategy s);
std::optional<EditorStrategy> parse_strategy(std::string_view s);

bool needs_gold_span(EditorStrategy s);
bool needs_gold_types(EditorStrategy s);
bool has_type_glossary(EditorStrategy s);

// Labeled sections a strategy asks the model to answer with.
enum class AnswerField { Span, ErrorTypes, Summary, Reasoning };

std::string_view header_text(AnswerField f);
std::span<const AnswerField> answer_fields(EditorStrategy s);

struct CriticDemo {
  std::string article;
  std::string summary;
  int target = 0;

  bool operator==(const CriticDemo&) const = default;
};

// Two scale demonstrations (targets 2 then 4) and two binary demonstrations
// (targets 0 then 1).
struct CriticDemos {
  std::vector<CriticDemo> scale;
  std::vector<CriticDemo> binary;

  bool operator==(const CriticDemos&) const = default;
};

// Built-in demonstrations; identical to data/critic_demos.json.
const CriticDemos& default_critic_demos();
std::string_view default_critic_demos_json();
CriticDemos parse_critic_demos(std::string_view json_text);
CriticDemos load_critic_demos(const std::string& path);

struct PromptConfig {
  CriticMode critic_mode = CriticMode::Scale5;
  CriticDemos demos = default_critic_demos();
  // Overrides the per-dataset editor sentence budget when set.
  std::optional<int> sentence_budget;
};

int editor_sentence_budget(const PromptConfig& config, Dataset dataset);

// Demonstration articles are cut to their first five sentences; the target
// article is passed through whole.
inline constexpr int kDemoArticleSentences = 5;

ChatRequest build_critic_prompt(const PromptConfig& config,
                                std::string_view article,
                                std::string_view summary);
ChatRequest build_critic_prompt_binary(const PromptConfig& config,
                                       std::string_view article,
                                       std::string_view summary);
// Dispatches on config.critic_mode.
ChatRequest build_critic_request(const PromptConfig& config,
                                 std::string_view article,
                                 std::string_view summary);

ChatRequest build_editor_prompt(EditorStrategy strategy,
                                const DocumentSummaryPair& pair,
                                int sentence_budget,
                                std::string_view current_summary);

// Sentence segmentation: a sentence ends at [.!?] (plus any closing quotes)
// followed by whitespace and an uppercase letter, unless the word is a known
// abbreviation ("Mr.", "U.S.", ...).
std::vector<std::string_view> split_sentences(std::string_view text);
std::string truncate_to_sentences(std::string_view text, int k);

// Plain-text rendering of a message list, one "[role]" line before each
// message body. This is the on-disk format of the golden prompt files.
std::string render_transcript(const ChatRequest& request);

// The fixed pair the golden prompt files are rendered from.
DocumentSummaryPair golden_probe_pair();
// name -> transcript for both critic modes and all seven editor strategies,
// rendered for golden_probe_pair() with the given demos.
std::vector<std::pair<std::string, std::string>> render_probe_prompts(
    const CriticDemos& demos);

}  // namespace faithedit
