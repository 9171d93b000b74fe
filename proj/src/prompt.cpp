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

#include "faithedit/prompt.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

#include "faithedit/text_util.hpp"

namespace faithedit {

namespace {

#include "critic_demos.inc"

constexpr std::string_view kCriticSystem =
    "You are a helpful assistant that scores the faithfulness of a generated "
    "summary with respect to the summarized article.";

constexpr std::string_view kScaleInstruction =
    "Score as 5 faithful, 4 mostly faithful, 3 neutral, 2 mostly unfaithful, "
    "or 1 unfaithful.";
constexpr std::string_view kScaleRanking = "Ranking (5, 4, 3, 2, or 1):";
constexpr std::string_view kBinaryInstruction =
    "Score as 1 factual or 0 nonfactual.";
constexpr std::string_view kBinaryRanking = "Ranking (1 or 0):";

constexpr std::array<std::string_view, 9> kGlossary = {
    "A summary can be inconsistent with its source article in different "
    "ways, such as",
    "Predicate Error: The predicate in the summary is inconsistent with the "
    "source article;",
    "Entity Error: The primary arguments (or their attributes) of the "
    "predicate are wrong;",
    "Circumstance Error: The additional information (like location or time) "
    "specifying the circumstance around a predicate is wrong;",
    "Out of Article Error: The summary contains information not present in "
    "the source article;",
    "Grammatical Error: The grammar of the summary is so wrong that it "
    "becomes meaningless;",
    "Coreference Error: A pronoun/reference with wrong or nonexisting "
    "antecedent;",
    "Discourse Link Error: Error in how multiple summary statements are "
    "linked together in the discourse (for example temporal ordering/causal "
    "link);",
    "and Other Error.",
};

constexpr std::array<std::string_view, 3> kOrdinals = {"One", "Two", "Three"};

constexpr std::array<AnswerField, 1> kFieldsEditor = {AnswerField::Summary};
constexpr std::array<AnswerField, 2> kFieldsSpan = {AnswerField::Span,
                                                    AnswerField::Summary};
constexpr std::array<AnswerField, 2> kFieldsType = {AnswerField::ErrorTypes,
                                                    AnswerField::Summary};
constexpr std::array<AnswerField, 4> kFieldsSpanType = {
    AnswerField::Span, AnswerField::ErrorTypes, AnswerField::Summary,
    AnswerField::Reasoning};
constexpr std::array<AnswerField, 2> kFieldsGold = {AnswerField::Summary,
                                                    AnswerField::Reasoning};

std::string instruction(EditorStrategy s, int n) {
  const std::string tail =
      "to make it more consistent with the source article in " +
      std::to_string(n) + " sentence(s):";
  switch (s) {
    case EditorStrategy::Editor:
      return "Please edit the summary " + tail;
    case EditorStrategy::EditorSpan:
      return "Find the span in the summary that is inconsistent with the "
             "source article, then edit the summary " + tail;
    case EditorStrategy::EditorType:
      return "Find the error type(s) in the summary that is inconsistent with "
             "the source article, then edit the summary based on the "
             "inconsistent error types " + tail;
    case EditorStrategy::EditorSpanType:
      return "Find the span and corresponding error type(s) in the summary "
             "that is inconsistent with the source article, then edit the "
             "summary based on the inconsistent span and error types " + tail;
    case EditorStrategy::GoldSpan:
      return "Given the span(s) in the summary that are inconsistent with the "
             "source article, edit the summary based on the span " + tail;
    case EditorStrategy::GoldType:
      return "Given the error type(s) in the summary that are inconsistent "
             "with the source article, edit the summary based on the error "
             "types " + tail;
    case EditorStrategy::GoldSpanType:
      return "Given the span(s) and the error type(s) in the summary that are "
             "inconsistent with the source article, edit the summary based on "
             "the span and error types " + tail;
  }
  return {};
}

std::string_view footer_intro(EditorStrategy s) {
  switch (s) {
    case EditorStrategy::Editor:
    case EditorStrategy::EditorSpan:
      return "Answer in the following format";
    case EditorStrategy::EditorType:
      return "Explain your reasoning step by step and answer in the following "
             "strict format";
    case EditorStrategy::EditorSpanType:
      return "Explain your reasoning step by step and answer in the following "
             "strict format (if there are multiple inconsistent spans, give "
             "only one)";
    case EditorStrategy::GoldSpan:
    case EditorStrategy::GoldType:
    case EditorStrategy::GoldSpanType:
      return "Explain your reasoning step by step and answer in the following "
             "strict format.";
  }
  return {};
}

void check_demos(const std::vector<CriticDemo>& demos,
                 std::array<int, 2> targets, std::string_view which) {
  if (demos.size() != targets.size()) {
    throw Error(ErrorCode::MissingDemos,
                std::string(which) + " critic needs exactly 2 demonstrations");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (demos[i].target != targets[i]) {
      throw Error(ErrorCode::MissingDemos,
                  std::string(which) + " demonstration " + std::to_string(i) +
                      " must have target " + std::to_string(targets[i]));
    }
    if (text::trim(demos[i].article).empty() ||
        text::trim(demos[i].summary).empty()) {
      throw Error(ErrorCode::MissingDemos,
                  std::string(which) + " demonstration " + std::to_string(i) +
                      " is empty");
    }
  }
}

std::string critic_turn(std::string_view ordinal, std::string_view instr,
                        std::string_view ranking, std::string_view article,
                        std::string_view summary) {
  std::string out;
  out += "Is Summary ";
  out += ordinal;
  out += " faithful or not based on Article ";
  out += ordinal;
  out += "? ";
  out += instr;
  out += "\nArticle ";
  out += ordinal;
  out += ": ";
  out += article;
  out += "\nSummary ";
  out += ordinal;
  out += ": ";
  out += summary;
  out += '\n';
  out += ranking;
  return out;
}

ChatRequest critic_request(const std::vector<CriticDemo>& demos,
                           std::string_view instr, std::string_view ranking,
                           std::string_view article, std::string_view summary) {
  if (text::trim(article).empty() || text::trim(summary).empty()) {
    throw SchemaError("critic", "article and summary must be non-empty");
  }
  ChatRequest req;
  req.messages.push_back({Role::System, std::string(kCriticSystem)});
  for (std::size_t i = 0; i < demos.size(); ++i) {
    const auto& d = demos[i];
    req.messages.push_back(
        {Role::User,
         critic_turn(kOrdinals[i], instr, ranking,
                     truncate_to_sentences(d.article, kDemoArticleSentences),
                     d.summary)});
    req.messages.push_back({Role::Assistant, std::to_string(d.target)});
  }
  req.messages.push_back(
      {Role::User,
       critic_turn(kOrdinals[demos.size()], instr, ranking, article, summary)});
  return req;
}

std::vector<CriticDemo> parse_demo_list(const nlohmann::json& doc,
                                        const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw SchemaError(std::string("$.") + key, "expected an array");
  }
  std::vector<CriticDemo> out;
  for (std::size_t i = 0; i < doc[key].size(); ++i) {
    const auto& d = doc[key][i];
    const std::string where =
        std::string("$.") + key + "[" + std::to_string(i) + "]";
    if (!d.is_object() || !d.contains("article") || !d["article"].is_string() ||
        !d.contains("summary") || !d["summary"].is_string() ||
        !d.contains("target") || !d["target"].is_number_integer()) {
      throw SchemaError(where, "expected {article, summary, target}");
    }
    out.push_back({d["article"].get<std::string>(),
                   d["summary"].get<std::string>(), d["target"].get<int>()});
  }
  return out;
}

bool is_abbreviation(std::string_view word) {
  static constexpr std::array<std::string_view, 24> kAbbrev = {
      "Mr.",  "Mrs.", "Ms.",  "Dr.",  "Prof.", "Sr.",  "Jr.",  "St.",
      "Gen.", "Sen.", "Rep.", "Gov.", "Lt.",   "Col.", "Capt.", "Sgt.",
      "Rev.", "Hon.", "Mt.",  "No.",  "U.S.",  "U.K.", "U.N.", "E.U.",
  };
  return std::find(kAbbrev.begin(), kAbbrev.end(), word) != kAbbrev.end();
}

// Length of a closing quote or bracket at text[i], 0 if none.
std::size_t closer_len(std::string_view text, std::size_t i) {
  const char c = text[i];
  if (c == '"' || c == '\'' || c == ')') return 1;
  // U+2019 and U+201D
  if (text.substr(i, 3) == "\xE2\x80\x99" || text.substr(i, 3) == "\xE2\x80\x9D") {
    return 3;
  }
  return 0;
}

std::size_t opener_len(std::string_view text, std::size_t i) {
  const char c = text[i];
  if (c == '"' || c == '\'' || c == '(') return 1;
  // U+2018 and U+201C
  if (text.substr(i, 3) == "\xE2\x80\x98" || text.substr(i, 3) == "\xE2\x80\x9C") {
    return 3;
  }
  return 0;
}

}  // namespace

std::string_view to_string(EditorStrategy s) {
  switch (s) {
    case EditorStrategy::Editor: return "Editor";
    case EditorStrategy::EditorSpan: return "EditorSpan";
    case EditorStrategy::EditorType: return "EditorType";
    case EditorStrategy::EditorSpanType: return "EditorSpan+Type";
    case EditorStrategy::GoldSpan: return "GoldSpan";
    case EditorStrategy::GoldType: return "GoldType";
    case EditorStrategy::GoldSpanType: return "GoldSpan+Type";
  }
  return "";
}

std::optional<EditorStrategy> parse_strategy(std::string_view s) {
  std::string key;
  for (char c : s) {
    if (c == '+' || c == '_' || c == '-' || text::is_space(c)) continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (auto st : kAllStrategies) {
    std::string name;
    for (char c : to_string(st)) {
      if (c != '+') {
        name.push_back(
            static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    if (name == key) return st;
  }
  return std::nullopt;
}

bool needs_gold_span(EditorStrategy s) {
  return s == EditorStrategy::GoldSpan || s == EditorStrategy::GoldSpanType;
}

bool needs_gold_types(EditorStrategy s) {
  return s == EditorStrategy::GoldType || s == EditorStrategy::GoldSpanType;
}

bool has_type_glossary(EditorStrategy s) {
  return s != EditorStrategy::Editor && s != EditorStrategy::EditorSpan;
}

std::string_view header_text(AnswerField f) {
  switch (f) {
    case AnswerField::Span: return "Inconsistent span:";
    case AnswerField::ErrorTypes: return "Error types:";
    case AnswerField::Summary: return "Post-edited summary:";
    case AnswerField::Reasoning: return "Reasoning:";
  }
  return "";
}

std::span<const AnswerField> answer_fields(EditorStrategy s) {
  switch (s) {
    case EditorStrategy::Editor: return kFieldsEditor;
    case EditorStrategy::EditorSpan: return kFieldsSpan;
    case EditorStrategy::EditorType: return kFieldsType;
    case EditorStrategy::EditorSpanType: return kFieldsSpanType;
    case EditorStrategy::GoldSpan:
    case EditorStrategy::GoldType:
    case EditorStrategy::GoldSpanType: return kFieldsGold;
  }
  return {};
}

std::string_view default_critic_demos_json() { return kDefaultCriticDemosJson; }

const CriticDemos& default_critic_demos() {
  static const CriticDemos demos = parse_critic_demos(kDefaultCriticDemosJson);
  return demos;
}

CriticDemos parse_critic_demos(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("$", e.what());
  }
  if (!doc.is_object()) throw SchemaError("$", "expected an object");
  CriticDemos out{parse_demo_list(doc, "scale"), parse_demo_list(doc, "binary")};
  check_demos(out.scale, {2, 4}, "scale");
  check_demos(out.binary, {0, 1}, "binary");
  return out;
}

CriticDemos load_critic_demos(const std::string& path) {
  try {
    return parse_critic_demos(text::read_file(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path, e.what());
  }
}

int editor_sentence_budget(const PromptConfig& config, Dataset dataset) {
  if (config.sentence_budget) {
    if (*config.sentence_budget < 1) {
      throw Error(ErrorCode::ConfigError, "sentence budget must be >= 1");
    }
    return *config.sentence_budget;
  }
  return sentence_budget(dataset);
}

ChatRequest build_critic_prompt(const PromptConfig& config,
                                std::string_view article,
                                std::string_view summary) {
  check_demos(config.demos.scale, {2, 4}, "scale");
  return critic_request(config.demos.scale, kScaleInstruction, kScaleRanking,
                        article, summary);
}

ChatRequest build_critic_prompt_binary(const PromptConfig& config,
                                       std::string_view article,
                                       std::string_view summary) {
  check_demos(config.demos.binary, {0, 1}, "binary");
  return critic_request(config.demos.binary, kBinaryInstruction, kBinaryRanking,
                        article, summary);
}

ChatRequest build_critic_request(const PromptConfig& config,
                                 std::string_view article,
                                 std::string_view summary) {
  return config.critic_mode == CriticMode::Binary
             ? build_critic_prompt_binary(config, article, summary)
             : build_critic_prompt(config, article, summary);
}

ChatRequest build_editor_prompt(EditorStrategy strategy,
                                const DocumentSummaryPair& pair,
                                int sentence_budget,
                                std::string_view current_summary) {
  if (sentence_budget < 1) {
    throw Error(ErrorCode::ConfigError, "sentence budget must be >= 1");
  }
  if (needs_gold_span(strategy) &&
      (!pair.gold_span || text::trim(*pair.gold_span).empty())) {
    throw Error(ErrorCode::MissingGoldAnnotation,
                "pair " + pair.id + " has no gold span");
  }
  if (needs_gold_types(strategy) &&
      (!pair.gold_error_types || pair.gold_error_types->empty())) {
    throw Error(ErrorCode::MissingGoldAnnotation,
                "pair " + pair.id + " has no gold error types");
  }

  std::string body;
  if (has_type_glossary(strategy)) {
    for (auto line : kGlossary) {
      body += line;
      body += '\n';
    }
    body += '\n';
  }
  body += instruction(strategy, sentence_budget);
  body += "\nSource article: ";
  body += pair.article;
  body += "\nInconsistent summary: ";
  body += current_summary;
  if (needs_gold_span(strategy)) {
    body += "\nInconsistent span: ";
    body += *pair.gold_span;
  }
  if (needs_gold_types(strategy)) {
    body += "\nInconsistent error types: ";
    body += format_error_types(*pair.gold_error_types);
  }
  body += "\n\n";
  body += footer_intro(strategy);
  for (auto f : answer_fields(strategy)) {
    body += '\n';
    body += header_text(f);
  }

  ChatRequest req;
  req.messages.push_back({Role::User, std::move(body)});
  return req;
}

std::vector<std::string_view> split_sentences(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size() && text::is_space(text[start])) ++start;
  std::size_t word_start = start;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (text::is_space(c)) {
      word_start = i + 1;
      continue;
    }
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t end = i + 1;
    while (end < text.size()) {
      const std::size_t n = closer_len(text, end);
      if (n == 0) break;
      end += n;
    }
    std::size_t k = end;
    while (k < text.size() && text::is_space(text[k])) ++k;
    if (k == end || k >= text.size()) continue;
    while (k < text.size()) {
      const std::size_t n = opener_len(text, k);
      if (n == 0) break;
      k += n;
    }
    if (k >= text.size() ||
        !std::isupper(static_cast<unsigned char>(text[k]))) {
      continue;
    }
    if (c == '.' && is_abbreviation(text.substr(word_start, i + 1 - word_start))) {
      continue;
    }
    out.push_back(text.substr(start, end - start));
    start = end;
    while (start < text.size() && text::is_space(text[start])) ++start;
    i = start - 1;
    word_start = start;
  }
  auto tail = text::trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) out.push_back(tail);
  return out;
}

std::string truncate_to_sentences(std::string_view text, int k) {
  if (k < 1) throw Error(ErrorCode::OutOfRange, "k must be >= 1");
  const auto sentences = split_sentences(text);
  if (sentences.size() <= static_cast<std::size_t>(k)) return std::string(text);
  const auto& last = sentences[static_cast<std::size_t>(k) - 1];
  return std::string(
      text.substr(0, static_cast<std::size_t>(last.data() - text.data()) +
                         last.size()));
}

std::string render_transcript(const ChatRequest& request) {
  std::string out;
  for (const auto& m : request.messages) {
    out += '[';
    out += to_string(m.role);
    out += "]\n";
    out += m.content;
    out += '\n';
  }
  return out;
}

DocumentSummaryPair golden_probe_pair() {
  DocumentSummaryPair p;
  p.id = "probe-001";
  p.dataset = Dataset::CnnDm;
  p.article =
      "The city council of Rivermouth voted on Tuesday to expand the harbour "
      "ferry service. The new route will link the old port with the "
      "university campus. Council leader Ana Reyes said the first boats would "
      "sail in May.";
  p.input_summary =
      "The Rivermouth council voted on Monday to close the harbour ferry "
      "service.";
  p.sentence_labels = std::vector<int>{1};
  p.gold_span = "voted on Monday to close";
  p.gold_error_types =
      ErrorTypeSet{ErrorType::PredicateError, ErrorType::CircumstanceError};
  return p;
}

std::vector<std::pair<std::string, std::string>> render_probe_prompts(
    const CriticDemos& demos) {
  const auto pair = golden_probe_pair();
  PromptConfig config;
  config.demos = demos;
  const int n = editor_sentence_budget(config, pair.dataset);
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("critic_scale",
                   render_transcript(build_critic_prompt(
                       config, pair.article, pair.input_summary)));
  out.emplace_back("critic_binary",
                   render_transcript(build_critic_prompt_binary(
                       config, pair.article, pair.input_summary)));
  static constexpr std::array<std::string_view, 7> kNames = {
      "editor",    "editor_span", "editor_type",   "editor_span_type",
      "gold_span", "gold_type",   "gold_span_type",
  };
  for (std::size_t i = 0; i < kAllStrategies.size(); ++i) {
    out.emplace_back(std::string(kNames[i]),
                     render_transcript(build_editor_prompt(
                         kAllStrategies[i], pair, n, pair.input_summary)));
  }
  return out;
}

}  // namespace faithedit
