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

#include "faithedit/parse.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "faithedit/log.hpp"
#include "faithedit/text_util.hpp"

namespace faithedit {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Removes every case-insensitive occurrence of `needle`.
std::string erase_all(std::string s, std::string_view needle) {
  for (;;) {
    const std::string lower = text::to_lower(s);
    const auto pos = lower.find(needle);
    if (pos == std::string::npos) return s;
    s.erase(pos, needle.size());
  }
}

std::optional<int> find_score(std::string_view raw, CriticMode mode) {
  std::string s(raw);
  s = erase_all(std::move(s), "(5, 4, 3, 2, or 1)");
  s = erase_all(std::move(s), "(1 or 0)");
  const int lo = mode == CriticMode::Binary ? 0 : 1;
  const int hi = mode == CriticMode::Binary ? 1 : 5;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_digit(s[i]) || (i > 0 && (is_alnum(s[i - 1]) || s[i - 1] == '.'))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_digit(s[j])) ++j;
    bool fractional = false;
    if (j + 1 < s.size() && s[j] == '.' && is_digit(s[j + 1])) fractional = true;
    const bool glued = j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]));
    if (!fractional && !glued && j - i <= 2) {
      const int v = std::stoi(s.substr(i, j - i));
      if (v >= lo && v <= hi) return v;
    }
    i = j;
    while (i < s.size() && (is_digit(s[i]) || s[i] == '.')) ++i;
  }
  return std::nullopt;
}

struct HeaderAlias {
  std::string_view text;
  AnswerField field;
};

// Longest aliases first so a shorter one never shadows a longer one.
constexpr std::array<HeaderAlias, 13> kHeaderAliases = {{
    {"inconsistent error types", AnswerField::ErrorTypes},
    {"predicted error span", AnswerField::Span},
    {"post-edited summary", AnswerField::Summary},
    {"post edited summary", AnswerField::Summary},
    {"inconsistent spans", AnswerField::Span},
    {"inconsistent span", AnswerField::Span},
    {"edited summary", AnswerField::Summary},
    {"error type(s)", AnswerField::ErrorTypes},
    {"error types", AnswerField::ErrorTypes},
    {"error type", AnswerField::ErrorTypes},
    {"error span", AnswerField::Span},
    {"reasoning", AnswerField::Reasoning},
    {"explanation", AnswerField::Reasoning},
}};

bool is_markup(char c) { return c == '*' || c == '_' || c == '#' || c == '`'; }

struct HeaderHit {
  AnswerField field;
  std::string rest;
};

std::optional<HeaderHit> match_header(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() &&
         (text::is_space(line[i]) || is_markup(line[i]) || line[i] == '-' ||
          line[i] == '>')) {
    ++i;
  }
  const std::string lower = text::to_lower(line.substr(i));
  for (const auto& alias : kHeaderAliases) {
    if (lower.compare(0, alias.text.size(), alias.text) != 0) continue;
    std::size_t k = i + alias.text.size();
    while (k < line.size() && is_markup(line[k])) ++k;
    bool colon = false;
    if (k < line.size() && line[k] == ':') {
      colon = true;
      ++k;
      while (k < line.size() && is_markup(line[k])) ++k;
    }
    const auto rest = text::trim(line.substr(k));
    if (!colon && !rest.empty()) continue;
    return HeaderHit{alias.field, std::string(rest)};
  }
  return std::nullopt;
}

std::string strip_wrapping(std::string_view s) {
  s = text::trim(s);
  while (s.size() >= 4 && s.substr(0, 2) == "**" && s.substr(s.size() - 2) == "**") {
    s = text::trim(s.substr(2, s.size() - 4));
  }
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    s = text::trim(s.substr(1, s.size() - 2));
  } else if (s.size() >= 6 && s.substr(0, 3) == "\xE2\x80\x9C" &&
             s.substr(s.size() - 3) == "\xE2\x80\x9D") {
    s = text::trim(s.substr(3, s.size() - 6));
  }
  return std::string(s);
}

std::string last_paragraph(std::string_view s) {
  const auto lines = text::split_lines(s);
  std::vector<std::string_view> para;
  std::vector<std::string_view> last;
  for (auto line : lines) {
    if (text::trim(line).empty()) {
      if (!para.empty()) last = std::move(para);
      para.clear();
    } else {
      para.push_back(line);
    }
  }
  if (!para.empty()) last = std::move(para);
  std::string out;
  for (std::size_t i = 0; i < last.size(); ++i) {
    if (i) out += '\n';
    out += last[i];
  }
  return strip_wrapping(out);
}

std::string normalize_newlines(std::string_view raw) {
  std::string s;
  s.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\r') {
      s.push_back('\n');
      if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
    } else {
      s.push_back(raw[i]);
    }
  }
  return s;
}

bool field_in(std::span<const AnswerField> fields, AnswerField f) {
  return std::find(fields.begin(), fields.end(), f) != fields.end();
}

bool is_list_marker(std::string_view tok) {
  if (tok.empty()) return false;
  if (tok == "-" || tok == "*") return true;
  std::size_t i = 0;
  while (i < tok.size() && is_digit(tok[i])) ++i;
  return i > 0 && i + 1 == tok.size() && (tok[i] == '.' || tok[i] == ')');
}

}  // namespace

CriticVerdict parse_critic_lenient(std::string_view raw, CriticMode mode) {
  CriticVerdict v;
  v.mode = mode;
  v.raw = std::string(raw);
  v.value = find_score(raw, mode);
  return v;
}

CriticVerdict parse_critic(std::string_view raw, CriticMode mode) {
  auto v = parse_critic_lenient(raw, mode);
  if (!v.parsed()) {
    throw Error(ErrorCode::NoScoreFound,
                "no " + std::string(to_string(mode)) + " score in response");
  }
  return v;
}

std::string_view to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::Clean: return "Clean";
    case ParseStatus::Recovered: return "Recovered";
    case ParseStatus::Failed: return "Failed";
  }
  return "";
}

std::optional<ParseStatus> parse_parse_status(std::string_view s) {
  for (auto st : {ParseStatus::Clean, ParseStatus::Recovered, ParseStatus::Failed}) {
    if (text::iequals(s, to_string(st))) return st;
  }
  return std::nullopt;
}

const std::array<std::string_view, 9>& refusal_phrases() {
  static constexpr std::array<std::string_view, 9> kPhrases = {
      "cannot",    "can't",   "unable to",    "as an ai",  "i'm sorry",
      "i am sorry", "i apologize", "i won't", "i will not",
  };
  return kPhrases;
}

ErrorTypeSet parse_error_types(std::string_view fragment) {
  std::string s;
  int depth = 0;
  for (char c : fragment) {
    if (c == '(' || c == '[') {
      ++depth;
    } else if ((c == ')' || c == ']') && depth > 0) {
      --depth;
    } else if (depth == 0) {
      s.push_back(c == ',' || c == ';' || c == '/' || c == '\n' || c == '\r' ||
                          c == '|'
                      ? '\x1f'
                      : c);
    }
  }
  // The word "and" is a separator too.
  std::string tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    if ((i == 0 || !is_alnum(s[i - 1])) && i + 3 <= s.size() &&
        text::iequals(std::string_view(s).substr(i, 3), "and") &&
        (i + 3 == s.size() || !is_alnum(s[i + 3]))) {
      tokens.push_back('\x1f');
      i += 3;
      continue;
    }
    tokens.push_back(s[i++]);
  }

  ErrorTypeSet out;
  std::size_t start = 0;
  while (start <= tokens.size()) {
    auto end = tokens.find('\x1f', start);
    if (end == std::string::npos) end = tokens.size();
    std::string_view tok = text::trim(std::string_view(tokens).substr(start, end - start));
    start = end + 1;
    // Drop list markers, markdown and a trailing period.
    while (!tok.empty()) {
      const auto sp = tok.find(' ');
      if (sp != std::string_view::npos && is_list_marker(tok.substr(0, sp))) {
        tok = text::trim(tok.substr(sp));
        continue;
      }
      if (is_markup(tok.front()) || tok.front() == '"' || tok.front() == '\'') {
        tok.remove_prefix(1);
      } else if (is_markup(tok.back()) || tok.back() == '.' || tok.back() == '"' ||
                 tok.back() == '\'') {
        tok.remove_suffix(1);
      } else {
        break;
      }
      tok = text::trim(tok);
    }
    if (tok.empty()) continue;
    const auto lower = text::to_lower(tok);
    if (lower == "none" || lower == "n/a" || lower == "no error" ||
        lower == "no errors") {
      continue;
    }
    if (auto t = parse_error_type(tok)) {
      out.insert(*t);
    } else {
      log::warn("dropping unknown error type '" + std::string(tok) + "'");
    }
  }
  return out;
}

EditorOutput parse_editor(std::string_view raw, EditorStrategy strategy) {
  EditorOutput out;
  out.raw = std::string(raw);
  const std::string norm = normalize_newlines(raw);
  const auto lines = text::split_lines(norm);

  struct Section {
    AnswerField field;
    std::string body;
  };
  std::vector<Section> sections;
  std::string preamble;
  for (auto line : lines) {
    if (auto hit = match_header(line)) {
      sections.push_back({hit->field, hit->rest});
      continue;
    }
    std::string& target = sections.empty() ? preamble : sections.back().body;
    if (!target.empty() || !sections.empty()) target += '\n';
    target += line;
  }

  std::array<std::optional<std::string>, 4> found;
  for (const auto& sec : sections) {
    auto body = strip_wrapping(sec.body);
    auto& slot = found[static_cast<std::size_t>(sec.field)];
    if (!slot && !body.empty()) slot = std::move(body);
  }
  const auto& span_v = found[static_cast<std::size_t>(AnswerField::Span)];
  const auto& types_v = found[static_cast<std::size_t>(AnswerField::ErrorTypes)];
  const auto& summary_v = found[static_cast<std::size_t>(AnswerField::Summary)];
  const auto& reason_v = found[static_cast<std::size_t>(AnswerField::Reasoning)];

  const auto fields = answer_fields(strategy);
  if (field_in(fields, AnswerField::Span) && span_v) out.span = *span_v;
  if (field_in(fields, AnswerField::ErrorTypes) && types_v) {
    out.error_types = parse_error_types(*types_v);
  }
  if (has_type_glossary(strategy)) {
    const auto pre = text::trim(preamble);
    if (reason_v) {
      out.reasoning = *reason_v;
    } else if (!pre.empty() && !sections.empty()) {
      out.reasoning = std::string(pre);
    }
  }

  if (summary_v) {
    out.edited_summary = *summary_v;
    bool all = true;
    for (auto f : fields) {
      if (f == AnswerField::Reasoning) continue;
      if (!found[static_cast<std::size_t>(f)]) all = false;
    }
    out.parse_status = all ? ParseStatus::Clean : ParseStatus::Recovered;
    return out;
  }

  if (sections.empty()) {
    const auto lower = text::to_lower(norm);
    for (auto phrase : refusal_phrases()) {
      if (lower.find(phrase) != std::string::npos) {
        out.parse_status = ParseStatus::Failed;
        return out;
      }
    }
  }
  auto candidate = last_paragraph(preamble);
  if (candidate.empty()) {
    out.parse_status = ParseStatus::Failed;
    return out;
  }
  if (sections.empty()) out.reasoning.reset();
  out.edited_summary = std::move(candidate);
  out.parse_status = ParseStatus::Recovered;
  return out;
}

std::string format_editor_response(const EditorOutput& out,
                                   EditorStrategy strategy) {
  std::string s;
  const auto fields = answer_fields(strategy);
  if (out.reasoning && !field_in(fields, AnswerField::Reasoning)) {
    s += *out.reasoning;
    s += "\n\n";
  }
  for (auto f : fields) {
    std::optional<std::string> value;
    switch (f) {
      case AnswerField::Span: value = out.span; break;
      case AnswerField::ErrorTypes:
        if (out.error_types) {
          value = out.error_types->empty() ? std::string("None")
                                           : format_error_types(*out.error_types);
        }
        break;
      case AnswerField::Summary: value = out.edited_summary; break;
      case AnswerField::Reasoning: value = out.reasoning; break;
    }
    if (!value) continue;
    s += header_text(f);
    s += ' ';
    s += *value;
    s += '\n';
  }
  return s;
}

}  // namespace faithedit
