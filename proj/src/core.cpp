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

#include "faithedit/core.hpp"

#include <cctype>
#include <cmath>
#include <utility>

#include "faithedit/text_util.hpp"

namespace faithedit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyLabels: return "EmptyLabels";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::ScriptExhausted: return "ScriptExhausted";
    case ErrorCode::UnknownFingerprint: return "UnknownFingerprint";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::MissingDemos: return "MissingDemos";
    case ErrorCode::MissingGoldAnnotation: return "MissingGoldAnnotation";
    case ErrorCode::NoScoreFound: return "NoScoreFound";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ScorerUnavailable: return "ScorerUnavailable";
    case ErrorCode::BackendError: return "BackendError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

// Lowercase with spaces, hyphens, underscores and periods removed.
std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '-' || c == '_' || c == '.' || c == '/' ||
        text::is_space(c)) {
      continue;
    }
    out.push_back(
        static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

struct ErrorTypeNames {
  ErrorType type;
  std::string_view long_name;
  std::string_view short_name;
  std::string_view stem;
  std::string_view frank_code;
};

constexpr ErrorTypeNames kNames[] = {
    {ErrorType::PredicateError, "Predicate Error", "PredE", "predicate", "RelE"},
    {ErrorType::EntityError, "Entity Error", "EntE", "entity", "EntE"},
    {ErrorType::CircumstanceError, "Circumstance Error", "CircE", "circumstance",
     "CircE"},
    {ErrorType::OutOfArticleError, "Out of Article Error", "OutE",
     "outofarticle", "OutE"},
    {ErrorType::GrammaticalError, "Grammatical Error", "GramE", "grammatical",
     "GramE"},
    {ErrorType::CoreferenceError, "Coreference Error", "CorefE", "coreference",
     "CorefE"},
    {ErrorType::DiscourseLinkError, "Discourse Link Error", "LinkE",
     "discourselink", "LinkE"},
    {ErrorType::OtherError, "Other Error", "OthE", "other", "OtherE"},
};

const ErrorTypeNames& names_of(ErrorType t) {
  return kNames[static_cast<std::size_t>(t)];
}

}  // namespace

std::string_view to_string(Dataset d) {
  switch (d) {
    case Dataset::CnnDm: return "CNN_DM";
    case Dataset::XSum: return "XSUM";
    case Dataset::DeFacto: return "DEFACTO";
  }
  return "CNN_DM";
}

std::optional<Dataset> parse_dataset(std::string_view s) {
  const std::string k = squash(s);
  if (k == "cnndm" || k == "cnn" || k == "cnndailymail") return Dataset::CnnDm;
  if (k == "xsum" || k == "bbc") return Dataset::XSum;
  if (k == "defacto") return Dataset::DeFacto;
  return std::nullopt;
}

std::string_view long_name(ErrorType t) { return names_of(t).long_name; }
std::string_view short_name(ErrorType t) { return names_of(t).short_name; }

std::optional<ErrorType> parse_error_type(std::string_view s) {
  const std::string k = squash(s);
  if (k.empty()) return std::nullopt;
  for (const auto& n : kNames) {
    if (k == squash(n.long_name) || k == squash(n.short_name) ||
        k == n.stem || k == squash(n.frank_code)) {
      return n.type;
    }
  }
  // Less common spellings seen in model output and annotation dumps.
  static constexpr std::pair<std::string_view, ErrorType> kAliases[] = {
      {"relationerror", ErrorType::PredicateError},
      {"relation", ErrorType::PredicateError},
      {"grammarerror", ErrorType::GrammaticalError},
      {"grammar", ErrorType::GrammaticalError},
      {"linkerror", ErrorType::DiscourseLinkError},
      {"linkageerror", ErrorType::DiscourseLinkError},
      {"link", ErrorType::DiscourseLinkError},
      {"coreferror", ErrorType::CoreferenceError},
      {"coref", ErrorType::CoreferenceError},
      {"circ", ErrorType::CircumstanceError},
      {"othererrors", ErrorType::OtherError},
  };
  for (const auto& [alias, type] : kAliases) {
    if (k == alias) return type;
  }
  // Plural forms: "entity errors".
  if (k.ends_with("errors")) return parse_error_type(k.substr(0, k.size() - 1));
  return std::nullopt;
}

std::string format_error_types(const ErrorTypeSet& types) {
  std::string out;
  for (ErrorType t : types) {
    if (!out.empty()) out += ", ";
    out += long_name(t);
  }
  return out;
}

LikertScore::LikertScore(int value) : value_(value) {
  if (value < 1 || value > 5) {
    throw Error(ErrorCode::OutOfRange,
                "Likert score must be in [1,5], got " + std::to_string(value));
  }
}

HumanFactualityScore::HumanFactualityScore(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::OutOfRange,
                "human factuality score must be in [0,1], got " +
                    std::to_string(value));
  }
}

std::string_view to_string(Faithfulness f) {
  return f == Faithfulness::Faithful ? "Faithful" : "Unfaithful";
}

std::string_view to_string(BucketScheme s) {
  return s == BucketScheme::EqualWidth ? "equal_width" : "zero_exclusive";
}

std::optional<BucketScheme> parse_bucket_scheme(std::string_view s) {
  const std::string k = squash(s);
  if (k == "equalwidth") return BucketScheme::EqualWidth;
  if (k == "zeroexclusive") return BucketScheme::ZeroExclusive;
  return std::nullopt;
}

HumanFactualityScore summary_level_score(std::span<const int> sentence_labels) {
  if (sentence_labels.empty()) {
    throw Error(ErrorCode::EmptyLabels, "no sentence labels");
  }
  int errors = 0;
  for (int label : sentence_labels) {
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::OutOfRange,
                  "sentence label must be 0 or 1, got " + std::to_string(label));
    }
    errors += label;
  }
  return HumanFactualityScore(static_cast<double>(errors) /
                              static_cast<double>(sentence_labels.size()));
}

LikertScore bucket_to_likert(HumanFactualityScore score, BucketScheme scheme) {
  const double s = score.value();
  if (scheme == BucketScheme::EqualWidth) {
    if (s < 0.2) return LikertScore(5);
    if (s < 0.4) return LikertScore(4);
    if (s < 0.6) return LikertScore(3);
    if (s < 0.8) return LikertScore(2);
    return LikertScore(1);
  }
  if (s == 0.0) return LikertScore(5);
  if (s <= 0.25) return LikertScore(4);
  if (s <= 0.5) return LikertScore(3);
  if (s <= 0.75) return LikertScore(2);
  return LikertScore(1);
}

Faithfulness binarize_human(HumanFactualityScore score) {
  return score.value() > 0.0 ? Faithfulness::Unfaithful
                             : Faithfulness::Faithful;
}

std::string_view to_string(CriticMode m) {
  return m == CriticMode::Scale5 ? "scale" : "binary";
}

std::optional<CriticMode> parse_critic_mode(std::string_view s) {
  const std::string k = squash(s);
  if (k == "scale" || k == "scale5" || k == "likert") return CriticMode::Scale5;
  if (k == "binary") return CriticMode::Binary;
  return std::nullopt;
}

bool critic_needs_edit(const CriticVerdict& verdict, int stop_threshold) {
  if (!verdict.value) return true;
  if (verdict.mode == CriticMode::Binary) return *verdict.value == 0;
  return *verdict.value < stop_threshold;
}

void validate(const DocumentSummaryPair& pair) {
  const std::string where = "pair " + pair.id;
  if (text::trim(pair.article).empty()) {
    throw SchemaError(where, "article is empty");
  }
  if (text::trim(pair.input_summary).empty()) {
    throw SchemaError(where, "input_summary is empty");
  }
  if (pair.sentence_labels) {
    if (pair.sentence_labels->empty()) {
      throw SchemaError(where, "sentence_labels present but empty");
    }
    for (int l : *pair.sentence_labels) {
      if (l != 0 && l != 1) {
        throw SchemaError(where, "sentence label not in {0,1}");
      }
    }
  }
}

std::optional<HumanFactualityScore> human_score(const DocumentSummaryPair& pair) {
  if (!pair.sentence_labels || pair.sentence_labels->empty()) {
    return std::nullopt;
  }
  return summary_level_score(*pair.sentence_labels);
}

int sentence_budget(Dataset d) { return d == Dataset::CnnDm ? 3 : 1; }

}  // namespace faithedit
