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

// Domain types shared across the pipeline and the score transformations
// applied to FRANK-style sentence-level human judgments.

#pragma once

#include <array>
#include <compare>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faithedit/error.hpp"

namespace faithedit {

enum class Dataset { CnnDm, XSum, DeFacto };

std::string_view to_string(Dataset d);
// Accepts "CNN_DM", "XSUM", "DEFACTO" (case-insensitive, '/' and '-' tolerated).
std::optional<Dataset> parse_dataset(std::string_view s);

// FRANK factual-error taxonomy, in glossary order.
enum class ErrorType {
  PredicateError,
  EntityError,
  CircumstanceError,
  OutOfArticleError,
  GrammaticalError,
  CoreferenceError,
  DiscourseLinkError,
  OtherError,
};

inline constexpr std::array<ErrorType, 8> kAllErrorTypes = {
    ErrorType::PredicateError,    ErrorType::EntityError,
    ErrorType::CircumstanceError, ErrorType::OutOfArticleError,
    ErrorType::GrammaticalError,  ErrorType::CoreferenceError,
    ErrorType::DiscourseLinkError, ErrorType::OtherError,
};

using ErrorTypeSet = std::set<ErrorType>;

// "Predicate Error", "Out of Article Error", ...
std::string_view long_name(ErrorType t);
// "PredE", "EntE", "CircE", "OutE", "GramE", "CorefE", "LinkE", "OthE".
std::string_view short_name(ErrorType t);

// Case-insensitive; ignores spaces, hyphens and underscores. Accepts long
// names, enumerator spellings, the short codes above, FRANK's raw codes
// (RelE, OtherE) and the bare stems ("entity", "out of article").
std::optional<ErrorType> parse_error_type(std::string_view s);

// Canonical long names joined by ", " in glossary order.
std::string format_error_types(const ErrorTypeSet& types);

class LikertScore {
 public:
  explicit LikertScore(int value);
  int value() const noexcept { return value_; }
  auto operator<=>(const LikertScore&) const = default;

 private:
  int value_;
};

// Fraction of summary sentences with at least one factual error.
class HumanFactualityScore {
 public:
  explicit HumanFactualityScore(double value);
  double value() const noexcept { return value_; }
  auto operator<=>(const HumanFactualityScore&) const = default;

 private:
  double value_;
};

enum class Faithfulness { Faithful, Unfaithful };

std::string_view to_string(Faithfulness f);

enum class BucketScheme {
  // [0,.2)->5, [.2,.4)->4, [.4,.6)->3, [.6,.8)->2, [.8,1]->1
  EqualWidth,
  // 0->5, (0,.25]->4, (.25,.5]->3, (.5,.75]->2, (.75,1]->1
  ZeroExclusive,
};

std::string_view to_string(BucketScheme s);
std::optional<BucketScheme> parse_bucket_scheme(std::string_view s);

HumanFactualityScore summary_level_score(std::span<const int> sentence_labels);
LikertScore bucket_to_likert(HumanFactualityScore score,
                             BucketScheme scheme = BucketScheme::EqualWidth);
Faithfulness binarize_human(HumanFactualityScore score);

enum class CriticMode { Scale5, Binary };

std::string_view to_string(CriticMode m);
// "scale" / "binary" (also the enumerator spellings).
std::optional<CriticMode> parse_critic_mode(std::string_view s);

// A critic judgment. `value` is empty when nothing in `raw` could be read as
// a score; such verdicts are treated as unfaithful.
struct CriticVerdict {
  CriticMode mode = CriticMode::Scale5;
  std::optional<int> value;
  std::string raw;

  bool parsed() const noexcept { return value.has_value(); }
  bool operator==(const CriticVerdict&) const = default;
};

// Scale critics: edit iff score < stop_threshold (default 5, i.e. <= 4).
// Binary critics: edit iff the verdict is 0. Unparsed verdicts always edit.
bool critic_needs_edit(const CriticVerdict& verdict, int stop_threshold = 5);

struct DocumentSummaryPair {
  std::string id;
  std::string article;
  std::string input_summary;
  Dataset dataset = Dataset::CnnDm;
  std::optional<std::vector<int>> sentence_labels;
  std::optional<ErrorTypeSet> gold_error_types;
  std::optional<std::string> gold_span;
  std::optional<std::string> reference_summary;
  std::optional<std::string> human_edit;

  bool operator==(const DocumentSummaryPair&) const = default;
};

// Throws SchemaError naming the pair id when an invariant does not hold.
void validate(const DocumentSummaryPair& pair);

std::optional<HumanFactualityScore> human_score(const DocumentSummaryPair& pair);

// Editor sentence budget: 3 for CNN/DM, 1 for XSum and DeFacto.
int sentence_budget(Dataset d);

}  // namespace faithedit
