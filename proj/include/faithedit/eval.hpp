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

// Text and label metrics. ROUGE is F1 (beta = 1) over lowercase
// alphanumeric tokens with no stemming and no stopword removal.

#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "faithedit/core.hpp"
#include "faithedit/engine.hpp"

namespace faithedit::eval {

// Lowercases ASCII and splits on runs of non-alphanumeric bytes. Bytes >= 0x80
// are kept inside tokens so UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view text);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore make_rouge(double overlap, double cand_total, double ref_total);

RougeScore rouge_n(std::span<const std::string> candidate,
                   std::span<const std::string> reference, int n);
RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n);
RougeScore rouge_l(std::span<const std::string> candidate,
                   std::span<const std::string> reference);
RougeScore rouge_l(std::string_view candidate, std::string_view reference);

// Average ranks, 1-based; ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

// Both throw DegenerateInput on fewer than two points or zero variance, and
// OutOfRange on a length mismatch.
double pearson(std::span<const double> xs, std::span<const double> ys);
double spearman(std::span<const double> xs, std::span<const double> ys);

// Mean of the true positive and true negative rates, Unfaithful positive.
// Throws MissingClass when gold lacks either class.
double balanced_accuracy(std::span<const Faithfulness> predicted,
                         std::span<const Faithfulness> gold);

// Whitespace-insensitive comparison of final and input summaries.
bool summary_modified(const SessionTrace& trace);

struct EditRates {
  double edit_rate = 0.0;
  double valid_edit_rate = 0.0;
  std::size_t pool = 0;
  std::size_t modified = 0;
  std::size_t valid = 0;
};

// Percentages over `pool`. Valid means modified and judged faithful at exit.
// Throws EmptyPool when the pool is empty.
EditRates edit_rates(std::span<const SessionTrace> pool);

// Traces whose first critic verdict asked for an edit.
std::vector<SessionTrace> critic_flagged(std::span<const SessionTrace> traces);

// Per-type F1 = 2TP / (2TP + FP + FN) over the eight types, skipping types
// absent from both sides everywhere, averaged unweighted. Throws EmptyInput
// when there is nothing to score.
double type_macro_f1(std::span<const ErrorTypeSet> predicted,
                     std::span<const ErrorTypeSet> gold);

// Chain-of-thought outputs of the first editor call, when present.
std::optional<std::string> first_round_span(const SessionTrace& trace);
std::optional<ErrorTypeSet> first_round_types(const SessionTrace& trace);

// metric -> id -> value.
using ScoreTable = std::map<std::string, std::map<std::string, double>>;

struct SliceRow {
  std::string metric;
  std::optional<double> mean_a;
  std::optional<double> mean_b;
};

struct ErrorTypeSlice {
  ErrorType type = ErrorType::PredicateError;
  std::vector<std::string> pair_ids;
  std::vector<SliceRow> rows;

  std::size_t n() const { return pair_ids.size(); }
};

// Pairs whose gold types and strategy-B first-round prediction both contain
// `type`, with the mean of every metric for both strategies over them.
// Metric ids are pair ids (final summaries).
ErrorTypeSlice error_type_slice(std::span<const SessionTrace> traces_a,
                                std::span<const SessionTrace> traces_b,
                                const std::map<std::string, ErrorTypeSet>& gold_types,
                                ErrorType type, const ScoreTable& scores_a,
                                const ScoreTable& scores_b);

struct SeriesRow {
  int round = 1;
  std::string pair_id;
  std::optional<double> score;
};

struct RoundSeries {
  std::vector<SeriesRow> rows;
  // Number of editor calls at exit -> session count.
  std::map<int, std::size_t> exit_histogram;
};

// One row per editor round. Scores are looked up by round_score_id().
RoundSeries per_round_series(std::span<const SessionTrace> traces,
                             const std::map<std::string, double>& scores);

// Score ids: "<pair>" for the final summary, "<pair>#input" for the input
// summary and "<pair>#r<k>" for the summary after round k.
std::string final_score_id(const std::string& pair_id);
std::string input_score_id(const std::string& pair_id);
std::string round_score_id(const std::string& pair_id, int round);

inline constexpr std::array<std::string_view, 4> kExternalMetrics = {
    "qafacteval", "dae", "factcc", "bertscore"};

// CSV with header id,metric,score.
ScoreTable load_score_file(const std::string& path);
ScoreTable parse_score_csv(std::string_view csv_text, const std::string& source);
void save_score_file(const ScoreTable& scores, const std::string& path);
void merge_scores(ScoreTable& into, const ScoreTable& from);

struct ScoreItem {
  std::string id;
  // Source article; for bertscore the comparison text.
  std::string article;
  std::string summary;
};

// Client for POST <endpoint>/score {metric, article, summary} -> {score}.
struct ScorerConfig {
  std::string endpoint_url;
  std::chrono::milliseconds timeout{30000};
  int max_in_flight = 4;
};

// Throws ScorerUnavailable when the service cannot be reached at all; items
// the service fails on individually are left out with a warning.
std::map<std::string, double> external_scores(const ScorerConfig& config,
                                              std::span<const ScoreItem> items,
                                              std::string_view metric);

// Looks up every item in a score table; missing ids are left out and counted
// in a single warning.
std::map<std::string, double> external_scores(const ScoreTable& table,
                                              std::span<const ScoreItem> items,
                                              std::string_view metric);

struct RougeTriple {
  RougeScore r1;
  RougeScore r2;
  RougeScore rl;
};

struct CorpusRouge {
  std::size_t n = 0;
  // Mean F1 scaled to [0, 100].
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
};

RougeTriple rouge_triple(std::string_view candidate, std::string_view reference);

namespace serial {
std::vector<RougeTriple> corpus_rouge(std::span<const std::string> candidates,
                                      std::span<const std::string> references);
}  // namespace serial

// OpenMP over items; results are identical to the serial version.
namespace parallel {
std::vector<RougeTriple> corpus_rouge(std::span<const std::string> candidates,
                                      std::span<const std::string> references);
}  // namespace parallel

CorpusRouge mean_rouge(std::span<const RougeTriple> items);

}  // namespace faithedit::eval
