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

// Aggregated critic and editing reports and their table renderings.

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faithedit/core.hpp"
#include "faithedit/data.hpp"
#include "faithedit/engine.hpp"
#include "faithedit/eval.hpp"

namespace faithedit {

struct CriticObservation {
  std::string id;
  Dataset dataset = Dataset::CnnDm;
  CriticVerdict verdict;
  std::optional<double> human_score;
  std::optional<bool> human_unfaithful;
  // Backend failure for this pair, if any.
  std::optional<std::string> error;

  bool operator==(const CriticObservation&) const = default;
};

std::string observation_to_json(const CriticObservation& obs);
CriticObservation observation_from_json(std::string_view json_text);

struct CriticPartition {
  // "CNN_DM", "XSUM", "DEFACTO" or "overall".
  std::string name;
  std::size_t n = 0;
  std::size_t n_unparsed = 0;
  // Critic score against the bucketed human Likert score (scale mode only).
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> balanced_accuracy;
  // Critic score against 1 - human score, without bucketing.
  std::optional<double> pearson_continuous;
  std::optional<double> spearman_continuous;
  std::vector<std::string> notes;
};

struct CriticEvalReport {
  std::string label;
  CriticMode mode = CriticMode::Scale5;
  BucketScheme scheme = BucketScheme::EqualWidth;
  std::vector<CriticPartition> partitions;
  std::vector<std::string> failed_ids;

  const CriticPartition* partition(std::string_view name) const;
};

// Unparsed verdicts and failed calls are left out of every statistic.
CriticEvalReport evaluate_critic(std::span<const CriticObservation> observations,
                                 CriticMode mode, BucketScheme scheme,
                                 std::string label);

struct MetricRow {
  std::string model;
  // Mean external score over the row's summaries, by metric name.
  std::map<std::string, std::optional<double>> external;
  std::optional<eval::CorpusRouge> vs_reference;
  std::optional<eval::CorpusRouge> vs_human_edit;
  std::optional<eval::CorpusRouge> vs_input;
  std::optional<double> bertscore_human;
  std::optional<double> bertscore_input;
  std::optional<eval::EditRates> human_pool;
  std::optional<eval::EditRates> critic_pool;
};

struct EditReport {
  std::string label;
  EditorStrategy strategy = EditorStrategy::EditorSpan;
  std::size_t n_sessions = 0;
  MetricRow edited;
  // The unedited input summaries, for the baseline row.
  MetricRow input;
  std::optional<double> span_rouge_l;
  std::size_t n_span = 0;
  std::optional<double> type_macro_f1;
  std::size_t n_types = 0;
  std::map<std::string, std::size_t> parse_status_counts;
  std::map<std::string, std::size_t> terminal_counts;
  std::vector<std::string> failed_ids;
  eval::RoundSeries series;
  std::string series_metric;
};

EditReport build_edit_report(std::span<const SessionTrace> traces,
                             const std::map<std::string, NormalizedRecord>& corpus,
                             const eval::ScoreTable& scores, std::string label,
                             std::string series_metric = "qafacteval");

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;

  std::string to_csv() const;
  std::string to_markdown() const;
};

inline constexpr std::array<std::string_view, 9> kTable2Columns = {
    "Model", "QAFE", "DAE", "FactCC", "R1", "R2", "RL", "BS-F1", "Edit %"};

// Critic correlations and balanced accuracy on CNN/DM and XSum.
Table critic_table(std::span<const CriticEvalReport> reports);
// Faithfulness, ROUGE and BERTScore against the reference, plus Edit %.
Table edit_table(std::span<const EditReport> reports);
// As edit_table with an extra block against the human edits.
Table human_edit_table(std::span<const EditReport> reports);
// Chain-of-thought accuracy: span ROUGE-L and error type macro-F1.
Table cot_table(std::span<const EditReport> reports);
// Error-type slice comparison of two strategies.
Table slice_table(std::span<const eval::ErrorTypeSlice> slices,
                  const std::string& label_a, const std::string& label_b);
// Edit % and ValidEdit % over both pool definitions.
Table valid_edit_table(std::span<const EditReport> reports);
// Similarity of edited summaries to the input summaries.
Table preservation_table(std::span<const EditReport> reports);

std::string series_tsv(const eval::RoundSeries& series);
std::string exit_histogram_tsv(const eval::RoundSeries& series);

std::string critic_report_json(const CriticEvalReport& report);
std::string edit_report_json(const EditReport& report);

// Writes <stem>.csv and <stem>.md under `dir`.
void write_table(const Table& table, const std::filesystem::path& dir,
                 const std::string& stem);

}  // namespace faithedit
