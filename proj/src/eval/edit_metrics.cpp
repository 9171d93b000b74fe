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

#include <set>

#include "faithedit/eval.hpp"
#include "faithedit/text_util.hpp"

namespace faithedit::eval {

namespace {

const EditorOutput* first_editor_output(const SessionTrace& trace) {
  if (trace.rounds.empty() || !trace.rounds.front().editor_output) return nullptr;
  return &*trace.rounds.front().editor_output;
}

std::optional<double> slice_mean(const ScoreTable& scores, const std::string& metric,
                                 const std::vector<std::string>& ids) {
  const auto it = scores.find(metric);
  if (it == scores.end()) return std::nullopt;
  double sum = 0;
  std::size_t n = 0;
  for (const auto& id : ids) {
    const auto s = it->second.find(final_score_id(id));
    if (s == it->second.end()) continue;
    sum += s->second;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / double(n);
}

}  // namespace

bool summary_modified(const SessionTrace& trace) {
  return text::collapse_whitespace(trace.final_summary) !=
         text::collapse_whitespace(trace.input_summary);
}

EditRates edit_rates(std::span<const SessionTrace> pool) {
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "edit pool is empty");
  EditRates r;
  r.pool = pool.size();
  for (const auto& t : pool) {
    if (!summary_modified(t)) continue;
    ++r.modified;
    if (t.terminal_status == TerminalStatus::JudgedFaithful) ++r.valid;
  }
  r.edit_rate = 100.0 * double(r.modified) / double(r.pool);
  r.valid_edit_rate = 100.0 * double(r.valid) / double(r.pool);
  return r;
}

std::vector<SessionTrace> critic_flagged(std::span<const SessionTrace> traces) {
  std::vector<SessionTrace> out;
  for (const auto& t : traces) {
    if (first_editor_output(t) != nullptr) out.push_back(t);
  }
  return out;
}

std::optional<std::string> first_round_span(const SessionTrace& trace) {
  const auto* out = first_editor_output(trace);
  if (out == nullptr || out->parse_status == ParseStatus::Failed) return std::nullopt;
  return out->span;
}

std::optional<ErrorTypeSet> first_round_types(const SessionTrace& trace) {
  const auto* out = first_editor_output(trace);
  if (out == nullptr || out->parse_status == ParseStatus::Failed) return std::nullopt;
  return out->error_types;
}

ErrorTypeSlice error_type_slice(std::span<const SessionTrace> traces_a,
                                std::span<const SessionTrace> traces_b,
                                const std::map<std::string, ErrorTypeSet>& gold_types,
                                ErrorType type, const ScoreTable& scores_a,
                                const ScoreTable& scores_b) {
  std::set<std::string> in_a;
  for (const auto& t : traces_a) in_a.insert(t.pair_id);

  ErrorTypeSlice slice;
  slice.type = type;
  for (const auto& t : traces_b) {
    if (!in_a.count(t.pair_id)) continue;
    const auto gold = gold_types.find(t.pair_id);
    if (gold == gold_types.end() || !gold->second.count(type)) continue;
    const auto predicted = first_round_types(t);
    if (!predicted || !predicted->count(type)) continue;
    slice.pair_ids.push_back(t.pair_id);
  }

  std::set<std::string> metrics;
  for (const auto& [m, _] : scores_a) metrics.insert(m);
  for (const auto& [m, _] : scores_b) metrics.insert(m);
  for (const auto& m : metrics) {
    slice.rows.push_back({m, slice_mean(scores_a, m, slice.pair_ids),
                          slice_mean(scores_b, m, slice.pair_ids)});
  }
  return slice;
}

RoundSeries per_round_series(std::span<const SessionTrace> traces,
                             const std::map<std::string, double>& scores) {
  RoundSeries out;
  for (const auto& t : traces) {
    for (const auto& r : t.rounds) {
      if (!r.editor_output) continue;
      SeriesRow row;
      row.round = r.index;
      row.pair_id = t.pair_id;
      const auto it = scores.find(round_score_id(t.pair_id, r.index));
      if (it != scores.end()) row.score = it->second;
      out.rows.push_back(std::move(row));
    }
    ++out.exit_histogram[t.edit_count()];
  }
  return out;
}

std::string final_score_id(const std::string& pair_id) { return pair_id; }

std::string input_score_id(const std::string& pair_id) { return pair_id + "#input"; }

std::string round_score_id(const std::string& pair_id, int round) {
  return pair_id + "#r" + std::to_string(round);
}

}  // namespace faithedit::eval
