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

#include "faithedit/report.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "faithedit/log.hpp"
#include "faithedit/text_util.hpp"

namespace faithedit {

namespace {

using ojson = nlohmann::ordered_json;

std::string cell(const std::optional<double>& v, int digits = 2) {
  return v ? fmt::format("{:.{}f}", *v, digits) : std::string();
}

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double s = 0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

template <typename F>
std::optional<double> guarded(F f, std::vector<std::string>& notes,
                              std::string_view what) {
  try {
    return f();
  } catch (const Error& e) {
    notes.push_back(std::string(what) + ": " + e.what());
    return std::nullopt;
  }
}

CriticPartition critic_partition(std::string name,
                                 const std::vector<const CriticObservation*>& obs,
                                 CriticMode mode, BucketScheme scheme) {
  CriticPartition p;
  p.name = std::move(name);
  p.n = obs.size();
  std::vector<Faithfulness> pred, gold;
  std::vector<double> xs, ys, ys_cont;
  for (const auto* o : obs) {
    if (o->error || !o->verdict.parsed()) {
      ++p.n_unparsed;
      continue;
    }
    if (o->human_unfaithful) {
      pred.push_back(critic_needs_edit(o->verdict, 5) ? Faithfulness::Unfaithful
                                                      : Faithfulness::Faithful);
      gold.push_back(*o->human_unfaithful ? Faithfulness::Unfaithful
                                          : Faithfulness::Faithful);
    }
    if (mode == CriticMode::Scale5 && o->human_score) {
      xs.push_back(*o->verdict.value);
      ys.push_back(bucket_to_likert(HumanFactualityScore(*o->human_score), scheme).value());
      ys_cont.push_back(1.0 - *o->human_score);
    }
  }
  p.balanced_accuracy =
      guarded([&] { return eval::balanced_accuracy(pred, gold); }, p.notes, "BAcc");
  if (mode == CriticMode::Scale5) {
    p.pearson = guarded([&] { return eval::pearson(xs, ys); }, p.notes, "PCC");
    p.spearman = guarded([&] { return eval::spearman(xs, ys); }, p.notes, "rho");
    p.pearson_continuous =
        guarded([&] { return eval::pearson(xs, ys_cont); }, p.notes, "PCC (continuous)");
    p.spearman_continuous =
        guarded([&] { return eval::spearman(xs, ys_cont); }, p.notes, "rho (continuous)");
  }
  return p;
}

std::optional<double> mean_score(const eval::ScoreTable& scores, const std::string& metric,
                                 const std::vector<std::string>& ids) {
  const auto it = scores.find(metric);
  if (it == scores.end()) return std::nullopt;
  std::vector<double> xs;
  for (const auto& id : ids) {
    const auto s = it->second.find(id);
    if (s != it->second.end()) xs.push_back(s->second);
  }
  return mean_of(xs);
}

std::optional<eval::CorpusRouge> corpus_rouge(const std::vector<std::string>& cands,
                                              const std::vector<std::string>& refs) {
  if (cands.empty()) return std::nullopt;
  const auto items = eval::parallel::corpus_rouge(cands, refs);
  return eval::mean_rouge(items);
}

std::optional<eval::EditRates> rates(std::span<const SessionTrace> pool) {
  if (pool.empty()) return std::nullopt;
  return eval::edit_rates(pool);
}

std::optional<double> edit_pct(const MetricRow& row) {
  if (row.human_pool) return row.human_pool->edit_rate;
  if (row.critic_pool) return row.critic_pool->edit_rate;
  return std::nullopt;
}

std::optional<double> ext(const MetricRow& row, const std::string& metric) {
  const auto it = row.external.find(metric);
  return it == row.external.end() ? std::nullopt : it->second;
}

std::optional<double> r1(const std::optional<eval::CorpusRouge>& r) {
  return r ? std::optional<double>(r->r1) : std::nullopt;
}
std::optional<double> r2(const std::optional<eval::CorpusRouge>& r) {
  return r ? std::optional<double>(r->r2) : std::nullopt;
}
std::optional<double> rl(const std::optional<eval::CorpusRouge>& r) {
  return r ? std::optional<double>(r->rl) : std::nullopt;
}

ojson rouge_json(const std::optional<eval::CorpusRouge>& r) {
  if (!r) return nullptr;
  return ojson{{"n", r->n}, {"r1", r->r1}, {"r2", r->r2}, {"rl", r->rl}};
}

ojson rates_json(const std::optional<eval::EditRates>& r) {
  if (!r) return nullptr;
  return ojson{{"pool", r->pool},
               {"modified", r->modified},
               {"valid", r->valid},
               {"edit_rate", r->edit_rate},
               {"valid_edit_rate", r->valid_edit_rate}};
}

ojson row_json(const MetricRow& row) {
  ojson j;
  j["model"] = row.model;
  ojson external = ojson::object();
  for (const auto& [k, v] : row.external) external[k] = opt(v);
  j["external"] = std::move(external);
  j["rouge_vs_reference"] = rouge_json(row.vs_reference);
  j["rouge_vs_human_edit"] = rouge_json(row.vs_human_edit);
  j["rouge_vs_input"] = rouge_json(row.vs_input);
  j["bertscore_human"] = opt(row.bertscore_human);
  j["bertscore_input"] = opt(row.bertscore_input);
  j["edit_rates_human_pool"] = rates_json(row.human_pool);
  j["edit_rates_critic_pool"] = rates_json(row.critic_pool);
  return j;
}

constexpr std::string_view kValidEditNote =
    "ValidEdit %: share of the pool whose summary was modified and judged "
    "faithful by the critic at exit. This definition is a reconstruction.";

}  // namespace

std::string observation_to_json(const CriticObservation& obs) {
  ojson j;
  j["id"] = obs.id;
  j["dataset"] = to_string(obs.dataset);
  j["mode"] = to_string(obs.verdict.mode);
  j["value"] = obs.verdict.value ? ojson(*obs.verdict.value) : ojson(nullptr);
  j["raw"] = obs.verdict.raw;
  j["human_score"] = opt(obs.human_score);
  j["has_error"] = obs.human_unfaithful ? ojson(*obs.human_unfaithful) : ojson(nullptr);
  j["error"] = obs.error ? ojson(*obs.error) : ojson(nullptr);
  return j.dump();
}

CriticObservation observation_from_json(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    CriticObservation o;
    o.id = j.at("id").get<std::string>();
    const auto ds = parse_dataset(j.at("dataset").get<std::string>());
    if (!ds) throw SchemaError("dataset", "unknown dataset");
    o.dataset = *ds;
    const auto mode = parse_critic_mode(j.at("mode").get<std::string>());
    if (!mode) throw SchemaError("mode", "unknown critic mode");
    o.verdict.mode = *mode;
    if (!j.at("value").is_null()) o.verdict.value = j["value"].get<int>();
    o.verdict.raw = j.at("raw").get<std::string>();
    if (!j.at("human_score").is_null()) o.human_score = j["human_score"].get<double>();
    if (!j.at("has_error").is_null()) o.human_unfaithful = j["has_error"].get<bool>();
    if (!j.at("error").is_null()) o.error = j["error"].get<std::string>();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("critic observation", e.what());
  }
}

const CriticPartition* CriticEvalReport::partition(std::string_view name) const {
  for (const auto& p : partitions) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

CriticEvalReport evaluate_critic(std::span<const CriticObservation> observations,
                                 CriticMode mode, BucketScheme scheme,
                                 std::string label) {
  CriticEvalReport report;
  report.label = std::move(label);
  report.mode = mode;
  report.scheme = scheme;
  std::vector<const CriticObservation*> all;
  for (const auto& o : observations) {
    all.push_back(&o);
    if (o.error) report.failed_ids.push_back(o.id);
  }
  for (auto ds : {Dataset::CnnDm, Dataset::XSum, Dataset::DeFacto}) {
    std::vector<const CriticObservation*> part;
    for (const auto* o : all) {
      if (o->dataset == ds) part.push_back(o);
    }
    if (part.empty()) continue;
    report.partitions.push_back(
        critic_partition(std::string(to_string(ds)), part, mode, scheme));
  }
  report.partitions.push_back(critic_partition("overall", all, mode, scheme));
  return report;
}

EditReport build_edit_report(std::span<const SessionTrace> traces,
                             const std::map<std::string, NormalizedRecord>& corpus,
                             const eval::ScoreTable& scores, std::string label,
                             std::string series_metric) {
  EditReport r;
  r.label = std::move(label);
  r.edited.model = r.label;
  r.input.model = "Input";
  r.n_sessions = traces.size();
  r.series_metric = series_metric;
  if (!traces.empty()) r.strategy = traces.front().strategy;

  std::vector<std::string> final_ids, input_ids;
  std::vector<std::string> ref_final, ref_input, ref_texts;
  std::vector<std::string> edit_final, edit_input, edit_texts;
  std::vector<std::string> pres_final, pres_input;
  std::vector<SessionTrace> human_pool;
  std::vector<double> span_scores;
  std::vector<ErrorTypeSet> pred_types, gold_types;
  std::size_t unknown = 0;

  for (const auto& t : traces) {
    ++r.terminal_counts[std::string(to_string(t.terminal_status))];
    for (const auto& round : t.rounds) {
      if (round.editor_output) {
        ++r.parse_status_counts[std::string(to_string(round.editor_output->parse_status))];
      }
    }
    if (t.error) r.failed_ids.push_back(t.pair_id);
    final_ids.push_back(eval::final_score_id(t.pair_id));
    input_ids.push_back(eval::input_score_id(t.pair_id));
    pres_final.push_back(t.final_summary);
    pres_input.push_back(t.input_summary);

    const auto rec = corpus.find(t.pair_id);
    if (rec == corpus.end()) {
      ++unknown;
      continue;
    }
    const auto& pair = rec->second.pair;
    if (pair.reference_summary) {
      ref_final.push_back(t.final_summary);
      ref_input.push_back(t.input_summary);
      ref_texts.push_back(*pair.reference_summary);
    }
    if (pair.human_edit) {
      edit_final.push_back(t.final_summary);
      edit_input.push_back(t.input_summary);
      edit_texts.push_back(*pair.human_edit);
    }
    if (rec->second.has_error.value_or(false)) human_pool.push_back(t);
    if (pair.gold_span) {
      if (auto span = eval::first_round_span(t)) {
        span_scores.push_back(100.0 * eval::rouge_l(*span, *pair.gold_span).f1);
      }
    }
    if (pair.gold_error_types) {
      if (auto types = eval::first_round_types(t)) {
        pred_types.push_back(*types);
        gold_types.push_back(*pair.gold_error_types);
      }
    }
  }
  if (unknown > 0) {
    log::warn(fmt::format("{} traces have no corpus record", unknown));
  }

  for (auto m : eval::kExternalMetrics) {
    const std::string metric(m);
    r.edited.external[metric] = mean_score(scores, metric, final_ids);
    r.input.external[metric] = mean_score(scores, metric, input_ids);
  }
  r.edited.bertscore_human = mean_score(scores, "bertscore_human", final_ids);
  r.input.bertscore_human = mean_score(scores, "bertscore_human", input_ids);
  r.edited.bertscore_input = mean_score(scores, "bertscore_input", final_ids);

  r.edited.vs_reference = corpus_rouge(ref_final, ref_texts);
  r.input.vs_reference = corpus_rouge(ref_input, ref_texts);
  r.edited.vs_human_edit = corpus_rouge(edit_final, edit_texts);
  r.input.vs_human_edit = corpus_rouge(edit_input, edit_texts);
  r.edited.vs_input = corpus_rouge(pres_final, pres_input);

  r.edited.human_pool = rates(human_pool);
  const auto flagged = eval::critic_flagged(traces);
  r.edited.critic_pool = rates(flagged);

  r.span_rouge_l = mean_of(span_scores);
  r.n_span = span_scores.size();
  r.n_types = pred_types.size();
  if (!pred_types.empty()) {
    try {
      r.type_macro_f1 = 100.0 * eval::type_macro_f1(pred_types, gold_types);
    } catch (const Error&) {
      r.type_macro_f1.reset();
    }
  }

  std::map<std::string, double> series_scores;
  if (const auto it = scores.find(series_metric); it != scores.end()) {
    series_scores = it->second;
  }
  r.series = eval::per_round_series(traces, series_scores);
  return r;
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += text::csv_field(cells[i]);
    }
    out += '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
  return out;
}

std::string Table::to_markdown() const {
  std::string out;
  if (!title.empty()) out += "### " + title + "\n\n";
  auto line = [&](const std::vector<std::string>& cells) {
    out += '|';
    for (const auto& c : cells) {
      out += ' ';
      for (char ch : c) {
        if (ch == '|') out += '\\';
        out += ch == '\n' ? ' ' : ch;
      }
      out += " |";
    }
    out += '\n';
  };
  line(header);
  out += '|';
  for (std::size_t i = 0; i < header.size(); ++i) out += "---|";
  out += '\n';
  for (const auto& row : rows) line(row);
  if (!notes.empty()) {
    out += '\n';
    for (const auto& n : notes) out += n + "\n";
  }
  return out;
}

Table critic_table(std::span<const CriticEvalReport> reports) {
  Table t;
  t.title = "Critic agreement with human judgments";
  t.header = {"Critic",    "CNN/DM PCC", "CNN/DM ρ", "CNN/DM BAcc",
              "XSum PCC", "XSum ρ",     "XSum BAcc"};
  for (const auto& r : reports) {
    std::vector<std::string> row{r.label};
    for (const char* name : {"CNN_DM", "XSUM"}) {
      const auto* p = r.partition(name);
      row.push_back(p ? cell(p->pearson, 3) : "");
      row.push_back(p ? cell(p->spearman, 3) : "");
      row.push_back(p ? cell(p->balanced_accuracy, 3) : "");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table edit_table(std::span<const EditReport> reports) {
  Table t;
  t.title = "Post-editing evaluation";
  t.header.assign(kTable2Columns.begin(), kTable2Columns.end());
  auto row_of = [](const MetricRow& m, bool with_edit) {
    return std::vector<std::string>{
        m.model,
        cell(ext(m, "qafacteval")),
        cell(ext(m, "dae")),
        cell(ext(m, "factcc")),
        cell(r1(m.vs_reference)),
        cell(r2(m.vs_reference)),
        cell(rl(m.vs_reference)),
        cell(ext(m, "bertscore")),
        with_edit ? cell(edit_pct(m)) : std::string()};
  };
  if (!reports.empty()) t.rows.push_back(row_of(reports.front().input, false));
  for (const auto& r : reports) t.rows.push_back(row_of(r.edited, true));
  return t;
}

Table human_edit_table(std::span<const EditReport> reports) {
  Table t;
  t.title = "Post-editing evaluation against references and human edits";
  t.header = {"Model",       "QAFE",       "DAE",       "FactCC",
              "R1 (ref)",    "R2 (ref)",   "RL (ref)",  "BS-F1 (ref)",
              "R1 (human)",  "R2 (human)", "RL (human)", "BS-F1 (human)",
              "Edit %"};
  auto row_of = [](const MetricRow& m, bool with_edit) {
    return std::vector<std::string>{
        m.model,
        cell(ext(m, "qafacteval")),
        cell(ext(m, "dae")),
        cell(ext(m, "factcc")),
        cell(r1(m.vs_reference)),
        cell(r2(m.vs_reference)),
        cell(rl(m.vs_reference)),
        cell(ext(m, "bertscore")),
        cell(r1(m.vs_human_edit)),
        cell(r2(m.vs_human_edit)),
        cell(rl(m.vs_human_edit)),
        cell(m.bertscore_human),
        with_edit ? cell(edit_pct(m)) : std::string()};
  };
  if (!reports.empty()) t.rows.push_back(row_of(reports.front().input, false));
  for (const auto& r : reports) t.rows.push_back(row_of(r.edited, true));
  return t;
}

Table cot_table(std::span<const EditReport> reports) {
  Table t;
  t.title = "Chain-of-thought accuracy";
  t.header = {"Model", "Strategy", "Span RL", "Type F1", "Edit %"};
  for (const auto& r : reports) {
    t.rows.push_back({r.label, std::string(to_string(r.strategy)),
                      cell(r.span_rouge_l), cell(r.type_macro_f1),
                      cell(edit_pct(r.edited))});
  }
  t.notes.push_back(
      "Span RL: ROUGE-L F1 x100 between the first predicted span and the gold "
      "span. Type F1: macro F1 x100 of the first predicted error types.");
  return t;
}

Table slice_table(std::span<const eval::ErrorTypeSlice> slices,
                  const std::string& label_a, const std::string& label_b) {
  Table t;
  t.title = "Comparison by correctly predicted error type";
  t.header = {"Error type", "n", "Metric", label_a, label_b};
  for (const auto& s : slices) {
    const std::string type(short_name(s.type));
    const std::string n = std::to_string(s.n());
    if (s.rows.empty()) {
      t.rows.push_back({type, n, "", "", ""});
      continue;
    }
    for (const auto& row : s.rows) {
      t.rows.push_back({type, n, row.metric, cell(row.mean_a), cell(row.mean_b)});
    }
  }
  return t;
}

Table valid_edit_table(std::span<const EditReport> reports) {
  Table t;
  t.title = "Editing success";
  t.header = {"Model", "Edit % (human)", "ValidEdit % (human)", "Edit % (critic)",
              "ValidEdit % (critic)"};
  for (const auto& r : reports) {
    const auto& h = r.edited.human_pool;
    const auto& c = r.edited.critic_pool;
    t.rows.push_back(
        {r.label,
         cell(h ? std::optional<double>(h->edit_rate) : std::nullopt),
         cell(h ? std::optional<double>(h->valid_edit_rate) : std::nullopt),
         cell(c ? std::optional<double>(c->edit_rate) : std::nullopt),
         cell(c ? std::optional<double>(c->valid_edit_rate) : std::nullopt)});
  }
  t.notes.emplace_back(kValidEditNote);
  t.notes.emplace_back(
      "human: pool of inputs with a human-annotated error. critic: pool of "
      "inputs the critic flagged in round 1.");
  return t;
}

Table preservation_table(std::span<const EditReport> reports) {
  Table t;
  t.title = "Input summary preservation";
  t.header = {"Model", "R1", "R2", "RL", "BS-F1", "Edit %"};
  for (const auto& r : reports) {
    t.rows.push_back({r.label, cell(r1(r.edited.vs_input)), cell(r2(r.edited.vs_input)),
                      cell(rl(r.edited.vs_input)), cell(r.edited.bertscore_input),
                      cell(edit_pct(r.edited))});
  }
  return t;
}

std::string series_tsv(const eval::RoundSeries& series) {
  std::string out = "round\tpair_id\tscore\n";
  for (const auto& row : series.rows) {
    out += fmt::format("{}\t{}\t{}\n", row.round, row.pair_id,
                       row.score ? fmt::format("{}", *row.score) : std::string());
  }
  return out;
}

std::string exit_histogram_tsv(const eval::RoundSeries& series) {
  std::string out = "edits\tsessions\n";
  for (const auto& [edits, count] : series.exit_histogram) {
    out += fmt::format("{}\t{}\n", edits, count);
  }
  return out;
}

std::string critic_report_json(const CriticEvalReport& report) {
  ojson j;
  j["label"] = report.label;
  j["mode"] = to_string(report.mode);
  j["bucket_scheme"] = to_string(report.scheme);
  ojson parts = ojson::array();
  for (const auto& p : report.partitions) {
    parts.push_back({{"partition", p.name},
                     {"n", p.n},
                     {"n_unparsed", p.n_unparsed},
                     {"pearson", opt(p.pearson)},
                     {"spearman", opt(p.spearman)},
                     {"balanced_accuracy", opt(p.balanced_accuracy)},
                     {"pearson_continuous", opt(p.pearson_continuous)},
                     {"spearman_continuous", opt(p.spearman_continuous)},
                     {"notes", p.notes}});
  }
  j["partitions"] = std::move(parts);
  j["failed_ids"] = report.failed_ids;
  return j.dump(2) + "\n";
}

std::string edit_report_json(const EditReport& report) {
  ojson j;
  j["label"] = report.label;
  j["strategy"] = to_string(report.strategy);
  j["n_sessions"] = report.n_sessions;
  j["edited"] = row_json(report.edited);
  j["input"] = row_json(report.input);
  j["span_rouge_l"] = opt(report.span_rouge_l);
  j["n_span"] = report.n_span;
  j["type_macro_f1"] = opt(report.type_macro_f1);
  j["n_types"] = report.n_types;
  j["parse_status_counts"] = report.parse_status_counts;
  j["terminal_counts"] = report.terminal_counts;
  ojson hist = ojson::object();
  for (const auto& [edits, count] : report.series.exit_histogram) {
    hist[std::to_string(edits)] = count;
  }
  j["exit_histogram"] = std::move(hist);
  j["series_metric"] = report.series_metric;
  j["failed_ids"] = report.failed_ids;
  j["valid_edit_definition"] = kValidEditNote;
  return j.dump(2) + "\n";
}

void write_table(const Table& table, const std::filesystem::path& dir,
                 const std::string& stem) {
  text::write_file_atomic((dir / (stem + ".csv")).string(), table.to_csv());
  text::write_file_atomic((dir / (stem + ".md")).string(), table.to_markdown());
}

}  // namespace faithedit
