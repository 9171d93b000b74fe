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

#include <fmt/format.h>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <ostream>
#include <thread>

#include "faithedit/cli.hpp"
#include "faithedit/engine.hpp"
#include "faithedit/log.hpp"
#include "faithedit/parse.hpp"
#include "faithedit/report.hpp"
#include "faithedit/text_util.hpp"

namespace faithedit::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kRunConfigFile = "run_config.json";
constexpr const char* kPromptHashFile = "prompts.sha1.json";
constexpr const char* kCorpusFile = "corpus.jsonl";
constexpr const char* kVerdictFile = "critic_verdicts.jsonl";
constexpr const char* kTraceFile = "traces.jsonl";
constexpr const char* kScoreFile = "scores.csv";
constexpr const char* kReportDir = "report";

struct Backends {
  std::shared_ptr<Backend> critic;
  std::shared_ptr<Backend> editor;
  std::shared_ptr<RecordingBackend> critic_recorder;
  std::shared_ptr<RecordingBackend> editor_recorder;
};

std::shared_ptr<Backend> wrap(const BackendSpec& spec,
                              std::shared_ptr<RecordingBackend>& recorder) {
  auto b = make_backend(spec);
  if (!spec.record) return b;
  recorder = std::make_shared<RecordingBackend>(std::move(b));
  return recorder;
}

Backends make_backends(const RunConfig& c) {
  Backends out;
  out.critic = wrap(c.critic, out.critic_recorder);
  if (c.editor) {
    out.editor = wrap(*c.editor, out.editor_recorder);
  } else {
    out.editor = out.critic;
  }
  return out;
}

void save_recordings(const RunConfig& c, const Backends& b) {
  if (b.critic_recorder) save_replay_file(*c.critic.record, b.critic_recorder->recorded());
  if (b.editor_recorder) save_replay_file(*c.editor->record, b.editor_recorder->recorded());
}

PromptConfig prompt_config(const RunConfig& c) {
  PromptConfig p;
  p.critic_mode = c.critic_mode;
  if (c.demos) p.demos = load_critic_demos(*c.demos);
  p.sentence_budget = c.sentence_budget;
  return p;
}

std::vector<NormalizedRecord> working_corpus(const RunConfig& c, bool edit_pool_only) {
  auto records = load_corpus(c.corpus);
  if (edit_pool_only) {
    std::erase_if(records, [](const NormalizedRecord& r) { return !r.in_edit_pool; });
  }
  if (c.subsample && *c.subsample < records.size()) {
    records = subsample(records, *c.subsample, c.seed);
  }
  return records;
}

// Writes the files that pin down what a run did.
void write_provenance(const RunConfig& c, const PromptConfig& p,
                      const std::vector<NormalizedRecord>& records) {
  fs::create_directories(c.out);
  const fs::path out(c.out);
  text::write_file_atomic((out / kRunConfigFile).string(), run_config_to_json(c));

  nlohmann::ordered_json hashes;
  for (const auto& [name, sha] : prompt_hashes(p.demos)) hashes[name] = sha;
  const std::string demos_text =
      c.demos ? text::read_file(*c.demos) : std::string(default_critic_demos_json());
  hashes["critic_demos"] = text::git_blob_sha1(demos_text);
  text::write_file_atomic((out / kPromptHashFile).string(), hashes.dump(2) + "\n");

  save_corpus(records, (out / kCorpusFile).string());
}

std::map<std::string, NormalizedRecord> by_id(const std::vector<NormalizedRecord>& rs) {
  std::map<std::string, NormalizedRecord> out;
  for (const auto& r : rs) out.emplace(r.pair.id, r);
  return out;
}

std::vector<CriticObservation> load_observations(const fs::path& path) {
  std::vector<CriticObservation> out;
  const auto content = text::read_file(path.string());
  for (const auto line : text::split_lines(content)) {
    if (text::trim(line).empty()) continue;
    out.push_back(observation_from_json(line));
  }
  return out;
}

std::string run_label(const fs::path& run_dir) {
  const auto path = run_dir / kRunConfigFile;
  if (fs::exists(path)) {
    try {
      const auto j = nlohmann::json::parse(text::read_file(path.string()));
      const auto label = j.value("label", std::string());
      if (!label.empty()) return label;
      if (j.contains("strategy")) return j.at("strategy").get<std::string>();
    } catch (const nlohmann::json::exception&) {
    }
  }
  return run_dir.filename().string();
}

struct RunMeta {
  std::string label;
  CriticMode mode = CriticMode::Scale5;
  BucketScheme scheme = BucketScheme::EqualWidth;
  std::string series_metric = "qafacteval";
};

RunMeta read_meta(const fs::path& run_dir) {
  RunMeta m;
  m.label = run_label(run_dir);
  const auto path = run_dir / kRunConfigFile;
  if (!fs::exists(path)) return m;
  try {
    const auto c = parse_run_config(text::read_file(path.string()));
    m.mode = c.critic_mode;
    m.scheme = c.bucket_scheme;
    m.series_metric = c.series_metric;
  } catch (const Error& e) {
    log::warn(fmt::format("{}: {}", path.string(), e.what()));
  }
  return m;
}

eval::ScoreTable run_scores(const fs::path& run_dir,
                            const std::optional<std::string>& extra) {
  eval::ScoreTable scores;
  if (fs::exists(run_dir / kScoreFile)) {
    scores = eval::load_score_file((run_dir / kScoreFile).string());
  }
  if (extra) eval::merge_scores(scores, eval::load_score_file(*extra));
  return scores;
}

struct ScoreRequest {
  std::string metric;
  std::string service_metric;
  std::vector<eval::ScoreItem> items;
};

// Builds every item the report can use: final and input summaries for each
// external metric, the BERTScore variants, and per-round summaries for the
// series metric.
std::vector<ScoreRequest> score_requests(const std::vector<SessionTrace>& traces,
                                         const std::map<std::string, NormalizedRecord>& corpus,
                                         const std::string& series_metric) {
  std::vector<ScoreRequest> out;
  for (auto m : eval::kExternalMetrics) {
    ScoreRequest req{std::string(m), std::string(m), {}};
    for (const auto& t : traces) {
      const auto it = corpus.find(t.pair_id);
      if (it == corpus.end()) continue;
      const auto& pair = it->second.pair;
      std::string context = pair.article;
      if (m == "bertscore") {
        if (!pair.reference_summary) continue;
        context = *pair.reference_summary;
      }
      req.items.push_back({eval::final_score_id(t.pair_id), context, t.final_summary});
      req.items.push_back({eval::input_score_id(t.pair_id), context, t.input_summary});
      if (m == series_metric) {
        for (const auto& r : t.rounds) {
          if (!r.editor_output) continue;
          req.items.push_back({eval::round_score_id(t.pair_id, r.index), context,
                               r.summary_after});
        }
      }
    }
    out.push_back(std::move(req));
  }
  ScoreRequest human{"bertscore_human", "bertscore", {}};
  ScoreRequest input{"bertscore_input", "bertscore", {}};
  for (const auto& t : traces) {
    const auto it = corpus.find(t.pair_id);
    if (it == corpus.end()) continue;
    if (const auto& edit = it->second.pair.human_edit) {
      human.items.push_back({eval::final_score_id(t.pair_id), *edit, t.final_summary});
      human.items.push_back({eval::input_score_id(t.pair_id), *edit, t.input_summary});
    }
    input.items.push_back({eval::final_score_id(t.pair_id), t.input_summary, t.final_summary});
  }
  out.push_back(std::move(human));
  out.push_back(std::move(input));
  return out;
}

eval::ScoreTable fetch_scores(const RunConfig& c, const std::vector<SessionTrace>& traces,
                              const std::map<std::string, NormalizedRecord>& corpus,
                              std::ostream& err) {
  eval::ScoreTable scores;
  if (c.scores_file) scores = eval::load_score_file(*c.scores_file);
  if (!c.scorer) return scores;
  for (const auto& req : score_requests(traces, corpus, c.series_metric)) {
    if (req.items.empty()) continue;
    try {
      for (const auto& [id, v] : eval::external_scores(*c.scorer, req.items, req.service_metric)) {
        scores[req.metric][id] = v;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ScorerUnavailable) throw;
      err << "warning: " << e.what() << "; external metric columns stay blank\n";
      break;
    }
  }
  return scores;
}

void write_text(const fs::path& path, const std::string& content) {
  text::write_file_atomic(path.string(), content);
}

// Renders every report the files in `run_dir` support.
void render_reports(const fs::path& run_dir, const eval::ScoreTable& scores,
                    const std::optional<fs::path>& compare_dir,
                    const std::optional<std::string>& extra_scores) {
  const auto meta = read_meta(run_dir);
  const fs::path report = run_dir / kReportDir;
  fs::create_directories(report);

  std::map<std::string, NormalizedRecord> corpus;
  if (fs::exists(run_dir / kCorpusFile)) {
    corpus = by_id(load_corpus((run_dir / kCorpusFile).string()));
  }

  if (fs::exists(run_dir / kVerdictFile)) {
    const auto obs = load_observations(run_dir / kVerdictFile);
    const auto critic = evaluate_critic(obs, meta.mode, meta.scheme, meta.label);
    write_text(report / "critic_report.json", critic_report_json(critic));
    write_table(critic_table(std::span(&critic, 1)), report, "table1");
  }

  if (!fs::exists(run_dir / kTraceFile)) return;
  const auto traces = import_traces((run_dir / kTraceFile).string());
  const auto edit = build_edit_report(traces, corpus, scores, meta.label, meta.series_metric);
  const std::span<const EditReport> reports(&edit, 1);
  write_text(report / "edit_report.json", edit_report_json(edit));
  write_table(edit_table(reports), report, "table2");
  write_table(human_edit_table(reports), report, "table3");
  write_table(cot_table(reports), report, "table4");
  write_table(valid_edit_table(reports), report, "table7");
  write_table(preservation_table(reports), report, "preservation");
  write_text(report / "per_round.tsv", series_tsv(edit.series));
  write_text(report / "exit_histogram.tsv", exit_histogram_tsv(edit.series));

  if (!compare_dir) return;
  const auto other_traces = import_traces((*compare_dir / kTraceFile).string());
  const auto other_scores = run_scores(*compare_dir, extra_scores);
  std::map<std::string, ErrorTypeSet> gold;
  for (const auto& [id, rec] : corpus) {
    if (rec.pair.gold_error_types) gold[id] = *rec.pair.gold_error_types;
  }
  std::vector<eval::ErrorTypeSlice> slices;
  for (auto type : kAllErrorTypes) {
    slices.push_back(
        eval::error_type_slice(other_traces, traces, gold, type, other_scores, scores));
  }
  write_table(slice_table(slices, run_label(*compare_dir), meta.label), report, "table6");
}

int report_error(std::ostream& err, const std::exception& e) {
  err << "error: " << e.what() << "\n";
  return kExitConfig;
}

}  // namespace

int cmd_ingest(const std::string& kind, const std::string& in_path,
               const std::string& out_path,
               const std::optional<std::string>& xsum_spans_path,
               LabelRule label_rule, std::ostream& err) {
  try {
    if (!fs::exists(in_path)) throw Error(ErrorCode::IoError, "no such file: " + in_path);
    std::vector<NormalizedRecord> records;
    if (kind == "frank") {
      std::map<std::string, SpanAnnotation> spans;
      FrankOptions options;
      options.label_rule = label_rule;
      if (xsum_spans_path) {
        spans = load_xsum_spans(*xsum_spans_path);
        options.xsum_spans = &spans;
      }
      records = load_frank(in_path, options);
    } else if (kind == "defacto") {
      if (xsum_spans_path) throw Error(ErrorCode::ConfigError, "--xsum-spans applies to frank only");
      records = load_defacto(in_path);
    } else {
      throw Error(ErrorCode::ConfigError, "unknown source kind '" + kind + "' (frank, defacto)");
    }
    if (const auto parent = fs::path(out_path).parent_path(); !parent.empty()) {
      fs::create_directories(parent);
    }
    save_corpus(records, out_path);
    err << fmt::format("wrote {} records to {}\n", records.size(), out_path);
    return kExitOk;
  } catch (const Error& e) {
    return report_error(err, e);
  } catch (const fs::filesystem_error& e) {
    return report_error(err, e);
  }
}

int cmd_critic_eval(const RunConfig& config, std::ostream& err) {
  std::vector<NormalizedRecord> records;
  PromptConfig prompt;
  Backends backends;
  try {
    validate(config);
    prompt = prompt_config(config);
    records = working_corpus(config, false);
    write_provenance(config, prompt, records);
    backends = make_backends(config);
  } catch (const Error& e) {
    return report_error(err, e);
  } catch (const fs::filesystem_error& e) {
    return report_error(err, e);
  }

  std::vector<CriticObservation> obs(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= records.size()) return;
      const auto& rec = records[i];
      auto& o = obs[i];
      o.id = rec.pair.id;
      o.dataset = rec.pair.dataset;
      o.verdict.mode = config.critic_mode;
      if (auto s = human_score(rec.pair)) o.human_score = s->value();
      o.human_unfaithful = rec.has_error;
      try {
        const auto req =
            build_critic_request(prompt, rec.pair.article, rec.pair.input_summary);
        const auto resp = backends.critic->complete(req);
        o.verdict = parse_critic_lenient(resp.content, config.critic_mode);
      } catch (const Error& e) {
        o.error = e.what();
      }
    }
  };
  {
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism),
                                         std::max<std::size_t>(records.size(), 1));
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
  }

  try {
    const fs::path out(config.out);
    std::string lines;
    for (const auto& o : obs) lines += observation_to_json(o) + "\n";
    write_text(out / kVerdictFile, lines);
    save_recordings(config, backends);
    render_reports(out, {}, std::nullopt, std::nullopt);
  } catch (const Error& e) {
    return report_error(err, e);
  }
  std::size_t failed = 0;
  for (const auto& o : obs) failed += o.error.has_value();
  if (failed > 0) {
    err << fmt::format("{} of {} critic calls failed\n", failed, obs.size());
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_edit(const RunConfig& config, std::ostream& err) {
  std::vector<NormalizedRecord> records;
  LoopConfig loop;
  Backends backends;
  try {
    validate(config);
    loop.max_rounds = config.max_rounds;
    loop.strategy = config.strategy;
    loop.stop_threshold = config.stop_threshold;
    loop.prompt = prompt_config(config);
    backends = make_backends(config);
    loop.critic = backends.critic;
    loop.editor = backends.editor;
    validate(loop);
    records = working_corpus(config, true);
    for (const auto& r : records) {
      if (needs_gold_span(config.strategy) && !r.pair.gold_span) {
        throw Error(ErrorCode::MissingGoldAnnotation,
                    fmt::format("{} needs gold spans; {} has none",
                                to_string(config.strategy), r.pair.id));
      }
      if (needs_gold_types(config.strategy) && !r.pair.gold_error_types) {
        throw Error(ErrorCode::MissingGoldAnnotation,
                    fmt::format("{} needs gold error types; {} has none",
                                to_string(config.strategy), r.pair.id));
      }
    }
    write_provenance(config, loop.prompt, records);
  } catch (const Error& e) {
    return report_error(err, e);
  } catch (const fs::filesystem_error& e) {
    return report_error(err, e);
  }

  std::vector<DocumentSummaryPair> pairs;
  pairs.reserve(records.size());
  for (const auto& r : records) pairs.push_back(r.pair);
  BatchOptions options;
  options.parallelism = config.parallelism;
  options.run_dir = fs::path(config.out);
  const auto traces = run_batch(pairs, loop, options);

  try {
    const fs::path out(config.out);
    export_traces(traces, (out / kTraceFile).string());
    save_recordings(config, backends);
    const auto corpus = by_id(records);
    const auto scores = fetch_scores(config, traces, corpus, err);
    eval::save_score_file(scores, (out / kScoreFile).string());
    render_reports(out, scores, std::nullopt, std::nullopt);
  } catch (const Error& e) {
    return report_error(err, e);
  }

  std::size_t failed = 0;
  for (const auto& t : traces) failed += t.error.has_value();
  if (failed > 0) {
    err << fmt::format("{} of {} sessions failed; rerun to retry them\n", failed,
                       traces.size());
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_report(const std::string& run_dir,
               const std::optional<std::string>& scores_file,
               const std::optional<std::string>& compare_dir, std::ostream& err) {
  try {
    if (!fs::is_directory(run_dir)) {
      throw Error(ErrorCode::IoError, "no such run directory: " + run_dir);
    }
    if (compare_dir && !fs::exists(fs::path(*compare_dir) / kTraceFile)) {
      throw Error(ErrorCode::IoError, "no traces to compare in " + *compare_dir);
    }
    const auto scores = run_scores(run_dir, scores_file);
    std::optional<fs::path> compare;
    if (compare_dir) compare = fs::path(*compare_dir);
    render_reports(run_dir, scores, compare, scores_file);
    return kExitOk;
  } catch (const Error& e) {
    return report_error(err, e);
  } catch (const fs::filesystem_error& e) {
    return report_error(err, e);
  }
}

}  // namespace faithedit::cli
