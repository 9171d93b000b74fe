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

#include "faithedit/engine.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <thread>

#include "faithedit/log.hpp"
#include "faithedit/text_util.hpp"

namespace faithedit {

namespace {

using Clock = std::chrono::steady_clock;
using ojson = nlohmann::ordered_json;

std::chrono::microseconds since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0);
}

ojson optional_string(const std::optional<std::string>& s) {
  return s ? ojson(*s) : ojson(nullptr);
}

std::optional<std::string> read_optional_string(const nlohmann::json& j,
                                                const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

std::chrono::microseconds read_us(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::chrono::microseconds{0};
  return std::chrono::microseconds{j[key].get<std::int64_t>()};
}

ojson verdict_json(const CriticVerdict& v) {
  ojson j;
  j["mode"] = to_string(v.mode);
  j["value"] = v.value ? ojson(*v.value) : ojson(nullptr);
  j["raw"] = v.raw;
  return j;
}

ojson editor_json(const EditorOutput& e) {
  ojson j;
  j["span"] = optional_string(e.span);
  if (e.error_types) {
    ojson types = ojson::array();
    for (auto t : *e.error_types) types.push_back(long_name(t));
    j["error_types"] = std::move(types);
  } else {
    j["error_types"] = nullptr;
  }
  j["edited_summary"] = e.edited_summary;
  j["reasoning"] = optional_string(e.reasoning);
  j["parse_status"] = to_string(e.parse_status);
  j["raw"] = e.raw;
  return j;
}

template <typename T, typename F>
T parse_enum(const nlohmann::json& j, const char* key, F parse) {
  const auto s = j.at(key).get<std::string>();
  auto v = parse(s);
  if (!v) throw SchemaError(key, "unknown value '" + s + "'");
  return *v;
}

CriticVerdict verdict_from(const nlohmann::json& j) {
  CriticVerdict v;
  v.mode = parse_enum<CriticMode>(j, "mode", parse_critic_mode);
  if (!j.at("value").is_null()) v.value = j["value"].get<int>();
  v.raw = j.at("raw").get<std::string>();
  return v;
}

EditorOutput editor_from(const nlohmann::json& j) {
  EditorOutput e;
  e.span = read_optional_string(j, "span");
  if (j.contains("error_types") && !j["error_types"].is_null()) {
    ErrorTypeSet types;
    for (const auto& t : j["error_types"]) {
      const auto s = t.get<std::string>();
      auto et = parse_error_type(s);
      if (!et) throw SchemaError("error_types", "unknown error type '" + s + "'");
      types.insert(*et);
    }
    e.error_types = std::move(types);
  }
  e.edited_summary = j.at("edited_summary").get<std::string>();
  e.reasoning = read_optional_string(j, "reasoning");
  e.parse_status = parse_enum<ParseStatus>(j, "parse_status", parse_parse_status);
  e.raw = j.at("raw").get<std::string>();
  return e;
}

}  // namespace

void validate(const LoopConfig& config) {
  if (config.max_rounds < 1) {
    throw Error(ErrorCode::ConfigError, "max_rounds must be >= 1");
  }
  if (config.stop_threshold != 4 && config.stop_threshold != 5) {
    throw Error(ErrorCode::ConfigError, "stop_threshold must be 4 or 5");
  }
  if (!config.critic) throw Error(ErrorCode::ConfigError, "no critic backend");
}

std::string_view to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::JudgedFaithful: return "JudgedFaithful";
    case TerminalStatus::RoundCapReached: return "RoundCapReached";
    case TerminalStatus::EditFailed: return "EditFailed";
  }
  return "";
}

std::optional<TerminalStatus> parse_terminal_status(std::string_view s) {
  for (auto st : {TerminalStatus::JudgedFaithful, TerminalStatus::RoundCapReached,
                  TerminalStatus::EditFailed}) {
    if (s == to_string(st)) return st;
  }
  return std::nullopt;
}

int SessionTrace::edit_count() const {
  return static_cast<int>(std::count_if(
      rounds.begin(), rounds.end(),
      [](const Round& r) { return r.editor_output.has_value(); }));
}

SessionTrace without_timing(SessionTrace trace) {
  trace.total_latency = std::chrono::microseconds{0};
  for (auto& r : trace.rounds) {
    r.critic_latency = std::chrono::microseconds{0};
    r.editor_latency = std::chrono::microseconds{0};
  }
  return trace;
}

SessionTrace run_session(const DocumentSummaryPair& pair,
                         const LoopConfig& config) {
  validate(config);
  Backend& critic = *config.critic;
  Backend& editor = config.editor ? *config.editor : *config.critic;
  const auto t0 = Clock::now();

  SessionTrace trace;
  trace.pair_id = pair.id;
  trace.strategy = config.strategy;
  trace.input_summary = pair.input_summary;
  std::string current = pair.input_summary;
  int edits = 0;
  bool any_edit_parsed = false;

  try {
    const int budget = editor_sentence_budget(config.prompt, pair.dataset);
    for (;;) {
      Round round;
      round.index = static_cast<int>(trace.rounds.size()) + 1;

      auto tc = Clock::now();
      const auto critic_resp = critic.complete(
          build_critic_request(config.prompt, pair.article, current));
      round.critic_latency = since(tc);
      round.pre_verdict =
          parse_critic_lenient(critic_resp.content, config.prompt.critic_mode);

      if (!critic_needs_edit(round.pre_verdict, config.stop_threshold)) {
        round.summary_after = current;
        trace.rounds.push_back(std::move(round));
        trace.terminal_status = TerminalStatus::JudgedFaithful;
        break;
      }
      if (edits >= config.max_rounds) {
        round.summary_after = current;
        trace.rounds.push_back(std::move(round));
        trace.terminal_status = any_edit_parsed ? TerminalStatus::RoundCapReached
                                                : TerminalStatus::EditFailed;
        break;
      }

      auto te = Clock::now();
      const auto editor_resp = editor.complete(
          build_editor_prompt(config.strategy, pair, budget, current));
      round.editor_latency = since(te);
      auto out = parse_editor(editor_resp.content, config.strategy);
      if (editor_resp.finish_reason == FinishReason::Refusal) {
        out.parse_status = ParseStatus::Failed;
        out.edited_summary.clear();
      }
      ++edits;
      if (out.parse_status != ParseStatus::Failed) {
        any_edit_parsed = true;
        current = out.edited_summary;
      }
      round.summary_after = current;
      round.editor_output = std::move(out);
      trace.rounds.push_back(std::move(round));
    }
  } catch (const Error& e) {
    trace.final_summary = current;
    trace.terminal_status = TerminalStatus::EditFailed;
    trace.error = e.what();
    trace.total_latency = since(t0);
    throw SessionError(e.code(), "session " + pair.id + " failed: " + e.what(),
                       std::move(trace));
  }

  trace.final_summary = current;
  trace.total_latency = since(t0);
  return trace;
}

TraceStore::TraceStore(std::filesystem::path run_dir)
    : dir_(std::move(run_dir) / "traces") {}

std::filesystem::path TraceStore::path_for(const std::string& pair_id) const {
  return dir_ / (text::hex64(text::fnv1a64(pair_id)) + ".json");
}

std::optional<SessionTrace> TraceStore::load(const std::string& pair_id) const {
  const auto p = path_for(pair_id);
  std::error_code ec;
  if (!std::filesystem::exists(p, ec)) return std::nullopt;
  try {
    auto trace = trace_from_json(text::read_file(p.string()));
    if (trace.pair_id != pair_id) return std::nullopt;
    return trace;
  } catch (const std::exception& e) {
    log::warn("ignoring unreadable trace " + p.string() + ": " + e.what());
    return std::nullopt;
  }
}

void TraceStore::save(const SessionTrace& trace) const {
  text::write_file_atomic(path_for(trace.pair_id).string(),
                          trace_to_json(trace) + "\n");
}

std::vector<SessionTrace> run_batch(const std::vector<DocumentSummaryPair>& pairs,
                                    const LoopConfig& config,
                                    const BatchOptions& options) {
  if (options.parallelism < 1) {
    throw Error(ErrorCode::ConfigError, "parallelism must be >= 1");
  }
  validate(config);
  std::optional<TraceStore> store;
  if (options.run_dir) store.emplace(*options.run_dir);

  std::vector<SessionTrace> results(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pairs.size()) return;
      const auto& pair = pairs[i];
      if (store) {
        if (auto done = store->load(pair.id); done && !done->error) {
          results[i] = std::move(*done);
          continue;
        }
      }
      SessionTrace trace;
      try {
        trace = run_session(pair, config);
      } catch (const SessionError& e) {
        trace = e.partial();
        log::warn(e.what());
      } catch (const std::exception& e) {
        trace.pair_id = pair.id;
        trace.strategy = config.strategy;
        trace.input_summary = pair.input_summary;
        trace.final_summary = pair.input_summary;
        trace.terminal_status = TerminalStatus::EditFailed;
        trace.error = e.what();
        log::warn(std::string("session ") + pair.id + " failed: " + e.what());
      }
      if (store) store->save(trace);
      results[i] = std::move(trace);
    }
  };

  const auto n_threads = static_cast<std::size_t>(std::min<std::size_t>(
      static_cast<std::size_t>(options.parallelism), pairs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  }
  return results;
}

std::string trace_to_json(const SessionTrace& trace, bool include_timing) {
  ojson j;
  j["pair_id"] = trace.pair_id;
  j["strategy"] = to_string(trace.strategy);
  j["input_summary"] = trace.input_summary;
  ojson rounds = ojson::array();
  for (const auto& r : trace.rounds) {
    ojson rj;
    rj["index"] = r.index;
    rj["pre_verdict"] = verdict_json(r.pre_verdict);
    rj["editor_output"] =
        r.editor_output ? editor_json(*r.editor_output) : ojson(nullptr);
    rj["summary_after"] = r.summary_after;
    if (include_timing) {
      rj["critic_latency_us"] = r.critic_latency.count();
      rj["editor_latency_us"] = r.editor_latency.count();
    }
    rounds.push_back(std::move(rj));
  }
  j["rounds"] = std::move(rounds);
  j["final_summary"] = trace.final_summary;
  j["terminal_status"] = to_string(trace.terminal_status);
  j["error"] = optional_string(trace.error);
  if (include_timing) j["total_latency_us"] = trace.total_latency.count();
  return j.dump();
}

SessionTrace trace_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("trace", e.what());
  }
  try {
    SessionTrace t;
    t.pair_id = j.at("pair_id").get<std::string>();
    t.strategy = parse_enum<EditorStrategy>(j, "strategy", parse_strategy);
    t.input_summary = j.at("input_summary").get<std::string>();
    for (const auto& rj : j.at("rounds")) {
      Round r;
      r.index = rj.at("index").get<int>();
      r.pre_verdict = verdict_from(rj.at("pre_verdict"));
      if (!rj.at("editor_output").is_null()) {
        r.editor_output = editor_from(rj["editor_output"]);
      }
      r.summary_after = rj.at("summary_after").get<std::string>();
      r.critic_latency = read_us(rj, "critic_latency_us");
      r.editor_latency = read_us(rj, "editor_latency_us");
      t.rounds.push_back(std::move(r));
    }
    t.final_summary = j.at("final_summary").get<std::string>();
    t.terminal_status =
        parse_enum<TerminalStatus>(j, "terminal_status", parse_terminal_status);
    t.error = read_optional_string(j, "error");
    t.total_latency = read_us(j, "total_latency_us");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("trace", e.what());
  }
}

void export_traces(const std::vector<SessionTrace>& traces,
                   const std::string& path, bool include_timing) {
  std::string out;
  for (const auto& t : traces) {
    out += trace_to_json(t, include_timing);
    out += '\n';
  }
  text::write_file_atomic(path, out);
}

std::vector<SessionTrace> import_traces(const std::string& path) {
  const auto content = text::read_file(path);
  std::vector<SessionTrace> out;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(content)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(trace_from_json(line));
    } catch (const SchemaError& e) {
      throw SchemaError(path + ":" + std::to_string(line_no), e.what());
    }
  }
  return out;
}

}  // namespace faithedit
