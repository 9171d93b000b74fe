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

#include <json.hpp>

#include <filesystem>
#include <set>

#include "faithedit/cli.hpp"
#include "faithedit/text_util.hpp"

namespace faithedit::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::ConfigError, msg);
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (key == "api_key") {
      config_error(where + ".api_key: keys are read from the environment; use api_key_env");
    }
    if (!allowed.count(key)) config_error(where + ": unknown field '" + key + "'");
  }
}

template <class T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(where + "." + key + " has the wrong type");
  }
}

template <class T>
void read_opt(const json& obj, const std::string& key, const std::string& where,
              T& into) {
  if (obj.contains(key) && !obj.at(key).is_null()) into = get_as<T>(obj, key, where);
}

template <class T>
void read_opt(const json& obj, const std::string& key, const std::string& where,
              std::optional<T>& into) {
  if (obj.contains(key) && !obj.at(key).is_null()) into = get_as<T>(obj, key, where);
}

void read_ms(const json& obj, const std::string& key, const std::string& where,
             std::chrono::milliseconds& into) {
  if (obj.contains(key) && !obj.at(key).is_null()) {
    into = std::chrono::milliseconds(get_as<std::int64_t>(obj, key, where));
  }
}

BackendSpec parse_backend(const json& j, const std::string& where) {
  check_keys(j, where,
             {"kind", "endpoint_url", "api_key_env", "model_name", "timeout_ms",
              "max_retries", "max_in_flight", "requests_per_minute",
              "initial_backoff_ms", "max_backoff_ms", "temperature", "max_tokens",
              "script", "replay", "constant", "fallback", "record"});
  BackendSpec b;
  read_opt(j, "kind", where, b.kind);
  read_opt(j, "endpoint_url", where, b.http.endpoint_url);
  read_opt(j, "api_key_env", where, b.http.api_key_env);
  read_opt(j, "model_name", where, b.http.model_name);
  read_ms(j, "timeout_ms", where, b.http.timeout);
  read_opt(j, "max_retries", where, b.http.max_retries);
  read_opt(j, "max_in_flight", where, b.http.max_in_flight);
  read_opt(j, "requests_per_minute", where, b.http.requests_per_minute);
  read_ms(j, "initial_backoff_ms", where, b.http.initial_backoff);
  read_ms(j, "max_backoff_ms", where, b.http.max_backoff);
  read_opt(j, "temperature", where, b.http.temperature);
  read_opt(j, "max_tokens", where, b.http.max_tokens);
  read_opt(j, "script", where, b.script);
  read_opt(j, "replay", where, b.replay);
  read_opt(j, "constant", where, b.constant);
  read_opt(j, "fallback", where, b.fallback);
  read_opt(j, "record", where, b.record);
  return b;
}

ordered_json backend_json(const BackendSpec& b) {
  ordered_json j;
  j["kind"] = b.kind;
  if (b.kind == "http") {
    j["endpoint_url"] = b.http.endpoint_url;
    j["api_key_env"] = b.http.api_key_env;
    j["model_name"] = b.http.model_name;
    j["timeout_ms"] = b.http.timeout.count();
    j["max_retries"] = b.http.max_retries;
    j["max_in_flight"] = b.http.max_in_flight;
    j["requests_per_minute"] = b.http.requests_per_minute;
    j["initial_backoff_ms"] = b.http.initial_backoff.count();
    j["max_backoff_ms"] = b.http.max_backoff.count();
    j["temperature"] = b.http.temperature;
    j["max_tokens"] = b.http.max_tokens;
  } else {
    if (!b.script.empty()) j["script"] = b.script;
    if (b.replay) j["replay"] = *b.replay;
    if (b.constant) j["constant"] = *b.constant;
    if (b.fallback) j["fallback"] = *b.fallback;
  }
  if (b.record) j["record"] = *b.record;
  return j;
}

void validate_backend(const BackendSpec& b, const std::string& where) {
  if (b.kind == "http") {
    if (b.http.endpoint_url.empty()) config_error(where + ".endpoint_url is required");
    if (b.http.model_name.empty()) config_error(where + ".model_name is required");
    try {
      validate(b.http);
    } catch (const Error& e) {
      config_error(where + ": " + e.what());
    }
    return;
  }
  if (b.kind != "mock") config_error(where + ".kind must be 'http' or 'mock'");
  const int sources = int(!b.script.empty()) + int(b.replay.has_value()) +
                      int(b.constant.has_value());
  if (sources != 1) {
    config_error(where + ": a mock backend needs exactly one of script, replay, constant");
  }
  if (b.fallback && !b.replay) config_error(where + ".fallback only applies to replay");
  if (b.replay && !std::filesystem::exists(*b.replay)) {
    config_error(where + ".replay: no such file: " + *b.replay);
  }
}

EditorStrategy strategy_or_throw(const std::string& s) {
  const auto v = parse_strategy(s);
  if (!v) config_error("unknown strategy: " + s);
  return *v;
}

CriticMode critic_mode_or_throw(const std::string& s) {
  const auto v = parse_critic_mode(s);
  if (!v) config_error("unknown critic mode: " + s);
  return *v;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "$",
             {"label", "corpus", "out", "critic", "editor", "strategy", "critic_mode",
              "max_rounds", "stop_threshold", "parallelism", "subsample", "seed",
              "demos", "bucket_scheme", "sentence_budget", "scores_file", "scorer",
              "series_metric"});
  RunConfig c;
  read_opt(j, "label", "$", c.label);
  read_opt(j, "corpus", "$", c.corpus);
  read_opt(j, "out", "$", c.out);
  if (j.contains("critic")) c.critic = parse_backend(j.at("critic"), "$.critic");
  if (j.contains("editor") && !j.at("editor").is_null()) {
    c.editor = parse_backend(j.at("editor"), "$.editor");
  }
  if (j.contains("strategy")) c.strategy = strategy_or_throw(get_as<std::string>(j, "strategy", "$"));
  if (j.contains("critic_mode")) {
    c.critic_mode = critic_mode_or_throw(get_as<std::string>(j, "critic_mode", "$"));
  }
  read_opt(j, "max_rounds", "$", c.max_rounds);
  read_opt(j, "stop_threshold", "$", c.stop_threshold);
  read_opt(j, "parallelism", "$", c.parallelism);
  read_opt(j, "subsample", "$", c.subsample);
  read_opt(j, "seed", "$", c.seed);
  read_opt(j, "demos", "$", c.demos);
  if (j.contains("bucket_scheme")) {
    const auto s = get_as<std::string>(j, "bucket_scheme", "$");
    const auto v = parse_bucket_scheme(s);
    if (!v) config_error("unknown bucket scheme: " + s);
    c.bucket_scheme = *v;
  }
  read_opt(j, "sentence_budget", "$", c.sentence_budget);
  read_opt(j, "scores_file", "$", c.scores_file);
  if (j.contains("scorer") && !j.at("scorer").is_null()) {
    const auto& s = j.at("scorer");
    check_keys(s, "$.scorer", {"endpoint_url", "max_in_flight", "timeout_ms"});
    eval::ScorerConfig sc;
    read_opt(s, "endpoint_url", "$.scorer", sc.endpoint_url);
    read_opt(s, "max_in_flight", "$.scorer", sc.max_in_flight);
    read_ms(s, "timeout_ms", "$.scorer", sc.timeout);
    c.scorer = sc;
  }
  read_opt(j, "series_metric", "$", c.series_metric);
  return c;
}

void apply_overrides(RunConfig& c, const Overrides& o) {
  if (o.corpus) c.corpus = *o.corpus;
  if (o.strategy) c.strategy = strategy_or_throw(*o.strategy);
  if (o.critic_mode) c.critic_mode = critic_mode_or_throw(*o.critic_mode);
  if (o.max_rounds) c.max_rounds = *o.max_rounds;
  if (o.parallelism) c.parallelism = *o.parallelism;
  if (o.out) c.out = *o.out;
  if (o.scores_file) c.scores_file = *o.scores_file;
  if (o.subsample) c.subsample = *o.subsample;
  if (o.seed) c.seed = *o.seed;
}

RunConfig load_run_config(const std::string& path, const Overrides& overrides) {
  std::string text;
  try {
    text = text::read_file(path);
  } catch (const Error& e) {
    config_error(std::string("cannot read config: ") + e.what());
  }
  auto c = parse_run_config(text);
  apply_overrides(c, overrides);
  return c;
}

void validate(const RunConfig& c) {
  if (c.corpus.empty()) config_error("corpus path is required");
  if (!std::filesystem::exists(c.corpus)) config_error("no such corpus: " + c.corpus);
  if (c.out.empty()) config_error("output directory is required");
  if (c.max_rounds < 1) config_error("max_rounds must be >= 1");
  if (c.stop_threshold < 1 || c.stop_threshold > 5) {
    config_error("stop_threshold must be in [1, 5]");
  }
  if (c.parallelism < 1) config_error("parallelism must be >= 1");
  if (c.subsample && *c.subsample == 0) config_error("subsample must be >= 1");
  if (c.sentence_budget && *c.sentence_budget < 1) {
    config_error("sentence_budget must be >= 1");
  }
  if (c.demos && !std::filesystem::exists(*c.demos)) {
    config_error("no such demos file: " + *c.demos);
  }
  if (c.scores_file && !std::filesystem::exists(*c.scores_file)) {
    config_error("no such scores file: " + *c.scores_file);
  }
  if (c.scorer) {
    if (c.scorer->endpoint_url.empty()) config_error("scorer.endpoint_url is required");
    if (c.scorer->max_in_flight < 1) config_error("scorer.max_in_flight must be >= 1");
  }
  validate_backend(c.critic, "critic");
  if (c.editor) validate_backend(*c.editor, "editor");
}

std::string run_config_to_json(const RunConfig& c) {
  ordered_json j;
  j["label"] = c.label;
  j["corpus"] = c.corpus;
  j["out"] = c.out;
  j["critic"] = backend_json(c.critic);
  j["editor"] = c.editor ? backend_json(*c.editor) : ordered_json(nullptr);
  j["strategy"] = std::string(to_string(c.strategy));
  j["critic_mode"] = std::string(to_string(c.critic_mode));
  j["max_rounds"] = c.max_rounds;
  j["stop_threshold"] = c.stop_threshold;
  j["parallelism"] = c.parallelism;
  j["subsample"] = c.subsample ? ordered_json(*c.subsample) : ordered_json(nullptr);
  j["seed"] = c.seed;
  j["demos"] = c.demos ? ordered_json(*c.demos) : ordered_json(nullptr);
  j["bucket_scheme"] = std::string(to_string(c.bucket_scheme));
  j["sentence_budget"] =
      c.sentence_budget ? ordered_json(*c.sentence_budget) : ordered_json(nullptr);
  j["scores_file"] = c.scores_file ? ordered_json(*c.scores_file) : ordered_json(nullptr);
  if (c.scorer) {
    j["scorer"] = {{"endpoint_url", c.scorer->endpoint_url},
                   {"max_in_flight", c.scorer->max_in_flight},
                   {"timeout_ms", c.scorer->timeout.count()}};
  } else {
    j["scorer"] = nullptr;
  }
  j["series_metric"] = c.series_metric;
  return j.dump(2) + "\n";
}

std::shared_ptr<Backend> make_backend(const BackendSpec& spec) {
  if (spec.kind == "http") return std::make_shared<HttpBackend>(spec.http);
  if (!spec.script.empty()) {
    std::vector<MockReply> replies(spec.script.begin(), spec.script.end());
    return ScriptedMock::list(std::move(replies));
  }
  if (spec.replay) {
    std::optional<MockReply> fallback;
    if (spec.fallback) fallback = MockReply(*spec.fallback);
    return ScriptedMock::by_fingerprint(load_replay_file(*spec.replay), fallback);
  }
  if (spec.constant) return ScriptedMock::constant(MockReply(*spec.constant));
  config_error("mock backend has no reply source");
}

std::map<std::string, std::string> prompt_hashes(const CriticDemos& demos) {
  std::map<std::string, std::string> out;
  for (const auto& [name, text] : render_probe_prompts(demos)) {
    out[name] = text::git_blob_sha1(text);
  }
  return out;
}

}  // namespace faithedit::cli
