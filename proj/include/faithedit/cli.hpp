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

// Command implementations behind the faithedit executable. Each command
// returns the process exit code: 0 success, 1 partial failure, 2
// configuration or schema error.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "faithedit/backend.hpp"
#include "faithedit/core.hpp"
#include "faithedit/data.hpp"
#include "faithedit/eval.hpp"
#include "faithedit/prompt.hpp"

namespace faithedit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

// "http" talks to a chat-completions endpoint. "mock" answers from a list
// script, a replay file keyed by request fingerprint, or a constant reply.
struct BackendSpec {
  std::string kind = "http";
  BackendConfig http;
  std::vector<std::string> script;
  std::optional<std::string> replay;
  std::optional<std::string> constant;
  std::optional<std::string> fallback;
  // Saves every reply to this replay file after the run.
  std::optional<std::string> record;
};

struct RunConfig {
  std::string label;
  std::string corpus;
  std::string out;
  BackendSpec critic;
  // Absent: the critic backend instance also edits.
  std::optional<BackendSpec> editor;
  EditorStrategy strategy = EditorStrategy::EditorSpan;
  CriticMode critic_mode = CriticMode::Scale5;
  int max_rounds = 5;
  int stop_threshold = 5;
  int parallelism = 1;
  std::optional<std::size_t> subsample;
  std::uint64_t seed = 0;
  std::optional<std::string> demos;
  BucketScheme bucket_scheme = BucketScheme::EqualWidth;
  std::optional<int> sentence_budget;
  std::optional<std::string> scores_file;
  std::optional<eval::ScorerConfig> scorer;
  std::string series_metric = "qafacteval";
};

struct Overrides {
  std::optional<std::string> corpus;
  std::optional<std::string> strategy;
  std::optional<std::string> critic_mode;
  std::optional<int> max_rounds;
  std::optional<int> parallelism;
  std::optional<std::string> out;
  std::optional<std::string> scores_file;
  std::optional<std::size_t> subsample;
  std::optional<std::uint64_t> seed;
};

// Throws ConfigError or SchemaError.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::string& path, const Overrides& overrides = {});
void apply_overrides(RunConfig& config, const Overrides& overrides);
// Checks everything that can be checked without a network call.
void validate(const RunConfig& config);
std::string run_config_to_json(const RunConfig& config);

std::shared_ptr<Backend> make_backend(const BackendSpec& spec);

// name -> git blob id of the probe prompt renderings for the given demos.
std::map<std::string, std::string> prompt_hashes(const CriticDemos& demos);

int cmd_ingest(const std::string& kind, const std::string& in_path,
               const std::string& out_path,
               const std::optional<std::string>& xsum_spans_path,
               LabelRule label_rule, std::ostream& err);

int cmd_critic_eval(const RunConfig& config, std::ostream& err);

int cmd_edit(const RunConfig& config, std::ostream& err);

// Re-renders every report in `run_dir` from its persisted files. With
// `compare_dir`, also writes the error-type slice of `run_dir` (whose
// first-round type predictions select the slice) against `compare_dir`.
int cmd_report(const std::string& run_dir,
               const std::optional<std::string>& scores_file,
               const std::optional<std::string>& compare_dir, std::ostream& err);

}  // namespace faithedit::cli
