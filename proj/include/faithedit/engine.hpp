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

// The critic/editor loop and its batch runner.

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "faithedit/backend.hpp"
#include "faithedit/core.hpp"
#include "faithedit/parse.hpp"
#include "faithedit/prompt.hpp"

namespace faithedit {

struct LoopConfig {
  int max_rounds = 5;
  EditorStrategy strategy = EditorStrategy::EditorSpan;
  // 5: only a perfect score stops the loop. 4: "mostly faithful" also stops.
  int stop_threshold = 5;
  std::shared_ptr<Backend> critic;
  std::shared_ptr<Backend> editor;
  PromptConfig prompt;
};

void validate(const LoopConfig& config);

struct Round {
  int index = 1;
  CriticVerdict pre_verdict;
  std::optional<EditorOutput> editor_output;
  std::string summary_after;
  std::chrono::microseconds critic_latency{0};
  std::chrono::microseconds editor_latency{0};

  bool operator==(const Round&) const = default;
};

enum class TerminalStatus { JudgedFaithful, RoundCapReached, EditFailed };

std::string_view to_string(TerminalStatus s);
std::optional<TerminalStatus> parse_terminal_status(std::string_view s);

struct SessionTrace {
  std::string pair_id;
  EditorStrategy strategy = EditorStrategy::EditorSpan;
  std::string input_summary;
  std::vector<Round> rounds;
  std::string final_summary;
  TerminalStatus terminal_status = TerminalStatus::EditFailed;
  // Set when the session was cut short by a backend failure.
  std::optional<std::string> error;
  std::chrono::microseconds total_latency{0};

  int edit_count() const;
  bool operator==(const SessionTrace&) const = default;
};

// Zeroes every latency field, for comparisons that ignore timing.
SessionTrace without_timing(SessionTrace trace);

// Thrown by run_session when a backend call fails; carries the rounds that
// completed before the failure.
class SessionError : public Error {
 public:
  SessionError(ErrorCode code, const std::string& what, SessionTrace partial)
      : Error(code, what), partial_(std::move(partial)) {}
  const SessionTrace& partial() const noexcept { return partial_; }

 private:
  SessionTrace partial_;
};

SessionTrace run_session(const DocumentSummaryPair& pair,
                         const LoopConfig& config);

// Per-pair trace files under <dir>/traces, written atomically, so an
// interrupted batch can resume.
class TraceStore {
 public:
  explicit TraceStore(std::filesystem::path run_dir);

  std::filesystem::path path_for(const std::string& pair_id) const;
  std::optional<SessionTrace> load(const std::string& pair_id) const;
  void save(const SessionTrace& trace) const;

 private:
  std::filesystem::path dir_;
};

struct BatchOptions {
  int parallelism = 1;
  // When set, completed traces are reused and new ones persisted.
  std::optional<std::filesystem::path> run_dir;
};

// One trace per input pair, in input order. A failed session yields a trace
// with status EditFailed and `error` set; it never aborts the batch.
std::vector<SessionTrace> run_batch(const std::vector<DocumentSummaryPair>& pairs,
                                    const LoopConfig& config,
                                    const BatchOptions& options = {});

std::string trace_to_json(const SessionTrace& trace, bool include_timing = true);
SessionTrace trace_from_json(std::string_view json_text);

void export_traces(const std::vector<SessionTrace>& traces,
                   const std::string& path, bool include_timing = true);
std::vector<SessionTrace> import_traces(const std::string& path);

}  // namespace faithedit
