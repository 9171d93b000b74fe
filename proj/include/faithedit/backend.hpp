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

// LLM access. One live protocol (OpenAI-compatible chat completions over
// HTTP) and a deterministic scripted mock, both behind `Backend`.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faithedit/error.hpp"

namespace faithedit {

enum class Role { System, User, Assistant };

std::string_view to_string(Role r);
std::optional<Role> parse_role(std::string_view s);

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  // Empty means "use the backend's configured model".
  std::string model_name;
  double temperature = 0.0;
  int max_tokens = 1024;

  bool operator==(const ChatRequest&) const = default;
};

enum class FinishReason { Stop, Length, Refusal, Error };

std::string_view to_string(FinishReason f);

struct ChatResponse {
  std::string content;
  FinishReason finish_reason = FinishReason::Stop;
  std::chrono::microseconds latency{0};
  std::string raw;
  int attempt_count = 1;
};

struct BackendConfig {
  std::string endpoint_url;
  std::string api_key_env;
  std::string model_name;
  std::chrono::milliseconds timeout{60'000};
  int max_retries = 3;
  int max_in_flight = 4;
  // 0 disables rate limiting.
  double requests_per_minute = 0.0;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{30'000};
  double temperature = 0.0;
  int max_tokens = 1024;
};

// Throws ConfigError when a field is out of range.
void validate(const BackendConfig& config);

// Delay before retry number `retry` (1-based): initial * 2^(retry-1), capped.
std::chrono::milliseconds backoff_delay(const BackendConfig& config, int retry);

class Backend {
 public:
  virtual ~Backend() = default;
  // Safe for concurrent callers.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// Bounds concurrent requests and spaces admissions to a requests-per-minute
// budget. Tickets release their slot on destruction.
class AdmissionGate {
 public:
  class Ticket {
   public:
    Ticket(Ticket&& other) noexcept : gate_(other.gate_) { other.gate_ = nullptr; }
    Ticket& operator=(Ticket&&) = delete;
    Ticket(const Ticket&) = delete;
    ~Ticket();

   private:
    friend class AdmissionGate;
    explicit Ticket(AdmissionGate* gate) : gate_(gate) {}
    AdmissionGate* gate_;
  };

  AdmissionGate(int max_in_flight, double requests_per_minute);

  Ticket acquire();
  int in_flight() const;
  int peak_in_flight() const;

 private:
  void release();

  const int max_in_flight_;
  const std::chrono::nanoseconds min_interval_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  int peak_ = 0;
  std::chrono::steady_clock::time_point next_admission_{};
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig config);

  ChatResponse complete(const ChatRequest& request) override;

  const BackendConfig& config() const noexcept { return config_; }
  const AdmissionGate& gate() const noexcept { return gate_; }

 private:
  BackendConfig config_;
  std::string base_url_;
  std::string path_;
  AdmissionGate gate_;
};

// Stable hash of a request's message contents (roles included), used as the
// lookup key for replayed responses.
std::string request_fingerprint(const ChatRequest& request);

struct MockReply {
  std::string content;
  FinishReason finish_reason = FinishReason::Stop;
  // When set, the call throws an Error with this code instead of replying.
  std::optional<ErrorCode> fail_with;

  MockReply() = default;
  MockReply(std::string text) : content(std::move(text)) {}  // NOLINT
  MockReply(const char* text) : content(text) {}             // NOLINT
  static MockReply refusal(std::string text = "") {
    MockReply r(std::move(text));
    r.finish_reason = FinishReason::Refusal;
    return r;
  }
  static MockReply failure(ErrorCode code) {
    MockReply r;
    r.fail_with = code;
    return r;
  }
};

// Deterministic backend. List mode replies in script order; fingerprint mode
// looks the reply up by request_fingerprint(); constant mode always replies
// the same text. Every request is recorded.
class ScriptedMock : public Backend {
 public:
  explicit ScriptedMock(std::vector<MockReply> script);
  static std::shared_ptr<ScriptedMock> list(std::vector<MockReply> script);
  static std::shared_ptr<ScriptedMock> by_fingerprint(
      std::map<std::string, MockReply> replies,
      std::optional<MockReply> fallback = std::nullopt);
  static std::shared_ptr<ScriptedMock> constant(MockReply reply);

  ChatResponse complete(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::size_t call_count() const;
  std::size_t remaining() const;

 private:
  enum class Mode { List, Fingerprint, Constant };
  ScriptedMock() = default;

  Mode mode_ = Mode::List;
  std::vector<MockReply> script_;
  std::size_t next_ = 0;
  std::map<std::string, MockReply> by_fingerprint_;
  std::optional<MockReply> fallback_;
  mutable std::mutex mu_;
  std::vector<ChatRequest> requests_;
};

// Records fingerprint -> response content for every call that goes through
// it, so a live session can be replayed later by a fingerprint mock.
class RecordingBackend : public Backend {
 public:
  explicit RecordingBackend(std::shared_ptr<Backend> inner)
      : inner_(std::move(inner)) {}

  ChatResponse complete(const ChatRequest& request) override;
  std::map<std::string, std::string> recorded() const;

 private:
  std::shared_ptr<Backend> inner_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> recorded_;
};

// Puts any backend behind an admission gate.
class GatedBackend : public Backend {
 public:
  GatedBackend(std::shared_ptr<Backend> inner, int max_in_flight,
               double requests_per_minute = 0.0)
      : inner_(std::move(inner)), gate_(max_in_flight, requests_per_minute) {}

  ChatResponse complete(const ChatRequest& request) override {
    auto ticket = gate_.acquire();
    return inner_->complete(request);
  }
  const AdmissionGate& gate() const noexcept { return gate_; }

 private:
  std::shared_ptr<Backend> inner_;
  AdmissionGate gate_;
};

// Replay files: a JSON object mapping fingerprint -> reply text.
std::map<std::string, MockReply> load_replay_file(const std::string& path);
void save_replay_file(const std::string& path,
                      const std::map<std::string, std::string>& replies);

}  // namespace faithedit
