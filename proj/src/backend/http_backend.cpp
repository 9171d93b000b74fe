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

#include <httplib.h>

#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "faithedit/backend.hpp"
#include "faithedit/log.hpp"
#include "url.hpp"

namespace faithedit {

using json = nlohmann::json;

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

std::optional<Role> parse_role(std::string_view s) {
  if (s == "system") return Role::System;
  if (s == "user") return Role::User;
  if (s == "assistant") return Role::Assistant;
  return std::nullopt;
}

std::string_view to_string(FinishReason f) {
  switch (f) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Refusal: return "refusal";
    case FinishReason::Error: return "error";
  }
  return "error";
}

void validate(const BackendConfig& config) {
  if (config.max_in_flight < 1) {
    throw Error(ErrorCode::ConfigError, "max_in_flight must be >= 1");
  }
  if (config.max_retries < 0) {
    throw Error(ErrorCode::ConfigError, "max_retries must be >= 0");
  }
  if (config.requests_per_minute < 0) {
    throw Error(ErrorCode::ConfigError, "requests_per_minute must be >= 0");
  }
  if (config.temperature < 0) {
    throw Error(ErrorCode::ConfigError, "temperature must be >= 0");
  }
  if (config.max_tokens < 1) {
    throw Error(ErrorCode::ConfigError, "max_tokens must be >= 1");
  }
  if (config.timeout.count() <= 0) {
    throw Error(ErrorCode::ConfigError, "timeout must be positive");
  }
}

std::chrono::milliseconds backoff_delay(const BackendConfig& config,
                                        int retry) {
  auto delay = config.initial_backoff;
  for (int i = 1; i < retry && delay < config.max_backoff; ++i) delay *= 2;
  return std::min(delay, config.max_backoff);
}

namespace {

bool retryable_status(int status) { return status == 429 || status >= 500; }

FinishReason map_finish_reason(const json& choice) {
  const auto it = choice.find("finish_reason");
  if (it == choice.end() || !it->is_string()) return FinishReason::Stop;
  const auto& s = it->get_ref<const std::string&>();
  if (s == "length") return FinishReason::Length;
  if (s == "content_filter" || s == "refusal") return FinishReason::Refusal;
  return FinishReason::Stop;
}

ChatResponse parse_completion(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedResponse,
                std::string("response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("choices") ||
      !doc["choices"].is_array() || doc["choices"].empty()) {
    throw Error(ErrorCode::MalformedResponse, "missing choices[0]");
  }
  const json& choice = doc["choices"][0];
  if (!choice.is_object() || !choice.contains("message") ||
      !choice["message"].is_object()) {
    throw Error(ErrorCode::MalformedResponse, "missing choices[0].message");
  }
  const json& message = choice["message"];
  ChatResponse out;
  out.raw = body;
  out.finish_reason = map_finish_reason(choice);
  const auto content = message.find("content");
  if (content != message.end() && content->is_string()) {
    out.content = content->get<std::string>();
  } else if (message.contains("refusal") && message["refusal"].is_string()) {
    out.content = message["refusal"].get<std::string>();
    out.finish_reason = FinishReason::Refusal;
  } else if (out.finish_reason != FinishReason::Refusal) {
    throw Error(ErrorCode::MalformedResponse,
                "choices[0].message.content is not a string");
  }
  return out;
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig config)
    : config_(std::move(config)),
      gate_(config_.max_in_flight, config_.requests_per_minute) {
  validate(config_);
  const auto url = detail::split_url(config_.endpoint_url);
  base_url_ = url.base;
  path_ = url.path + "/chat/completions";
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
  json body;
  body["model"] = request.model_name.empty() ? config_.model_name
                                             : request.model_name;
  body["messages"] = json::array();
  for (const auto& m : request.messages) {
    body["messages"].push_back(
        {{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    } else {
      log::warn("environment variable " + config_.api_key_env +
                " is not set; sending request without an API key");
    }
  }

  const auto started = std::chrono::steady_clock::now();
  const int max_attempts = config_.max_retries + 1;
  for (int attempt = 1;; ++attempt) {
    std::optional<Error> failure;
    {
      auto ticket = gate_.acquire();
      httplib::Client client(base_url_);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
          config_.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
          config_.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());
      auto result = client.Post(path_, headers, payload, "application/json");
      if (!result) {
        const auto err = result.error();
        const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                               err == httplib::Error::Read ||
                               err == httplib::Error::Write;
        failure.emplace(timed_out ? ErrorCode::Timeout : ErrorCode::Transport,
                        httplib::to_string(err) + " calling " +
                            config_.endpoint_url);
      } else if (result->status == 200) {
        ChatResponse response = parse_completion(result->body);
        response.attempt_count = attempt;
        response.latency = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - started);
        return response;
      } else if (!retryable_status(result->status)) {
        throw ProviderError(result->status, result->body);
      } else if (attempt == max_attempts) {
        if (result->status == 429) {
          throw Error(ErrorCode::RateLimited,
                      "HTTP 429 after " + std::to_string(attempt) + " attempts");
        }
        throw ProviderError(result->status, result->body);
      } else {
        failure.emplace(ErrorCode::ProviderError,
                        "HTTP " + std::to_string(result->status));
      }
    }
    if (attempt == max_attempts) throw *failure;
    log::debug("attempt " + std::to_string(attempt) + " failed (" +
               failure->what() + "); retrying");
    std::this_thread::sleep_for(backoff_delay(config_, attempt));
  }
}

}  // namespace faithedit
