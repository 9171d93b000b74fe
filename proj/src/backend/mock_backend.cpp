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

#include "faithedit/backend.hpp"
#include "faithedit/text_util.hpp"

namespace faithedit {

std::string request_fingerprint(const ChatRequest& request) {
  std::string joined;
  for (const auto& m : request.messages) {
    joined += to_string(m.role);
    joined.push_back('\x1e');
    joined += m.content;
    joined.push_back('\x1f');
  }
  return text::hex64(text::fnv1a64(joined));
}

namespace {

ChatResponse reply_to_response(const MockReply& reply) {
  if (reply.fail_with) {
    throw Error(*reply.fail_with, "scripted failure");
  }
  ChatResponse r;
  r.content = reply.content;
  r.finish_reason = reply.finish_reason;
  r.raw = reply.content;
  return r;
}

}  // namespace

ScriptedMock::ScriptedMock(std::vector<MockReply> script)
    : mode_(Mode::List), script_(std::move(script)) {}

std::shared_ptr<ScriptedMock> ScriptedMock::list(std::vector<MockReply> script) {
  return std::make_shared<ScriptedMock>(std::move(script));
}

std::shared_ptr<ScriptedMock> ScriptedMock::by_fingerprint(
    std::map<std::string, MockReply> replies, std::optional<MockReply> fallback) {
  auto mock = std::shared_ptr<ScriptedMock>(new ScriptedMock());
  mock->mode_ = Mode::Fingerprint;
  mock->by_fingerprint_ = std::move(replies);
  mock->fallback_ = std::move(fallback);
  return mock;
}

std::shared_ptr<ScriptedMock> ScriptedMock::constant(MockReply reply) {
  auto mock = std::shared_ptr<ScriptedMock>(new ScriptedMock());
  mock->mode_ = Mode::Constant;
  mock->fallback_ = std::move(reply);
  return mock;
}

ChatResponse ScriptedMock::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  switch (mode_) {
    case Mode::List:
      if (next_ >= script_.size()) {
        throw Error(ErrorCode::ScriptExhausted,
                    "scripted mock has no reply for call " +
                        std::to_string(requests_.size()));
      }
      return reply_to_response(script_[next_++]);
    case Mode::Fingerprint: {
      const auto key = request_fingerprint(request);
      const auto it = by_fingerprint_.find(key);
      if (it != by_fingerprint_.end()) return reply_to_response(it->second);
      if (fallback_) return reply_to_response(*fallback_);
      throw Error(ErrorCode::UnknownFingerprint, "no reply for " + key);
    }
    case Mode::Constant:
      return reply_to_response(*fallback_);
  }
  throw Error(ErrorCode::ScriptExhausted, "unreachable");
}

std::vector<ChatRequest> ScriptedMock::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t ScriptedMock::call_count() const {
  std::lock_guard lock(mu_);
  return requests_.size();
}

std::size_t ScriptedMock::remaining() const {
  std::lock_guard lock(mu_);
  return mode_ == Mode::List ? script_.size() - next_ : 0;
}

ChatResponse RecordingBackend::complete(const ChatRequest& request) {
  ChatResponse response = inner_->complete(request);
  std::lock_guard lock(mu_);
  recorded_[request_fingerprint(request)] = response.content;
  return response;
}

std::map<std::string, std::string> RecordingBackend::recorded() const {
  std::lock_guard lock(mu_);
  return recorded_;
}

std::map<std::string, MockReply> load_replay_file(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path, e.what());
  }
  if (!doc.is_object()) throw SchemaError(path, "replay file must be an object");
  std::map<std::string, MockReply> out;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_string()) {
      throw SchemaError(path + ":" + key, "reply must be a string");
    }
    out.emplace(key, MockReply(value.get<std::string>()));
  }
  return out;
}

void save_replay_file(const std::string& path,
                      const std::map<std::string, std::string>& replies) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [k, v] : replies) doc[k] = v;
  text::write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace faithedit
