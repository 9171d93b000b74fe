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

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>

#include "faithedit/backend.hpp"
#include "test_support.hpp"

namespace faithedit {
namespace {

using namespace std::chrono_literals;
using nlohmann::json;

std::string completion(const std::string& content,
                       const std::string& finish = "stop") {
  return json{{"choices",
               {{{"message", {{"role", "assistant"}, {"content", content}}},
                 {"finish_reason", finish}}}}}
      .dump();
}

// Chat-completions stub on an ephemeral local port.
class StubServer : public testing::StubServer {
 public:
  explicit StubServer(Handler handler)
      : testing::StubServer("/v1/chat/completions", std::move(handler)) {}
  std::string url() const { return base_url() + "/v1"; }
};

using testing::closed_port;

BackendConfig fast_config(const std::string& url) {
  BackendConfig c;
  c.endpoint_url = url;
  c.model_name = "stub-model";
  c.timeout = 2000ms;
  c.initial_backoff = 1ms;
  c.max_backoff = 4ms;
  c.max_retries = 3;
  return c;
}

ChatRequest hello() {
  ChatRequest r;
  r.messages = {{Role::System, "be brief"}, {Role::User, "hello"}};
  return r;
}

TEST(Http, RetriesServerErrorsThenSucceeds) {
  StubServer stub([](const httplib::Request&, httplib::Response& res, int n) {
    if (n <= 2) {
      res.status = 500;
      res.set_content("oops", "text/plain");
    } else {
      res.set_content(completion("ok"), "application/json");
    }
  });
  HttpBackend backend(fast_config(stub.url()));
  const auto resp = backend.complete(hello());
  EXPECT_EQ(resp.content, "ok");
  EXPECT_EQ(resp.attempt_count, 3);
  EXPECT_EQ(resp.finish_reason, FinishReason::Stop);
  EXPECT_EQ(stub.calls(), 3);
}

TEST(Http, RateLimitedAfterRetryBudget) {
  StubServer stub([](const httplib::Request&, httplib::Response& res, int) {
    res.status = 429;
  });
  auto config = fast_config(stub.url());
  config.max_retries = 2;
  HttpBackend backend(config);
  try {
    backend.complete(hello());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RateLimited);
  }
  EXPECT_EQ(stub.calls(), 3);
}

TEST(Http, RateLimitRecovers) {
  StubServer stub([](const httplib::Request&, httplib::Response& res, int n) {
    if (n == 1) {
      res.status = 429;
      return;
    }
    res.set_content(completion("fine"), "application/json");
  });
  HttpBackend backend(fast_config(stub.url()));
  EXPECT_EQ(backend.complete(hello()).attempt_count, 2);
}

TEST(Http, ClientErrorsAreNotRetried) {
  StubServer stub([](const httplib::Request&, httplib::Response& res, int) {
    res.status = 400;
    res.set_content("bad model", "text/plain");
  });
  HttpBackend backend(fast_config(stub.url()));
  try {
    backend.complete(hello());
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.status(), 400);
    EXPECT_EQ(e.body(), "bad model");
  }
  EXPECT_EQ(stub.calls(), 1);
}

TEST(Http, MalformedBody) {
  StubServer stub([](const httplib::Request&, httplib::Response& res, int) {
    res.set_content(R"({"choices": []})", "application/json");
  });
  HttpBackend backend(fast_config(stub.url()));
  try {
    backend.complete(hello());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedResponse);
  }
}

TEST(Http, ContentFilterIsRefusal) {
  StubServer stub([](const httplib::Request&, httplib::Response& res, int) {
    res.set_content(completion("", "content_filter"), "application/json");
  });
  HttpBackend backend(fast_config(stub.url()));
  EXPECT_EQ(backend.complete(hello()).finish_reason, FinishReason::Refusal);
}

TEST(Http, SendsChatShapeAndKeyFromEnvironment) {
  json seen;
  std::string auth;
  StubServer stub([&](const httplib::Request& req, httplib::Response& res, int) {
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(completion("ok"), "application/json");
  });
  ::setenv("FAITHEDIT_TEST_KEY", "sekret", 1);
  auto config = fast_config(stub.url());
  config.api_key_env = "FAITHEDIT_TEST_KEY";
  HttpBackend backend(config);
  backend.complete(hello());
  EXPECT_EQ(auth, "Bearer sekret");
  EXPECT_EQ(seen["model"], "stub-model");
  EXPECT_EQ(seen["temperature"], 0.0);
  ASSERT_EQ(seen["messages"].size(), 2u);
  EXPECT_EQ(seen["messages"][0]["role"], "system");
  EXPECT_EQ(seen["messages"][1]["content"], "hello");
}

TEST(Http, TimeoutIsReported) {
  StubServer stub([](const httplib::Request&, httplib::Response& res, int) {
    std::this_thread::sleep_for(400ms);
    res.set_content(completion("late"), "application/json");
  });
  auto config = fast_config(stub.url());
  config.timeout = 100ms;
  config.max_retries = 0;
  HttpBackend backend(config);
  try {
    backend.complete(hello());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Timeout);
  }
}

TEST(Http, UnreachableIsTransport) {
  const int port = closed_port();
  auto config = fast_config("http://127.0.0.1:" + std::to_string(port) + "/v1");
  config.max_retries = 1;
  HttpBackend backend(config);
  try {
    backend.complete(hello());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Transport);
  }
}

TEST(Http, InFlightNeverExceedsBound) {
  std::atomic<int> now{0}, peak{0};
  StubServer stub([&](const httplib::Request&, httplib::Response& res, int) {
    const int cur = ++now;
    int p = peak.load();
    while (cur > p && !peak.compare_exchange_weak(p, cur)) {
    }
    std::this_thread::sleep_for(30ms);
    --now;
    res.set_content(completion("ok"), "application/json");
  });
  auto config = fast_config(stub.url());
  config.max_in_flight = 2;
  HttpBackend backend(config);
  {
    std::vector<std::jthread> threads;
    for (int i = 0; i < 6; ++i) {
      threads.emplace_back([&] { backend.complete(hello()); });
    }
  }
  EXPECT_LE(peak.load(), 2);
  EXPECT_LE(backend.gate().peak_in_flight(), 2);
  EXPECT_EQ(stub.calls(), 6);
}

TEST(Config, Validation) {
  BackendConfig c;
  c.max_in_flight = 0;
  EXPECT_THROW(validate(c), Error);
  c = {};
  c.max_retries = -1;
  EXPECT_THROW(validate(c), Error);
  c = {};
  EXPECT_NO_THROW(validate(c));
}

TEST(Backoff, DoublesUpToCap) {
  BackendConfig c;
  c.initial_backoff = 100ms;
  c.max_backoff = 500ms;
  EXPECT_EQ(backoff_delay(c, 1), 100ms);
  EXPECT_EQ(backoff_delay(c, 2), 200ms);
  EXPECT_EQ(backoff_delay(c, 3), 400ms);
  EXPECT_EQ(backoff_delay(c, 4), 500ms);
  EXPECT_EQ(backoff_delay(c, 30), 500ms);
}

TEST(Gate, BoundsConcurrency) {
  AdmissionGate gate(3, 0.0);
  std::atomic<int> now{0}, peak{0};
  {
    std::vector<std::jthread> threads;
    for (int i = 0; i < 12; ++i) {
      threads.emplace_back([&] {
        auto ticket = gate.acquire();
        const int cur = ++now;
        int p = peak.load();
        while (cur > p && !peak.compare_exchange_weak(p, cur)) {
        }
        std::this_thread::sleep_for(5ms);
        --now;
      });
    }
  }
  EXPECT_LE(peak.load(), 3);
  EXPECT_LE(gate.peak_in_flight(), 3);
  EXPECT_EQ(gate.in_flight(), 0);
}

TEST(Gate, SpacesAdmissionsByRate) {
  AdmissionGate gate(8, 1200.0);  // one every 50 ms
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 4; ++i) auto ticket = gate.acquire();
  EXPECT_GE(std::chrono::steady_clock::now() - t0, 140ms);
}

TEST(Mock, ListReplaysInOrderThenExhausts) {
  auto mock = ScriptedMock::list({"a", "b"});
  EXPECT_EQ(mock->complete(hello()).content, "a");
  EXPECT_EQ(mock->remaining(), 1u);
  EXPECT_EQ(mock->complete(hello()).content, "b");
  try {
    mock->complete(hello());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScriptExhausted);
  }
  EXPECT_EQ(mock->requests().size(), 3u);
}

TEST(Mock, FailuresAndRefusals) {
  auto mock = ScriptedMock::list(
      {MockReply::failure(ErrorCode::Timeout), MockReply::refusal("no")});
  try {
    mock->complete(hello());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Timeout);
  }
  EXPECT_EQ(mock->complete(hello()).finish_reason, FinishReason::Refusal);
}

TEST(Mock, FingerprintLookup) {
  auto req = hello();
  auto mock = ScriptedMock::by_fingerprint({{request_fingerprint(req), "known"}});
  EXPECT_EQ(mock->complete(req).content, "known");
  req.messages[1].content = "other";
  try {
    mock->complete(req);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownFingerprint);
  }
  auto with_fallback = ScriptedMock::by_fingerprint({}, MockReply("default"));
  EXPECT_EQ(with_fallback->complete(req).content, "default");
  EXPECT_EQ(ScriptedMock::constant("5")->complete(req).content, "5");
}

TEST(Fingerprint, DependsOnRolesAndContent) {
  const auto a = hello();
  auto b = a;
  EXPECT_EQ(request_fingerprint(a), request_fingerprint(b));
  b.messages[0].role = Role::User;
  EXPECT_NE(request_fingerprint(a), request_fingerprint(b));
  b = a;
  b.messages[1].content += " ";
  EXPECT_NE(request_fingerprint(a), request_fingerprint(b));
  b = a;
  b.messages = {{Role::System, "be brief\nhello"}};
  EXPECT_NE(request_fingerprint(a), request_fingerprint(b));
}

TEST(Replay, RecordThenReplayGivesSameAnswers) {
  testing::TempDir dir;
  std::vector<ChatRequest> requests;
  for (int i = 0; i < 5; ++i) {
    auto r = hello();
    r.messages[1].content = "question " + std::to_string(i);
    requests.push_back(r);
  }
  auto live = std::make_shared<RecordingBackend>(
      ScriptedMock::list({"r0", "r1", "r2", "r3", "r4"}));
  std::vector<std::string> first;
  for (const auto& r : requests) first.push_back(live->complete(r).content);
  const auto path = (dir / "replay.json").string();
  save_replay_file(path, live->recorded());

  auto replay = ScriptedMock::by_fingerprint(load_replay_file(path));
  for (std::size_t i = 0; i < requests.size(); ++i) {
    EXPECT_EQ(replay->complete(requests[i]).content, first[i]);
  }
}

TEST(Replay, BadFileIsSchemaError) {
  testing::TempDir dir;
  testing::spit(dir / "bad.json", R"({"abc": 3})");
  EXPECT_THROW(load_replay_file((dir / "bad.json").string()), SchemaError);
  testing::spit(dir / "list.json", "[]");
  EXPECT_THROW(load_replay_file((dir / "list.json").string()), SchemaError);
}

}  // namespace
}  // namespace faithedit
