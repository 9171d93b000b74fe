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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace faithedit {

enum class ErrorCode {
  // core
  EmptyLabels,
  OutOfRange,
  // backend
  Timeout,
  RateLimited,
  ProviderError,
  MalformedResponse,
  ScriptExhausted,
  UnknownFingerprint,
  Transport,
  // prompt
  MissingDemos,
  MissingGoldAnnotation,
  // parse
  NoScoreFound,
  // data
  SchemaError,
  // eval
  DegenerateInput,
  MissingClass,
  EmptyPool,
  EmptyInput,
  ScorerUnavailable,
  // engine / cli
  BackendError,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Base exception for every failure the library reports. The code is what
// tests and the CLI branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ProviderError : public Error {
 public:
  ProviderError(int status, std::string body)
      : Error(ErrorCode::ProviderError,
              "HTTP " + std::to_string(status) + ": " + body.substr(0, 512)),
        status_(status),
        body_(std::move(body)) {}

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

// `location` is a JSON-path-like pointer ("$[3].summary") or a row reference
// ("row 7") naming the offending record.
class SchemaError : public Error {
 public:
  SchemaError(std::string location, const std::string& what)
      : Error(ErrorCode::SchemaError, location + ": " + what),
        location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

}  // namespace faithedit
