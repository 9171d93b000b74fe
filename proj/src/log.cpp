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

#include "faithedit/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace faithedit::log {

namespace {

Level initial_level() {
  const char* env = std::getenv("FAITHEDIT_LOG_LEVEL");
  if (env == nullptr) return Level::Warn;
  const std::string v(env);
  if (v == "debug") return Level::Debug;
  if (v == "info") return Level::Info;
  if (v == "error") return Level::Error;
  if (v == "off") return Level::Off;
  return Level::Warn;
}

std::atomic<Level>& threshold() {
  static std::atomic<Level> level{initial_level()};
  return level;
}

std::mutex& sink_mutex() {
  static std::mutex mu;
  return mu;
}

constexpr std::string_view tag(Level l) {
  switch (l) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warning";
    case Level::Error: return "error";
    case Level::Off: return "";
  }
  return "";
}

}  // namespace

void set_level(Level level) { threshold().store(level); }
Level level() { return threshold().load(); }

void write(Level l, std::string_view message) {
  if (l < threshold().load() || l == Level::Off) return;
  std::lock_guard lock(sink_mutex());
  std::cerr << "faithedit: " << tag(l) << ": " << message << '\n';
}

}  // namespace faithedit::log
