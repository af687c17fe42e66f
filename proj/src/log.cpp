// Copyright 2026 The Concet Authors
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

#include "concet/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace concet {

namespace {

LogLevel parse_env_level() {
  const char* env = std::getenv("CONCET_LOG");
  if (env == nullptr) return LogLevel::kWarn;
  std::string v(env);
  if (v == "error" || v == "0") return LogLevel::kError;
  if (v == "warn" || v == "1") return LogLevel::kWarn;
  if (v == "info" || v == "2") return LogLevel::kInfo;
  if (v == "debug" || v == "3") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

LogLevel& level_ref() {
  static LogLevel level = parse_env_level();
  return level;
}

const char* tag(LogLevel level) {
  switch (level) {
    case LogLevel::kError: return "E";
    case LogLevel::kWarn: return "W";
    case LogLevel::kInfo: return "I";
    case LogLevel::kDebug: return "D";
  }
  return "?";
}

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

LogLevel log_level() { return level_ref(); }

void set_log_level(LogLevel level) { level_ref() = level; }

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(level_ref());
}

void log_line(LogLevel level, const std::string& msg) {
  std::lock_guard<std::mutex> lock(log_mutex());
  std::cerr << "[concet " << tag(level) << "] " << msg << "\n";
}

}  // namespace concet
