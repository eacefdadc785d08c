// Copyright 2026 The moofair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <string>

namespace moofair::log {

using Sink = std::function<void(const std::string&)>;

// Replaces the warning sink (stderr by default) and returns the previous one.
Sink set_warning_sink(Sink sink);

void warn(const std::string& message);

// Installs a sink for the lifetime of the guard and restores the old one on exit.
class ScopedSink {
 public:
  explicit ScopedSink(Sink sink) : previous_(set_warning_sink(std::move(sink))) {}
  ~ScopedSink() { set_warning_sink(std::move(previous_)); }
  ScopedSink(const ScopedSink&) = delete;
  ScopedSink& operator=(const ScopedSink&) = delete;

 private:
  Sink previous_;
};

}  // namespace moofair::log
