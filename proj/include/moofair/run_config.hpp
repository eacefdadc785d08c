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

// Flat `key = value` run configuration: every TrainConfig field plus the
// bundle and output paths. Lines starting with '#' are comments.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "moofair/trainer.hpp"

namespace moofair {

struct RunConfig {
  TrainConfig train;
  std::filesystem::path bundle;
  std::filesystem::path out;
};

// Recognized keys in documentation order.
const std::vector<std::string>& run_config_keys();

// Applies one setting; returns an error message, empty on success.
std::string apply_run_setting(RunConfig& config, std::string_view key, std::string_view value);

// Parses a config document into `config`, appending every problem found
// (malformed line, unknown key, bad value) to `errors`.
void parse_run_config(std::string_view text, RunConfig& config, std::vector<std::string>& errors);

// The config as `key = value` lines, parseable by parse_run_config.
std::string format_run_config(const RunConfig& config);

}  // namespace moofair
