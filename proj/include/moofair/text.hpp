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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "moofair/numeric.hpp"

// Small text helpers shared by the file formats.
namespace moofair::text {

std::vector<std::string_view> split(std::string_view line, std::string_view delimiter);
std::string_view trim(std::string_view s);

std::int64_t parse_int(std::string_view field);
double parse_double(std::string_view field);

// 6 significant digits, used for every report CSV.
std::string format_report(double value);
// Shortest text that parses back to the identical double.
std::string format_exact(double value);

std::string read_file(const std::filesystem::path& file);
std::vector<std::string> read_lines(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, const std::string& content);

// Header-less CSV matrix, one row per line.
void write_matrix_csv(const std::filesystem::path& file, const MatrixXd& m, bool exact);
MatrixXd read_matrix_csv(const std::filesystem::path& file);

}  // namespace moofair::text
