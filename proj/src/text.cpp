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

#include "moofair/text.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace moofair::text {

std::vector<std::string_view> split(std::string_view line, std::string_view delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + delimiter.size();
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::int64_t parse_int(std::string_view field) {
  field = trim(field);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw InputError("not an integer: '" + std::string(field) + "'");
  }
  return value;
}

double parse_double(std::string_view field) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw InputError("not a number: '" + std::string(field) + "'");
  }
  return value;
}

std::string format_report(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string format_exact(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + file.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::filesystem::path& file) {
  const std::string content = read_file(file);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) {
      end = content.size();
    }
    std::string line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

void write_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + file.string());
  }
  out << content;
  if (!out) {
    throw Error("write failed: " + file.string());
  }
}

void write_matrix_csv(const std::filesystem::path& file, const MatrixXd& m, bool exact) {
  std::string content;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) {
        content += ',';
      }
      content += exact ? format_exact(m(r, c)) : format_report(m(r, c));
    }
    content += '\n';
  }
  write_file(file, content);
}

MatrixXd read_matrix_csv(const std::filesystem::path& file) {
  const auto lines = read_lines(file);
  std::vector<double> values;
  Index rows = 0;
  Index cols = -1;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) {
      continue;
    }
    const auto fields = split(lines[n], ",");
    if (cols >= 0 && static_cast<Index>(fields.size()) != cols) {
      throw InputError(file.string() + ":" + std::to_string(n + 1) + ": ragged matrix row");
    }
    cols = static_cast<Index>(fields.size());
    for (const auto f : fields) {
      values.push_back(parse_double(f));
    }
    ++rows;
  }
  if (rows == 0) {
    return MatrixXd(0, 0);
  }
  return Eigen::Map<const MatrixXd>(values.data(), rows, cols);
}

}  // namespace moofair::text
