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

#include "moofair/run_config.hpp"

#include <functional>
#include <map>

#include "moofair/text.hpp"

namespace moofair {

namespace {

using Setter = std::function<void(RunConfig&, std::string_view)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  std::string key;
  Setter set;
  Getter get;
};

std::vector<ObjectiveId> parse_objectives(std::string_view v) {
  std::vector<ObjectiveId> out;
  for (const auto part : text::split(v, ",")) {
    out.push_back(parse_objective(text::trim(part)));
  }
  return out;
}

VectorXd parse_weights(std::string_view v) {
  std::vector<double> w;
  for (const auto part : text::split(v, ",")) {
    w.push_back(text::parse_double(text::trim(part)));
  }
  return Eigen::Map<VectorXd>(w.data(), static_cast<Index>(w.size()));
}

std::string join_weights(const VectorXd& w) {
  std::string out;
  for (Index i = 0; i < w.size(); ++i) {
    out += (i ? "," : "") + text::format_exact(w[i]);
  }
  return out;
}

template <typename T>
Field number(std::string key, T TrainConfig::*member) {
  Setter set = [member](RunConfig& c, std::string_view v) {
    if constexpr (std::is_floating_point_v<T>) {
      c.train.*member = text::parse_double(v);
    } else {
      const auto n = text::parse_int(v);
      if (n < 0) {
        throw InputError("expected a non-negative integer");
      }
      c.train.*member = static_cast<T>(n);
    }
  };
  Getter get = [member](const RunConfig& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return text::format_exact(c.train.*member);
    } else {
      return std::to_string(c.train.*member);
    }
  };
  return {std::move(key), set, get};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"bundle", [](RunConfig& c, std::string_view v) { c.bundle = std::string(v); },
                 [](const RunConfig& c) { return c.bundle.string(); }});
    f.push_back({"out", [](RunConfig& c, std::string_view v) { c.out = std::string(v); },
                 [](const RunConfig& c) { return c.out.string(); }});
    f.push_back({"objectives", [](RunConfig& c, std::string_view v) { c.train.objectives = parse_objectives(v); },
                 [](const RunConfig& c) {
                   std::string out;
                   for (const auto o : c.train.objectives) {
                     out += (out.empty() ? "" : ",") + std::string(objective_name(o));
                   }
                   return out;
                 }});
    f.push_back({"mode", [](RunConfig& c, std::string_view v) { c.train.mode = parse_mode(v); },
                 [](const RunConfig& c) { return std::string(mode_name(c.train.mode)); }});
    f.push_back({"weights",
                 [](RunConfig& c, std::string_view v) { c.train.fixed_weights = SimplexWeights(parse_weights(v)); },
                 [](const RunConfig& c) {
                   return c.train.fixed_weights ? join_weights(c.train.fixed_weights->values()) : std::string();
                 }});
    f.push_back(number("learning_rate", &TrainConfig::learning_rate));
    f.push_back(number("reg", &TrainConfig::reg));
    f.push_back(number("batch_size", &TrainConfig::batch_size));
    f.push_back(number("dim", &TrainConfig::dim));
    f.push_back(number("epochs_max", &TrainConfig::epochs_max));
    f.push_back(number("eval_every", &TrainConfig::eval_every));
    f.push_back(number("early_stop_patience", &TrainConfig::early_stop_patience));
    f.push_back({"grad_normalization",
                 [](RunConfig& c, std::string_view v) {
                   if (v == "auto") {
                     c.train.grad_normalization.reset();
                   } else {
                     c.train.grad_normalization = parse_normalization(v);
                   }
                 },
                 [](const RunConfig& c) {
                   return c.train.grad_normalization ? std::string(normalization_name(*c.train.grad_normalization))
                                                     : std::string("auto");
                 }});
    f.push_back(number("gamma", &TrainConfig::gamma));
    f.push_back(number("temperature", &TrainConfig::temperature));
    f.push_back(number("steepness", &TrainConfig::steepness));
    f.push_back(number("rank_offset", &TrainConfig::rank_offset));
    f.push_back(number("K", &TrainConfig::K));
    f.push_back(number("n_r_cap", &TrainConfig::n_r_cap));
    f.push_back(number("candidate_negatives", &TrainConfig::candidate_negatives));
    f.push_back(number("init_stddev", &TrainConfig::init_stddev));
    f.push_back({"seed", [](RunConfig& c, std::string_view v) {
                   const auto n = text::parse_int(v);
                   if (n < 0) {
                     throw InputError("expected a non-negative integer");
                   }
                   c.train.seed = static_cast<std::uint64_t>(n);
                 },
                 [](const RunConfig& c) { return std::to_string(c.train.seed); }});
    f.push_back(number("rounds", &TrainConfig::rounds));
    f.push_back(number("frank_wolfe_iters", &TrainConfig::frank_wolfe_iters));
    f.push_back(number("min_grad_norm", &TrainConfig::min_grad_norm));
    return f;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) {
      k.push_back(f.key);
    }
    return k;
  }();
  return keys;
}

std::string apply_run_setting(RunConfig& config, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      try {
        f.set(config, text::trim(value));
        return {};
      } catch (const Error& e) {
        return std::string(key) + ": " + e.what();
      }
    }
  }
  return "unknown key '" + std::string(key) + "'";
}

void parse_run_config(std::string_view text, RunConfig& config, std::vector<std::string>& errors) {
  std::size_t line_no = 0;
  for (const auto raw : text::split(text, "\n")) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const auto problem = apply_run_setting(config, text::trim(line.substr(0, eq)), line.substr(eq + 1));
    if (!problem.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": " + problem);
    }
  }
}

std::string format_run_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    const auto value = f.get(config);
    if (!value.empty()) {
      out += f.key + " = " + value + "\n";
    }
  }
  return out;
}

}  // namespace moofair
