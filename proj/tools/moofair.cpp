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

// moofair: prepare a dataset bundle, train (MGDA rounds or fixed weights),
// evaluate a checkpoint, and compare MGDA against a weight grid.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "moofair/data.hpp"
#include "moofair/metrics.hpp"
#include "moofair/run_config.hpp"
#include "moofair/text.hpp"
#include "moofair/trainer.hpp"

namespace fs = std::filesystem;
using namespace moofair;

namespace {

constexpr int kExitError = 1;
constexpr int kExitMissing = 2;
constexpr int kExitLocked = 3;

class MissingInput : public Error {
 public:
  using Error::Error;
};

class LockedError : public Error {
 public:
  using Error::Error;
};

void require_exists(const fs::path& path, const std::string& what) {
  if (path.empty()) {
    throw MissingInput(what + " not given");
  }
  if (!fs::exists(path)) {
    throw MissingInput(what + " not found: " + path.string());
  }
}

// Exclusive marker file in the output directory for the command's lifetime.
class DirLock {
 public:
  explicit DirLock(const fs::path& dir) : file_(dir / ".moofair.lock") {
    fs::create_directories(dir);
    std::FILE* f = std::fopen(file_.c_str(), "wx");
    if (f == nullptr) {
      throw LockedError("output directory is in use (remove " + file_.string() + " if stale)");
    }
    std::fclose(f);
  }
  ~DirLock() {
    std::error_code ec;
    fs::remove(file_, ec);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  fs::path file_;
};

// --config plus one flag per config key (learning_rate -> --learning-rate).
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", file, "key = value config file; flags override it");
    for (const auto& key : run_config_keys()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (key == "learning_rate") {
        flag += ",--lr";
      }
      options.emplace_back(key, cmd->add_option(flag, values[key]));
    }
  }

  RunConfig resolve() const {
    RunConfig config;
    std::vector<std::string> errors;
    if (!file.empty()) {
      require_exists(file, "config file");
      parse_run_config(text::read_file(file), config, errors);
    }
    for (const auto& [key, option] : options) {
      if (option->count() > 0) {
        const auto problem = apply_run_setting(config, key, values.at(key));
        if (!problem.empty()) {
          errors.push_back("--" + problem);
        }
      }
    }
    for (const auto& p : config.train.problems()) {
      errors.push_back(p);
    }
    if (!errors.empty()) {
      std::string message = "configuration errors:";
      for (const auto& e : errors) {
        message += "\n  " + e;
      }
      throw ConfigError(message);
    }
    return config;
  }
};

DatasetBundle load_bundle_checked(const fs::path& dir) {
  require_exists(dir, "bundle");
  return load_bundle(dir);
}

// A run directory with selected.txt resolves to its selected checkpoint.
fs::path resolve_checkpoint(const fs::path& path) {
  require_exists(path, "checkpoint");
  if (!fs::exists(path / "model.txt") && fs::exists(path / "selected.txt")) {
    for (const auto& line : text::read_lines(path / "selected.txt")) {
      const auto fields = text::split(line, "=");
      if (fields.size() == 2 && text::trim(fields[0]) == "checkpoint") {
        return path / std::string(text::trim(fields[1]));
      }
    }
  }
  return path;
}

std::string round_dir(Index r) { return "round_" + std::to_string(r); }

int cmd_prepare(const std::string& format, const fs::path& in, const fs::path& out, const std::string& order,
                std::uint64_t split_seed) {
  require_exists(in, "input");
  PreprocessOptions options;
  options.order = parse_split_order(order);
  options.seed = split_seed;
  const auto raw = ingest(in, parse_dataset_format(format));
  const auto dataset = preprocess(raw, options);
  const auto masks = build_masks(dataset);
  DirLock lock(out);
  save_bundle(out, dataset, masks);
  const auto stats = compute_stats(raw, dataset);
  write_stats(out / "stats.txt", stats);
  std::cout << text::read_file(out / "stats.txt");
  return 0;
}

std::vector<std::string> summarize_rounds(const ParetoResult& result) {
  std::vector<std::string> lines;
  for (const auto& r : result.rounds) {
    lines.push_back("round " + std::to_string(r.record.round_id) + ": best_epoch=" + std::to_string(r.best_epoch) +
                    " epochs_run=" + std::to_string(r.epochs_run) +
                    " val_recall_at_20=" + text::format_report(r.best_val_recall) +
                    " frank_wolfe_calls=" + std::to_string(r.frank_wolfe_calls));
  }
  lines.push_back("selected round " + std::to_string(result.selected));
  return lines;
}

int cmd_train(const ConfigFlags& flags) {
  auto config = flags.resolve();
  const auto bundle = load_bundle_checked(config.bundle);
  if (config.out.empty()) {
    throw ConfigError("configuration errors:\n  out not given");
  }
  config.train.validate(bundle.masks);
  DirLock lock(config.out);
  auto result = run_pareto_rounds(bundle.dataset, bundle.masks, config.train);
  for (auto& r : result.rounds) {
    const auto dir = round_dir(r.record.round_id);
    r.record.checkpoint_ref = dir;
    save_checkpoint(config.out / dir, r.model,
                    CheckpointMeta{config.train.seed + static_cast<std::uint64_t>(r.record.round_id), r.best_epoch});
    text::write_file(config.out / ("alpha_trace_" + dir + ".csv"), alpha_trace_csv(r.trace));
  }
  text::write_file(config.out / "rounds.csv", round_records_csv(result, config.train.objectives));
  text::write_file(config.out / "selected.txt",
                   "round = " + std::to_string(result.selected) + "\ncheckpoint = " +
                       round_dir(static_cast<Index>(result.selected)) + "\n");
  text::write_file(config.out / "config.txt", format_run_config(config));
  std::string log;
  for (const auto& line : summarize_rounds(result)) {
    log += line + "\n";
  }
  text::write_file(config.out / "train.log", log);
  std::cout << log;
  return 0;
}

int cmd_eval(const fs::path& bundle_dir, const fs::path& checkpoint, const std::vector<Index>& ks,
             const std::string& name, const fs::path& out, const std::string& user_grouping,
             const std::string& diversity) {
  const auto bundle = load_bundle_checked(bundle_dir);
  const auto model = load_checkpoint(resolve_checkpoint(checkpoint));
  EvalOptions options;
  options.model_name = name;
  options.k_values = ks;
  if (user_grouping == "age") {
    options.user_grouping = UserGrouping::age;
  } else if (user_grouping != "gender") {
    throw ConfigError("--user-grouping must be gender or age");
  }
  if (diversity == "genre") {
    options.diversity_grouping = DiversityGrouping::genre;
  } else if (diversity != "popularity") {
    throw ConfigError("--diversity must be popularity or genre");
  }
  const auto csv = metrics_csv(evaluate(model, bundle.dataset, bundle.masks, options));
  if (out.empty()) {
    std::cout << csv;
  } else {
    text::write_file(out, csv);
  }
  return 0;
}

std::string frontier_row(const std::string& label, const FactorModel& model, const DatasetBundle& bundle,
                         ObjectiveId fairness, double gamma) {
  const auto run = recommend(model, bundle.dataset, 20);
  const auto disparity = objective_disparity(fairness, run, bundle.masks, gamma);
  const double inv = disparity && *disparity > 0.0 ? 1.0 / *disparity : std::numeric_limits<double>::infinity();
  return label + "," + text::format_report(recall_at_k(run)) + "," + text::format_report(inv) + "\n";
}

struct GridOptions {
  std::vector<double> bpr_weights;
  std::string normalization = "none";
  double learning_rate = 0.0;  // 0: the config's learning_rate
};

int cmd_grid(const ConfigFlags& flags, const GridOptions& options) {
  auto config = flags.resolve();
  if (config.train.objectives.size() != 2) {
    throw ConfigError("grid search takes exactly two objectives (bpr and one fairness objective)");
  }
  const auto bundle = load_bundle_checked(config.bundle);
  if (config.out.empty()) {
    throw ConfigError("configuration errors:\n  out not given");
  }
  config.train.validate(bundle.masks);
  std::vector<SimplexWeights> grid;
  if (options.bpr_weights.empty()) {
    grid = default_weight_grid();
  } else {
    for (const double w : options.bpr_weights) {
      grid.push_back(SimplexWeights((VectorXd(2) << w, 1.0 - w).finished()));
    }
  }
  DirLock lock(config.out);
  const ObjectiveId fairness = config.train.objectives[1];
  const double gamma = config.train.gamma;

  std::string frontier = "weight,recall_at_20,inv_disparity\n";
  std::string metrics;
  // Grid points weight the raw objectives unless told otherwise.
  auto fixed = config.train;
  fixed.mode = TrainMode::fixed_weights;
  fixed.grad_normalization = parse_normalization(options.normalization);
  if (options.learning_rate > 0.0) {
    fixed.learning_rate = options.learning_rate;
  }
  for (const auto& point : grid_search(bundle.dataset, bundle.masks, fixed, grid)) {
    const auto label = text::format_report(point.weights[0]);
    frontier += frontier_row(label, point.result.model, bundle, fairness, gamma);
    auto rows = evaluate(point.result.model, bundle.dataset, bundle.masks);
    for (auto& r : rows) {
      r.model = "grid_" + label;
    }
    metrics += metrics_csv(rows, metrics.empty());
  }
  auto mgda = config.train;
  mgda.mode = TrainMode::mgda;
  mgda.fixed_weights.reset();
  const auto pareto = run_pareto_rounds(bundle.dataset, bundle.masks, mgda);
  for (const auto& r : pareto.rounds) {
    frontier += frontier_row("mgda", r.model, bundle, fairness, gamma);
    auto rows = evaluate(r.model, bundle.dataset, bundle.masks);
    for (auto& row : rows) {
      row.model = "mgda_" + std::to_string(r.record.round_id);
    }
    metrics += metrics_csv(rows, metrics.empty());
  }
  text::write_file(config.out / "frontier.csv", frontier);
  text::write_file(config.out / "grid_metrics.csv", metrics);
  text::write_file(config.out / "config.txt", format_run_config(config));
  std::cout << frontier;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness-aware recommendation with multiple-gradient descent"};
  app.require_subcommand(1);

  auto* prepare = app.add_subcommand("prepare", "Preprocess a raw dataset into a bundle");
  std::string format = "ml100k";
  fs::path prepare_in;
  fs::path prepare_out;
  std::string split_order = "chronological";
  std::uint64_t split_seed = 0;
  prepare->add_option("--format", format, "ml100k, ml1m or generic_tsv")->capture_default_str();
  prepare->add_option("--in", prepare_in, "Raw dataset directory or ratings file")->required();
  prepare->add_option("--out", prepare_out, "Bundle directory")->required();
  prepare->add_option("--split-order", split_order, "chronological or random")->capture_default_str();
  prepare->add_option("--split-seed", split_seed, "Seed of the random split order")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train q rounds and select one by least misery");
  ConfigFlags train_flags;
  train_flags.attach(train);

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  fs::path eval_bundle;
  fs::path eval_checkpoint;
  std::vector<Index> ks{10, 20};
  std::string eval_name = "model";
  fs::path eval_out;
  std::string user_grouping = "gender";
  std::string diversity = "popularity";
  eval->add_option("--bundle", eval_bundle, "Bundle directory")->required();
  eval->add_option("--checkpoint", eval_checkpoint, "Checkpoint or train output directory")->required();
  eval->add_option("--k", ks, "Cutoffs")->delimiter(',')->capture_default_str();
  eval->add_option("--name", eval_name, "Model column value")->capture_default_str();
  eval->add_option("--out", eval_out, "Metrics CSV file (default: stdout)");
  eval->add_option("--user-grouping", user_grouping, "gender or age")->capture_default_str();
  eval->add_option("--diversity", diversity, "popularity or genre")->capture_default_str();

  auto* grid = app.add_subcommand("grid", "Fixed-weight grid against MGDA rounds");
  ConfigFlags grid_flags;
  grid_flags.attach(grid);
  GridOptions grid_options;
  grid->add_option("--grid", grid_options.bpr_weights, "Weights of bpr (default 0.9,0.8,...,0.1)")->delimiter(',');
  grid->add_option("--grid-normalization", grid_options.normalization, "Gradient normalization of the grid runs")
      ->capture_default_str();
  grid->add_option("--grid-lr", grid_options.learning_rate, "Learning rate of the grid runs (default: --lr)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prepare) {
      return cmd_prepare(format, prepare_in, prepare_out, split_order, split_seed);
    }
    if (*train) {
      return cmd_train(train_flags);
    }
    if (*eval) {
      return cmd_eval(eval_bundle, eval_checkpoint, ks, eval_name, eval_out, user_grouping, diversity);
    }
    if (*grid) {
      return cmd_grid(grid_flags, grid_options);
    }
  } catch (const MissingInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissing;
  } catch (const LockedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLocked;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
