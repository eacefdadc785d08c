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

// Multi-objective training loop: per-batch objective gradients, optional
// normalization, min-norm weighting (or fixed weights), SGD update, early
// stopping on validation Recall@20, repeated rounds and grid search.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "moofair/bprmf.hpp"
#include "moofair/data.hpp"
#include "moofair/fairness.hpp"
#include "moofair/metrics.hpp"
#include "moofair/moo.hpp"

namespace moofair {

enum class GradNormalization { none, l2 };
enum class TrainMode { mgda, fixed_weights };

std::string_view normalization_name(GradNormalization n);
GradNormalization parse_normalization(std::string_view name);
std::string_view mode_name(TrainMode m);
TrainMode parse_mode(std::string_view name);

struct TrainConfig {
  std::vector<ObjectiveId> objectives{ObjectiveId::bpr};
  double learning_rate = 1e-3;
  double reg = 1e-4;
  Index batch_size = 1024;
  Index dim = 50;
  Index epochs_max = 200;
  Index eval_every = 5;
  Index early_stop_patience = 50;
  // Unset: l2 when fairness objectives are present, none for bpr alone.
  std::optional<GradNormalization> grad_normalization;
  double gamma = 0.5;
  double temperature = 1e-5;
  double steepness = 1.0;
  double rank_offset = 1.0;
  Index K = 50;
  Index n_r_cap = 10;
  Index candidate_negatives = 200;
  double init_stddev = 0.01;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::mgda;
  std::optional<SimplexWeights> fixed_weights;
  Index rounds = 5;
  Index frank_wolfe_iters = 100;
  // Objectives whose raw gradient norm falls below this are treated as
  // stationary for the batch: left out of the solve, weight 0.
  double min_grad_norm = 1e-10;

  GradNormalization normalization() const;
  FairnessSettings fairness_settings() const;
  // Every problem found, empty when the config is usable.
  std::vector<std::string> problems() const;
  // Throws ConfigError listing all problems.
  void validate() const;
  // Additionally checks that the masks needed by the objectives exist.
  void validate(const GroupMaskSet& masks) const;
};

struct AlphaTraceRow {
  Index epoch = 0;
  Index batch = 0;
  VectorXd alpha;
};

struct AlphaTrace {
  std::vector<ObjectiveId> objectives;
  std::vector<AlphaTraceRow> rows;

  // Mean weight of objective `index` over all rows.
  double mean_alpha(std::size_t index) const;
};

// epoch,batch,alpha_<objective>... with round-trip precision.
std::string alpha_trace_csv(const AlphaTrace& trace);
AlphaTrace parse_alpha_trace_csv(const std::string& csv);

// What one batch saw, handed to TrainHooks::on_batch.
struct BatchReport {
  Index epoch = 0;
  Index batch = 0;
  // Gradients after normalization; inactive objectives (no batch support or
  // stationary) hold empty vectors.
  std::vector<VectorXd> gradients;
  std::vector<bool> active;
  // Batch loss and gradient norm before normalization; zero when inactive.
  VectorXd losses;
  VectorXd grad_norms;
  VectorXd alpha;
  // Gram matrix over the active objectives, in objective order.
  MatrixXd gram;
  VectorXd direction;
};

struct TrainHooks {
  std::function<void(const BatchReport&)> on_batch;
};

struct RoundResult {
  SolutionRecord record;
  AlphaTrace trace;
  FactorModel model;  // best validation checkpoint
  Index best_epoch = 0;
  double best_val_recall = 0.0;
  Index epochs_run = 0;
  Index frank_wolfe_calls = 0;
};

RoundResult train_round(const InteractionDataset& dataset, const GroupMaskSet& masks, const TrainConfig& config,
                        std::uint64_t seed, std::size_t round_id = 0, const TrainHooks& hooks = {});

struct ParetoResult {
  std::vector<RoundResult> rounds;
  std::size_t selected = 0;
};

// Rounds r = 0..q-1 with seeds seed + r, then least-misery selection over
// the per-round objective vectors, each divided by the first round's.
ParetoResult run_pareto_rounds(const InteractionDataset& dataset, const GroupMaskSet& masks,
                               const TrainConfig& config, const TrainHooks& hooks = {});

struct GridPoint {
  SimplexWeights weights;
  RoundResult result;
  std::vector<MetricsRow> metrics;
};

// One fixed-weight run per weight vector over exactly two objectives.
std::vector<GridPoint> grid_search(const InteractionDataset& dataset, const GroupMaskSet& masks,
                                   const TrainConfig& config, const std::vector<SimplexWeights>& grid,
                                   const EvalOptions& eval = {});

// 0.9/0.1, 0.8/0.2, ..., 0.1/0.9 with the first entry on the first objective.
std::vector<SimplexWeights> default_weight_grid();

// round,loss_<objective>...,val_recall_at_20,checkpoint
std::string round_records_csv(const ParetoResult& result, const std::vector<ObjectiveId>& objectives);

}  // namespace moofair
