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

#include "moofair/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "moofair/log.hpp"
#include "moofair/parallel.hpp"
#include "moofair/text.hpp"

namespace moofair {

std::string_view normalization_name(GradNormalization n) { return n == GradNormalization::l2 ? "l2" : "none"; }

GradNormalization parse_normalization(std::string_view name) {
  if (name == "l2") {
    return GradNormalization::l2;
  }
  if (name == "none") {
    return GradNormalization::none;
  }
  throw ConfigError("unknown gradient normalization '" + std::string(name) + "' (expected none or l2)");
}

std::string_view mode_name(TrainMode m) { return m == TrainMode::mgda ? "mgda" : "fixed"; }

TrainMode parse_mode(std::string_view name) {
  if (name == "mgda") {
    return TrainMode::mgda;
  }
  if (name == "fixed" || name == "fixed_weights") {
    return TrainMode::fixed_weights;
  }
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected mgda or fixed)");
}

GradNormalization TrainConfig::normalization() const {
  if (grad_normalization) {
    return *grad_normalization;
  }
  return objectives.size() > 1 ? GradNormalization::l2 : GradNormalization::none;
}

FairnessSettings TrainConfig::fairness_settings() const {
  FairnessSettings s;
  s.ndcg.K = K;
  s.ndcg.candidate_negatives = candidate_negatives;
  s.rank.steepness = steepness;
  s.rank.temperature = temperature;
  s.rank.patience = gamma;
  s.rank.rank_offset = rank_offset;
  return s;
}

std::vector<std::string> TrainConfig::problems() const {
  std::vector<std::string> out;
  const auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) {
      out.push_back(std::string(name) + " must be > 0");
    }
  };
  if (objectives.empty() || objectives.front() != ObjectiveId::bpr) {
    out.push_back("objectives must start with bpr");
  }
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    for (std::size_t j = i + 1; j < objectives.size(); ++j) {
      if (objectives[i] == objectives[j]) {
        out.push_back("objective " + std::string(objective_name(objectives[i])) + " listed twice");
      }
    }
  }
  positive(learning_rate, "learning_rate");
  if (!(reg >= 0.0)) {
    out.push_back("reg must be >= 0");
  }
  positive(double(batch_size), "batch_size");
  positive(double(dim), "dim");
  positive(double(epochs_max), "epochs_max");
  positive(double(eval_every), "eval_every");
  positive(double(early_stop_patience), "early_stop_patience");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    out.push_back("gamma must lie in (0, 1)");
  }
  positive(temperature, "temperature");
  positive(steepness, "steepness");
  if (!(rank_offset >= 0.0)) {
    out.push_back("rank_offset must be >= 0");
  }
  positive(double(K), "K");
  positive(double(n_r_cap), "n_r_cap");
  if (candidate_negatives < 0) {
    out.push_back("candidate_negatives must be >= 0");
  }
  positive(init_stddev, "init_stddev");
  positive(double(rounds), "rounds");
  positive(double(frank_wolfe_iters), "frank_wolfe_iters");
  if (!(min_grad_norm >= 0.0)) {
    out.push_back("min_grad_norm must be >= 0");
  }
  if (mode == TrainMode::fixed_weights) {
    if (!fixed_weights) {
      out.push_back("fixed mode needs weights");
    } else if (fixed_weights->size() != static_cast<Index>(objectives.size())) {
      out.push_back("fixed mode needs one weight per objective");
    }
  }
  return out;
}

void TrainConfig::validate() const {
  const auto list = problems();
  if (list.empty()) {
    return;
  }
  std::string message = "invalid training configuration:";
  for (const auto& p : list) {
    message += "\n  " + p;
  }
  throw ConfigError(message);
}

void TrainConfig::validate(const GroupMaskSet& masks) const {
  validate();
  for (const auto o : objectives) {
    if ((o == ObjectiveId::gender && !masks.gender) || (o == ObjectiveId::age && !masks.age) ||
        (o == ObjectiveId::genre && !masks.genre)) {
      throw ConfigError("objective " + std::string(objective_name(o)) + " needs attributes the dataset lacks");
    }
  }
}

double AlphaTrace::mean_alpha(std::size_t index) const {
  if (rows.empty()) {
    throw InputError("empty alpha trace");
  }
  double total = 0.0;
  for (const auto& r : rows) {
    total += r.alpha[static_cast<Index>(index)];
  }
  return total / double(rows.size());
}

std::string alpha_trace_csv(const AlphaTrace& trace) {
  std::ostringstream out;
  out << "epoch,batch";
  for (const auto o : trace.objectives) {
    out << ",alpha_" << objective_name(o);
  }
  out << "\n";
  for (const auto& r : trace.rows) {
    out << r.epoch << "," << r.batch;
    for (Index i = 0; i < r.alpha.size(); ++i) {
      out << "," << text::format_exact(r.alpha[i]);
    }
    out << "\n";
  }
  return out.str();
}

AlphaTrace parse_alpha_trace_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("empty alpha trace");
  }
  const auto header = text::split(text::trim(line), ",");
  if (header.size() < 3 || header[0] != "epoch" || header[1] != "batch") {
    throw InputError("alpha trace header must start with epoch,batch");
  }
  AlphaTrace trace;
  for (std::size_t c = 2; c < header.size(); ++c) {
    if (header[c].substr(0, 6) != "alpha_") {
      throw InputError("bad alpha trace column '" + std::string(header[c]) + "'");
    }
    trace.objectives.push_back(parse_objective(header[c].substr(6)));
  }
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) {
      continue;
    }
    const auto fields = text::split(text::trim(line), ",");
    if (fields.size() != header.size()) {
      throw InputError("alpha trace row has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    AlphaTraceRow row;
    row.epoch = text::parse_int(fields[0]);
    row.batch = text::parse_int(fields[1]);
    row.alpha.resize(static_cast<Index>(fields.size() - 2));
    for (std::size_t c = 2; c < fields.size(); ++c) {
      row.alpha[static_cast<Index>(c - 2)] = text::parse_double(fields[c]);
    }
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

namespace {

struct TrainPair {
  std::int32_t user;
  std::int32_t item;
};

std::vector<TrainPair> train_pairs(const InteractionDataset& dataset) {
  std::vector<TrainPair> pairs;
  for (Index u = 0; u < dataset.num_users(); ++u) {
    for (const auto i : dataset.items_of(u, Split::train)) {
      pairs.push_back({static_cast<std::int32_t>(u), i});
    }
  }
  return pairs;
}

void shuffle(std::vector<TrainPair>& pairs, SeededRng& rng) {
  for (std::size_t i = pairs.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(static_cast<std::int64_t>(i)));
    std::swap(pairs[i - 1], pairs[j]);
  }
}

double validation_recall(const FactorModel& model, const InteractionDataset& dataset) {
  const auto k = std::min<Index>(20, model.num_items());
  const auto run = recommend(model, dataset, k, Split::val);
  return run.users.empty() ? 0.0 : recall_at_k(run);
}

}  // namespace

RoundResult train_round(const InteractionDataset& dataset, const GroupMaskSet& masks, const TrainConfig& config,
                        std::uint64_t seed, std::size_t round_id, const TrainHooks& hooks) {
  config.validate(masks);
  auto pairs = train_pairs(dataset);
  if (pairs.empty()) {
    throw EmptyDatasetError("no train interactions");
  }
  const auto t = config.objectives.size();
  const bool needs_context = t > 1;
  const GradNormalization normalization = config.normalization();
  const FairnessSettings settings = config.fairness_settings();

  SeededRng rng(seed);
  // Candidate lists and Gumbel noise come from their own stream so that the
  // BPR sampling sequence does not depend on the objective set.
  SeededRng context_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  FactorModel model =
      FactorModel::random(dataset.num_users(), dataset.num_items(), config.dim, config.reg, rng, config.init_stddev);

  RoundResult result;
  result.record.round_id = static_cast<Index>(round_id);
  result.trace.objectives = config.objectives;
  result.model = model;
  result.best_val_recall = -1.0;
  result.record.objective_values = VectorXd::Zero(static_cast<Index>(t));
  Index stale = 0;

  for (Index epoch = 1; epoch <= config.epochs_max; ++epoch) {
    shuffle(pairs, rng);
    VectorXd loss_sum = VectorXd::Zero(static_cast<Index>(t));
    VectorXd loss_count = VectorXd::Zero(static_cast<Index>(t));
    Index batch_index = 0;
    for (std::size_t start = 0; start < pairs.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const auto end = std::min(pairs.size(), start + static_cast<std::size_t>(config.batch_size));
      TripletBatch batch;
      batch.reserve(end - start);
      for (std::size_t p = start; p < end; ++p) {
        const auto j = sample_negative(dataset, pairs[p].user, rng);
        if (j >= 0) {
          batch.push_back({pairs[p].user, pairs[p].item, j});
        }
      }
      if (batch.empty()) {
        continue;
      }
      ++batch_index;
      BatchContext ctx;
      if (needs_context) {
        const auto users = batch_users(batch);
        ctx = make_batch_context(dataset, users, config.candidate_negatives, config.n_r_cap, context_rng);
      }

      BatchReport report;
      report.epoch = epoch;
      report.batch = batch_index;
      report.gradients.assign(t, VectorXd());
      report.active.assign(t, false);
      report.losses = VectorXd::Zero(static_cast<Index>(t));
      report.grad_norms = VectorXd::Zero(static_cast<Index>(t));
      std::vector<double> losses(t, 0.0);
      parallel_for(static_cast<Index>(t), [&](Index o) {
        const auto k = static_cast<std::size_t>(o);
        if (config.objectives[k] == ObjectiveId::bpr) {
          auto g = bpr_grad(model, batch);
          losses[k] = g.loss;
          report.gradients[k] = std::move(g.grad);
          report.active[k] = true;
        } else if (auto g = fairness_grad(config.objectives[k], model, ctx, masks, settings)) {
          losses[k] = g->loss;
          report.gradients[k] = std::move(g->grad);
          report.active[k] = true;
        }
      });

      std::vector<std::size_t> active;
      for (std::size_t k = 0; k < t; ++k) {
        if (!report.active[k]) {
          continue;
        }
        loss_sum[static_cast<Index>(k)] += losses[k];
        loss_count[static_cast<Index>(k)] += 1.0;
        const double norm = report.gradients[k].norm();
        report.losses[static_cast<Index>(k)] = losses[k];
        report.grad_norms[static_cast<Index>(k)] = norm;
        if (norm < config.min_grad_norm) {
          report.active[k] = false;
          report.gradients[k] = VectorXd();
          continue;
        }
        if (normalization == GradNormalization::l2) {
          report.gradients[k] /= norm + 1e-12;
        }
        active.push_back(k);
      }

      std::vector<VectorXd> active_grads;
      for (const auto k : active) {
        active_grads.push_back(report.gradients[k]);
      }
      report.gram = gram_matrix(active_grads);
      report.alpha = VectorXd::Zero(static_cast<Index>(t));
      if (config.mode == TrainMode::fixed_weights) {
        report.alpha = config.fixed_weights->values();
      } else if (active.empty()) {
        // Every objective is stationary: no step.
      } else if (active.size() == 1) {
        report.alpha[static_cast<Index>(active[0])] = 1.0;
      } else {
        const auto fw = frank_wolfe_solve(report.gram, FrankWolfeOptions{config.frank_wolfe_iters, 1e-6});
        ++result.frank_wolfe_calls;
        for (std::size_t a = 0; a < active.size(); ++a) {
          report.alpha[static_cast<Index>(active[a])] = fw.alpha[static_cast<Index>(a)];
        }
      }

      report.direction = VectorXd::Zero(model.num_params());
      for (const auto k : active) {
        const double a = report.alpha[static_cast<Index>(k)];
        if (a != 0.0) {
          report.direction += a * report.gradients[k];
        }
      }
      model.apply_update(report.direction, config.learning_rate);
      result.trace.rows.push_back({epoch, batch_index, report.alpha});
      if (hooks.on_batch) {
        hooks.on_batch(report);
      }
    }
    result.epochs_run = epoch;

    if (epoch % config.eval_every == 0 || epoch == config.epochs_max) {
      const double recall = validation_recall(model, dataset);
      if (recall > result.best_val_recall) {
        result.best_val_recall = recall;
        result.best_epoch = epoch;
        result.model = model;
        for (std::size_t k = 0; k < t; ++k) {
          const auto i = static_cast<Index>(k);
          result.record.objective_values[i] = loss_count[i] > 0.0 ? loss_sum[i] / loss_count[i] : 0.0;
        }
        stale = 0;
      } else if (++stale >= config.early_stop_patience) {
        break;
      }
    }
  }
  return result;
}

ParetoResult run_pareto_rounds(const InteractionDataset& dataset, const GroupMaskSet& masks,
                               const TrainConfig& config, const TrainHooks& hooks) {
  config.validate(masks);
  ParetoResult out;
  for (Index r = 0; r < config.rounds; ++r) {
    out.rounds.push_back(
        train_round(dataset, masks, config, config.seed + static_cast<std::uint64_t>(r), static_cast<std::size_t>(r),
                    hooks));
  }
  std::vector<SolutionRecord> records;
  for (const auto& r : out.rounds) {
    records.push_back(r.record);
  }
  const auto normalized = normalize_by_first(records);
  out.selected = least_misery_index(normalized);
  return out;
}

std::vector<SimplexWeights> default_weight_grid() {
  std::vector<SimplexWeights> grid;
  for (int w = 9; w >= 1; --w) {
    VectorXd v(2);
    v << w / 10.0, 1.0 - w / 10.0;
    grid.push_back(SimplexWeights::project(v));
  }
  return grid;
}

std::vector<GridPoint> grid_search(const InteractionDataset& dataset, const GroupMaskSet& masks,
                                   const TrainConfig& config, const std::vector<SimplexWeights>& grid,
                                   const EvalOptions& eval) {
  if (config.objectives.size() != 2) {
    throw ConfigError("grid search takes exactly two objectives");
  }
  std::vector<GridPoint> out;
  for (const auto& w : grid) {
    TrainConfig fixed = config;
    fixed.mode = TrainMode::fixed_weights;
    fixed.fixed_weights = w;
    GridPoint point{w, train_round(dataset, masks, fixed, config.seed), {}};
    point.metrics = evaluate(point.result.model, dataset, masks, eval);
    out.push_back(std::move(point));
  }
  return out;
}

std::string round_records_csv(const ParetoResult& result, const std::vector<ObjectiveId>& objectives) {
  std::ostringstream out;
  out << "round";
  for (const auto o : objectives) {
    out << ",loss_" << objective_name(o);
  }
  out << ",val_recall_at_20,checkpoint\n";
  for (const auto& r : result.rounds) {
    out << r.record.round_id;
    for (Index i = 0; i < r.record.objective_values.size(); ++i) {
      out << "," << text::format_report(r.record.objective_values[i]);
    }
    out << "," << text::format_report(r.best_val_recall) << "," << r.record.checkpoint_ref << "\n";
  }
  return out.str();
}

}  // namespace moofair
