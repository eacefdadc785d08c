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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "moofair/trainer.hpp"

using namespace moofair;

namespace {

TrainConfig small_config(std::vector<ObjectiveId> objectives) {
  TrainConfig c;
  c.objectives = std::move(objectives);
  c.learning_rate = 0.05;
  c.reg = 1e-3;
  c.batch_size = 32;
  c.dim = 4;
  c.epochs_max = 4;
  c.eval_every = 4;
  c.early_stop_patience = 2;
  c.K = 5;
  c.candidate_negatives = 10;
  c.n_r_cap = 4;
  c.temperature = 0.05;
  c.init_stddev = 0.1;
  c.rounds = 2;
  return c;
}

// Plain SGD on the summed BPR loss, drawing in the trainer's documented
// order: init, then per epoch a shuffle and per pair a negative.
FactorModel reference_sgd(const InteractionDataset& data, const TrainConfig& c, std::uint64_t seed) {
  SeededRng rng(seed);
  auto model = FactorModel::random(data.num_users(), data.num_items(), c.dim, c.reg, rng, c.init_stddev);
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  for (Index u = 0; u < data.num_users(); ++u) {
    for (const auto i : data.items_of(u, Split::train)) {
      pairs.emplace_back(static_cast<std::int32_t>(u), i);
    }
  }
  for (Index epoch = 0; epoch < c.epochs_max; ++epoch) {
    for (std::size_t i = pairs.size(); i > 1; --i) {
      std::swap(pairs[i - 1], pairs[static_cast<std::size_t>(rng.uniform_index(static_cast<std::int64_t>(i)))]);
    }
    for (std::size_t start = 0; start < pairs.size(); start += static_cast<std::size_t>(c.batch_size)) {
      TripletBatch batch;
      for (std::size_t p = start; p < std::min(pairs.size(), start + static_cast<std::size_t>(c.batch_size)); ++p) {
        batch.push_back({pairs[p].first, pairs[p].second, sample_negative(data, pairs[p].first, rng)});
      }
      model.apply_update(bpr_grad(model, batch).grad, c.learning_rate);
    }
  }
  return model;
}

}  // namespace

TEST_CASE("config defaults and errors") {
  TrainConfig c;
  CHECK(c.problems().empty());
  CHECK(c.normalization() == GradNormalization::none);
  c.objectives = {ObjectiveId::bpr, ObjectiveId::popularity};
  CHECK(c.normalization() == GradNormalization::l2);
  c.grad_normalization = GradNormalization::none;
  CHECK(c.normalization() == GradNormalization::none);

  TrainConfig bad;
  bad.objectives = {ObjectiveId::gender};
  bad.batch_size = 0;
  bad.learning_rate = -1.0;
  bad.mode = TrainMode::fixed_weights;
  CHECK(bad.problems().size() >= 4);
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  TrainConfig dup;
  dup.objectives = {ObjectiveId::bpr, ObjectiveId::bpr};
  CHECK_FALSE(dup.problems().empty());

  TrainConfig wrong_len;
  wrong_len.objectives = {ObjectiveId::bpr, ObjectiveId::age};
  wrong_len.mode = TrainMode::fixed_weights;
  wrong_len.fixed_weights = SimplexWeights::uniform(3);
  CHECK_FALSE(wrong_len.problems().empty());

  const auto bare = testing::train_only_dataset(5, {{0, 1}, {2, 3}});
  TrainConfig needs_gender;
  needs_gender.objectives = {ObjectiveId::bpr, ObjectiveId::gender};
  CHECK_THROWS_AS(train_round(bare, build_masks(bare), needs_gender, 0), ConfigError);

  CHECK(parse_normalization("l2") == GradNormalization::l2);
  CHECK(parse_mode("fixed") == TrainMode::fixed_weights);
  CHECK(parse_mode("fixed_weights") == TrainMode::fixed_weights);
  CHECK(parse_mode(mode_name(TrainMode::mgda)) == TrainMode::mgda);
  CHECK_THROWS_AS(parse_mode("adam"), ConfigError);
}

TEST_CASE("bpr alone is plain SGD") {
  const auto data = testing::synthetic_dataset(20, 30, 1);
  const auto masks = build_masks(data);
  const auto c = small_config({ObjectiveId::bpr});
  const auto result = train_round(data, masks, c, 7);
  CHECK(result.best_epoch == 4);
  CHECK(result.model.params() == reference_sgd(data, c, 7).params());
  for (const auto& row : result.trace.rows) {
    CHECK(row.alpha.size() == 1);
    CHECK(row.alpha[0] == 1.0);
  }
  CHECK(result.frank_wolfe_calls == 0);
}

TEST_CASE("zero weight on fairness matches bpr alone") {
  const auto data = testing::synthetic_dataset(20, 30, 2);
  const auto masks = build_masks(data);
  auto bpr = small_config({ObjectiveId::bpr});
  bpr.grad_normalization = GradNormalization::none;
  auto fixed = small_config({ObjectiveId::bpr, ObjectiveId::gender});
  fixed.grad_normalization = GradNormalization::none;
  fixed.mode = TrainMode::fixed_weights;
  fixed.fixed_weights = SimplexWeights((VectorXd(2) << 1.0, 0.0).finished());
  const auto a = train_round(data, masks, bpr, 3);
  const auto b = train_round(data, masks, fixed, 3);
  CHECK(a.model.params() == b.model.params());
  CHECK(b.frank_wolfe_calls == 0);
}

TEST_CASE("per-batch weights") {
  const auto data = testing::synthetic_dataset(20, 30, 3);
  const auto masks = build_masks(data);
  for (const auto second : {ObjectiveId::gender, ObjectiveId::age, ObjectiveId::popularity, ObjectiveId::genre}) {
    for (const auto norm : {GradNormalization::none, GradNormalization::l2}) {
      auto c = small_config({ObjectiveId::bpr, second});
      c.grad_normalization = norm;
      Index batches = 0;
      Index solved = 0;
      TrainHooks hooks;
      hooks.on_batch = [&](const BatchReport& r) {
        ++batches;
        CHECK(is_on_simplex(r.alpha));
        if (r.gram.rows() < 2) {
          return;
        }
        ++solved;
        VectorXd active_alpha(r.gram.rows());
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < r.active.size(); ++k) {
          if (r.active[k]) {
            idx.push_back(k);
          }
        }
        for (std::size_t a = 0; a < idx.size(); ++a) {
          active_alpha[static_cast<Index>(a)] = r.alpha[static_cast<Index>(idx[a])];
        }
        const double norm2 = quadratic_form(r.gram, active_alpha);
        CHECK(norm2 <= r.gram.diagonal().minCoeff() + 1e-9);
        CHECK(r.direction.squaredNorm() == doctest::Approx(norm2).epsilon(1e-9));
        if (!pareto_stationary(r.gram, active_alpha, 1e-12)) {
          for (const auto k : idx) {
            if (r.alpha[static_cast<Index>(k)] > 0.0) {
              CHECK(r.gradients[k].dot(r.direction) >= -1e-6);
            }
          }
        }
      };
      const auto result = train_round(data, masks, c, 5, 0, hooks);
      CHECK(batches == static_cast<Index>(result.trace.rows.size()));
      CHECK(solved > 0);
      CHECK(result.frank_wolfe_calls == solved);
    }
  }
}

TEST_CASE("determinism") {
  const auto data = testing::synthetic_dataset(20, 30, 4);
  const auto masks = build_masks(data);
  auto c = small_config({ObjectiveId::bpr, ObjectiveId::popularity, ObjectiveId::gender});
  const auto a = train_round(data, masks, c, 11);
  const auto b = train_round(data, masks, c, 11);
  CHECK(a.model.params() == b.model.params());
  CHECK(alpha_trace_csv(a.trace) == alpha_trace_csv(b.trace));
  const auto other = train_round(data, masks, c, 12);
  CHECK(other.model.params() != a.model.params());
}

TEST_CASE("alpha trace csv") {
  AlphaTrace trace;
  trace.objectives = {ObjectiveId::bpr, ObjectiveId::popularity};
  trace.rows.push_back({1, 1, (VectorXd(2) << 0.1, 0.9).finished()});
  trace.rows.push_back({1, 2, (VectorXd(2) << 1.0 / 3.0, 2.0 / 3.0).finished()});
  const auto csv = alpha_trace_csv(trace);
  CHECK(csv.rfind("epoch,batch,alpha_bpr,alpha_popularity\n", 0) == 0);
  const auto back = parse_alpha_trace_csv(csv);
  CHECK(back.objectives == trace.objectives);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[1].alpha == trace.rows[1].alpha);
  CHECK(back.rows[1].batch == 2);
  CHECK(trace.mean_alpha(0) == doctest::Approx((0.1 + 1.0 / 3.0) / 2.0));
  CHECK_THROWS(parse_alpha_trace_csv("epoch,batch,alpha_bpr\n1,x,1\n"));
}

TEST_CASE("pareto rounds") {
  const auto data = testing::synthetic_dataset(20, 30, 5);
  const auto masks = build_masks(data);
  auto c = small_config({ObjectiveId::bpr, ObjectiveId::popularity});
  c.rounds = 1;
  const auto one = run_pareto_rounds(data, masks, c);
  CHECK(one.rounds.size() == 1);
  CHECK(one.selected == 0);

  c.rounds = 3;
  c.seed = 20;
  const auto three = run_pareto_rounds(data, masks, c);
  const auto again = run_pareto_rounds(data, masks, c);
  CHECK(three.selected == again.selected);
  REQUIRE(three.rounds.size() == 3);
  CHECK(three.rounds[2].model.params() == train_round(data, masks, c, 22, 2).model.params());
  const auto csv = round_records_csv(three, c.objectives);
  CHECK(csv.rfind("round,loss_bpr,loss_popularity,val_recall_at_20,checkpoint\n0,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("grid search") {
  const auto data = testing::synthetic_dataset(20, 30, 6);
  const auto masks = build_masks(data);
  auto c = small_config({ObjectiveId::bpr, ObjectiveId::popularity});
  c.grad_normalization = GradNormalization::none;
  c.seed = 4;
  EvalOptions eval;
  eval.k_values = {5};
  const auto base = small_config({ObjectiveId::bpr});
  const auto bpr = train_round(data, masks, base, 4);
  const auto grid = grid_search(data, masks, c, {SimplexWeights((VectorXd(2) << 1.0, 0.0).finished())}, eval);
  REQUIRE(grid.size() == 1);
  CHECK(metrics_csv(grid[0].metrics) == metrics_csv(evaluate(bpr.model, data, masks, eval)));

  const auto weights = default_weight_grid();
  REQUIRE(weights.size() == 9);
  CHECK(weights[0][0] == doctest::Approx(0.9));
  CHECK(weights[8][1] == doctest::Approx(0.9));
  CHECK(grid_search(data, masks, c, weights, eval).size() == 9);

  auto three = small_config({ObjectiveId::bpr, ObjectiveId::popularity, ObjectiveId::gender});
  CHECK_THROWS_AS(grid_search(data, masks, three, weights, eval), ConfigError);
}
