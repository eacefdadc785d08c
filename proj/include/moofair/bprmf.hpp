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
#include <span>
#include <string_view>
#include <vector>

#include "moofair/data.hpp"
#include "moofair/numeric.hpp"

namespace moofair {

class IndexError : public Error {
 public:
  using Error::Error;
};

// BPR matrix-factorization model. User and item embeddings live in a single
// flat parameter vector [user rows | item rows], both row-major, so the
// flattened view used by the gradients and the solver is the storage itself.
class FactorModel {
 public:
  FactorModel() = default;
  FactorModel(Index num_users, Index num_items, Index dim, double reg);

  // Entries i.i.d. N(0, stddev^2).
  static FactorModel random(Index num_users, Index num_items, Index dim, double reg, SeededRng& rng,
                            double stddev = 0.01);

  Index num_users() const { return num_users_; }
  Index num_items() const { return num_items_; }
  Index dim() const { return dim_; }
  double reg() const { return reg_; }
  Index num_params() const { return params_.size(); }

  auto user_embeddings() { return Eigen::Map<MatrixXd>(params_.data(), num_users_, dim_); }
  auto user_embeddings() const { return Eigen::Map<const MatrixXd>(params_.data(), num_users_, dim_); }
  auto item_embeddings() { return Eigen::Map<MatrixXd>(params_.data() + num_users_ * dim_, num_items_, dim_); }
  auto item_embeddings() const {
    return Eigen::Map<const MatrixXd>(params_.data() + num_users_ * dim_, num_items_, dim_);
  }

  auto user(Index u) { return user_embeddings().row(u); }
  auto user(Index u) const { return user_embeddings().row(u); }
  auto item(Index i) { return item_embeddings().row(i); }
  auto item(Index i) const { return item_embeddings().row(i); }

  // Offsets of an embedding row inside the flat parameter vector.
  Index user_offset(Index u) const { return u * dim_; }
  Index item_offset(Index i) const { return (num_users_ + i) * dim_; }

  const VectorXd& params() const { return params_; }
  // Replaces all parameters; `flat` must have num_params() finite entries.
  void set_params(const VectorXd& flat);
  // params <- params - step * direction
  void apply_update(const VectorXd& direction, double step);

 private:
  Index num_users_ = 0;
  Index num_items_ = 0;
  Index dim_ = 0;
  double reg_ = 0.0;
  VectorXd params_;
};

enum class ObjectiveId : std::uint8_t { bpr, gender, age, popularity, genre };

std::string_view objective_name(ObjectiveId id);
ObjectiveId parse_objective(std::string_view name);

// Loss of one objective and its gradient over the flat parameter vector.
struct ObjectiveGradient {
  ObjectiveId objective = ObjectiveId::bpr;
  double loss = 0.0;
  VectorXd grad;
};

struct Triplet {
  std::int32_t user = 0;
  std::int32_t positive = 0;
  std::int32_t negative = 0;
};

using TripletBatch = std::vector<Triplet>;

// x_ui = <U_u, I_i> for every item in `items`.
VectorXd score(const FactorModel& model, Index user, std::span<const std::int32_t> items);

// Scores of `user` against the whole catalog.
VectorXd score_all(const FactorModel& model, Index user);

// sum over triples of -log sigma(x_ui - x_uj) plus reg * squared norm of every
// distinct embedding row the batch touches.
double bpr_loss(const FactorModel& model, const TripletBatch& batch);
ObjectiveGradient bpr_grad(const FactorModel& model, const TripletBatch& batch);

// Uniform draw from the items that are not train positives of `user`.
// Returns -1 when the user has no such item.
std::int32_t sample_negative(const InteractionDataset& dataset, Index user, SeededRng& rng);

// One triple per entry of `users`: a uniformly drawn train positive and a
// resampled non-positive. Users without a positive or without a non-positive
// are skipped with a warning.
TripletBatch sample_negatives(const InteractionDataset& dataset, SeededRng& rng, std::span<const std::int32_t> users);

struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::int64_t epoch = 0;
};

// user_embeddings.csv, item_embeddings.csv (round-trip precision) and
// model.txt with d, reg, seed, epoch and the table sizes.
void save_checkpoint(const std::filesystem::path& dir, const FactorModel& model, const CheckpointMeta& meta);
FactorModel load_checkpoint(const std::filesystem::path& dir, CheckpointMeta* meta = nullptr);

}  // namespace moofair
