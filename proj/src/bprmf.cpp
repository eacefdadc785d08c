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

#include "moofair/bprmf.hpp"

#include <algorithm>
#include <map>

#include "moofair/log.hpp"
#include "moofair/text.hpp"

namespace moofair {
namespace fs = std::filesystem;

FactorModel::FactorModel(Index num_users, Index num_items, Index dim, double reg)
    : num_users_(num_users), num_items_(num_items), dim_(dim), reg_(reg) {
  if (dim < 1 || num_users < 0 || num_items < 0) {
    throw InputError("FactorModel: dim must be >= 1 and table sizes non-negative");
  }
  if (!(reg >= 0.0)) {
    throw InputError("FactorModel: reg must be non-negative");
  }
  params_ = VectorXd::Zero((num_users + num_items) * dim);
}

FactorModel FactorModel::random(Index num_users, Index num_items, Index dim, double reg, SeededRng& rng,
                                double stddev) {
  FactorModel model(num_users, num_items, dim, reg);
  for (Index k = 0; k < model.params_.size(); ++k) {
    model.params_[k] = rng.normal(0.0, stddev);
  }
  return model;
}

void FactorModel::set_params(const VectorXd& flat) {
  require_same_size(flat.size(), params_.size(), "FactorModel::set_params");
  if (!all_finite(flat)) {
    throw InputError("FactorModel::set_params: non-finite parameter");
  }
  params_ = flat;
}

void FactorModel::apply_update(const VectorXd& direction, double step) {
  require_same_size(direction.size(), params_.size(), "FactorModel::apply_update");
  params_.noalias() -= step * direction;
  if (!all_finite(params_)) {
    throw Error("parameter update produced a non-finite value (learning rate too large?)");
  }
}

std::string_view objective_name(ObjectiveId id) {
  switch (id) {
    case ObjectiveId::bpr:
      return "bpr";
    case ObjectiveId::gender:
      return "gender";
    case ObjectiveId::age:
      return "age";
    case ObjectiveId::popularity:
      return "popularity";
    case ObjectiveId::genre:
      return "genre";
  }
  return "?";
}

ObjectiveId parse_objective(std::string_view name) {
  for (auto id : {ObjectiveId::bpr, ObjectiveId::gender, ObjectiveId::age, ObjectiveId::popularity,
                  ObjectiveId::genre}) {
    if (objective_name(id) == name) {
      return id;
    }
  }
  throw InputError("unknown objective '" + std::string(name) + "' (bpr, gender, age, popularity, genre)");
}

VectorXd score(const FactorModel& model, Index user, std::span<const std::int32_t> items) {
  if (user < 0 || user >= model.num_users()) {
    throw IndexError("score: user id " + std::to_string(user) + " out of range");
  }
  VectorXd out(static_cast<Index>(items.size()));
  const auto u = model.user(user);
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k] < 0 || items[k] >= model.num_items()) {
      throw IndexError("score: item id " + std::to_string(items[k]) + " out of range");
    }
    out[static_cast<Index>(k)] = u.dot(model.item(items[k]));
  }
  return out;
}

VectorXd score_all(const FactorModel& model, Index user) {
  if (user < 0 || user >= model.num_users()) {
    throw IndexError("score_all: user id out of range");
  }
  return model.item_embeddings() * model.user(user).transpose();
}

namespace {

void check_triplet(const FactorModel& model, const Triplet& t) {
  if (t.user < 0 || t.user >= model.num_users() || t.positive < 0 || t.positive >= model.num_items() ||
      t.negative < 0 || t.negative >= model.num_items()) {
    throw IndexError("triplet id out of range");
  }
}

// Sorted distinct users and items referenced by the batch.
std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>> touched(const TripletBatch& batch) {
  std::vector<std::int32_t> users;
  std::vector<std::int32_t> items;
  for (const auto& t : batch) {
    users.push_back(t.user);
    items.push_back(t.positive);
    items.push_back(t.negative);
  }
  for (auto* v : {&users, &items}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  return {std::move(users), std::move(items)};
}

}  // namespace

double bpr_loss(const FactorModel& model, const TripletBatch& batch) {
  if (batch.empty()) {
    throw InputError("bpr_loss: empty batch");
  }
  double loss = 0.0;
  for (const auto& t : batch) {
    check_triplet(model, t);
    const auto u = model.user(t.user);
    const double x = u.dot(model.item(t.positive)) - u.dot(model.item(t.negative));
    loss += neg_log_sigmoid(x);
  }
  if (model.reg() > 0.0) {
    const auto [users, items] = touched(batch);
    double norm = 0.0;
    for (const auto u : users) {
      norm += model.user(u).squaredNorm();
    }
    for (const auto i : items) {
      norm += model.item(i).squaredNorm();
    }
    loss += model.reg() * norm;
  }
  return loss;
}

ObjectiveGradient bpr_grad(const FactorModel& model, const TripletBatch& batch) {
  if (batch.empty()) {
    throw InputError("bpr_grad: empty batch");
  }
  ObjectiveGradient out{ObjectiveId::bpr, 0.0, VectorXd::Zero(model.num_params())};
  const Index d = model.dim();
  auto& g = out.grad;
  for (const auto& t : batch) {
    check_triplet(model, t);
    const auto u = model.user(t.user);
    const auto vi = model.item(t.positive);
    const auto vj = model.item(t.negative);
    const double x = u.dot(vi) - u.dot(vj);
    out.loss += neg_log_sigmoid(x);
    // d/dx of -log sigma(x) is -sigma(-x).
    const double coeff = -sigmoid(-x);
    g.segment(model.user_offset(t.user), d) += coeff * (vi - vj).transpose();
    g.segment(model.item_offset(t.positive), d) += coeff * u.transpose();
    g.segment(model.item_offset(t.negative), d) -= coeff * u.transpose();
  }
  if (model.reg() > 0.0) {
    const auto [users, items] = touched(batch);
    const double lambda = model.reg();
    for (const auto u : users) {
      out.loss += lambda * model.user(u).squaredNorm();
      g.segment(model.user_offset(u), d) += 2.0 * lambda * model.user(u).transpose();
    }
    for (const auto i : items) {
      out.loss += lambda * model.item(i).squaredNorm();
      g.segment(model.item_offset(i), d) += 2.0 * lambda * model.item(i).transpose();
    }
  }
  return out;
}

std::int32_t sample_negative(const InteractionDataset& dataset, Index user, SeededRng& rng) {
  const auto& pos = dataset.items_of(user, Split::train);
  const Index n = dataset.num_items();
  Index n_pos = 0;
  for (std::size_t k = 0; k < pos.size(); ++k) {
    n_pos += (k == 0 || pos[k] != pos[k - 1]) ? 1 : 0;
  }
  if (n_pos >= n) {
    return -1;
  }
  if (2 * n_pos <= n) {
    while (true) {
      const auto j = static_cast<std::int32_t>(rng.uniform_index(n));
      if (!std::binary_search(pos.begin(), pos.end(), j)) {
        return j;
      }
    }
  }
  // Dense users: pick the k-th non-positive directly.
  Index k = rng.uniform_index(n - n_pos);
  for (std::int32_t j = 0; j < n; ++j) {
    if (std::binary_search(pos.begin(), pos.end(), j)) {
      continue;
    }
    if (k-- == 0) {
      return j;
    }
  }
  return -1;
}

TripletBatch sample_negatives(const InteractionDataset& dataset, SeededRng& rng, std::span<const std::int32_t> users) {
  TripletBatch batch;
  batch.reserve(users.size());
  for (const auto u : users) {
    const auto& pos = dataset.items_of(u, Split::train);
    if (pos.empty()) {
      log::warn("user " + std::to_string(u) + " has no train positive; skipped");
      continue;
    }
    const auto i = pos[static_cast<std::size_t>(rng.uniform_index(static_cast<std::int64_t>(pos.size())))];
    const auto j = sample_negative(dataset, u, rng);
    if (j < 0) {
      log::warn("user " + std::to_string(u) + " has every item as a positive; skipped");
      continue;
    }
    batch.push_back({u, i, j});
  }
  return batch;
}

void save_checkpoint(const fs::path& dir, const FactorModel& model, const CheckpointMeta& meta) {
  fs::create_directories(dir);
  text::write_matrix_csv(dir / "user_embeddings.csv", model.user_embeddings(), true);
  text::write_matrix_csv(dir / "item_embeddings.csv", model.item_embeddings(), true);
  std::string kv;
  kv += "d = " + std::to_string(model.dim()) + "\n";
  kv += "reg = " + text::format_exact(model.reg()) + "\n";
  kv += "seed = " + std::to_string(meta.seed) + "\n";
  kv += "epoch = " + std::to_string(meta.epoch) + "\n";
  kv += "users = " + std::to_string(model.num_users()) + "\n";
  kv += "items = " + std::to_string(model.num_items()) + "\n";
  text::write_file(dir / "model.txt", kv);
}

FactorModel load_checkpoint(const fs::path& dir, CheckpointMeta* meta) {
  if (!fs::exists(dir / "model.txt")) {
    throw InputError("checkpoint not found: " + dir.string());
  }
  std::map<std::string, std::string> kv;
  for (const auto& line : text::read_lines(dir / "model.txt")) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      kv[std::string(text::trim(std::string_view(line).substr(0, eq)))] =
          std::string(text::trim(std::string_view(line).substr(eq + 1)));
    }
  }
  const Index d = text::parse_int(kv.at("d"));
  const Index m = text::parse_int(kv.at("users"));
  const Index n = text::parse_int(kv.at("items"));
  FactorModel model(m, n, d, text::parse_double(kv.at("reg")));
  const MatrixXd users = text::read_matrix_csv(dir / "user_embeddings.csv");
  const MatrixXd items = text::read_matrix_csv(dir / "item_embeddings.csv");
  if (users.rows() != m || items.rows() != n || (m > 0 && users.cols() != d) || (n > 0 && items.cols() != d)) {
    throw InputError("checkpoint embedding shapes do not match model.txt");
  }
  VectorXd flat(model.num_params());
  flat.head(m * d) = Eigen::Map<const VectorXd>(users.data(), m * d);
  flat.tail(n * d) = Eigen::Map<const VectorXd>(items.data(), n * d);
  model.set_params(flat);
  if (meta) {
    meta->seed = static_cast<std::uint64_t>(text::parse_int(kv.at("seed")));
    meta->epoch = text::parse_int(kv.at("epoch"));
  }
  return model;
}

}  // namespace moofair
