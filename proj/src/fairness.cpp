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

#include "moofair/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "moofair/log.hpp"

namespace moofair {

ExposureTarget ExposureTarget::flat(Index groups) {
  if (groups < 1) {
    throw InputError("exposure target needs at least one group");
  }
  return {VectorXd::Constant(groups, 1.0 / double(groups))};
}

void ExposureTarget::validate(Index groups) const {
  if (distribution.size() != groups) {
    throw ConfigError("exposure target has " + std::to_string(distribution.size()) + " entries, mask has " +
                      std::to_string(groups) + " groups");
  }
  if ((distribution.array() < 0.0).any() || std::abs(distribution.sum() - 1.0) > 1e-9) {
    throw ConfigError("exposure target must be non-negative and sum to 1");
  }
}

std::vector<std::int32_t> batch_users(const TripletBatch& batch) {
  std::vector<std::int32_t> out;
  std::vector<std::int32_t> seen;
  for (const auto& t : batch) {
    const auto it = std::lower_bound(seen.begin(), seen.end(), t.user);
    if (it == seen.end() || *it != t.user) {
      seen.insert(it, t.user);
      out.push_back(t.user);
    }
  }
  return out;
}

BatchContext make_batch_context(const InteractionDataset& dataset, std::span<const std::int32_t> users,
                                Index candidate_negatives, Index n_r_cap, SeededRng& rng, bool with_noise) {
  BatchContext ctx;
  ctx.users.reserve(users.size());
  const Index n = dataset.num_items();
  for (const auto u : users) {
    UserCandidates c;
    c.user = u;
    const auto& pos = dataset.items_of(u, Split::train);
    c.items.assign(pos.begin(), pos.end());
    c.items.erase(std::unique(c.items.begin(), c.items.end()), c.items.end());
    c.num_relevant = static_cast<Index>(c.items.size());

    const Index available = n - c.num_relevant;
    const Index wanted = std::min(candidate_negatives, available);
    if (wanted > 0) {
      std::vector<std::int32_t> negatives;
      if (2 * wanted <= available) {
        std::vector<std::int32_t> taken;
        while (static_cast<Index>(negatives.size()) < wanted) {
          const auto j = static_cast<std::int32_t>(rng.uniform_index(n));
          if (std::binary_search(pos.begin(), pos.end(), j)) {
            continue;
          }
          const auto it = std::lower_bound(taken.begin(), taken.end(), j);
          if (it != taken.end() && *it == j) {
            continue;
          }
          taken.insert(it, j);
          negatives.push_back(j);
        }
      } else {
        std::vector<std::int32_t> pool;
        for (std::int32_t j = 0; j < n; ++j) {
          if (!std::binary_search(pos.begin(), pos.end(), j)) {
            pool.push_back(j);
          }
        }
        for (Index k = 0; k < wanted; ++k) {
          const auto pick = k + rng.uniform_index(static_cast<Index>(pool.size()) - k);
          std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
        }
        negatives.assign(pool.begin(), pool.begin() + wanted);
      }
      c.items.insert(c.items.end(), negatives.begin(), negatives.end());
    }

    std::vector<Index> order(static_cast<std::size_t>(c.num_relevant));
    std::iota(order.begin(), order.end(), Index{0});
    const Index keep = std::min(n_r_cap, c.num_relevant);
    for (Index k = 0; k < keep; ++k) {
      const auto pick = k + rng.uniform_index(c.num_relevant - k);
      std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick)]);
    }
    c.producer_relevant.assign(order.begin(), order.begin() + keep);
    std::sort(c.producer_relevant.begin(), c.producer_relevant.end());

    const auto size = static_cast<Index>(c.items.size());
    c.noise = (with_noise && size > 0) ? sample_gumbel(rng, size) : VectorXd::Zero(size);
    ctx.users.push_back(std::move(c));
  }
  return ctx;
}

double consumer_group_fairness(std::span<const VectorXd> groups) {
  const auto n = groups.size();
  if (n < 2) {
    throw ConfigError("consumer group fairness needs at least two groups");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      require_same_size(groups[i].size(), groups[j].size(), "consumer_group_fairness");
      total += (groups[i] - groups[j]).squaredNorm();
    }
  }
  const double pairs = double(n) * double(n - 1) / 2.0;
  return total / pairs;
}

std::vector<VectorXd> consumer_group_fairness_grad(std::span<const VectorXd> groups) {
  const auto n = groups.size();
  if (n < 2) {
    throw ConfigError("consumer group fairness needs at least two groups");
  }
  const double pairs = double(n) * double(n - 1) / 2.0;
  std::vector<VectorXd> grads(n, VectorXd::Zero(groups[0].size()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const VectorXd diff = (2.0 / pairs) * (groups[i] - groups[j]);
      grads[i] += diff;
      grads[j] -= diff;
    }
  }
  return grads;
}

namespace {

// Ideal DCG@k for k = 1..K with `relevant` binary hits.
VectorXd ideal_dcg(Index relevant, Index K) {
  VectorXd ideal(K);
  double acc = 0.0;
  for (Index k = 1; k <= K; ++k) {
    if (k <= relevant) {
      acc += dcg_discount(double(k));
    }
    ideal[k - 1] = acc;
  }
  return ideal;
}

std::vector<Index> leading_rows(Index count) {
  std::vector<Index> rows(static_cast<std::size_t>(count));
  std::iota(rows.begin(), rows.end(), Index{0});
  return rows;
}

struct NdcgUserCache {
  VectorXd scores;
  VectorXd ranks;  // of the relevant rows
};

NdcgUserCache ndcg_user_forward(const FactorModel& model, const UserCandidates& c, double steepness, RankMode mode) {
  NdcgUserCache cache;
  cache.scores = score(model, c.user, c.items);
  if (mode == RankMode::exact) {
    cache.ranks = hard_ranks(cache.scores).head(c.num_relevant);
  } else {
    const auto rows = leading_rows(c.num_relevant);
    cache.ranks = pairwise_smooth_rank(cache.scores, std::span<const Index>(rows), steepness);
  }
  return cache;
}

// Positions k + 0.5 for k = 1..K.
Eigen::ArrayXd cutoffs(Index K) { return Eigen::ArrayXd::LinSpaced(K, 1.5, double(K) + 0.5); }

void ndcg_row(const NdcgUserCache& cache, Index num_relevant, Index K, double steepness, RankMode mode,
              Eigen::Ref<Eigen::RowVectorXd> row) {
  const Eigen::ArrayXd ideal = ideal_dcg(num_relevant, K).array();
  const Eigen::ArrayXd cut = cutoffs(K);
  Eigen::ArrayXd dcg = Eigen::ArrayXd::Zero(K);
  for (Index i = 0; i < num_relevant; ++i) {
    const double r = cache.ranks[i];
    const double disc = dcg_discount(r);
    if (mode == RankMode::exact) {
      dcg += disc * (cut > r).cast<double>();
    } else {
      dcg += disc * logistic_array(steepness * (cut - r));
    }
  }
  row = (dcg / ideal).matrix().transpose();
}

void ndcg_user_backward(const FactorModel& model, const UserCandidates& c, const NdcgUserCache& cache, Index K,
                        double steepness, const Eigen::Ref<const Eigen::RowVectorXd>& upstream, VectorXd& grad) {
  const Index nr = c.num_relevant;
  if (nr == 0 || upstream.isZero(0.0)) {
    return;
  }
  const Eigen::ArrayXd weight = upstream.transpose().array() / ideal_dcg(nr, K).array();
  const Eigen::ArrayXd cut = cutoffs(K);
  VectorXd grad_ranks(nr);
  for (Index i = 0; i < nr; ++i) {
    const double r = cache.ranks[i];
    const Eigen::ArrayXd x = steepness * (cut - r);
    const double d_indicator = -steepness * (weight * logistic_derivative_array(x)).sum();
    const double indicator = (weight * logistic_array(x)).sum();
    grad_ranks[i] = d_indicator * dcg_discount(r) + indicator * dcg_discount_derivative(r);
  }
  VectorXd grad_scores = VectorXd::Zero(cache.scores.size());
  const auto rows = leading_rows(nr);
  pairwise_smooth_rank_vjp(cache.scores, std::span<const Index>(rows), steepness, grad_ranks, grad_scores);

  const Index d = model.dim();
  const auto u = model.user(c.user);
  auto g_user = grad.segment(model.user_offset(c.user), d);
  for (std::size_t k = 0; k < c.items.size(); ++k) {
    const double gs = grad_scores[static_cast<Index>(k)];
    if (gs == 0.0) {
      continue;
    }
    g_user += gs * model.item(c.items[k]).transpose();
    grad.segment(model.item_offset(c.items[k]), d) += gs * u.transpose();
  }
}

std::vector<std::int32_t> context_users(const BatchContext& ctx) {
  std::vector<std::int32_t> ids;
  ids.reserve(ctx.users.size());
  for (const auto& c : ctx.users) {
    ids.push_back(c.user);
  }
  return ids;
}

}  // namespace

MatrixXd build_ndcg_matrix(const FactorModel& model, const BatchContext& ctx, Index K, double steepness,
                           RankMode mode) {
  if (K < 1) {
    throw InputError("NDCG vector length K must be >= 1");
  }
  MatrixXd G = MatrixXd::Zero(static_cast<Index>(ctx.users.size()), K);
  for (std::size_t b = 0; b < ctx.users.size(); ++b) {
    const auto& c = ctx.users[b];
    if (c.num_relevant == 0) {
      continue;
    }
    const auto cache = ndcg_user_forward(model, c, steepness, mode);
    ndcg_row(cache, c.num_relevant, K, steepness, mode, G.row(static_cast<Index>(b)));
  }
  return G;
}

void ndcg_matrix_backward(const FactorModel& model, const BatchContext& ctx, Index K, double steepness,
                          const MatrixXd& upstream, VectorXd& grad) {
  for (std::size_t b = 0; b < ctx.users.size(); ++b) {
    const auto& c = ctx.users[b];
    if (c.num_relevant == 0) {
      continue;
    }
    const auto cache = ndcg_user_forward(model, c, steepness, RankMode::smooth);
    ndcg_user_backward(model, c, cache, K, steepness, upstream.row(static_cast<Index>(b)), grad);
  }
}

std::optional<ConsumerLoss> consumer_mask_loss(const MatrixXd& G, const MatrixXd& user_mask,
                                               std::span<const std::int32_t> batch_user_ids, Index min_groups,
                                               const char* name) {
  require_same_size(G.rows(), static_cast<Index>(batch_user_ids.size()), "consumer_mask_loss");
  const Index groups = user_mask.rows();
  std::vector<VectorXd> means;
  std::vector<Index> counts;
  ConsumerLoss out;
  for (Index g = 0; g < groups; ++g) {
    VectorXd sum = VectorXd::Zero(G.cols());
    Index count = 0;
    for (std::size_t b = 0; b < batch_user_ids.size(); ++b) {
      const auto u = batch_user_ids[b];
      // Users without relevant items have all-zero rows and are not counted.
      if (user_mask(g, u) != 0.0 && !G.row(static_cast<Index>(b)).isZero(0.0)) {
        sum += G.row(static_cast<Index>(b)).transpose();
        ++count;
      }
    }
    if (count > 0) {
      means.push_back(sum / double(count));
      counts.push_back(count);
      out.present_groups.push_back(g);
    }
  }
  if (static_cast<Index>(means.size()) < std::max<Index>(min_groups, 2)) {
    log::warn(std::string(name) + " fairness skipped for this batch: only " + std::to_string(means.size()) +
              " group(s) present");
    return std::nullopt;
  }
  out.loss = consumer_group_fairness(means);
  const auto grads = consumer_group_fairness_grad(means);
  out.grad_g = MatrixXd::Zero(G.rows(), G.cols());
  for (std::size_t k = 0; k < out.present_groups.size(); ++k) {
    const Index g = out.present_groups[k];
    const VectorXd per_user = grads[k] / double(counts[k]);
    for (std::size_t b = 0; b < batch_user_ids.size(); ++b) {
      if (user_mask(g, batch_user_ids[b]) != 0.0 && !G.row(static_cast<Index>(b)).isZero(0.0)) {
        out.grad_g.row(static_cast<Index>(b)) += per_user.transpose();
      }
    }
  }
  return out;
}

std::optional<double> gender_fairness_loss(const MatrixXd& G, const MatrixXd& gender_mask,
                                           std::span<const std::int32_t> batch_user_ids) {
  const auto r = consumer_mask_loss(G, gender_mask, batch_user_ids, gender_mask.rows(), "gender");
  return r ? std::optional<double>(r->loss) : std::nullopt;
}

std::optional<double> age_fairness_loss(const MatrixXd& G, const MatrixXd& age_mask,
                                        std::span<const std::int32_t> batch_user_ids) {
  const auto r = consumer_mask_loss(G, age_mask, batch_user_ids, 2, "age");
  return r ? std::optional<double>(r->loss) : std::nullopt;
}

namespace {

struct ProducerUserCache {
  VectorXd probs;
  VectorXd ranks;     // of producer_relevant rows, offset not applied
  VectorXd exposure;  // gamma^(rank + offset)
};

ProducerUserCache producer_user_forward(const FactorModel& model, const UserCandidates& c,
                                        const SmoothRankConfig& config) {
  ProducerUserCache cache;
  const VectorXd logits = score(model, c.user, c.items);
  cache.probs = gumbel_perturb(logits, c.noise);
  cache.ranks = temperature_smooth_rank(cache.probs, std::span<const Index>(c.producer_relevant), config.temperature);
  cache.exposure = exposure(cache.ranks, config.patience, config.rank_offset);
  return cache;
}

}  // namespace

namespace {

std::optional<ProducerForward> producer_forward_cached(const FactorModel& model, const BatchContext& ctx,
                                                       const MatrixXd& item_group_mask, const SmoothRankConfig& config,
                                                       const ExposureTarget& target,
                                                       std::vector<ProducerUserCache>* caches) {
  config.validate();
  target.validate(item_group_mask.rows());
  if (item_group_mask.cols() != model.num_items()) {
    throw DimensionError("item group mask must cover every item");
  }
  ProducerForward out;
  out.raw_exposure = VectorXd::Zero(item_group_mask.rows());
  if (caches) {
    caches->assign(ctx.users.size(), {});
  }
  bool any = false;
  for (std::size_t b = 0; b < ctx.users.size(); ++b) {
    const auto& c = ctx.users[b];
    if (c.producer_relevant.empty()) {
      continue;
    }
    any = true;
    auto cache = producer_user_forward(model, c, config);
    for (std::size_t k = 0; k < c.producer_relevant.size(); ++k) {
      const auto item = c.items[static_cast<std::size_t>(c.producer_relevant[k])];
      out.raw_exposure += cache.exposure[static_cast<Index>(k)] * item_group_mask.col(item);
    }
    if (caches) {
      (*caches)[b] = std::move(cache);
    }
  }
  const double total = out.raw_exposure.sum();
  if (!any || !(total > 0.0)) {
    log::warn("producer fairness skipped for this batch: no routed exposure");
    return std::nullopt;
  }
  out.exposure = out.raw_exposure / total;
  out.loss = (out.exposure - target.distribution).squaredNorm();
  return out;
}

}  // namespace

std::optional<ProducerForward> producer_forward(const FactorModel& model, const BatchContext& ctx,
                                                const MatrixXd& item_group_mask, const SmoothRankConfig& config,
                                                const ExposureTarget& target) {
  return producer_forward_cached(model, ctx, item_group_mask, config, target, nullptr);
}

std::optional<double> producer_fairness_loss(const FactorModel& model, const BatchContext& ctx,
                                             const MatrixXd& item_group_mask, const SmoothRankConfig& config,
                                             const ExposureTarget& target) {
  const auto f = producer_forward(model, ctx, item_group_mask, config, target);
  return f ? std::optional<double>(f->loss) : std::nullopt;
}

namespace {

void producer_backward(const FactorModel& model, const BatchContext& ctx, const MatrixXd& item_group_mask,
                       const SmoothRankConfig& config, const ExposureTarget& target, const ProducerForward& fwd,
                       const std::vector<ProducerUserCache>& caches, VectorXd& grad) {
  const double total = fwd.raw_exposure.sum();
  const VectorXd grad_eps = 2.0 * (fwd.exposure - target.distribution);
  const VectorXd grad_raw = (grad_eps.array() - grad_eps.dot(fwd.exposure)).matrix() / total;
  const double log_gamma = std::log(config.patience);
  const Index d = model.dim();

  for (std::size_t b = 0; b < ctx.users.size(); ++b) {
    const auto& c = ctx.users[b];
    if (c.producer_relevant.empty()) {
      continue;
    }
    const auto& cache = caches[b];
    const auto nr = static_cast<Index>(c.producer_relevant.size());
    VectorXd grad_ranks(nr);
    for (Index k = 0; k < nr; ++k) {
      const auto item = c.items[static_cast<std::size_t>(c.producer_relevant[static_cast<std::size_t>(k)])];
      grad_ranks[k] = item_group_mask.col(item).dot(grad_raw) * cache.exposure[k] * log_gamma;
    }
    VectorXd grad_probs = VectorXd::Zero(cache.probs.size());
    temperature_smooth_rank_vjp(cache.probs, std::span<const Index>(c.producer_relevant), config.temperature,
                                grad_ranks, grad_probs);
    const VectorXd grad_logits = pl_probs_vjp(cache.probs, grad_probs);

    const auto u = model.user(c.user);
    auto g_user = grad.segment(model.user_offset(c.user), d);
    for (std::size_t k = 0; k < c.items.size(); ++k) {
      const double gl = grad_logits[static_cast<Index>(k)];
      if (gl == 0.0) {
        continue;
      }
      g_user += gl * model.item(c.items[k]).transpose();
      grad.segment(model.item_offset(c.items[k]), d) += gl * u.transpose();
    }
  }
}

const MatrixXd& require_mask(const std::optional<MatrixXd>& mask, ObjectiveId objective) {
  if (!mask) {
    throw ConfigError(std::string(objective_name(objective)) + " objective needs attributes the dataset lacks");
  }
  return *mask;
}

const MatrixXd& producer_mask(ObjectiveId objective, const GroupMaskSet& masks) {
  return objective == ObjectiveId::popularity ? masks.popularity : require_mask(masks.genre, objective);
}

const MatrixXd& consumer_mask(ObjectiveId objective, const GroupMaskSet& masks) {
  return objective == ObjectiveId::gender ? require_mask(masks.gender, objective) : require_mask(masks.age, objective);
}

bool is_consumer(ObjectiveId objective) {
  return objective == ObjectiveId::gender || objective == ObjectiveId::age;
}

}  // namespace

std::optional<ObjectiveGradient> fairness_grad(ObjectiveId objective, const FactorModel& model,
                                               const BatchContext& ctx, const GroupMaskSet& masks,
                                               const FairnessSettings& settings) {
  if (objective == ObjectiveId::bpr) {
    throw ConfigError("bpr is not a fairness objective");
  }
  ObjectiveGradient out{objective, 0.0, VectorXd::Zero(model.num_params())};

  if (is_consumer(objective)) {
    const MatrixXd& mask = consumer_mask(objective, masks);
    const Index K = settings.ndcg.K;
    const double beta = settings.rank.steepness;
    std::vector<NdcgUserCache> caches(ctx.users.size());
    MatrixXd G = MatrixXd::Zero(static_cast<Index>(ctx.users.size()), K);
    for (std::size_t b = 0; b < ctx.users.size(); ++b) {
      const auto& c = ctx.users[b];
      if (c.num_relevant == 0) {
        continue;
      }
      caches[b] = ndcg_user_forward(model, c, beta, RankMode::smooth);
      ndcg_row(caches[b], c.num_relevant, K, beta, RankMode::smooth, G.row(static_cast<Index>(b)));
    }
    const auto ids = context_users(ctx);
    const Index min_groups = objective == ObjectiveId::gender ? mask.rows() : 2;
    const auto loss = consumer_mask_loss(G, mask, ids, min_groups, objective == ObjectiveId::gender ? "gender" : "age");
    if (!loss) {
      return std::nullopt;
    }
    out.loss = loss->loss;
    for (std::size_t b = 0; b < ctx.users.size(); ++b) {
      if (ctx.users[b].num_relevant > 0) {
        ndcg_user_backward(model, ctx.users[b], caches[b], K, beta, loss->grad_g.row(static_cast<Index>(b)),
                           out.grad);
      }
    }
    return out;
  }

  const MatrixXd& mask = producer_mask(objective, masks);
  const ExposureTarget target = settings.target ? *settings.target : ExposureTarget::flat(mask.rows());
  std::vector<ProducerUserCache> caches;
  const auto fwd = producer_forward_cached(model, ctx, mask, settings.rank, target, &caches);
  if (!fwd) {
    return std::nullopt;
  }
  out.loss = fwd->loss;
  producer_backward(model, ctx, mask, settings.rank, target, *fwd, caches, out.grad);
  return out;
}

std::optional<double> fairness_loss(ObjectiveId objective, const FactorModel& model, const BatchContext& ctx,
                                    const GroupMaskSet& masks, const FairnessSettings& settings) {
  if (objective == ObjectiveId::bpr) {
    throw ConfigError("bpr is not a fairness objective");
  }
  if (is_consumer(objective)) {
    const MatrixXd& mask = consumer_mask(objective, masks);
    const MatrixXd G = build_ndcg_matrix(model, ctx, settings.ndcg.K, settings.rank.steepness, RankMode::smooth);
    const auto ids = context_users(ctx);
    return objective == ObjectiveId::gender ? gender_fairness_loss(G, mask, ids) : age_fairness_loss(G, mask, ids);
  }
  const MatrixXd& mask = producer_mask(objective, masks);
  const ExposureTarget target = settings.target ? *settings.target : ExposureTarget::flat(mask.rows());
  return producer_fairness_loss(model, ctx, mask, settings.rank, target);
}

}  // namespace moofair
