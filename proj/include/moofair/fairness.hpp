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

// Differentiable group-fairness objectives.
//
// Consumer side (gender, age): per-user NDCG@1..K vectors from smooth ranks,
// averaged per user group, penalized by the mean pairwise squared distance
// between group averages.
// Producer side (popularity, genre): exposure gamma^rank of each user's
// relevant items under Gumbel-perturbed Plackett-Luce probabilities, routed
// to item groups, normalized and compared with a target distribution.
//
// All randomness of a batch (candidate negatives, the producer-side relevant
// subset, Gumbel noise) is drawn once into a BatchContext so that loss and
// gradient are deterministic functions of the parameters.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "moofair/bprmf.hpp"
#include "moofair/data.hpp"
#include "moofair/smooth_ranking.hpp"

namespace moofair {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct NdcgVectorSpec {
  Index K = 50;
  Index candidate_negatives = 200;
};

struct ExposureTarget {
  VectorXd distribution;

  static ExposureTarget flat(Index groups);
  void validate(Index groups) const;
};

struct UserCandidates {
  std::int32_t user = 0;
  // Train positives first (num_relevant of them), then sampled non-positives.
  std::vector<std::int32_t> items;
  Index num_relevant = 0;
  // Positions (< num_relevant) of the relevant items used on the producer side.
  std::vector<Index> producer_relevant;
  // Frozen Gumbel noise, one draw per candidate.
  VectorXd noise;
};

struct BatchContext {
  std::vector<UserCandidates> users;
};

// Draws candidates and noise for the distinct users of a batch. n_r_cap
// bounds the producer-side relevant items per user. With `with_noise` false
// the Gumbel noise is zero.
BatchContext make_batch_context(const InteractionDataset& dataset, std::span<const std::int32_t> users,
                                Index candidate_negatives, Index n_r_cap, SeededRng& rng, bool with_noise = true);

// Distinct users of a triplet batch in first-appearance order.
std::vector<std::int32_t> batch_users(const TripletBatch& batch);

// (1 / C(n, 2)) * sum_{i<j} ||s_i - s_j||^2 over n >= 2 group representations.
double consumer_group_fairness(std::span<const VectorXd> groups);
// Gradient with respect to each group representation.
std::vector<VectorXd> consumer_group_fairness_grad(std::span<const VectorXd> groups);

enum class RankMode { smooth, exact };

// b x K matrix: row u holds NDCG@1..K of user u's relevant items within its
// candidate set. Smooth mode uses pairwise smooth ranks and a soft top-k
// indicator sigma(steepness * (k + 0.5 - r)); exact mode uses sort ranks.
MatrixXd build_ndcg_matrix(const FactorModel& model, const BatchContext& ctx, Index K, double steepness,
                           RankMode mode);

// Accumulates into `grad` the parameter gradient of sum(upstream .* G) for
// the smooth-mode matrix G.
void ndcg_matrix_backward(const FactorModel& model, const BatchContext& ctx, Index K, double steepness,
                          const MatrixXd& upstream, VectorXd& grad);

// Consumer loss over the groups of `user_mask` (rows = groups, cols = users)
// present among the batch rows of G. Returns nullopt, with a warning, when
// fewer than `min_groups` groups are present. `batch_user_ids[b]` is the
// user of row b.
struct ConsumerLoss {
  double loss = 0.0;
  // d(loss)/dG, same shape as G.
  MatrixXd grad_g;
  std::vector<Index> present_groups;
};

std::optional<ConsumerLoss> consumer_mask_loss(const MatrixXd& G, const MatrixXd& user_mask,
                                               std::span<const std::int32_t> batch_user_ids, Index min_groups,
                                               const char* name);

std::optional<double> gender_fairness_loss(const MatrixXd& G, const MatrixXd& gender_mask,
                                           std::span<const std::int32_t> batch_user_ids);
std::optional<double> age_fairness_loss(const MatrixXd& G, const MatrixXd& age_mask,
                                        std::span<const std::int32_t> batch_user_ids);

// Normalized group exposure epsilon of a batch, plus what the backward pass needs.
struct ProducerForward {
  VectorXd raw_exposure;  // epsilon before normalization
  VectorXd exposure;      // epsilon, a distribution over groups
  double loss = 0.0;
};

std::optional<ProducerForward> producer_forward(const FactorModel& model, const BatchContext& ctx,
                                                const MatrixXd& item_group_mask, const SmoothRankConfig& config,
                                                const ExposureTarget& target);

// ||epsilon - epsilon*||^2; nullopt for an empty batch or zero exposure.
std::optional<double> producer_fairness_loss(const FactorModel& model, const BatchContext& ctx,
                                             const MatrixXd& item_group_mask, const SmoothRankConfig& config,
                                             const ExposureTarget& target);

struct FairnessSettings {
  NdcgVectorSpec ndcg;
  SmoothRankConfig rank;
  // Target exposure over the rows of the producer mask; flat when empty.
  std::optional<ExposureTarget> target;
};

// Loss and analytic parameter gradient of one fairness objective. nullopt
// when the batch cannot support the objective (warning emitted). Throws
// ConfigError if the required mask is missing.
std::optional<ObjectiveGradient> fairness_grad(ObjectiveId objective, const FactorModel& model,
                                               const BatchContext& ctx, const GroupMaskSet& masks,
                                               const FairnessSettings& settings);

// Loss only, same conventions as fairness_grad.
std::optional<double> fairness_loss(ObjectiveId objective, const FactorModel& model, const BatchContext& ctx,
                                    const GroupMaskSet& masks, const FairnessSettings& settings);

}  // namespace moofair
