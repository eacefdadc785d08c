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

// Top-k evaluation: accuracy (Recall, NDCG), group fairness (user and item
// disparity) and catalog-level measures (Gini, popularity rate, Simpson
// diversity).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "moofair/bprmf.hpp"
#include "moofair/data.hpp"

namespace moofair {

// Top-k lists of the users that have at least one relevant item in the
// target split.
struct RecommendationRun {
  Index k = 0;
  std::vector<std::int32_t> users;
  std::vector<std::vector<std::int32_t>> lists;     // ranked, best first
  std::vector<std::vector<std::int32_t>> relevant;  // sorted

  // The same run cut to its first `k` positions.
  RecommendationRun truncated(Index k) const;
};

// Recommends the k highest-scoring items per user, ties to the lower item id.
// For target = test the train and val positives are excluded, for
// target = val only the train positives.
RecommendationRun recommend(const FactorModel& model, const InteractionDataset& dataset, Index k,
                            Split target = Split::test);

double recall_at_k(const RecommendationRun& run);
double ndcg_at_k(const RecommendationRun& run);

// Exact NDCG@1..K of user row b of the run (K <= run.k).
VectorXd ndcg_vector(const RecommendationRun& run, std::size_t b, Index K);

// Pairwise group distance of the per-group mean NDCG@1..K vectors. nullopt
// when fewer than two groups of `user_mask` are among the evaluated users.
std::optional<double> disparity_user(const RecommendationRun& run, const MatrixXd& user_mask, Index K);

// Squared distance between the normalized group exposure of all recommended
// slots (gamma^position, positions from 1) and the flat distribution.
double disparity_item(const RecommendationRun& run, const MatrixXd& item_group_mask, double gamma);

// The evaluation disparity a fairness objective targets: Disparity_u over
// the gender or age mask at the run's k, Disparity_i over the popularity or
// genre mask. nullopt for bpr or when the mask is absent or too sparse.
std::optional<double> objective_disparity(ObjectiveId objective, const RecommendationRun& run,
                                          const GroupMaskSet& masks, double gamma);

// Gini index of a non-negative exposure vector, O(n log n).
double gini_index(const VectorXd& exposure);
// Occurrence counts of every catalog item in the lists; with
// `recommended_only` the items never recommended are dropped.
VectorXd item_exposure(const RecommendationRun& run, Index num_items, bool recommended_only = false);
double gini_index(const RecommendationRun& run, Index num_items, bool recommended_only = false);

// Share of recommended slots taken by the most popular group.
double popularity_rate(const RecommendationRun& run, const MatrixXd& popularity_mask);

// 1 - sum_g n_g (n_g - 1) / (N (N - 1)) over the slot counts n_g of each
// group, N = sum_g n_g.
double simpson_diversity(const RecommendationRun& run, const MatrixXd& group_mask);

enum class UserGrouping { gender, age };
enum class DiversityGrouping { popularity, genre };

struct EvalOptions {
  std::string model_name = "model";
  std::vector<Index> k_values{10, 20};
  UserGrouping user_grouping = UserGrouping::gender;
  DiversityGrouping diversity_grouping = DiversityGrouping::popularity;
  bool gini_recommended_only = false;
  double gamma = 0.5;
};

struct MetricsRow {
  std::string model;
  Index k = 0;
  double recall = 0.0;
  double ndcg = 0.0;
  std::optional<double> disparity_u;
  double disparity_i = 0.0;
  double gini = 0.0;
  double popularity_rate = 0.0;
  double diversity = 0.0;
};

std::vector<MetricsRow> evaluate(const FactorModel& model, const InteractionDataset& dataset,
                                 const GroupMaskSet& masks, const EvalOptions& options = {});

// model,k,recall,ndcg,disparity_u,disparity_i,gini,popularity_rate,diversity
// with 6 significant digits; an absent disparity is written as "nan".
std::string metrics_csv(const std::vector<MetricsRow>& rows, bool header = true);

}  // namespace moofair
