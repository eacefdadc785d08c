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

#include "moofair/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "moofair/fairness.hpp"
#include "moofair/parallel.hpp"
#include "moofair/smooth_ranking.hpp"
#include "moofair/text.hpp"

namespace moofair {

RecommendationRun RecommendationRun::truncated(Index new_k) const {
  if (new_k < 1 || new_k > k) {
    throw InputError("cannot cut a top-" + std::to_string(k) + " run to " + std::to_string(new_k));
  }
  RecommendationRun out = *this;
  out.k = new_k;
  for (auto& list : out.lists) {
    list.resize(static_cast<std::size_t>(new_k));
  }
  return out;
}

RecommendationRun recommend(const FactorModel& model, const InteractionDataset& dataset, Index k, Split target) {
  if (target == Split::train) {
    throw InputError("recommendations are evaluated on the val or test split");
  }
  if (k < 1 || k > model.num_items()) {
    throw InputError("k must lie in [1, number of items]");
  }
  RecommendationRun run;
  run.k = k;
  for (Index u = 0; u < dataset.num_users(); ++u) {
    if (!dataset.items_of(u, target).empty()) {
      run.users.push_back(static_cast<std::int32_t>(u));
    }
  }
  const auto count = static_cast<Index>(run.users.size());
  run.lists.resize(run.users.size());
  run.relevant.resize(run.users.size());

  parallel_for(count, [&](Index b) {
    const auto u = run.users[static_cast<std::size_t>(b)];
    VectorXd scores = score_all(model, u);
    const auto hide = [&](const std::vector<std::int32_t>& items) {
      for (const auto i : items) {
        scores[i] = -std::numeric_limits<double>::infinity();
      }
    };
    hide(dataset.items_of(u, Split::train));
    if (target == Split::test) {
      hide(dataset.items_of(u, Split::val));
    }
    std::vector<std::int32_t> order(static_cast<std::size_t>(model.num_items()));
    std::iota(order.begin(), order.end(), 0);
    const auto better = [&](std::int32_t a, std::int32_t c) {
      return scores[a] > scores[c] || (scores[a] == scores[c] && a < c);
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), better);
    order.resize(static_cast<std::size_t>(k));
    if (scores[order.back()] == -std::numeric_limits<double>::infinity()) {
      throw InputError("user " + std::to_string(u) + " has fewer than k candidate items");
    }
    run.lists[static_cast<std::size_t>(b)] = std::move(order);
    run.relevant[static_cast<std::size_t>(b)] = dataset.items_of(u, target);
  });
  return run;
}

namespace {

bool contains(const std::vector<std::int32_t>& sorted, std::int32_t item) {
  return std::binary_search(sorted.begin(), sorted.end(), item);
}

void require_users(const RecommendationRun& run) {
  if (run.users.empty()) {
    throw InputError("no evaluated user has a relevant item");
  }
}

}  // namespace

double recall_at_k(const RecommendationRun& run) {
  require_users(run);
  double total = 0.0;
  for (std::size_t b = 0; b < run.users.size(); ++b) {
    Index hits = 0;
    for (const auto i : run.lists[b]) {
      hits += contains(run.relevant[b], i) ? 1 : 0;
    }
    total += double(hits) / double(run.relevant[b].size());
  }
  return total / double(run.users.size());
}

VectorXd ndcg_vector(const RecommendationRun& run, std::size_t b, Index K) {
  if (K < 1 || K > run.k) {
    throw InputError("NDCG vector length must lie in [1, k]");
  }
  VectorXd out(K);
  const auto& list = run.lists[b];
  const auto relevant = static_cast<Index>(run.relevant[b].size());
  double dcg = 0.0;
  double ideal = 0.0;
  for (Index j = 1; j <= K; ++j) {
    if (contains(run.relevant[b], list[static_cast<std::size_t>(j - 1)])) {
      dcg += dcg_discount(double(j));
    }
    if (j <= relevant) {
      ideal += dcg_discount(double(j));
    }
    out[j - 1] = dcg / ideal;
  }
  return out;
}

double ndcg_at_k(const RecommendationRun& run) {
  require_users(run);
  double total = 0.0;
  for (std::size_t b = 0; b < run.users.size(); ++b) {
    total += ndcg_vector(run, b, run.k)[run.k - 1];
  }
  return total / double(run.users.size());
}

std::optional<double> disparity_user(const RecommendationRun& run, const MatrixXd& user_mask, Index K) {
  std::vector<VectorXd> means;
  for (Index g = 0; g < user_mask.rows(); ++g) {
    VectorXd sum = VectorXd::Zero(K);
    Index count = 0;
    for (std::size_t b = 0; b < run.users.size(); ++b) {
      if (user_mask(g, run.users[b]) != 0.0) {
        sum += ndcg_vector(run, b, K);
        ++count;
      }
    }
    if (count > 0) {
      means.push_back(sum / double(count));
    }
  }
  if (means.size() < 2) {
    return std::nullopt;
  }
  return consumer_group_fairness(means);
}

double disparity_item(const RecommendationRun& run, const MatrixXd& item_group_mask, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InputError("gamma must lie in (0, 1)");
  }
  VectorXd raw = VectorXd::Zero(item_group_mask.rows());
  for (const auto& list : run.lists) {
    double weight = 1.0;
    for (const auto i : list) {
      weight *= gamma;
      raw += weight * item_group_mask.col(i);
    }
  }
  const double total = raw.sum();
  if (!(total > 0.0)) {
    throw InputError("recommended items carry no group exposure");
  }
  const VectorXd flat = VectorXd::Constant(raw.size(), 1.0 / double(raw.size()));
  return (raw / total - flat).squaredNorm();
}

std::optional<double> objective_disparity(ObjectiveId objective, const RecommendationRun& run,
                                          const GroupMaskSet& masks, double gamma) {
  switch (objective) {
    case ObjectiveId::gender:
      return masks.gender ? disparity_user(run, *masks.gender, run.k) : std::nullopt;
    case ObjectiveId::age:
      return masks.age ? disparity_user(run, *masks.age, run.k) : std::nullopt;
    case ObjectiveId::popularity:
      return disparity_item(run, masks.popularity, gamma);
    case ObjectiveId::genre:
      return masks.genre ? std::optional<double>(disparity_item(run, *masks.genre, gamma)) : std::nullopt;
    case ObjectiveId::bpr:
      break;
  }
  return std::nullopt;
}

double gini_index(const VectorXd& exposure) {
  if (exposure.size() == 0 || (exposure.array() < 0.0).any()) {
    throw InputError("Gini needs a non-empty, non-negative exposure vector");
  }
  const double total = exposure.sum();
  if (!(total > 0.0)) {
    throw InputError("Gini is undefined for all-zero exposure");
  }
  std::vector<double> sorted(exposure.data(), exposure.data() + exposure.size());
  std::sort(sorted.begin(), sorted.end());
  const auto n = double(sorted.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    acc += (2.0 * double(i + 1) - n - 1.0) * sorted[i];
  }
  return acc / (n * total);
}

VectorXd item_exposure(const RecommendationRun& run, Index num_items, bool recommended_only) {
  VectorXd counts = VectorXd::Zero(num_items);
  for (const auto& list : run.lists) {
    for (const auto i : list) {
      counts[i] += 1.0;
    }
  }
  if (!recommended_only) {
    return counts;
  }
  std::vector<double> kept;
  for (Index i = 0; i < num_items; ++i) {
    if (counts[i] > 0.0) {
      kept.push_back(counts[i]);
    }
  }
  return Eigen::Map<const VectorXd>(kept.data(), static_cast<Index>(kept.size()));
}

double gini_index(const RecommendationRun& run, Index num_items, bool recommended_only) {
  return gini_index(item_exposure(run, num_items, recommended_only));
}

double popularity_rate(const RecommendationRun& run, const MatrixXd& popularity_mask) {
  Index slots = 0;
  Index popular = 0;
  for (const auto& list : run.lists) {
    for (const auto i : list) {
      ++slots;
      popular += popularity_mask(kMostPopularGroup, i) != 0.0 ? 1 : 0;
    }
  }
  if (slots == 0) {
    throw InputError("popularity rate of an empty run");
  }
  return double(popular) / double(slots);
}

double simpson_diversity(const RecommendationRun& run, const MatrixXd& group_mask) {
  VectorXd counts = VectorXd::Zero(group_mask.rows());
  for (const auto& list : run.lists) {
    for (const auto i : list) {
      counts += group_mask.col(i);
    }
  }
  const double total = counts.sum();
  if (total < 2.0) {
    throw InputError("Simpson diversity needs at least two recommended slots");
  }
  const double same = (counts.array() * (counts.array() - 1.0)).sum();
  return 1.0 - same / (total * (total - 1.0));
}

std::vector<MetricsRow> evaluate(const FactorModel& model, const InteractionDataset& dataset,
                                 const GroupMaskSet& masks, const EvalOptions& options) {
  if (options.k_values.empty()) {
    throw InputError("no k requested");
  }
  const Index k_max = *std::max_element(options.k_values.begin(), options.k_values.end());
  const RecommendationRun full = recommend(model, dataset, k_max, Split::test);

  const std::optional<MatrixXd>& user_mask =
      options.user_grouping == UserGrouping::gender ? masks.gender : masks.age;
  const MatrixXd* diversity_mask = &masks.popularity;
  if (options.diversity_grouping == DiversityGrouping::genre) {
    if (!masks.genre) {
      throw InputError("genre diversity requested but the dataset has no genres");
    }
    diversity_mask = &*masks.genre;
  }

  std::vector<MetricsRow> rows;
  for (const Index k : options.k_values) {
    const RecommendationRun run = k == k_max ? full : full.truncated(k);
    MetricsRow row;
    row.model = options.model_name;
    row.k = k;
    row.recall = recall_at_k(run);
    row.ndcg = ndcg_at_k(run);
    if (user_mask) {
      row.disparity_u = disparity_user(run, *user_mask, k);
    }
    row.disparity_i = disparity_item(run, masks.popularity, options.gamma);
    row.gini = gini_index(run, model.num_items(), options.gini_recommended_only);
    row.popularity_rate = popularity_rate(run, masks.popularity);
    row.diversity = simpson_diversity(run, *diversity_mask);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows, bool header) {
  std::string out;
  if (header) {
    out += "model,k,recall,ndcg,disparity_u,disparity_i,gini,popularity_rate,diversity\n";
  }
  for (const auto& r : rows) {
    out += r.model + "," + std::to_string(r.k) + "," + text::format_report(r.recall) + "," +
           text::format_report(r.ndcg) + "," + (r.disparity_u ? text::format_report(*r.disparity_u) : "nan") + "," +
           text::format_report(r.disparity_i) + "," + text::format_report(r.gini) + "," +
           text::format_report(r.popularity_rate) + "," + text::format_report(r.diversity) + "\n";
  }
  return out;
}

}  // namespace moofair
