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

// Small hand-built datasets shared by the unit and acceptance tests.

#include <algorithm>
#include <functional>
#include <vector>

#include "moofair/bprmf.hpp"
#include "moofair/data.hpp"

namespace moofair::testing {

// 5 users x 8 items. Every user has train, val and test items, users
// alternate female/male, ages span four groups and items carry three genres.
inline InteractionDataset tiny_dataset() {
  const std::vector<std::vector<int>> train = {{0, 1, 2}, {0, 3, 4, 5}, {1, 2, 6}, {0, 2, 5, 7}, {3, 6}};
  const std::vector<int> val = {3, 6, 0, 1, 0};
  const std::vector<int> test = {4, 7, 7, 6, 5};
  std::vector<Interaction> rows;
  std::int64_t t = 0;
  for (std::int32_t u = 0; u < 5; ++u) {
    for (const int i : train[static_cast<std::size_t>(u)]) {
      rows.push_back({u, i, t++, Split::train});
    }
    rows.push_back({u, val[static_cast<std::size_t>(u)], t++, Split::val});
    rows.push_back({u, test[static_cast<std::size_t>(u)], t++, Split::test});
  }
  UserAttributes users;
  users.gender = {Gender::female, Gender::male, Gender::female, Gender::male, Gender::female};
  users.age_group = {1, 2, 2, 4, 6};
  users.has_gender = users.has_age = true;
  ItemAttributes items;
  items.genre_names = {"Action", "Comedy", "Drama"};
  items.genres = {{0}, {1}, {2}, {0, 1}, {1, 2}, {0}, {2}, {0, 2}};
  items.has_genres = true;
  std::vector<std::int64_t> uid{1, 2, 3, 4, 5};
  std::vector<std::int64_t> iid{1, 2, 3, 4, 5, 6, 7, 8};
  return InteractionDataset(5, 8, std::move(rows), uid, iid, users, items);
}

// `num_users` users over `num_items` items with 10 distinct random positives
// each (7 train, 1 val, 2 test), alternating genders, ages over all seven
// groups and one or two of three genres per item.
inline InteractionDataset synthetic_dataset(Index num_users, Index num_items, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<Interaction> rows;
  std::int64_t t = 0;
  for (std::int32_t u = 0; u < num_users; ++u) {
    std::vector<std::int32_t> picked;
    while (picked.size() < 10) {
      // Skewed toward low ids so that popularity groups differ.
      const double x = rng.uniform();
      const auto i = static_cast<std::int32_t>(x * x * double(num_items));
      if (std::find(picked.begin(), picked.end(), i) == picked.end()) {
        picked.push_back(i);
      }
    }
    for (std::size_t k = 0; k < picked.size(); ++k) {
      const Split s = k < 7 ? Split::train : (k < 8 ? Split::val : Split::test);
      rows.push_back({u, picked[k], t++, s});
    }
  }
  UserAttributes users;
  ItemAttributes items;
  std::vector<std::int64_t> uid;
  std::vector<std::int64_t> iid;
  for (Index u = 0; u < num_users; ++u) {
    users.gender.push_back(u % 2 == 0 ? Gender::female : Gender::male);
    users.age_group.push_back(static_cast<int>(u % kNumAgeGroups));
    uid.push_back(u + 1);
  }
  users.has_gender = users.has_age = true;
  items.genre_names = {"Action", "Comedy", "Drama"};
  for (Index i = 0; i < num_items; ++i) {
    items.genres.push_back(i % 4 == 3 ? std::vector<int>{0, 2} : std::vector<int>{static_cast<int>(i % 3)});
    iid.push_back(i + 1);
  }
  items.has_genres = true;
  return InteractionDataset(num_users, num_items, std::move(rows), uid, iid, users, items);
}

// Train-only dataset from per-user item lists, no attributes.
inline InteractionDataset train_only_dataset(Index num_items, const std::vector<std::vector<int>>& train) {
  std::vector<Interaction> rows;
  std::vector<std::int64_t> uid;
  std::int64_t t = 0;
  for (std::size_t u = 0; u < train.size(); ++u) {
    uid.push_back(static_cast<std::int64_t>(u) + 1);
    for (const int i : train[u]) {
      rows.push_back({static_cast<std::int32_t>(u), i, t++, Split::train});
    }
  }
  std::vector<std::int64_t> iid;
  for (Index i = 0; i < num_items; ++i) {
    iid.push_back(i + 1);
  }
  UserAttributes users;
  users.gender.assign(train.size(), std::nullopt);
  users.age_group.assign(train.size(), std::nullopt);
  ItemAttributes items;
  items.genres.assign(static_cast<std::size_t>(num_items), {});
  return InteractionDataset(static_cast<Index>(train.size()), num_items, std::move(rows), uid, iid, users, items);
}

// Largest per-parameter |analytic - numeric| / max(|analytic|, |numeric|, floor)
// with central differences of the given step.
inline double max_fd_relative_error(const FactorModel& model, const VectorXd& analytic,
                                    const std::function<double(const FactorModel&)>& loss, double step = 1e-6,
                                    double floor = 1e-6) {
  FactorModel probe = model;
  VectorXd params = model.params();
  double worst = 0.0;
  for (Index p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + step;
    probe.set_params(params);
    const double up = loss(probe);
    params[p] = saved - step;
    probe.set_params(params);
    const double down = loss(probe);
    params[p] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double scale = std::max({std::abs(analytic[p]), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic[p] - numeric) / scale);
  }
  return worst;
}

}  // namespace moofair::testing
