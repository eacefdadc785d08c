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

#include "moofair/moo.hpp"

namespace moofair {

std::size_t least_misery_index(std::span<const SolutionRecord> records) {
  if (records.empty()) {
    throw InputError("least_misery_select: no records");
  }
  std::size_t best = 0;
  double best_worst = records[0].objective_values.maxCoeff();
  for (std::size_t k = 1; k < records.size(); ++k) {
    const double worst = records[k].objective_values.maxCoeff();
    if (worst < best_worst || (worst == best_worst && records[k].round_id < records[best].round_id)) {
      best = k;
      best_worst = worst;
    }
  }
  return best;
}

SolutionRecord least_misery_select(std::span<const SolutionRecord> records) {
  return records[least_misery_index(records)];
}

std::vector<SolutionRecord> normalize_by_first(std::span<const SolutionRecord> records) {
  std::vector<SolutionRecord> out(records.begin(), records.end());
  if (out.empty()) {
    return out;
  }
  const VectorXd scale = records[0].objective_values;
  for (auto& r : out) {
    require_same_size(r.objective_values.size(), scale.size(), "normalize_by_first");
    for (Index i = 0; i < scale.size(); ++i) {
      if (scale[i] != 0.0) {
        r.objective_values[i] /= std::abs(scale[i]);
      }
    }
  }
  return out;
}

}  // namespace moofair
