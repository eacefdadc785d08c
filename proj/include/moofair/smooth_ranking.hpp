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

// Differentiable ranking kernels and their vector-Jacobian products.
//
// Two smooth rank conventions live here:
//   pairwise_smooth_rank     r_i = 0.5 + sum_j sigma(beta (s_j - s_i))   1-based, in [1, n]
//   temperature_smooth_rank  r_i = sum_{j != i} 1 / (1 + exp((p_i - p_j) / tau))   0-based, in [0, n-1]
// exposure() takes a rank offset so both can feed the same gamma^rank model.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "moofair/numeric.hpp"

namespace moofair {

struct SmoothRankConfig {
  double steepness = 1.0;     // sigmoid slope of the pairwise ranks
  double temperature = 1e-5;  // tau of the temperature ranks
  double patience = 0.5;      // gamma of the exposure model
  double rank_offset = 1.0;   // added to temperature ranks before exposure

  void validate() const {
    if (!(steepness > 0.0)) {
      throw InputError("steepness must be > 0");
    }
    if (!(temperature > 0.0)) {
      throw InputError("temperature must be > 0");
    }
    if (!(patience > 0.0 && patience < 1.0)) {
      throw InputError("patience must lie in (0, 1)");
    }
    if (!(rank_offset >= 0.0)) {
      throw InputError("rank_offset must be >= 0");
    }
  }
};

// 1-based hard ranks by descending score; ties go to the lower index.
template <typename Derived>
Vector<typename Derived::Scalar> hard_ranks(const Eigen::MatrixBase<Derived>& scores) {
  using Scalar = typename Derived::Scalar;
  const Index n = scores.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] > scores[b]; });
  Vector<Scalar> ranks(n);
  for (Index pos = 0; pos < n; ++pos) {
    ranks[order[static_cast<std::size_t>(pos)]] = Scalar(pos + 1);
  }
  return ranks;
}

// Logistic function over an array expression, vectorized.
template <typename Derived>
auto logistic_array(const Eigen::ArrayBase<Derived>& x) {
  return x.derived().logistic();
}

// sigma'(x) = sigma(x) sigma(-x) = e / (1 + e)^2 with e = exp(-|x|), one exp per entry.
template <typename Derived>
auto logistic_derivative_array(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const auto e = (-x.derived().abs()).exp();
  return e / (Scalar(1) + e).square();
}

// Smooth rank of the entries listed in `rows` against every score:
// 1 + sum_{j != i} sigma(steepness * (s_j - s_i)).
template <typename Derived>
Vector<typename Derived::Scalar> pairwise_smooth_rank(const Eigen::MatrixBase<Derived>& scores,
                                                      std::span<const Index> rows,
                                                      typename Derived::Scalar steepness) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> s = scores;
  Vector<Scalar> ranks(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    // The j = i term contributes sigma(0) = 1/2.
    ranks[static_cast<Index>(k)] =
        Scalar(0.5) + logistic_array(steepness * (s.array() - s[rows[k]])).sum();
  }
  return ranks;
}

template <typename Derived>
Vector<typename Derived::Scalar> pairwise_smooth_rank(const Eigen::MatrixBase<Derived>& scores,
                                                      typename Derived::Scalar steepness) {
  std::vector<Index> all(static_cast<std::size_t>(scores.size()));
  std::iota(all.begin(), all.end(), Index{0});
  return pairwise_smooth_rank(scores, std::span<const Index>(all), steepness);
}

// Accumulates d(loss)/d(scores) into `grad_scores` given d(loss)/d(ranks of rows).
template <typename DerivedS, typename DerivedG, typename DerivedOut>
void pairwise_smooth_rank_vjp(const Eigen::MatrixBase<DerivedS>& scores, std::span<const Index> rows,
                              typename DerivedS::Scalar steepness, const Eigen::MatrixBase<DerivedG>& grad_ranks,
                              Eigen::MatrixBase<DerivedOut>& grad_scores) {
  using Scalar = typename DerivedS::Scalar;
  const Vector<Scalar> s = scores;
  Vector<Scalar> w(s.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Scalar g = grad_ranks[static_cast<Index>(k)];
    if (g == Scalar(0)) {
      continue;
    }
    const Index i = rows[k];
    // The j = i entry cancels below.
    w.array() = (g * steepness) * logistic_derivative_array(steepness * (s.array() - s[i]));
    grad_scores += w;
    grad_scores[i] -= w.sum();
  }
}

template <typename Scalar>
Scalar dcg_discount(Scalar rank) {
  return Scalar(1) / std::log2(rank + Scalar(1));
}

template <typename Scalar>
Scalar dcg_discount_derivative(Scalar rank) {
  const Scalar l = std::log2(rank + Scalar(1));
  return -Scalar(1) / ((rank + Scalar(1)) * std::numbers::ln2_v<Scalar> * l * l);
}

// sum_i rel_i / log2(r_i + 1)
template <typename DerivedR, typename DerivedK>
typename DerivedR::Scalar smooth_dcg(const Eigen::MatrixBase<DerivedR>& relevance,
                                     const Eigen::MatrixBase<DerivedK>& ranks) {
  using Scalar = typename DerivedR::Scalar;
  require_same_size(relevance.size(), ranks.size(), "smooth_dcg");
  Scalar total = Scalar(0);
  for (Index i = 0; i < ranks.size(); ++i) {
    if (relevance[i] != Scalar(0)) {
      total += relevance[i] * dcg_discount(ranks[i]);
    }
  }
  return total;
}

template <typename DerivedR, typename DerivedK>
Vector<typename DerivedR::Scalar> smooth_dcg_grad(const Eigen::MatrixBase<DerivedR>& relevance,
                                                  const Eigen::MatrixBase<DerivedK>& ranks) {
  using Scalar = typename DerivedR::Scalar;
  require_same_size(relevance.size(), ranks.size(), "smooth_dcg_grad");
  Vector<Scalar> g(ranks.size());
  for (Index i = 0; i < ranks.size(); ++i) {
    g[i] = relevance[i] * dcg_discount_derivative(ranks[i]);
  }
  return g;
}

// Plackett-Luce first-choice probabilities (softmax with max subtraction).
template <typename Derived>
Vector<typename Derived::Scalar> pl_probs(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar top = logits.maxCoeff();
  Vector<Scalar> p = (logits.array() - top).exp().matrix();
  p /= p.sum();
  return p;
}

// d(loss)/d(logits) from d(loss)/d(probs) for a softmax output `probs`.
template <typename DerivedP, typename DerivedG>
Vector<typename DerivedP::Scalar> pl_probs_vjp(const Eigen::MatrixBase<DerivedP>& probs,
                                               const Eigen::MatrixBase<DerivedG>& grad_probs) {
  const auto inner = probs.dot(grad_probs);
  return (probs.array() * (grad_probs.array() - inner)).matrix();
}

// Softmax of logits + noise. Passing the noise explicitly freezes it.
template <typename DerivedL, typename DerivedN>
Vector<typename DerivedL::Scalar> gumbel_perturb(const Eigen::MatrixBase<DerivedL>& logits,
                                                 const Eigen::MatrixBase<DerivedN>& noise) {
  require_same_size(logits.size(), noise.size(), "gumbel_perturb");
  return pl_probs(logits + noise);
}

struct PerturbedProbs {
  VectorXd probs;
  VectorXd noise;
};

template <typename Derived>
PerturbedProbs gumbel_perturb(const Eigen::MatrixBase<Derived>& logits, SeededRng& rng) {
  PerturbedProbs out;
  out.noise = sample_gumbel(rng, logits.size());
  out.probs = gumbel_perturb(logits, out.noise);
  return out;
}

// 0-based smooth rank of the entries listed in `rows` (default: all):
// sum_{j != i} sigma((p_j - p_i) / temperature).
template <typename Derived>
Vector<typename Derived::Scalar> temperature_smooth_rank(const Eigen::MatrixBase<Derived>& probs,
                                                         std::span<const Index> rows,
                                                         typename Derived::Scalar temperature) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> p = probs;
  Vector<Scalar> ranks(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ranks[static_cast<Index>(k)] = logistic_array((p.array() - p[rows[k]]) / temperature).sum() - Scalar(0.5);
  }
  return ranks;
}

template <typename Derived>
Vector<typename Derived::Scalar> temperature_smooth_rank(const Eigen::MatrixBase<Derived>& probs,
                                                         typename Derived::Scalar temperature) {
  std::vector<Index> all(static_cast<std::size_t>(probs.size()));
  std::iota(all.begin(), all.end(), Index{0});
  return temperature_smooth_rank(probs, std::span<const Index>(all), temperature);
}

template <typename DerivedP, typename DerivedG, typename DerivedOut>
void temperature_smooth_rank_vjp(const Eigen::MatrixBase<DerivedP>& probs, std::span<const Index> rows,
                                 typename DerivedP::Scalar temperature, const Eigen::MatrixBase<DerivedG>& grad_ranks,
                                 Eigen::MatrixBase<DerivedOut>& grad_probs) {
  using Scalar = typename DerivedP::Scalar;
  const Vector<Scalar> p = probs;
  Vector<Scalar> w(p.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Scalar g = grad_ranks[static_cast<Index>(k)];
    if (g == Scalar(0)) {
      continue;
    }
    const Index i = rows[k];
    w.array() = (g / temperature) * logistic_derivative_array((p.array() - p[i]) / temperature);
    grad_probs += w;
    grad_probs[i] -= w.sum();
  }
}

// Position-biased exposure gamma^(rank + offset), entrywise.
template <typename Derived>
typename Derived::PlainObject exposure(const Eigen::MatrixBase<Derived>& ranks, typename Derived::Scalar patience,
                                       typename Derived::Scalar rank_offset) {
  using Scalar = typename Derived::Scalar;
  if (!(patience > Scalar(0) && patience < Scalar(1))) {
    throw InputError("exposure: patience must lie in (0, 1)");
  }
  const Scalar log_gamma = std::log(patience);
  return ((ranks.array() + rank_offset) * log_gamma).exp().matrix();
}

}  // namespace moofair
