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

// Pareto machinery for multiple-gradient descent: the min-norm point of the
// convex hull of objective gradients (closed form for two objectives,
// Frank-Wolfe in Gram form for more), stationarity and dominance tests and
// least-misery selection over candidate solutions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "moofair/numeric.hpp"

namespace moofair {

inline constexpr double kSimplexTolerance = 1e-9;

// Non-negative weights summing to one.
class SimplexWeights {
 public:
  SimplexWeights() = default;
  explicit SimplexWeights(VectorXd values) : values_(std::move(values)) {
    if (values_.size() < 1) {
      throw InputError("simplex weights need at least one entry");
    }
    if (!all_finite(values_) || (values_.array() < 0.0).any() ||
        std::abs(values_.sum() - 1.0) > kSimplexTolerance) {
      throw InputError("weights must be non-negative and sum to 1");
    }
  }

  static SimplexWeights uniform(Index t) { return SimplexWeights(VectorXd::Constant(t, 1.0 / double(t))); }

  // Clamps round-off negatives to zero and renormalizes.
  static SimplexWeights project(VectorXd values) {
    values = values.cwiseMax(0.0);
    const double total = values.sum();
    if (!(total > 0.0)) {
      throw InputError("cannot project a zero vector onto the simplex");
    }
    values /= total;
    return SimplexWeights(std::move(values));
  }

  const VectorXd& values() const { return values_; }
  Index size() const { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }

 private:
  VectorXd values_;
};

template <typename Scalar>
bool is_on_simplex(const Vector<Scalar>& alpha, Scalar tol = Scalar(kSimplexTolerance)) {
  return alpha.size() > 0 && (alpha.array() >= Scalar(0)).all() && std::abs(alpha.sum() - Scalar(1)) <= tol;
}

struct TwoObjectiveSolution {
  double alpha = 0.5;  // weight on the first gradient
  bool degenerate = false;
};

// argmin over a in [0, 1] of ||a g1 + (1 - a) g2||^2, from the Gram entries.
template <typename Scalar>
Scalar two_objective_alpha_gram(Scalar m11, Scalar m12, Scalar m22) {
  const Scalar denom = m11 + m22 - Scalar(2) * m12;
  if (!(denom > Scalar(0))) {
    return Scalar(0.5);
  }
  return std::clamp((m22 - m12) / denom, Scalar(0), Scalar(1));
}

template <typename Derived1, typename Derived2>
TwoObjectiveSolution two_objective_alpha(const Eigen::MatrixBase<Derived1>& g1, const Eigen::MatrixBase<Derived2>& g2) {
  require_same_size(g1.size(), g2.size(), "two_objective_alpha");
  TwoObjectiveSolution out;
  if (g1.squaredNorm() == 0.0 && g2.squaredNorm() == 0.0) {
    out.degenerate = true;
    return out;
  }
  const double diff = (g1 - g2).squaredNorm();
  if (diff == 0.0) {
    return out;
  }
  out.alpha = std::clamp(double((g2 - g1).dot(g2)) / diff, 0.0, 1.0);
  return out;
}

template <typename Scalar>
Matrix<Scalar> gram_matrix(std::span<const Vector<Scalar>> gradients) {
  const auto t = static_cast<Index>(gradients.size());
  Matrix<Scalar> m(t, t);
  for (Index i = 0; i < t; ++i) {
    for (Index j = i; j < t; ++j) {
      require_same_size(gradients[i].size(), gradients[j].size(), "gram_matrix");
      m(i, j) = gradients[static_cast<std::size_t>(i)].dot(gradients[static_cast<std::size_t>(j)]);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

inline MatrixXd gram_matrix(const std::vector<VectorXd>& gradients) {
  return gram_matrix<double>(std::span<const VectorXd>(gradients));
}

template <typename DerivedM, typename DerivedA>
typename DerivedM::Scalar quadratic_form(const Eigen::MatrixBase<DerivedM>& m, const Eigen::MatrixBase<DerivedA>& a) {
  return a.dot(m * a);
}

struct FrankWolfeOptions {
  Index max_iters = 100;
  double tol = 1e-6;
  // Finish with an exact active-set pass from the final iterate. Plain
  // Frank-Wolfe zigzags on ill-conditioned Gram matrices and can stay
  // ~1e-2 away from the minimum after thousands of iterations.
  bool refine = true;
};

struct FrankWolfeResult {
  SimplexWeights alpha;
  Index iterations = 0;
  bool converged = false;
  // alpha^T M alpha at the start and after every iteration.
  std::vector<double> objective_history;
};

namespace detail {

// Minimizer of a^T M a over the affine hull of the support (sum a = 1).
// When the KKT system is singular, returns false and a direction d with
// sum d = 0 and M d = 0 instead.
template <typename Scalar>
bool affine_min_norm(const Matrix<Scalar>& m, const std::vector<Index>& support, Vector<Scalar>& out) {
  const auto k = static_cast<Index>(support.size());
  Matrix<Scalar> kkt = Matrix<Scalar>::Zero(k + 1, k + 1);
  Vector<Scalar> rhs = Vector<Scalar>::Zero(k + 1);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      kkt(a, b) = m(support[a], support[b]);
    }
    kkt(a, k) = Scalar(1);
    kkt(k, a) = Scalar(1);
  }
  rhs[k] = Scalar(1);
  Eigen::FullPivLU<Matrix<Scalar>> lu(kkt);
  lu.setThreshold(Scalar(1e3) * std::numeric_limits<Scalar>::epsilon());
  if (!lu.isInvertible()) {
    out = lu.kernel().col(0).head(k);
    return false;
  }
  out = lu.solve(rhs).head(k);
  return out.allFinite();
}

// Wolfe-style active-set iterations started from a feasible alpha: solve on
// the support, step back to the simplex when the affine solution leaves it,
// add the most violating vertex when the support is optimal.
template <typename Scalar>
Vector<Scalar> refine_min_norm(const Matrix<Scalar>& m, Vector<Scalar> alpha) {
  const Index t = m.rows();
  const Scalar scale = std::max(m.diagonal().maxCoeff(), std::numeric_limits<Scalar>::min());
  const Scalar eps = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale;
  std::vector<Index> support;
  for (Index i = 0; i < t; ++i) {
    if (alpha[i] > Scalar(0)) {
      support.push_back(i);
    }
  }
  for (Index step = 0; step < 8 * t * t + 8; ++step) {
    Vector<Scalar> y;
    if (!affine_min_norm(m, support, y)) {
      // Flat direction: slide along it until a coordinate reaches zero.
      if (!(y.array() < Scalar(0)).any()) {
        y = -y;
      }
      Scalar theta = std::numeric_limits<Scalar>::infinity();
      std::size_t drop = 0;
      for (std::size_t a = 0; a < support.size(); ++a) {
        if (y[Index(a)] < Scalar(0) && alpha[support[a]] / -y[Index(a)] < theta) {
          theta = alpha[support[a]] / -y[Index(a)];
          drop = a;
        }
      }
      if (!std::isfinite(theta)) {
        return alpha;
      }
      for (std::size_t a = 0; a < support.size(); ++a) {
        alpha[support[a]] = std::max(alpha[support[a]] + theta * y[Index(a)], Scalar(0));
      }
      alpha[support[drop]] = Scalar(0);
      alpha /= alpha.sum();
      support.erase(support.begin() + std::ptrdiff_t(drop));
      continue;
    }
    if ((y.array() >= Scalar(0)).all()) {
      alpha.setZero();
      for (std::size_t a = 0; a < support.size(); ++a) {
        alpha[support[a]] = y[Index(a)];
      }
      const Vector<Scalar> m_alpha = m * alpha;
      Index best = 0;
      const Scalar lowest = m_alpha.minCoeff(&best);
      if (lowest >= alpha.dot(m_alpha) - eps ||
          std::find(support.begin(), support.end(), best) != support.end()) {
        return alpha;
      }
      support.push_back(best);
      continue;
    }
    // Move toward y until the first support coordinate reaches zero.
    Scalar theta = Scalar(1);
    for (std::size_t a = 0; a < support.size(); ++a) {
      const Scalar from = alpha[support[a]];
      const Scalar to = y[Index(a)];
      if (to < Scalar(0)) {
        theta = std::min(theta, from / (from - to));
      }
    }
    std::vector<Index> kept;
    for (std::size_t a = 0; a < support.size(); ++a) {
      const Index i = support[a];
      alpha[i] = (Scalar(1) - theta) * alpha[i] + theta * y[Index(a)];
      if (alpha[i] > eps / scale) {
        kept.push_back(i);
      } else {
        alpha[i] = Scalar(0);
      }
    }
    if (kept.empty()) {
      return alpha;
    }
    alpha /= alpha.sum();
    support = std::move(kept);
  }
  return alpha;
}

}  // namespace detail

// Min-norm point of the convex hull, in Gram form: start from the barycenter,
// move toward the vertex minimizing (M alpha)_r with an exact line search,
// stop once w * ||alpha_new - alpha_old||_1 < tol.
template <typename Scalar>
FrankWolfeResult frank_wolfe_solve(const Matrix<Scalar>& m, FrankWolfeOptions options = {}) {
  const Index t = m.rows();
  if (t < 1 || m.cols() != t) {
    throw DimensionError("frank_wolfe_solve: Gram matrix must be square and non-empty");
  }
  if (!all_finite(m)) {
    throw InputError("frank_wolfe_solve: non-finite Gram matrix");
  }
  FrankWolfeResult out;
  Vector<Scalar> alpha = Vector<Scalar>::Constant(t, Scalar(1) / Scalar(t));
  out.objective_history.push_back(double(quadratic_form(m, alpha)));
  if (t == 1) {
    out.alpha = SimplexWeights(alpha.template cast<double>());
    out.converged = true;
    return out;
  }
  for (Index iter = 0; iter < options.max_iters; ++iter) {
    const Vector<Scalar> m_alpha = m * alpha;
    Index best = 0;
    m_alpha.minCoeff(&best);
    Vector<Scalar> delta = alpha;
    delta[best] -= Scalar(1);  // alpha - e_best
    const Scalar num = delta.dot(m_alpha);
    const Scalar den = delta.dot(m * delta);
    Scalar w = Scalar(0);
    if (den > Scalar(0)) {
      w = std::clamp(num / den, Scalar(0), Scalar(1));
    }
    Vector<Scalar> next = (Scalar(1) - w) * alpha;
    next[best] += w;
    const Scalar change = w * (next - alpha).template lpNorm<1>();
    alpha = next;
    out.iterations = iter + 1;
    out.objective_history.push_back(double(quadratic_form(m, alpha)));
    if (change < Scalar(options.tol)) {
      out.converged = true;
      break;
    }
  }
  if (options.refine) {
    const Vector<Scalar> refined = detail::refine_min_norm(m, alpha);
    if (quadratic_form(m, refined) < quadratic_form(m, alpha)) {
      alpha = refined;
    }
  }
  out.alpha = SimplexWeights::project(alpha.template cast<double>());
  return out;
}

inline FrankWolfeResult frank_wolfe_solve(const MatrixXd& m, Index max_iters, double tol) {
  return frank_wolfe_solve<double>(m, FrankWolfeOptions{max_iters, tol});
}

// alpha^T M alpha <= tol on valid simplex weights.
template <typename Scalar>
bool pareto_stationary(const Matrix<Scalar>& m, const Vector<Scalar>& alpha, Scalar tol) {
  if (m.rows() != alpha.size() || !is_on_simplex(alpha)) {
    return false;
  }
  return quadratic_form(m, alpha) <= tol;
}

inline bool pareto_stationary(const MatrixXd& m, const SimplexWeights& alpha, double tol) {
  return pareto_stationary<double>(m, alpha.values(), tol);
}

// a dominates b: no worse anywhere and different somewhere (minimization).
template <typename DerivedA, typename DerivedB>
bool dominates(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  require_same_size(a.size(), b.size(), "dominates");
  bool strictly_better = false;
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) {
      return false;
    }
    strictly_better = strictly_better || a[i] < b[i];
  }
  return strictly_better;
}

struct SolutionRecord {
  Index round_id = 0;
  VectorXd objective_values;
  std::string checkpoint_ref;
};

// Index of the record whose largest objective value is smallest; ties go to
// the earliest round_id.
std::size_t least_misery_index(std::span<const SolutionRecord> records);
SolutionRecord least_misery_select(std::span<const SolutionRecord> records);

// Divides every record's objective values by those of the first record.
std::vector<SolutionRecord> normalize_by_first(std::span<const SolutionRecord> records);

}  // namespace moofair
