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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace moofair {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;
using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

inline void require_same_size(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.derived().array().isFinite().all();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar dot(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  require_same_size(a.size(), b.size(), "dot");
  return a.dot(b);
}

// Logistic function. The input is clamped to [-500, 500] so exp never overflows.
template <typename Scalar>
Scalar sigmoid(Scalar x) {
  const Scalar clamped = std::clamp(x, Scalar(-500), Scalar(500));
  if (clamped >= 0) {
    return Scalar(1) / (Scalar(1) + std::exp(-clamped));
  }
  const Scalar e = std::exp(clamped);
  return e / (Scalar(1) + e);
}

// sigma(x) * sigma(-x), evaluated without cancellation for large |x|.
template <typename Scalar>
Scalar sigmoid_derivative(Scalar x) {
  const Scalar e = std::exp(-std::min(std::abs(x), Scalar(500)));
  return e / ((Scalar(1) + e) * (Scalar(1) + e));
}

// -log(sigma(x)) = log(1 + exp(-x)).
template <typename Scalar>
Scalar neg_log_sigmoid(Scalar x) {
  if (x >= 0) {
    return std::log1p(std::exp(-x));
  }
  return -x + std::log1p(std::exp(x));
}

// Deterministic 64-bit generator. One instance per worker; derive() gives an
// independent stream for worker `k` from the same base seed.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  SeededRng derive(std::uint64_t worker) const { return SeededRng(seed_ + worker); }

  // Uniform on [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  // Uniform integer in [0, n).
  std::int64_t uniform_index(std::int64_t n) {
    return std::uniform_int_distribution<std::int64_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

inline constexpr double kGumbelClamp = 1e-12;

// Inverse-CDF Gumbel transform of a uniform draw, clamped away from {0, 1}.
inline double gumbel_from_uniform(double u) {
  u = std::clamp(u, kGumbelClamp, 1.0 - kGumbelClamp);
  return -std::log(-std::log(u));
}

inline VectorXd sample_gumbel(SeededRng& rng, Index n) {
  if (n < 1) {
    throw InputError("sample_gumbel: n must be >= 1");
  }
  VectorXd out(n);
  for (Index k = 0; k < n; ++k) {
    out[k] = gumbel_from_uniform(rng.uniform());
  }
  return out;
}

}  // namespace moofair
