// Copyright 2026 The qubokit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qubokit/bitvec.hpp"
#include "qubokit/error.hpp"
#include "qubokit/matrix.hpp"

namespace qubokit {

enum class WeightDistribution { normal, uniform };

/// Spin-glass form of an instance over s_i in {-1,+1}:
///   E(s) = sum_{i<j} J_ij s_i s_j + sum_i h_i s_i + constant.
struct IsingModel {
  std::vector<double> h;
  Matrix J;  // upper triangle, zero diagonal
  double constant = 0.0;

  double energy(std::span<const std::int8_t> spins) const {
    const std::size_t n = h.size();
    if (spins.size() != n) throw InvalidArgument("spin vector length mismatch");
    double e = constant;
    for (std::size_t i = 0; i < n; ++i) {
      e += h[i] * spins[i];
      for (std::size_t j = i + 1; j < n; ++j) e += J(i, j) * spins[i] * spins[j];
    }
    return e;
  }

  /// Energy of the spin configuration s = 2x - 1.
  double energy(const BitVector& x) const {
    std::vector<std::int8_t> s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? 1 : -1;
    return energy(s);
  }
};

/// A QUBO problem: minimize E(x) = sum_{i<=j} Q_ij x_i x_j over x in {0,1}^n.
///
/// The weight matrix is kept in upper-triangular form; the diagonal holds the
/// linear terms (x_i^2 = x_i). Instances are immutable once built.
/// A default-constructed instance is the empty problem (n = 0, E = 0), which
/// is what clamping every variable produces.
class QuboInstance {
 public:
  QuboInstance() = default;

  /// Folds an arbitrary square matrix into upper-triangular form:
  /// Q_ij + Q_ji above the diagonal, Q_ii on it, 0 below. The quadratic form
  /// z^T m z is preserved.
  static QuboInstance from_matrix(const Matrix& m) {
    if (!m.is_square()) throw InvalidArgument("weight matrix must be square");
    if (m.rows() == 0) throw InvalidArgument("weight matrix must have n >= 1");
    const std::size_t n = m.rows();
    Matrix q(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(m(i, j)))
          throw InvalidArgument("non-finite weight at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
      }
      q(i, i) = m(i, i);
      for (std::size_t j = i + 1; j < n; ++j) q(i, j) = m(i, j) + m(j, i);
    }
    return QuboInstance(std::move(q));
  }

  /// Takes a matrix that must already be upper triangular. n = 0 is allowed
  /// and yields the empty instance.
  static QuboInstance from_upper_triangular(Matrix m) {
    if (!m.is_square()) throw InvalidArgument("weight matrix must be square");
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(m(i, j))) throw InvalidArgument("non-finite weight");
        if (j < i && m(i, j) != 0.0)
          throw InvalidArgument("nonzero entry below the diagonal at (" +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    return QuboInstance(std::move(m));
  }

  /// Each position i <= j is nonzero with probability `density`; nonzero
  /// values are standard normal or uniform on [-1, 1].
  static QuboInstance random(std::size_t n, WeightDistribution distr, double density,
                             std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("random instance needs n >= 1");
    if (!(density >= 0.0 && density <= 1.0))
      throw InvalidArgument("density must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> flat(-1.0, 1.0);
    Matrix q(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        if (coin(rng) < density)
          q(i, j) = distr == WeightDistribution::normal ? gauss(rng) : flat(rng);
      }
    return QuboInstance(std::move(q));
  }

  std::size_t n() const noexcept { return weights_.rows(); }
  const Matrix& weights() const noexcept { return weights_; }

  /// Triangle entry Q_ij; zero for i > j.
  double operator()(std::size_t i, std::size_t j) const { return weights_(i, j); }

  /// Total coupling between i and j (i != j), whichever side it is stored on.
  double coupling(std::size_t i, std::size_t j) const {
    return i < j ? weights_(i, j) : weights_(j, i);
  }

  /// Symmetric view (Q + Q^T) / 2.
  Matrix symmetric() const {
    const std::size_t n = this->n();
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      s(i, i) = weights_(i, i);
      for (std::size_t j = i + 1; j < n; ++j) s(i, j) = s(j, i) = weights_(i, j) / 2;
    }
    return s;
  }

  std::size_t nnz() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n(); ++i)
      for (std::size_t j = i; j < n(); ++j) c += weights_(i, j) != 0.0;
    return c;
  }

  /// Fraction of nonzero positions in the upper triangle.
  double density() const {
    const std::size_t n = this->n();
    if (n == 0) return 0.0;
    return static_cast<double>(nnz()) / static_cast<double>(n * (n + 1) / 2);
  }

  double energy(std::span<const std::uint8_t> x) const {
    check_length(x.size());
    const std::size_t n = this->n();
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!x[i]) continue;
      const auto row = weights_.row(i);
      for (std::size_t j = i; j < n; ++j)
        if (x[j]) e += row[j];
    }
    return e;
  }
  double energy(const BitVector& x) const { return energy(x.bits()); }

  /// One energy per row.
  std::vector<double> energy(const BitMatrix& xs) const {
    check_length(xs.cols());
    std::vector<double> out(xs.rows());
    for (std::size_t k = 0; k < xs.rows(); ++k) out[k] = energy(xs.row(k));
    return out;
  }

  double operator()(const BitVector& x) const { return energy(x); }

  /// First discrete derivative: entry i is E(x with bit i flipped) - E(x).
  std::vector<double> dx(std::span<const std::uint8_t> x) const {
    check_length(x.size());
    const std::size_t n = this->n();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      double field = weights_(i, i);
      for (std::size_t j = 0; j < i; ++j)
        if (x[j]) field += weights_(j, i);
      for (std::size_t j = i + 1; j < n; ++j)
        if (x[j]) field += weights_(i, j);
      g[i] = x[i] ? -field : field;
    }
    return g;
  }
  std::vector<double> dx(const BitVector& x) const { return dx(x.bits()); }

  /// Row k holds dx of row k of `xs`.
  Matrix dx(const BitMatrix& xs) const {
    check_length(xs.cols());
    Matrix out(xs.rows(), n());
    for (std::size_t k = 0; k < xs.rows(); ++k) {
      const auto g = dx(xs.row(k));
      std::copy(g.begin(), g.end(), out.row(k).begin());
    }
    return out;
  }

  /// Second discrete derivative: entry (i, j) is the energy change when bits
  /// i and j flip together; the diagonal equals dx(x).
  Matrix dx2(const BitVector& x) const {
    const auto g = dx(x);
    const std::size_t n = this->n();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      d(i, i) = g[i];
      const double si = x[i] ? -1.0 : 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double sj = x[j] ? -1.0 : 1.0;
        d(i, j) = d(j, i) = g[i] + g[j] + si * sj * weights_(i, j);
      }
    }
    return d;
  }

  /// log2(max D / min D), D being the pairwise gaps between the distinct
  /// values in the upper triangle (zeros included when present). Zero when
  /// fewer than two distinct values exist.
  double dynamic_range() const { return dynamic_range_of(distinct_values()); }

  /// Sorted distinct values of the upper triangle.
  std::vector<double> distinct_values() const {
    std::vector<double> v;
    v.reserve(n() * (n() + 1) / 2);
    for (std::size_t i = 0; i < n(); ++i)
      for (std::size_t j = i; j < n(); ++j) v.push_back(weights_(i, j));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  /// Dynamic range of a sorted set of distinct values.
  static double dynamic_range_of(std::span<const double> sorted_unique) {
    if (sorted_unique.size() < 2) return 0.0;
    const double max_gap = sorted_unique.back() - sorted_unique.front();
    double min_gap = max_gap;
    for (std::size_t k = 1; k < sorted_unique.size(); ++k)
      min_gap = std::min(min_gap, sorted_unique[k] - sorted_unique[k - 1]);
    return std::log2(max_gap / min_gap);
  }

  /// Substitutes x_i = (s_i + 1) / 2.
  IsingModel to_ising() const {
    const std::size_t n = this->n();
    IsingModel ising{std::vector<double>(n, 0.0), Matrix(n, n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      ising.h[i] += weights_(i, i) / 2;
      ising.constant += weights_(i, i) / 2;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double w = weights_(i, j) / 4;
        ising.J(i, j) = w;
        ising.h[i] += w;
        ising.h[j] += w;
        ising.constant += w;
      }
    }
    return ising;
  }

  friend bool operator==(const QuboInstance&, const QuboInstance&) = default;

 private:
  explicit QuboInstance(Matrix m) : weights_(std::move(m)) {}

  void check_length(std::size_t len) const {
    if (len != n())
      throw InvalidArgument("bit vector length " + std::to_string(len) +
                            " does not match n = " + std::to_string(n()));
  }

  Matrix weights_;
};

/// A candidate minimizer with its energy and solver diagnostics.
struct Solution {
  BitVector x;
  double energy = 0.0;
  std::map<std::string, double> meta;
};

}  // namespace qubokit
