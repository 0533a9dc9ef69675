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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qubokit/bitvec.hpp"
#include "qubokit/instance.hpp"

namespace qubokit::detail {

// Sparse neighbour lists of the symmetric coupling graph (CSR layout).
class Couplings {
 public:
  explicit Couplings(const QuboInstance& q) : offsets_(q.n() + 1, 0) {
    const std::size_t n = q.n();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && q.coupling(i, j) != 0.0) ++offsets_[i + 1];
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    targets_.resize(offsets_[n]);
    weights_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double w = i == j ? 0.0 : q.coupling(i, j);
        if (w != 0.0) {
          targets_[fill[i]] = j;
          weights_[fill[i]++] = w;
        }
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) scale_ += std::abs(q(i, j));
  }

  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::span<const std::size_t> neighbours(std::size_t i) const {
    return {targets_.data() + offsets_[i], degree(i)};
  }
  std::span<const double> weights(std::size_t i) const {
    return {weights_.data() + offsets_[i], degree(i)};
  }

  /// Sum of |Q_ij|; an upper bound on |E(x)| used to size tolerances.
  double scale() const noexcept { return scale_; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> targets_;
  std::vector<double> weights_;
  double scale_ = 0.0;
};

// A bit vector with its energy and flip-cost vector, updated in time
// proportional to the flipped bit's degree.
class FlipState {
 public:
  FlipState(const QuboInstance& q, const Couplings& c) : q_(&q), c_(&c) {}

  void reset(const BitVector& x) {
    x_ = x;
    index_ = x.size() <= 64 ? x.index() : 0;
    energy_ = q_->energy(x_);
    costs_ = q_->dx(x_);
  }

  void flip(std::size_t b) {
    energy_ += costs_[b];
    const double delta = x_[b] ? -1.0 : 1.0;  // change of x_b
    x_.flip(b);
    index_ ^= std::uint64_t{1} << (b & 63);
    costs_[b] = -costs_[b];
    const auto nb = c_->neighbours(b);
    const auto w = c_->weights(b);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const std::size_t j = nb[k];
      costs_[j] += (x_[j] ? -delta : delta) * w[k];
    }
  }

  double energy() const noexcept { return energy_; }
  std::span<const double> flip_costs() const noexcept { return costs_; }
  double flip_cost(std::size_t i) const { return costs_[i]; }
  const BitVector& x() const noexcept { return x_; }
  /// Index of x under the global bit order (valid for n <= 64).
  std::uint64_t index() const noexcept { return index_; }

 private:
  const QuboInstance* q_;
  const Couplings* c_;
  BitVector x_;
  std::uint64_t index_ = 0;
  double energy_ = 0.0;
  std::vector<double> costs_;
};

/// Gray-walks the low `n - prefix_bits` variables with the top `prefix_bits`
/// variables held at the bits of `prefix`, calling visit(state) on every
/// one of the 2^(n - prefix_bits) states including the start.
template <class Visit>
void walk_shard(const QuboInstance& q, const Couplings& c, std::size_t prefix_bits,
                std::uint64_t prefix, Visit&& visit) {
  const std::size_t n = q.n();
  const std::size_t free_bits = n - prefix_bits;
  BitVector start(n);
  for (std::size_t b = 0; b < prefix_bits; ++b) start.set(free_bits + b, (prefix >> b) & 1U);
  FlipState state(q, c);
  state.reset(start);
  visit(state);
  const std::uint64_t steps = std::uint64_t{1} << free_bits;
  for (std::uint64_t k = 1; k < steps; ++k) {
    state.flip(gray_flip(k));
    visit(state);
  }
}

}  // namespace qubokit::detail
