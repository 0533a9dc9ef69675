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

// Gibbs distribution of an instance, P(x) = exp(-beta E(x)) / Z.
//
// Everything here is exact and enumerates {0,1}^n, so sizes are capped.
// Enumeration follows the Gray walk with incremental energies; nothing of
// size 2^n is stored except by probabilities() itself.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "qubokit/detail/flip_state.hpp"
#include "qubokit/error.hpp"
#include "qubokit/instance.hpp"
#include "qubokit/matrix.hpp"

namespace qubokit {

struct GibbsOptions {
  double beta = 1.0;
  std::size_t max_n = 26;         // log_partition, pairwise_marginals
  std::size_t max_vector_n = 20;  // probabilities
  std::size_t threads = 1;
};

namespace detail {

// Running log-sum-exp.
class LogSumExp {
 public:
  void add(double v) {
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }
  void merge(const LogSumExp& o) {
    if (o.sum_ == 0.0) return;
    if (sum_ == 0.0) {
      *this = o;
      return;
    }
    if (o.max_ <= max_) {
      sum_ += o.sum_ * std::exp(o.max_ - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - o.max_) + o.sum_;
      max_ = o.max_;
    }
  }
  double value() const { return max_ + std::log(sum_); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

inline void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be a positive finite number");
}

inline void check_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap)
    throw ResourceError(std::string(what) + ": n = " + std::to_string(n) +
                        " exceeds exact-computation cap " + std::to_string(cap));
}

}  // namespace detail

/// Natural log of the partition function Z = sum_x exp(-beta E(x)).
///
/// With threads > 1 the space is split by fixed prefixes of the top
/// variables and the shard sums are combined in log space.
inline double log_partition(const QuboInstance& q, const GibbsOptions& opt = {}) {
  detail::check_beta(opt.beta);
  detail::check_cap(q.n(), opt.max_n, "log_partition");
  if (q.n() == 0) return 0.0;
  const detail::Couplings couplings(q);
  const std::size_t p = std::min<std::size_t>(
      q.n(), opt.threads <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(opt.threads - 1)));
  const std::uint64_t shards = std::uint64_t{1} << p;
  std::vector<detail::LogSumExp> partial(shards);
  auto run = [&](std::uint64_t s) {
    detail::walk_shard(q, couplings, p, s, [&](const detail::FlipState& st) {
      partial[s].add(-opt.beta * st.energy());
    });
  };
  if (shards == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::uint64_t s = 0; s < shards; ++s) pool.emplace_back(run, s);
  }
  detail::LogSumExp total;
  for (const auto& part : partial) total.merge(part);
  return total.value();
}

inline double log_partition(const QuboInstance& q, double beta) {
  GibbsOptions opt;
  opt.beta = beta;
  return log_partition(q, opt);
}

/// Probability of every x, indexed by the global bit order; length 2^n.
inline std::vector<double> probabilities(const QuboInstance& q, const GibbsOptions& opt = {}) {
  detail::check_beta(opt.beta);
  detail::check_cap(q.n(), opt.max_vector_n, "probabilities");
  if (q.n() == 0) return {1.0};
  std::vector<double> p(std::size_t{1} << q.n());
  const detail::Couplings couplings(q);
  double max_log = -std::numeric_limits<double>::infinity();
  detail::walk_shard(q, couplings, 0, 0, [&](const detail::FlipState& st) {
    const double v = -opt.beta * st.energy();
    p[st.index()] = v;
    max_log = std::max(max_log, v);
  });
  double z = 0.0;
  for (double& v : p) {
    v = std::exp(v - max_log);
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

inline std::vector<double> probabilities(const QuboInstance& q, double beta) {
  GibbsOptions opt;
  opt.beta = beta;
  return probabilities(q, opt);
}

/// M_ij = P[x_i = 1 and x_j = 1], M_ii = P[x_i = 1]. Symmetric.
inline Matrix pairwise_marginals(const QuboInstance& q, const GibbsOptions& opt = {}) {
  detail::check_beta(opt.beta);
  detail::check_cap(q.n(), opt.max_n, "pairwise_marginals");
  const std::size_t n = q.n();
  Matrix m(n, n);
  if (n == 0) return m;
  const detail::Couplings couplings(q);

  // First pass fixes the shift that keeps every weight <= 1.
  double max_log = -std::numeric_limits<double>::infinity();
  detail::walk_shard(q, couplings, 0, 0, [&](const detail::FlipState& st) {
    max_log = std::max(max_log, -opt.beta * st.energy());
  });

  double z = 0.0;
  std::vector<std::size_t> ones;
  ones.reserve(n);
  detail::walk_shard(q, couplings, 0, 0, [&](const detail::FlipState& st) {
    const double w = std::exp(-opt.beta * st.energy() - max_log);
    z += w;
    ones.clear();
    const auto& x = st.x();
    for (std::size_t i = 0; i < n; ++i)
      if (x[i]) ones.push_back(i);
    for (std::size_t a = 0; a < ones.size(); ++a)
      for (std::size_t b = a; b < ones.size(); ++b) m(ones[a], ones[b]) += w;
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      m(i, j) /= z;
      m(j, i) = m(i, j);
    }
  return m;
}

inline Matrix pairwise_marginals(const QuboInstance& q, double beta) {
  GibbsOptions opt;
  opt.beta = beta;
  return pairwise_marginals(q, opt);
}

}  // namespace qubokit
