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
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qubokit/bitvec.hpp"
#include "qubokit/detail/flip_state.hpp"
#include "qubokit/error.hpp"
#include "qubokit/instance.hpp"

namespace qubokit {

struct BruteForceOptions {
  std::size_t threads = 1;
  std::size_t max_n = 30;
  std::size_t max_minimizers = 64;  // cap on the reported list of tied optima
};

struct BruteForceResult {
  Solution solution;
  /// Tied global minimizers in ascending index order, at most
  /// max_minimizers of them; solution.x is the first.
  std::vector<BitVector> minimizers;
};

namespace detail {

struct Candidate {
  double energy;  // as tracked by the walk
  std::uint64_t index;
};

// Near-optimal states seen by one worker. Everything within `window` of the
// running best is kept so that the final decision can be made on energies
// recomputed from scratch, independent of how the space was split.
class CandidatePool {
 public:
  CandidatePool(double window, std::size_t keep) : window_(window), keep_(keep) {}

  void offer(double e, std::uint64_t index) {
    if (e > best_ + window_) return;
    if (e < best_) best_ = e;
    pool_.push_back({e, index});
    if (pool_.size() > 4 * keep_ + 64) compact();
  }

  void merge(const CandidatePool& other) {
    best_ = std::min(best_, other.best_);
    pool_.insert(pool_.end(), other.pool_.begin(), other.pool_.end());
    compact();
  }

  // Drops states outside the window; if still too many, keeps the lowest
  // indices.
  void compact() {
    const double limit = best_ + window_;
    std::erase_if(pool_, [&](const Candidate& c) { return c.energy > limit; });
    if (pool_.size() > keep_) {
      std::sort(pool_.begin(), pool_.end(),
                [](const Candidate& a, const Candidate& b) { return a.index < b.index; });
      pool_.resize(keep_);
    }
  }

  const std::vector<Candidate>& candidates() const noexcept { return pool_; }

 private:
  double window_;
  std::size_t keep_;
  double best_ = INFINITY;
  std::vector<Candidate> pool_;
};

inline std::size_t prefix_bits_for(std::size_t threads, std::size_t n) {
  std::size_t p = 0;
  while ((std::size_t{1} << p) < threads) ++p;
  return std::min(p, n);
}

}  // namespace detail

/// Exhaustive search over {0,1}^n in Gray-code order.
///
/// The top ceil(log2(threads)) variables are fixed to each prefix and every
/// worker walks the remaining ones, updating the energy and flip costs
/// incrementally. The answer does not depend on the thread count: ties go to
/// the smallest index.
inline BruteForceResult brute_force(const QuboInstance& q, const BruteForceOptions& opt = {}) {
  const std::size_t n = q.n();
  if (n > opt.max_n)
    throw ResourceError("brute force: n = " + std::to_string(n) + " exceeds cap " +
                        std::to_string(opt.max_n));
  if (n == 0) return {{BitVector(), 0.0, {{"threads", 1.0}}}, {BitVector()}};

  const detail::Couplings couplings(q);
  const double scale = 1.0 + couplings.scale();
  const double window = 1e-9 * scale;     // incremental drift allowance
  const double tie_tolerance = 1e-12 * scale;
  const std::size_t keep = std::max<std::size_t>(opt.max_minimizers, 1) + 1024;

  const std::size_t threads = std::max<std::size_t>(opt.threads, 1);
  const std::size_t p = detail::prefix_bits_for(threads, n);
  const std::uint64_t shards = std::uint64_t{1} << p;
  const std::size_t workers = static_cast<std::size_t>(std::min<std::uint64_t>(threads, shards));

  std::vector<detail::CandidatePool> pools(workers, detail::CandidatePool(window, keep));
  auto work = [&](std::size_t w) {
    for (std::uint64_t s = w; s < shards; s += workers)
      detail::walk_shard(q, couplings, p, s, [&](const detail::FlipState& st) {
        pools[w].offer(st.energy(), st.index());
      });
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (std::size_t w = 1; w < workers; ++w) pools[0].merge(pools[w]);
  pools[0].compact();

  std::vector<std::pair<double, std::uint64_t>> exact;
  for (const auto& c : pools[0].candidates())
    exact.emplace_back(q.energy(BitVector::from_index(c.index, n)), c.index);
  double best = INFINITY;
  for (const auto& [e, k] : exact) best = std::min(best, e);
  std::vector<std::uint64_t> tied;
  for (const auto& [e, k] : exact)
    if (e <= best + tie_tolerance) tied.push_back(k);
  std::sort(tied.begin(), tied.end());

  BruteForceResult result;
  const BitVector x = BitVector::from_index(tied.front(), n);
  result.solution = {x, q.energy(x), {{"threads", static_cast<double>(threads)},
                                      {"prefix_bits", static_cast<double>(p)}}};
  for (std::size_t k = 0; k < tied.size() && k < opt.max_minimizers; ++k)
    result.minimizers.push_back(BitVector::from_index(tied[k], n));
  return result;
}

struct AnnealingOptions {
  std::size_t steps = 10000;
  std::optional<double> t0;  // empty: derived from random probes
  double alpha = 0.999;
  std::uint64_t seed = 0;
};

/// Cooling factor that takes the temperature from t0 to t0 * final_ratio in
/// `steps` steps.
inline double alpha_for(std::size_t steps, double final_ratio = 1e-3) {
  return std::pow(final_ratio, 1.0 / static_cast<double>(std::max<std::size_t>(steps, 1)));
}

/// Largest |flip cost| over `probes` random vectors.
inline double auto_temperature(const QuboInstance& q, std::uint64_t seed, std::size_t probes = 100) {
  std::mt19937_64 rng(seed);
  double t = 0.0;
  for (std::size_t k = 0; k < probes; ++k)
    for (double g : q.dx(random_bits(q.n(), rng))) t = std::max(t, std::abs(g));
  return t > 0.0 ? t : 1.0;
}

/// Single-flip Metropolis chain with geometric cooling T_t = t0 * alpha^t.
/// Returns the best state seen.
inline Solution simulated_annealing(const QuboInstance& q, const AnnealingOptions& opt = {}) {
  if (opt.steps < 1) throw InvalidArgument("simulated annealing needs steps >= 1");
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (opt.t0 && !(*opt.t0 > 0.0)) throw InvalidArgument("t0 must be positive");
  const std::size_t n = q.n();
  const double t0 = opt.t0 ? *opt.t0 : auto_temperature(q, opt.seed ^ 0x5851f42d4c957f2dULL);
  Solution out{BitVector(n), 0.0,
               {{"steps", static_cast<double>(opt.steps)},
                {"t0", t0},
                {"alpha", opt.alpha},
                {"seed", static_cast<double>(opt.seed)}}};
  if (n == 0) return out;

  std::mt19937_64 rng(opt.seed);
  const detail::Couplings couplings(q);
  detail::FlipState state(q, couplings);
  state.reset(random_bits(n, rng));

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BitVector best = state.x();
  double best_energy = state.energy();
  double temperature = t0;
  std::size_t accepted = 0;
  for (std::size_t t = 0; t < opt.steps; ++t, temperature *= opt.alpha) {
    const std::size_t i = pick(rng);
    const double delta = state.flip_cost(i);
    if (delta > 0.0 && unit(rng) >= std::exp(-delta / temperature)) continue;
    state.flip(i);
    ++accepted;
    if (state.energy() < best_energy) {
      best_energy = state.energy();
      best = state.x();
    }
  }
  out.x = best;
  out.energy = q.energy(best);
  out.meta["accepted"] = static_cast<double>(accepted);
  return out;
}

/// Steepest descent from `start`: flips the bit with the most negative flip
/// cost (smallest index on ties) until no flip lowers the energy.
inline BitVector steepest_descent(const QuboInstance& q, const BitVector& start,
                                  std::size_t* flips = nullptr) {
  const detail::Couplings couplings(q);
  detail::FlipState state(q, couplings);
  state.reset(start);
  const double tolerance = 1e-12 * (1.0 + couplings.scale());
  std::size_t count = 0;
  while (true) {
    const auto g = state.flip_costs();
    const auto it = std::min_element(g.begin(), g.end());
    if (it == g.end() || !(*it < -tolerance)) break;
    state.flip(static_cast<std::size_t>(it - g.begin()));
    ++count;
  }
  if (flips) *flips = count;
  return state.x();
}

struct LocalSearchOptions {
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
};

/// Best 1-opt local minimum over seeded random restarts.
inline Solution local_search(const QuboInstance& q, const LocalSearchOptions& opt = {}) {
  if (opt.restarts < 1) throw InvalidArgument("local search needs restarts >= 1");
  const std::size_t n = q.n();
  std::mt19937_64 rng(opt.seed);
  Solution best{BitVector(n), INFINITY,
                {{"restarts", static_cast<double>(opt.restarts)},
                 {"seed", static_cast<double>(opt.seed)}}};
  std::size_t total_flips = 0;
  for (std::size_t r = 0; r < opt.restarts; ++r) {
    std::size_t flips = 0;
    const BitVector x = steepest_descent(q, random_bits(n, rng), &flips);
    total_flips += flips;
    const double e = q.energy(x);
    if (e < best.energy) {
      best.x = x;
      best.energy = e;
    }
  }
  best.meta["flips"] = static_cast<double>(total_flips);
  return best;
}

}  // namespace qubokit
