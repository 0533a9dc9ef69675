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
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "qubokit/assignment.hpp"
#include "qubokit/bitvec.hpp"
#include "qubokit/instance.hpp"
#include "qubokit/solving.hpp"

namespace qubokit {

// ---------------------------------------------------------------------------
// Persistencies

/// Rules of the persistency search. With c_i = Q_ii, r_ij the coupling,
/// D+_i / D-_i the sums of positive / negative couplings of i (and \j
/// meaning "without j"):
///   fix_zero   c_i + D-_i >= 0                                  => x_i = 0
///   fix_one    c_i + D+_i <= 0                                  => x_i = 1
///   equal      c_i + r_ij + D+_i\j <= 0 and c_i + D-_i\j >= 0   => x_i = x_j
///   opposite   c_i + r_ij + D-_i\j >= 0 and c_i + D+_i\j <= 0   => x_i = 1 - x_j
/// Each one states that for every completion of the other variables some
/// optimal value of x_i satisfies the implication.
enum class PersistencyRule { fix_zero, fix_one, equal, opposite };

inline const char* rule_name(PersistencyRule r) {
  switch (r) {
    case PersistencyRule::fix_zero: return "R0";
    case PersistencyRule::fix_one: return "R1";
    case PersistencyRule::equal: return "R2";
    case PersistencyRule::opposite: return "R3";
  }
  return "?";
}

struct RuleFiring {
  PersistencyRule rule;
  std::vector<std::size_t> variables;  // full-space indices
};

struct PersistencyReport {
  PartialAssignment assignment;
  std::vector<RuleFiring> rules_fired;
};

namespace detail {

struct RowSums {
  std::vector<double> pos, neg;
};

inline RowSums row_sums(const QuboInstance& q) {
  const std::size_t n = q.n();
  RowSums s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = q(i, j);
      if (r > 0) {
        s.pos[i] += r;
        s.pos[j] += r;
      } else if (r < 0) {
        s.neg[i] += r;
        s.neg[j] += r;
      }
    }
  return s;
}

// First applicable rule on `q` in scan order: fix rules over all variables,
// then tie rules over all ordered pairs. Indices are local to `q`.
inline std::optional<RuleFiring> first_rule(const QuboInstance& q) {
  const std::size_t n = q.n();
  const RowSums s = row_sums(q);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = q(i, i);
    if (c + s.neg[i] >= 0) return RuleFiring{PersistencyRule::fix_zero, {i}};
    if (c + s.pos[i] <= 0) return RuleFiring{PersistencyRule::fix_one, {i}};
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double c = q(i, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double r = q.coupling(i, j);
      const double pos_wo = s.pos[i] - std::max(r, 0.0);
      const double neg_wo = s.neg[i] - std::min(r, 0.0);
      if (c + r + pos_wo <= 0 && c + neg_wo >= 0)
        return RuleFiring{PersistencyRule::equal, {i, j}};
      if (c + r + neg_wo >= 0 && c + pos_wo <= 0)
        return RuleFiring{PersistencyRule::opposite, {i, j}};
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Greedy persistency search. After every firing the constraint is folded
/// into the instance and the scan restarts; the returned assignment is
/// consistent with at least one global minimizer.
inline PersistencyReport qpro_plus(const QuboInstance& q) {
  AssignmentBuilder builder(q.n());
  PartialAssignment pa = builder.build();
  std::vector<RuleFiring> fired;
  while (true) {
    const QuboInstance reduced = pa.apply(q).instance;
    auto hit = detail::first_rule(reduced);
    if (!hit) break;
    const auto& free = pa.free_variables();
    for (auto& v : hit->variables) v = free[v];
    switch (hit->rule) {
      case PersistencyRule::fix_zero: builder.fix(hit->variables[0], false); break;
      case PersistencyRule::fix_one: builder.fix(hit->variables[0], true); break;
      case PersistencyRule::equal:
        builder.equate(hit->variables[0], hit->variables[1], false);
        break;
      case PersistencyRule::opposite:
        builder.equate(hit->variables[0], hit->variables[1], true);
        break;
    }
    fired.push_back(std::move(*hit));
    pa = builder.build();
  }
  return {std::move(pa), std::move(fired)};
}

// ---------------------------------------------------------------------------
// Bounds on the minimal energy

/// Sum of the negative parts of all weights; never above min E.
inline double subspace_lower_bound(const QuboInstance& q) {
  double lb = 0.0;
  for (std::size_t i = 0; i < q.n(); ++i)
    for (std::size_t j = i; j < q.n(); ++j) lb += std::min(0.0, q(i, j));
  return lb;
}

/// Best energy of steepest descent from `restarts` seeded random starts;
/// never below min E.
inline double subspace_upper_bound(const QuboInstance& q, std::uint64_t seed,
                                   std::size_t restarts = 4) {
  if (q.n() == 0) return 0.0;
  return local_search(q, {restarts, seed}).energy;
}

// ---------------------------------------------------------------------------
// Dynamic range reduction

struct DynamicRangeOptions {
  std::uint64_t seed = 0;
  std::size_t restarts = 4;      // for the upper bounds
  std::size_t branch_depth = 4;  // for the lower bounds
  std::size_t max_moves = static_cast<std::size_t>(-1);
};

struct DynamicRangeMove {
  std::size_t row, col;
  double from, to;
  double dynamic_range;  // after the move
};

struct DynamicRangeResult {
  QuboInstance instance;
  double initial_dynamic_range = 0.0;
  std::vector<DynamicRangeMove> moves;
};

namespace detail {

struct Interval {
  double lower, upper;
};

// Row-wise bound: E = sum_i x_i (Q_ii + sum_{j>i} Q_ij x_j), each summand
// at least min(0, Q_ii + sum_{j>i} min(0, Q_ij)). Taken in both variable
// orders; never below subspace_lower_bound.
inline double row_lower_bound(const QuboInstance& q) {
  const std::size_t n = q.n();
  double forward = 0.0, backward = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = q(i, i), b = q(i, i);
    for (std::size_t j = i + 1; j < n; ++j) f += std::min(0.0, q(i, j));
    for (std::size_t j = 0; j < i; ++j) b += std::min(0.0, q(j, i));
    forward += std::min(0.0, f);
    backward += std::min(0.0, b);
  }
  return std::max(forward, backward);
}

// Minimum of row_lower_bound over all values of the `depth` variables with
// the most couplings.
inline double branched_lower_bound(const QuboInstance& q, std::size_t depth) {
  const std::size_t n = q.n();
  depth = std::min(depth, n);
  if (depth == 0) return row_lower_bound(q);
  std::vector<std::size_t> degree(n, 0), order(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (q(i, j) != 0.0) {
        ++degree[i];
        ++degree[j];
      }
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return degree[a] > degree[b]; });
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << depth); ++k) {
    std::map<std::size_t, int> pairs;
    for (std::size_t b = 0; b < depth; ++b) pairs[order[b]] = static_cast<int>((k >> b) & 1);
    const auto [sub, constant] = from_pairs(pairs, n).apply(q);
    best = std::min(best, constant + row_lower_bound(sub));
  }
  return best;
}

inline Interval clamped_bounds(const QuboInstance& q, const PartialAssignment& pa,
                               const DynamicRangeOptions& opt) {
  const auto [sub, constant] = pa.apply(q);
  return {constant + branched_lower_bound(sub, opt.branch_depth),
          constant + subspace_upper_bound(sub, opt.seed, opt.restarts)};
}

// Bounds on min E over A = {x : x_i x_j = 1} and over its complement B.
inline std::pair<Interval, Interval> term_bounds(const QuboInstance& q, std::size_t i,
                                                 std::size_t j,
                                                 const DynamicRangeOptions& opt) {
  const std::size_t n = q.n();
  if (i == j) {
    return {clamped_bounds(q, from_pairs({{i, 1}}, n), opt),
            clamped_bounds(q, from_pairs({{i, 0}}, n), opt)};
  }
  const Interval a = clamped_bounds(q, from_pairs({{i, 1}, {j, 1}}, n), opt);
  const Interval b1 = clamped_bounds(q, from_pairs({{i, 0}}, n), opt);
  const Interval b2 = clamped_bounds(q, from_pairs({{i, 1}, {j, 0}}, n), opt);
  return {a, {std::min(b1.lower, b2.lower), std::min(b1.upper, b2.upper)}};
}

// Whether adding `delta` to Q_ij keeps the new argmin set inside the old
// one. The term shifts every energy in A by delta and leaves B alone. Every
// inequality must hold with `margin` to spare, absorbing rounding.
inline bool shift_is_safe(const Interval& a, const Interval& b, double delta,
                          double margin = 0.0) {
  if (delta > 0) {
    // B already holds an optimum, or A's optimum stays strictly below B's.
    return b.upper + margin <= a.lower || delta + margin < b.lower - a.upper;
  }
  const double drop = -delta;
  return a.upper + margin <= b.lower || drop + margin < a.lower - b.upper;
}

inline double rounding_margin(const QuboInstance& q) {
  double scale = 1.0;
  for (std::size_t i = 0; i < q.n(); ++i)
    for (std::size_t j = i; j < q.n(); ++j) scale += std::abs(q(i, j));
  return 1e-9 * scale;
}

}  // namespace detail

/// Lowers the dynamic range by merging single parameters into a neighbouring
/// distinct value, one move at a time.
///
/// A move takes a value held by exactly one position (i, j) to the next
/// distinct value above or below it. Candidates are ranked by the resulting
/// drop in dynamic range (largest first), then by (i, j), then by the size
/// of the change; the first one that passes the bound test is applied. The
/// bound test only admits moves after which every global minimizer of the
/// new instance was a global minimizer of the old one. Stops when no
/// candidate strictly lowers the range or none is safe.
inline DynamicRangeResult reduce_dynamic_range_trace(const QuboInstance& q,
                                                     const DynamicRangeOptions& opt = {}) {
  DynamicRangeResult result{q, q.dynamic_range(), {}};
  Matrix w = q.weights();
  const std::size_t n = q.n();

  struct Candidate {
    double drop;
    std::size_t i, j;
    double change;
    double target;
    double new_range;
  };

  while (result.moves.size() < opt.max_moves) {
    const QuboInstance& cur = result.instance;
    const std::vector<double> values = cur.distinct_values();
    if (values.size() <= 2) break;
    const double range = QuboInstance::dynamic_range_of(values);

    std::map<double, std::size_t> multiplicity;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) ++multiplicity[w(i, j)];

    std::vector<Candidate> candidates;
    std::vector<double> rest;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const double v = w(i, j);
        if (multiplicity[v] != 1) continue;
        const auto pos = static_cast<std::size_t>(
            std::lower_bound(values.begin(), values.end(), v) - values.begin());
        rest.assign(values.begin(), values.end());
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pos));
        const double new_range = QuboInstance::dynamic_range_of(rest);
        const double drop = range - new_range;
        if (!(drop > 0)) continue;
        if (pos > 0)
          candidates.push_back({drop, i, j, v - values[pos - 1], values[pos - 1], new_range});
        if (pos + 1 < values.size())
          candidates.push_back({drop, i, j, values[pos + 1] - v, values[pos + 1], new_range});
      }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(b.drop, a.i, a.j, a.change, a.target) <
             std::tie(a.drop, b.i, b.j, b.change, b.target);
    });

    const double margin = detail::rounding_margin(cur);
    std::optional<Candidate> chosen;
    std::optional<std::pair<std::size_t, std::size_t>> cached_at;
    std::pair<detail::Interval, detail::Interval> cached{};
    for (const auto& c : candidates) {
      if (!cached_at || *cached_at != std::make_pair(c.i, c.j)) {
        cached = detail::term_bounds(cur, c.i, c.j, opt);
        cached_at = std::make_pair(c.i, c.j);
      }
      if (detail::shift_is_safe(cached.first, cached.second, c.target - w(c.i, c.j),
                                  margin)) {
        chosen = c;
        break;
      }
    }
    if (!chosen) break;

    result.moves.push_back({chosen->i, chosen->j, w(chosen->i, chosen->j), chosen->target,
                            chosen->new_range});
    w(chosen->i, chosen->j) = chosen->target;
    result.instance = QuboInstance::from_upper_triangular(w);
  }
  return result;
}

inline QuboInstance reduce_dynamic_range(const QuboInstance& q,
                                         const DynamicRangeOptions& opt = {}) {
  return reduce_dynamic_range_trace(q, opt).instance;
}

}  // namespace qubokit
