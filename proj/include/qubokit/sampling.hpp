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
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qubokit/bitvec.hpp"
#include "qubokit/error.hpp"
#include "qubokit/instance.hpp"
#include "qubokit/matrix.hpp"
#include "qubokit/probability.hpp"

namespace qubokit {

/// A multiset of observed bit vectors, viewed as an empirical distribution.
///
/// Text form: one bit string per line, optionally followed by "×count"
/// (an ASCII 'x' is accepted in place of '×'). Blank lines and lines starting
/// with '#' are skipped.
class BinarySample {
 public:
  explicit BinarySample(std::size_t n) : n_(n) {}

  std::size_t n() const noexcept { return n_; }
  std::uint64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  const std::map<BitVector, std::uint64_t>& counts() const noexcept { return counts_; }

  void record(const BitVector& x, std::uint64_t count = 1) {
    if (x.size() != n_)
      throw InvalidArgument("sample vector has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(n_));
    if (count == 0) return;
    counts_[x] += count;
    total_ += count;
  }

  std::uint64_t count(const BitVector& x) const {
    const auto it = counts_.find(x);
    return it == counts_.end() ? 0 : it->second;
  }

  double empirical_probability(const BitVector& x) const {
    require_nonempty();
    if (x.size() != n_) throw InvalidArgument("query vector length mismatch");
    return static_cast<double>(count(x)) / static_cast<double>(total_);
  }

  /// m draws without replacement from the multiset.
  BinarySample subsample(std::uint64_t m, std::uint64_t seed) const {
    if (m < 1 || m > total_)
      throw InvalidArgument("subsample size must lie in [1, " + std::to_string(total_) + "]");
    // Selection sampling over the multiset laid out in key order.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    BinarySample out(n_);
    std::uint64_t remaining = total_;
    std::uint64_t needed = m;
    for (const auto& [x, c] : counts_) {
      std::uint64_t taken = 0;
      for (std::uint64_t k = 0; k < c && needed > 0; ++k, --remaining) {
        if (static_cast<double>(remaining) * unit(rng) < static_cast<double>(needed)) {
          ++taken;
          --needed;
        }
      }
      if (taken) out.record(x, taken);
      if (needed == 0) break;
    }
    return out;
  }

  /// Upper-triangular matrix of first and second moments:
  /// S_ij = (1/total) sum_x count(x) x_i x_j for i <= j.
  Matrix sufficient_statistic() const {
    require_nonempty();
    Matrix s(n_, n_);
    for (const auto& [x, c] : counts_)
      for (std::size_t i = 0; i < n_; ++i) {
        if (!x[i]) continue;
        for (std::size_t j = i; j < n_; ++j)
          if (x[j]) s(i, j) += static_cast<double>(c);
      }
    for (double& v : s.data()) v /= static_cast<double>(total_);
    return s;
  }

  /// Empirical distribution as a dense vector over the 2^n indices.
  std::vector<double> probability_vector(std::size_t cap = kDefaultArrayCap) const {
    require_nonempty();
    if (n_ > cap)
      throw ResourceError("probability vector: n = " + std::to_string(n_) + " exceeds cap " +
                          std::to_string(cap));
    std::vector<double> p(std::size_t{1} << n_, 0.0);
    for (const auto& [x, c] : counts_)
      p[x.index()] = static_cast<double>(c) / static_cast<double>(total_);
    return p;
  }

  void write(std::ostream& os) const {
    for (const auto& [x, c] : counts_) {
      os << to_string(x);
      if (c != 1) os << "\xC3\x97" << c;
      os << '\n';
    }
  }

  /// Reads the text form; n is taken from the first vector.
  static BinarySample read(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<BinarySample> sample;
    while (std::getline(is, line)) {
      ++line_no;
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      std::string bits = line;
      std::uint64_t c = 1;
      std::size_t cut = line.find("\xC3\x97");
      std::size_t skip = 2;
      if (cut == std::string::npos) {
        cut = line.find('x');
        skip = 1;
      }
      if (cut != std::string::npos) {
        bits = line.substr(0, cut);
        const std::string digits = line.substr(cut + skip);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
          throw ParseError("bad count on line " + std::to_string(line_no), cut + skip);
        c = std::stoull(digits);
      }
      const BitVector x = from_string(bits);
      if (!sample) sample.emplace(x.size());
      sample->record(x, c);
    }
    if (!sample) throw ParseError("sample contains no vectors", 0);
    return *sample;
  }

 private:
  void require_nonempty() const {
    if (total_ == 0) throw InvalidArgument("operation needs a non-empty sample");
  }

  std::size_t n_;
  std::uint64_t total_ = 0;
  std::map<BitVector, std::uint64_t> counts_;
};

/// Hellinger distance (1/sqrt 2) * || sqrt(p) - sqrt(q) ||_2, in [0, 1].
inline double hellinger(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("distributions over different spaces");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = std::sqrt(p[k]) - std::sqrt(q[k]);
    s += d * d;
  }
  return std::min(1.0, std::sqrt(s / 2.0));
}

inline double hellinger(const BinarySample& a, const BinarySample& b) {
  if (a.n() != b.n()) throw InvalidArgument("samples over different n");
  if (a.empty() || b.empty()) throw InvalidArgument("hellinger needs non-empty samples");
  const double ta = static_cast<double>(a.total());
  const double tb = static_cast<double>(b.total());
  double s = 0.0;
  auto ia = a.counts().begin();
  auto ib = b.counts().begin();
  // Merge over the union of keys; keys missing on one side count as 0.
  while (ia != a.counts().end() || ib != b.counts().end()) {
    double pa = 0.0, pb = 0.0;
    if (ib == b.counts().end() || (ia != a.counts().end() && ia->first < ib->first)) {
      pa = static_cast<double>(ia->second) / ta;
      ++ia;
    } else if (ia == a.counts().end() || ib->first < ia->first) {
      pb = static_cast<double>(ib->second) / tb;
      ++ib;
    } else {
      pa = static_cast<double>(ia->second) / ta;
      pb = static_cast<double>(ib->second) / tb;
      ++ia;
      ++ib;
    }
    const double d = std::sqrt(pa) - std::sqrt(pb);
    s += d * d;
  }
  return std::min(1.0, std::sqrt(s / 2.0));
}

/// Sample against an exact distribution of length 2^n.
inline double hellinger(const BinarySample& a, std::span<const double> q,
                        std::size_t cap = kDefaultArrayCap) {
  if (a.n() >= 64 || q.size() != (std::size_t{1} << a.n()))
    throw InvalidArgument("exact distribution length does not match 2^n");
  const auto p = a.probability_vector(cap);
  return hellinger(p, q);
}

inline double hellinger(std::span<const double> q, const BinarySample& a,
                        std::size_t cap = kDefaultArrayCap) {
  return hellinger(a, q, cap);
}

/// m independent draws from the Gibbs distribution by inverse CDF.
inline BinarySample gibbs_sample_exact(const QuboInstance& q, double beta, std::uint64_t m,
                                       std::uint64_t seed,
                                       std::size_t cap = kDefaultArrayCap) {
  GibbsOptions opt;
  opt.beta = beta;
  opt.max_vector_n = cap;
  const auto p = probabilities(q, opt);
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) cdf[k] = acc += p[k];
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::uint64_t> hits(p.size(), 0);
  for (std::uint64_t t = 0; t < m; ++t) {
    const double u = unit(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t k = it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
    while (p[k] == 0.0 && k > 0) --k;  // never land on a zero-probability state
    ++hits[k];
  }
  BinarySample out(q.n());
  for (std::size_t k = 0; k < hits.size(); ++k)
    if (hits[k]) out.record(BitVector::from_index(k, q.n()), hits[k]);
  return out;
}

}  // namespace qubokit
