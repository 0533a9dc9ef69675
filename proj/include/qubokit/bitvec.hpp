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

// Binary vectors over {0,1}^n.
//
// Bit order is fixed for the whole library: string position p is variable
// x_p, and the integer index k of a vector has x_i = (k >> i) & 1, so x_0 is
// the least significant bit. Probability vectors, batch energies and the
// enumeration helpers below all follow it.

#include <bit>
#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qubokit/error.hpp"

namespace qubokit {

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}

  explicit BitVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      if (b > 1) throw InvalidArgument("bit vector entries must be 0 or 1");
  }

  BitVector(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) {
      if (b != 0 && b != 1) throw InvalidArgument("bit vector entries must be 0 or 1");
      bits_.push_back(static_cast<std::uint8_t>(b));
    }
  }

  /// Vector with x_i = (k >> i) & 1.
  static BitVector from_index(std::uint64_t k, std::size_t n) {
    BitVector x(n);
    for (std::size_t i = 0; i < n && i < 64; ++i) x.bits_[i] = (k >> i) & 1U;
    return x;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1U; }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  auto begin() const noexcept { return bits_.begin(); }
  auto end() const noexcept { return bits_.end(); }

  /// Integer index under the global bit order. Only meaningful for n <= 64.
  std::uint64_t index() const {
    if (bits_.size() > 64) throw InvalidArgument("index() needs n <= 64");
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      k |= static_cast<std::uint64_t>(bits_[i]) << i;
    return k;
  }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto b : bits_) c += b;
    return c;
  }

  friend auto operator<=>(const BitVector&, const BitVector&) = default;
  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Rectangular stack of bit vectors, stored row-major.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  explicit BitMatrix(const std::vector<BitVector>& rows) {
    rows_ = rows.size();
    cols_ = rows.empty() ? 0 : rows.front().size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidArgument("bit matrix rows differ in length");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const std::uint8_t> row(std::size_t k) const {
    return {data_.data() + k * cols_, cols_};
  }
  std::uint8_t operator()(std::size_t k, std::size_t i) const {
    return data_[k * cols_ + i];
  }
  void set(std::size_t k, std::size_t i, bool v) { data_[k * cols_ + i] = v ? 1 : 0; }

  BitVector row_vector(std::size_t k) const {
    auto r = row(k);
    return BitVector(std::vector<std::uint8_t>(r.begin(), r.end()));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

inline BitVector from_string(std::string_view s) {
  if (s.empty()) throw ParseError("empty bit string", 0);
  std::vector<std::uint8_t> bits(s.size());
  for (std::size_t p = 0; p < s.size(); ++p) {
    if (s[p] == '0')
      bits[p] = 0;
    else if (s[p] == '1')
      bits[p] = 1;
    else
      throw ParseError(std::string("illegal character '") + s[p] + "' in bit string", p);
  }
  return BitVector(std::move(bits));
}

inline std::string to_string(const BitVector& x) {
  std::string s(x.size(), '0');
  for (std::size_t p = 0; p < x.size(); ++p)
    if (x[p]) s[p] = '1';
  return s;
}

/// Default cap on n for the materialized (2^n x n) array form.
inline constexpr std::size_t kDefaultArrayCap = 20;

// Streaming enumeration of {0,1}^n in ascending index order.
class AllBitvectors {
 public:
  explicit AllBitvectors(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidArgument("all_bitvectors needs n >= 1");
    if (n >= 64) throw ResourceError("streaming enumeration limited to n < 64");
  }

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = BitVector;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = BitVector;

    iterator() = default;
    iterator(std::uint64_t k, std::size_t n) : k_(k), n_(n) {}

    BitVector operator*() const { return BitVector::from_index(k_, n_); }
    iterator& operator++() {
      ++k_;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++k_;
      return old;
    }
    bool operator==(const iterator& o) const { return k_ == o.k_; }

   private:
    std::uint64_t k_ = 0;
    std::size_t n_ = 0;
  };

  iterator begin() const { return {0, n_}; }
  iterator end() const { return {std::uint64_t{1} << n_, n_}; }
  std::uint64_t size() const { return std::uint64_t{1} << n_; }

 private:
  std::size_t n_;
};

inline AllBitvectors all_bitvectors(std::size_t n) { return AllBitvectors(n); }

inline BitMatrix all_bitvectors_array(std::size_t n, std::size_t cap = kDefaultArrayCap) {
  if (n == 0) throw InvalidArgument("all_bitvectors_array needs n >= 1");
  if (n > cap)
    throw ResourceError("all_bitvectors_array: n = " + std::to_string(n) +
                        " exceeds cap " + std::to_string(cap));
  const std::uint64_t rows = std::uint64_t{1} << n;
  BitMatrix out(rows, n);
  for (std::uint64_t k = 0; k < rows; ++k)
    for (std::size_t i = 0; i < n; ++i) out.set(k, i, (k >> i) & 1U);
  return out;
}

/// Bit flipped at step k (k >= 1) of the reflected Gray walk.
inline std::size_t gray_flip(std::uint64_t k) noexcept {
  return static_cast<std::size_t>(std::countr_zero(k));
}

// The 2^n - 1 flip indices of the reflected Gray walk starting from all
// zeros.
class GraySequence {
 public:
  explicit GraySequence(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidArgument("gray_sequence needs n >= 1");
    if (n >= 64) throw ResourceError("gray_sequence limited to n < 64");
  }

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = std::size_t;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = std::size_t;

    iterator() = default;
    explicit iterator(std::uint64_t k) : k_(k) {}

    std::size_t operator*() const { return gray_flip(k_); }
    iterator& operator++() {
      ++k_;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++k_;
      return old;
    }
    bool operator==(const iterator& o) const { return k_ == o.k_; }

   private:
    std::uint64_t k_ = 1;
  };

  iterator begin() const { return iterator(1); }
  iterator end() const { return iterator(std::uint64_t{1} << n_); }
  std::uint64_t size() const { return (std::uint64_t{1} << n_) - 1; }

 private:
  std::size_t n_;
};

inline GraySequence gray_sequence(std::size_t n) { return GraySequence(n); }

/// Uniform random bits drawn from an explicit engine.
template <std::uniform_random_bit_generator Engine>
BitVector random_bits(std::size_t n, Engine& rng) {
  static_assert(sizeof(typename Engine::result_type) >= 8, "needs a 64-bit engine");
  std::vector<std::uint8_t> bits(n);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) word = rng();
    bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
  }
  return BitVector(std::move(bits));
}

inline BitVector random_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_bits(n, rng);
}

}  // namespace qubokit
