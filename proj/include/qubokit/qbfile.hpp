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

// Binary instance files.
//
//   offset  size  field
//   0       4     magic "QBF1"
//   4       1     mode: 0 = dense, 1 = sparse
//   5       4     n, unsigned little-endian
//   9       ...   payload
//
// Dense payload: the n(n+1)/2 upper-triangle entries, row by row, as
// little-endian IEEE-754 doubles.
// Sparse payload: nnz as u64, then nnz records (row u32, col u32, value f64),
// strictly increasing in (row, col), row <= col.
// The writer picks sparse iff 16 * nnz < 8 * n(n+1)/2.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "qubokit/error.hpp"
#include "qubokit/instance.hpp"
#include "qubokit/matrix.hpp"

namespace qubokit::qbfile {

inline constexpr char kMagic[4] = {'Q', 'B', 'F', '1'};
inline constexpr std::uint8_t kDense = 0;
inline constexpr std::uint8_t kSparse = 1;
inline constexpr std::size_t kHeaderSize = 9;
// Guards the dense allocation on load.
inline constexpr std::uint32_t kMaxN = 1U << 16;

enum class Mode { dense, sparse };

inline Mode choose_mode(std::size_t n, std::size_t nnz) {
  const std::uint64_t triangle = static_cast<std::uint64_t>(n) * (n + 1) / 2;
  return 16 * static_cast<std::uint64_t>(nnz) < 8 * triangle ? Mode::sparse : Mode::dense;
}

namespace detail {

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t b = 0; b < sizeof(T); ++b)
    out.push_back(static_cast<std::uint8_t>((value >> (8 * b)) & 0xFF));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_le(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  template <class T>
  T get_le(const char* what) {
    if (remaining() < sizeof(T)) throw FormatError(std::string("truncated ") + what, pos_);
    T v = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b)
      v |= static_cast<T>(static_cast<T>(bytes_[pos_ + b]) << (8 * b));
    pos_ += sizeof(T);
    return v;
  }

  double get_f64(const char* what) { return std::bit_cast<double>(get_le<std::uint64_t>(what)); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode(const QuboInstance& q) {
  const std::size_t n = q.n();
  if (n > 0xFFFFFFFFULL) throw InvalidArgument("instance too large for the file format");
  const std::size_t nnz = q.nnz();
  const Mode mode = choose_mode(n, nnz);
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(mode == Mode::dense ? kDense : kSparse);
  detail::put_le(out, static_cast<std::uint32_t>(n));
  if (mode == Mode::dense) {
    out.reserve(out.size() + 8 * n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) detail::put_f64(out, q(i, j));
  } else {
    detail::put_le(out, static_cast<std::uint64_t>(nnz));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        if (q(i, j) == 0.0) continue;
        detail::put_le(out, static_cast<std::uint32_t>(i));
        detail::put_le(out, static_cast<std::uint32_t>(j));
        detail::put_f64(out, q(i, j));
      }
  }
  return out;
}

inline QuboInstance decode(const std::vector<std::uint8_t>& bytes) {
  detail::Reader in(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("bad magic, expected \"QBF1\"", 0);
  in.get_le<std::uint32_t>("magic");
  const std::size_t mode_at = in.offset();
  const auto mode = in.get_le<std::uint8_t>("mode byte");
  if (mode != kDense && mode != kSparse)
    throw FormatError("unknown mode " + std::to_string(mode), mode_at);
  const std::size_t n_at = in.offset();
  const std::uint32_t n = in.get_le<std::uint32_t>("dimension");
  if (n > kMaxN) throw FormatError("dimension " + std::to_string(n) + " too large", n_at);

  Matrix m(n, n);
  auto check_value = [&](double v, std::size_t at) {
    if (!std::isfinite(v)) throw FormatError("non-finite weight", at);
  };
  if (mode == kDense) {
    const std::uint64_t count = static_cast<std::uint64_t>(n) * (n + 1) / 2;
    if (in.remaining() < 8 * count) throw FormatError("truncated dense payload", in.offset());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const std::size_t at = in.offset();
        m(i, j) = in.get_f64("dense payload");
        check_value(m(i, j), at);
      }
  } else {
    const std::uint64_t nnz = in.get_le<std::uint64_t>("record count");
    if (nnz > in.remaining() / 16) throw FormatError("truncated sparse payload", in.offset());
    std::int64_t prev_row = -1, prev_col = -1;
    for (std::uint64_t k = 0; k < nnz; ++k) {
      const std::size_t at = in.offset();
      const std::uint32_t row = in.get_le<std::uint32_t>("sparse record");
      const std::uint32_t col = in.get_le<std::uint32_t>("sparse record");
      const double v = in.get_f64("sparse record");
      if (row >= n || col >= n) throw FormatError("sparse record index out of range", at);
      if (row > col) throw FormatError("sparse record below the diagonal", at);
      if (std::tie(prev_row, prev_col) >= std::make_tuple<std::int64_t, std::int64_t>(row, col))
        throw FormatError("sparse records unsorted or duplicated", at);
      check_value(v, at + 8);
      m(row, col) = v;
      prev_row = row;
      prev_col = col;
    }
  }
  if (in.remaining() != 0) throw FormatError("trailing bytes after payload", in.offset());
  return QuboInstance::from_upper_triangular(std::move(m));
}

inline void save(const QuboInstance& q, std::ostream& os) {
  const auto bytes = encode(q);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("write failure");
}

inline void save(const QuboInstance& q, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  save(q, os);
}

inline QuboInstance load(std::istream& is) {
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(is),
                                  std::istreambuf_iterator<char>()};
  return decode(bytes);
}

inline QuboInstance load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return load(is);
}

}  // namespace qubokit::qbfile
