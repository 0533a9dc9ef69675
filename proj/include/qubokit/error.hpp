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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qubokit {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller: size mismatch, bad parameter range,
/// non-finite weights.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed a configured size cap (exact enumeration,
/// dense arrays).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Malformed text in one of the expression languages or bit strings.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Contradictory parity constraints, e.g. `x1 = 0; x1 = 1` or `x2 != x2`.
/// Parsers attach the offset of the offending statement; programmatic
/// callers get npos.
class ConflictError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  ConflictError(const std::string& what, std::vector<std::size_t> variables,
                std::size_t position = npos)
      : Error(position == npos ? what
                               : what + " at position " + std::to_string(position)),
        variables_(std::move(variables)),
        position_(position) {}

  const std::vector<std::size_t>& variables() const noexcept { return variables_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::vector<std::size_t> variables_;
  std::size_t position_;
};

/// Corrupt or truncated binary instance file.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " at byte offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace qubokit
