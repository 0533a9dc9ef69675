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

// Partial assignments (clamping).
//
// A partial assignment fixes variables to constants and ties pairs of
// variables to be equal or opposite. Internally it is a union-find with
// parity over the n variables plus one extra node standing for the constant
// 0; "x = 1" is a negated link to that node.
//
// Two text forms are accepted:
//
//   assignment expressions   x0, x3 = 0; x7 = 1; x12 = x8; x13 != x9
//     stmt_list := stmt (';' stmt)*
//     stmt      := varlist ('=' | '!=') rhs
//     varlist   := var (',' var)*
//     rhs       := '0' | '1' | ['!'] var
//     var       := 'x' digits
//   Whitespace between tokens is ignored, empty statements are skipped and
//   "x5=!x4" reads as "x5 = !x4".
//
//   bit vector expressions   **00**[1]*1[!4]1
//   one token per variable: '0' | '1' | '*' (free) | '[k]' (x_p = x_k) |
//   '[!k]' (x_p = 1 - x_k).
//
// Once built, an assignment is frozen into canonical form: every class of
// tied variables is represented by its smallest member, and the reduced
// problem is indexed by those representatives in ascending order.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qubokit/bitvec.hpp"
#include "qubokit/error.hpp"
#include "qubokit/instance.hpp"
#include "qubokit/matrix.hpp"

namespace qubokit {

/// How one variable is determined: the constant `flip` when `rep` is empty,
/// otherwise x_rep XOR flip.
struct Binding {
  std::optional<std::size_t> rep;
  bool flip = false;

  bool is_constant() const noexcept { return !rep.has_value(); }
  friend bool operator==(const Binding&, const Binding&) = default;
};

/// Result of clamping an instance.
struct ClampedInstance {
  QuboInstance instance;
  double constant = 0.0;
};

/// Default cap on the number of free variables for enumerate_matches.
inline constexpr std::size_t kDefaultMatchCap = 20;

class PartialAssignment;

// Mutable parity union-find used to build assignments.
class AssignmentBuilder {
 public:
  explicit AssignmentBuilder(std::size_t n)
      : n_(n), parent_(n + 1), parity_(n + 1, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t n() const noexcept { return n_; }

  /// Adds x_i = x_j XOR negated.
  void equate(std::size_t i, std::size_t j, bool negated) {
    check_index(i);
    check_index(j);
    link(i, j, negated);
  }

  /// Adds x_i = value.
  void fix(std::size_t i, bool value) {
    check_index(i);
    link(i, zero(), value);
  }

  /// Root of i and the parity of i relative to it.
  std::pair<std::size_t, bool> find(std::size_t i) {
    std::size_t root = i;
    bool parity = false;
    while (parent_[root] != root) {
      parity ^= parity_[root] != 0;
      root = parent_[root];
    }
    // Path compression, rewriting each parity relative to the root.
    bool p = parity;
    std::size_t cur = i;
    while (parent_[cur] != root && cur != root) {
      const std::size_t next = parent_[cur];
      const bool own = parity_[cur] != 0;
      parent_[cur] = root;
      parity_[cur] = p ? 1 : 0;
      p ^= own;
      cur = next;
    }
    return {root, parity};
  }

  PartialAssignment build();

 private:
  std::size_t zero() const noexcept { return n_; }

  void check_index(std::size_t i) const {
    if (i >= n_)
      throw InvalidArgument("variable x" + std::to_string(i) + " out of range for n = " +
                            std::to_string(n_));
  }

  void link(std::size_t i, std::size_t j, bool negated) {
    auto [ri, pi] = find(i);
    auto [rj, pj] = find(j);
    if (ri == rj) {
      if ((pi ^ pj) != negated) throw conflict(i, j, negated);
      return;
    }
    // Keep the constant node a root so constants stay cheap to read off.
    if (ri == zero()) std::swap(ri, rj);
    parent_[ri] = rj;
    parity_[ri] = (pi ^ pj ^ negated) ? 1 : 0;
  }

  ConflictError conflict(std::size_t i, std::size_t j, bool negated) const {
    std::string what;
    std::vector<std::size_t> vars{i};
    if (j == zero()) {
      what = "conflicting constraint x" + std::to_string(i) + " = " + (negated ? "1" : "0");
    } else {
      what = "conflicting constraint x" + std::to_string(i) + (negated ? " != " : " = ") +
             "x" + std::to_string(j);
      if (j != i) vars.push_back(j);
    }
    return ConflictError(what, std::move(vars));
  }

  std::size_t n_;
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> parity_;
};

class PartialAssignment {
 public:
  /// The assignment that constrains nothing.
  static PartialAssignment identity(std::size_t n) { return AssignmentBuilder(n).build(); }

  std::size_t n() const noexcept { return bindings_.size(); }
  std::size_t num_free() const noexcept { return free_.size(); }

  /// Representatives of the free classes, ascending; position k in this list
  /// is variable k of the reduced problem.
  const std::vector<std::size_t>& free_variables() const noexcept { return free_; }

  const Binding& binding(std::size_t i) const { return bindings_.at(i); }

  bool is_identity() const noexcept { return free_.size() == bindings_.size(); }

  /// Substitutes the constraints into `q`, returning the instance over the
  /// free representatives and the constant such that
  /// E_q(expand(y)) == E_reduced(y) + constant for every reduced y.
  ClampedInstance apply(const QuboInstance& q) const {
    if (q.n() != n())
      throw InvalidArgument("assignment over n = " + std::to_string(n()) +
                            " applied to instance with n = " + std::to_string(q.n()));
    // x_i = offset_i + sign_i * y_{slot_i}
    const std::size_t m = num_free();
    std::vector<double> offset(n()), sign(n());
    std::vector<std::size_t> slot(n(), 0);
    for (std::size_t i = 0; i < n(); ++i) {
      const Binding& b = bindings_[i];
      if (b.is_constant()) {
        offset[i] = b.flip ? 1.0 : 0.0;
        sign[i] = 0.0;
      } else {
        offset[i] = b.flip ? 1.0 : 0.0;
        sign[i] = b.flip ? -1.0 : 1.0;
        slot[i] = reduced_index_[*b.rep];
      }
    }

    Matrix r(m, m);
    double constant = 0.0;
    for (std::size_t i = 0; i < n(); ++i) {
      for (std::size_t j = i; j < n(); ++j) {
        const double w = q(i, j);
        if (w == 0.0) continue;
        if (i == j) {
          if (offset[i] != 0.0) constant += w * offset[i];
          if (sign[i] != 0.0) r(slot[i], slot[i]) += w * sign[i];
          continue;
        }
        if (offset[i] != 0.0 && offset[j] != 0.0) constant += w;
        if (sign[j] != 0.0 && offset[i] != 0.0) r(slot[j], slot[j]) += w * sign[j];
        if (sign[i] != 0.0 && offset[j] != 0.0) r(slot[i], slot[i]) += w * sign[i];
        if (sign[i] != 0.0 && sign[j] != 0.0) {
          const std::size_t a = std::min(slot[i], slot[j]);
          const std::size_t b = std::max(slot[i], slot[j]);
          r(a, b) += w * sign[i] * sign[j];  // a == b folds into the linear term
        }
      }
    }
    return {QuboInstance::from_upper_triangular(std::move(r)), constant};
  }

  /// Re-inserts the clamped variables into a reduced vector.
  BitVector expand(const BitVector& reduced) const {
    if (reduced.size() != num_free())
      throw InvalidArgument("reduced vector has length " + std::to_string(reduced.size()) +
                            ", expected " + std::to_string(num_free()));
    BitVector x(n());
    for (std::size_t i = 0; i < n(); ++i) {
      const Binding& b = bindings_[i];
      const bool base = b.is_constant() ? false : reduced[reduced_index_[*b.rep]] != 0;
      x.set(i, base ^ b.flip);
    }
    return x;
  }

  /// Projects a full vector onto the free representatives.
  BitVector restrict(const BitVector& full) const {
    if (full.size() != n()) throw InvalidArgument("full vector length mismatch");
    BitVector y(num_free());
    for (std::size_t k = 0; k < free_.size(); ++k) y.set(k, full[free_[k]]);
    return y;
  }

  bool satisfied_by(const BitVector& x) const {
    if (x.size() != n()) return false;
    for (std::size_t i = 0; i < n(); ++i) {
      const Binding& b = bindings_[i];
      const bool want = b.is_constant() ? b.flip : ((x[*b.rep] != 0) ^ b.flip);
      if ((x[i] != 0) != want) return false;
    }
    return true;
  }

  /// Calls `visit` on each of the 2^num_free() full vectors consistent with
  /// the constraints, in ascending order of the reduced index.
  void for_each_match(const std::function<void(const BitVector&)>& visit,
                      std::size_t cap = kDefaultMatchCap) const {
    if (num_free() > cap || num_free() >= 64)
      throw ResourceError("enumerate_matches: " + std::to_string(num_free()) +
                          " free variables exceed cap " + std::to_string(cap));
    const std::uint64_t count = std::uint64_t{1} << num_free();
    for (std::uint64_t k = 0; k < count; ++k)
      visit(expand(BitVector::from_index(k, num_free())));
  }

  std::vector<BitVector> matches(std::size_t cap = kDefaultMatchCap) const {
    std::vector<BitVector> out;
    for_each_match([&](const BitVector& x) { out.push_back(x); }, cap);
    return out;
  }

  /// Canonical assignment expression: the zeros group, the ones group, then
  /// one tie per non-representative variable, "xi = xj" or "xi != xj" with
  /// i > j, joined by "; ". The identity prints as the empty string.
  std::string to_string() const {
    std::vector<std::size_t> zeros, ones;
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < n(); ++i) {
      const Binding& b = bindings_[i];
      if (b.is_constant()) (b.flip ? ones : zeros).push_back(i);
    }
    auto group = [](const std::vector<std::size_t>& vars, const char* value) {
      std::string s;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        if (k) s += ", ";
        s += "x" + std::to_string(vars[k]);
      }
      return s + " = " + value;
    };
    if (!zeros.empty()) parts.push_back(group(zeros, "0"));
    if (!ones.empty()) parts.push_back(group(ones, "1"));
    for (std::size_t i = 0; i < n(); ++i) {
      const Binding& b = bindings_[i];
      if (b.is_constant() || *b.rep == i) continue;
      parts.push_back("x" + std::to_string(i) + (b.flip ? " != x" : " = x") +
                      std::to_string(*b.rep));
    }
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (k) out += "; ";
      out += parts[k];
    }
    return out;
  }

  /// Equal iff both describe the same set of constraint classes.
  friend bool operator==(const PartialAssignment& a, const PartialAssignment& b) {
    return a.bindings_ == b.bindings_;
  }

  friend std::ostream& operator<<(std::ostream& os, const PartialAssignment& pa) {
    return os << pa.to_string();
  }

 private:
  friend class AssignmentBuilder;
  PartialAssignment() = default;

  std::vector<Binding> bindings_;
  std::vector<std::size_t> free_;
  std::vector<std::size_t> reduced_index_;  // representative -> reduced slot
};

inline PartialAssignment AssignmentBuilder::build() {
  PartialAssignment pa;
  pa.bindings_.resize(n_);
  pa.reduced_index_.assign(n_, 0);
  // Smallest member of each class becomes its representative.
  std::vector<std::optional<std::pair<std::size_t, bool>>> rep_of_root(n_ + 1);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto [root, parity] = find(i);
    if (root == zero()) {
      pa.bindings_[i] = Binding{std::nullopt, parity};
      continue;
    }
    auto& rep = rep_of_root[root];
    if (!rep) {
      rep = std::make_pair(i, parity);
      pa.reduced_index_[i] = pa.free_.size();
      pa.free_.push_back(i);
    }
    pa.bindings_[i] = Binding{rep->first, parity != rep->second};
  }
  return pa;
}

namespace detail {

class ExprCursor {
 public:
  explicit ExprCursor(std::string_view s) : s_(s) {}

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_space();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) fail(std::string("expected ") + what);
  }
  std::size_t pos() {
    skip_space();
    return pos_;
  }

  /// Decimal index starting at the raw position (no whitespace skipping).
  std::size_t digits(const char* what) {
    const std::size_t start = pos_;
    std::size_t value = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      if (value > (static_cast<std::size_t>(-1) - 9) / 10) throw ParseError("index too large", start);
      value = value * 10 + static_cast<std::size_t>(s_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) fail(std::string("expected ") + what);
    return value;
  }

  [[noreturn]] void fail(const std::string& what) {
    skip_space();
    if (pos_ >= s_.size()) throw ParseError(what + ", found end of input", pos_);
    throw ParseError(what + ", found '" + std::string(1, s_[pos_]) + "'", pos_);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses an assignment expression such as "x0, x3 = 0; x7 = 1; x13 != x9".
inline PartialAssignment parse_assignment_expr(std::string_view expr, std::size_t n) {
  AssignmentBuilder builder(n);
  detail::ExprCursor cur(expr);

  auto variable = [&]() {
    const std::size_t at = cur.pos();
    if (!cur.accept('x')) cur.fail("expected variable 'x<index>'");
    const std::size_t index = cur.digits("variable index");
    if (index >= n)
      throw ParseError("variable x" + std::to_string(index) + " out of range for n = " +
                           std::to_string(n),
                       at);
    return index;
  };

  while (true) {
    if (cur.at_end()) break;
    if (cur.accept(';')) continue;

    const std::size_t stmt_at = cur.pos();
    std::vector<std::size_t> lhs{variable()};
    while (cur.accept(',')) lhs.push_back(variable());

    bool negated = false;
    if (cur.accept('!')) {
      cur.expect('=', "'=' after '!'");
      negated = true;
    } else {
      cur.expect('=', "'=' or '!='");
    }

    const char c = cur.peek();
    try {
      if (c == '0' || c == '1') {
        cur.accept(c);
        for (auto v : lhs) builder.fix(v, (c == '1') != negated);
      } else {
        if (cur.accept('!')) negated = !negated;
        const std::size_t rhs = variable();
        for (auto v : lhs) builder.equate(v, rhs, negated);
      }
    } catch (const ConflictError& e) {
      throw ConflictError(e.what(), e.variables(), stmt_at);
    }

    if (cur.at_end()) break;
    cur.expect(';', "';' between statements");
  }
  return builder.build();
}

/// Parses a bit vector expression such as "**00**[1]*1[!4]1"; n is the
/// number of tokens.
inline PartialAssignment parse_bitvec_expr(std::string_view expr) {
  struct Token {
    char kind;  // '0', '1', '*', '=' (tie), '!' (negated tie)
    std::size_t ref = 0;
    std::size_t at = 0;
  };
  std::vector<Token> tokens;
  std::size_t p = 0;
  while (p < expr.size()) {
    const char c = expr[p];
    if (c == '0' || c == '1' || c == '*') {
      tokens.push_back({c, 0, p});
      ++p;
      continue;
    }
    if (c != '[') throw ParseError(std::string("unexpected character '") + c + "'", p);
    const std::size_t open = p++;
    bool negated = false;
    if (p < expr.size() && expr[p] == '!') {
      negated = true;
      ++p;
    }
    const std::size_t start = p;
    std::size_t ref = 0;
    while (p < expr.size() && std::isdigit(static_cast<unsigned char>(expr[p]))) {
      if (ref > (static_cast<std::size_t>(-1) - 9) / 10) throw ParseError("index too large", start);
      ref = ref * 10 + static_cast<std::size_t>(expr[p] - '0');
      ++p;
    }
    if (p == start) throw ParseError("malformed bracket: expected index", p);
    if (p >= expr.size() || expr[p] != ']') throw ParseError("malformed bracket: expected ']'", p);
    ++p;
    tokens.push_back({negated ? '!' : '=', ref, open});
  }
  if (tokens.empty()) throw ParseError("empty bit vector expression", 0);

  AssignmentBuilder builder(tokens.size());
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    const Token& t = tokens[pos];
    if (t.kind == '*') continue;
    try {
      if (t.kind == '0' || t.kind == '1') {
        builder.fix(pos, t.kind == '1');
        continue;
      }
      if (t.ref >= tokens.size())
        throw ParseError("reference [" + std::to_string(t.ref) + "] out of range for n = " +
                             std::to_string(tokens.size()),
                         t.at);
      builder.equate(pos, t.ref, t.kind == '!');
    } catch (const ConflictError& e) {
      throw ConflictError(e.what(), e.variables(), t.at);
    }
  }
  return builder.build();
}

/// Fixes the listed variables to constants.
inline PartialAssignment from_pairs(const std::map<std::size_t, int>& pairs, std::size_t n) {
  AssignmentBuilder builder(n);
  for (const auto& [index, value] : pairs) {
    if (value != 0 && value != 1)
      throw InvalidArgument("value for x" + std::to_string(index) + " must be 0 or 1");
    builder.fix(index, value == 1);
  }
  return builder.build();
}

}  // namespace qubokit
