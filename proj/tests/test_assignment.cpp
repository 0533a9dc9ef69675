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

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>

#include "oracle.hpp"
#include "qubokit/qubokit.hpp"

using namespace qubokit;

namespace {

std::set<std::string> match_strings(const PartialAssignment& pa) {
  std::set<std::string> out;
  for (const auto& x : pa.matches()) out.insert(to_string(x));
  return out;
}

std::set<std::string> filtered(const PartialAssignment& pa) {
  std::set<std::string> out;
  for (const auto& x : all_bitvectors(pa.n()))
    if (pa.satisfied_by(x)) out.insert(to_string(x));
  return out;
}

// Random constraint text over n variables; may contain conflicts.
std::string random_expr(std::mt19937_64& rng, std::size_t n, std::size_t statements) {
  std::uniform_int_distribution<std::size_t> var(0, n - 1);
  std::uniform_int_distribution<int> coin(0, 3);
  std::string s;
  for (std::size_t k = 0; k < statements; ++k) {
    if (k) s += coin(rng) ? "; " : ";";
    s += "x" + std::to_string(var(rng));
    if (coin(rng) == 0) s += ", x" + std::to_string(var(rng));
    s += coin(rng) % 2 ? " != " : " = ";
    switch (coin(rng)) {
      case 0: s += "0"; break;
      case 1: s += "1"; break;
      case 2: s += "!x" + std::to_string(var(rng)); break;
      default: s += "x" + std::to_string(var(rng)); break;
    }
  }
  return s;
}

}  // namespace

TEST(ParseAssignment, PipelineExpression) {
  const auto pa = parse_assignment_expr("x1=0; x5=!x4", 16);
  EXPECT_EQ(pa.num_free(), 14U);
  EXPECT_EQ(pa.to_string(), "x1 = 0; x5 != x4");
}

TEST(ParseAssignment, MixedStatements) {
  const auto pa = parse_assignment_expr("x0, x3 = 0; x7 = 1; x12 = x8; x13 != x9", 16);
  EXPECT_EQ(pa.num_free(), 11U);
  EXPECT_EQ(pa.matches(20).size(), 2048U);
  EXPECT_EQ(pa.to_string(), "x0, x3 = 0; x7 = 1; x12 = x8; x13 != x9");
}

TEST(ParseAssignment, NegatedConstants) {
  EXPECT_EQ(parse_assignment_expr("x0 != 0; x1 != 1", 2).to_string(), "x1 = 0; x0 = 1");
  EXPECT_EQ(parse_assignment_expr("x0 = !x1", 2), parse_assignment_expr("x0 != x1", 2));
  EXPECT_EQ(parse_assignment_expr("x0 =! x1", 2), parse_assignment_expr("x1 != x0", 2));
}

TEST(ParseAssignment, EmptyIsIdentity) {
  EXPECT_TRUE(parse_assignment_expr("", 4).is_identity());
  EXPECT_TRUE(parse_assignment_expr(" ; ", 4).is_identity());
  EXPECT_EQ(PartialAssignment::identity(4).to_string(), "");
}

TEST(ParseAssignment, ConflictsNameVariables) {
  try {
    parse_assignment_expr("x1=0; x1=1", 4);
    FAIL();
  } catch (const ConflictError& e) {
    EXPECT_EQ(e.variables(), (std::vector<std::size_t>{1}));
    EXPECT_EQ(e.position(), 6U);
  }
  try {
    parse_assignment_expr("x2 != x2", 4);
    FAIL();
  } catch (const ConflictError& e) {
    EXPECT_EQ(e.variables(), (std::vector<std::size_t>{2}));
  }
  EXPECT_THROW(parse_assignment_expr("x0 = x1; x1 = x2; x2 != x0", 3), ConflictError);
  EXPECT_THROW(parse_assignment_expr("x0 = 1; x1 != x0; x1 = 1", 3), ConflictError);
}

TEST(ParseAssignment, SyntaxErrorsArePositioned) {
  struct Case {
    const char* text;
    std::size_t pos;
  };
  for (const auto& c : std::vector<Case>{{"x", 1},
                                         {"x1", 2},
                                         {"x1 = ", 5},
                                         {"y1 = 0", 0},
                                         {"x1 = 2", 5},
                                         {"x1 == 0", 4},
                                         {"x1 = 0 x2 = 1", 7},
                                         {"x1, = 0", 4},
                                         {"x1 = !0", 6},
                                         {"x 1 = 0", 2}}) {
    try {
      parse_assignment_expr(c.text, 8);
      ADD_FAILURE() << "accepted " << c.text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.position(), c.pos) << c.text;
    }
  }
  try {
    parse_assignment_expr("x0 = 0; x9 = 1", 8);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 8U);
  }
}

TEST(ParseBitvec, MixedTokenPattern) {
  const auto pa = parse_bitvec_expr("**00**[1]*1[!4]1");
  EXPECT_EQ(pa.n(), 11U);
  EXPECT_EQ(pa.free_variables(), (std::vector<std::size_t>{0, 1, 4, 5, 7}));
  EXPECT_EQ(pa.to_string(), "x2, x3 = 0; x8, x10 = 1; x6 = x1; x9 != x4");
  const auto all = pa.matches();
  EXPECT_EQ(all.size(), 32U);
  for (const auto& x : all) {
    EXPECT_EQ(x[2], 0);
    EXPECT_EQ(x[3], 0);
    EXPECT_EQ(x[8], 1);
    EXPECT_EQ(x[10], 1);
    EXPECT_EQ(x[6], x[1]);
    EXPECT_NE(x[9], x[4]);
  }
  EXPECT_EQ(to_string(pa.expand(BitVector{0, 1, 0, 1, 1})), "01000111111");
}

TEST(ParseBitvec, SmallCases) {
  const auto star = parse_bitvec_expr("*");
  EXPECT_EQ(star.n(), 1U);
  EXPECT_TRUE(star.is_identity());
  EXPECT_THROW(parse_bitvec_expr("[!0]"), ConflictError);
  EXPECT_THROW(parse_bitvec_expr("[1][!0]"), ConflictError);
}

TEST(ParseBitvec, MalformedInput) {
  struct Case {
    const char* text;
    std::size_t pos;
  };
  for (const auto& c : std::vector<Case>{{"*[", 2},
                                         {"*[]", 2},
                                         {"*[1", 3},
                                         {"*[!]", 3},
                                         {"*2", 1},
                                         {"*[x]", 2},
                                         {"*[5]", 1},
                                         {"", 0}}) {
    try {
      parse_bitvec_expr(c.text);
      ADD_FAILURE() << "accepted " << c.text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.position(), c.pos) << c.text;
    }
  }
}

TEST(FromPairs, Examples) {
  EXPECT_EQ(from_pairs({{0, 1}, {1, 1}, {5, 0}}, 10).num_free(), 7U);
  EXPECT_TRUE(from_pairs({}, 5).is_identity());
  EXPECT_THROW(from_pairs({{7, 1}}, 4), InvalidArgument);
  EXPECT_THROW(from_pairs({{0, 2}}, 4), InvalidArgument);
}

TEST(Apply, Examples) {
  Matrix m(3, 3);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(0, 2) = -1;
  m(1, 1) = 1;
  m(1, 2) = 3;
  m(2, 2) = -2;
  const auto q = QuboInstance::from_upper_triangular(m);
  const auto r = parse_assignment_expr("x1=1", 3).apply(q);
  EXPECT_EQ(r.instance.weights(), (Matrix{{3, -1}, {0, 1}}));
  EXPECT_EQ(r.constant, 1.0);

  const auto q2 = QuboInstance::from_upper_triangular(Matrix{{1, 5}, {0, 2}});
  const auto r2 = parse_assignment_expr("x1=!x0", 2).apply(q2);
  EXPECT_EQ(r2.instance.weights(), (Matrix{{-1}}));
  EXPECT_EQ(r2.constant, 2.0);

  const auto r3 = PartialAssignment::identity(3).apply(q);
  EXPECT_EQ(r3.instance, q);
  EXPECT_EQ(r3.constant, 0.0);

  EXPECT_THROW(PartialAssignment::identity(2).apply(q), InvalidArgument);
}

TEST(Apply, FullClampGivesEmptyInstance) {
  const auto q = QuboInstance::from_upper_triangular(Matrix{{1, 5}, {0, 2}});
  const auto r = parse_assignment_expr("x0, x1 = 1", 2).apply(q);
  EXPECT_EQ(r.instance.n(), 0U);
  EXPECT_EQ(r.constant, 8.0);
  EXPECT_EQ(parse_assignment_expr("x0, x1 = 1", 2).expand(BitVector()), (BitVector{1, 1}));
}

TEST(Apply, EnergyIdentityExhaustive) {
  std::mt19937_64 rng(2024);
  int tested = 0;
  for (std::uint64_t seed = 0; tested < 100; ++seed) {
    const std::size_t n = 1 + seed % 12;
    const auto q = QuboInstance::random(n, WeightDistribution::normal, 0.7, seed);
    PartialAssignment pa = PartialAssignment::identity(n);
    try {
      pa = parse_assignment_expr(random_expr(rng, n, 1 + seed % 4), n);
    } catch (const ConflictError&) {
      continue;
    }
    ++tested;
    const auto [sub, constant] = pa.apply(q);
    ASSERT_EQ(sub.n(), pa.num_free());
    if (sub.n() == 0) {
      EXPECT_NEAR(q.energy(pa.expand(BitVector())), constant, 1e-9);
      continue;
    }
    for (const auto& y : all_bitvectors(sub.n())) {
      const auto x = pa.expand(y);
      EXPECT_TRUE(pa.satisfied_by(x));
      EXPECT_EQ(pa.restrict(x), y);
      EXPECT_NEAR(oracle::energy(q, x), sub.energy(y) + constant, 1e-9);
    }
  }
}

TEST(Expand, LengthMismatch) {
  EXPECT_THROW(parse_bitvec_expr("*0*").expand(BitVector{1}), InvalidArgument);
  const auto id = PartialAssignment::identity(4);
  EXPECT_EQ(id.expand(BitVector{1, 0, 1, 1}), (BitVector{1, 0, 1, 1}));
}

TEST(Matches, Examples) {
  EXPECT_EQ(PartialAssignment::identity(2).matches().size(), 4U);
  EXPECT_EQ(match_strings(parse_assignment_expr("x0=1", 2)), (std::set<std::string>{"10", "11"}));
  EXPECT_EQ(match_strings(parse_assignment_expr("x1=!x0", 2)),
            (std::set<std::string>{"10", "01"}));
  EXPECT_THROW(PartialAssignment::identity(21).matches(), ResourceError);
}

TEST(Matches, EqualConstraintFiltering) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 10;
    const std::string text = random_expr(rng, n, 1 + t % 5);
    PartialAssignment pa = PartialAssignment::identity(n);
    try {
      pa = parse_assignment_expr(text, n);
    } catch (const ConflictError&) {
      continue;
    }
    EXPECT_EQ(match_strings(pa), filtered(pa)) << text;
  }
}

// A constraint set is rejected iff no vector satisfies all of it.
TEST(Conflicts, DetectionIsComplete) {
  std::mt19937_64 rng(5);
  int conflicts = 0;
  for (int t = 0; t < 400; ++t) {
    const std::size_t n = 1 + t % 10;
    const std::string text = random_expr(rng, n, 2 + t % 6);
    // Satisfiability by brute force on the individual statements.
    std::vector<PartialAssignment> parts;
    bool single_conflict = false;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t end = std::min(text.find(';', start), text.size());
      try {
        parts.push_back(parse_assignment_expr(text.substr(start, end - start), n));
      } catch (const ConflictError&) {
        single_conflict = true;
      }
      start = end + 1;
    }
    bool satisfiable = false;
    if (!single_conflict)
      for (const auto& x : all_bitvectors(n)) {
        bool ok = true;
        for (const auto& p : parts) ok = ok && p.satisfied_by(x);
        if (ok) {
          satisfiable = true;
          break;
        }
      }
    bool rejected = false;
    try {
      parse_assignment_expr(text, n);
    } catch (const ConflictError&) {
      rejected = true;
      ++conflicts;
    }
    EXPECT_EQ(rejected, !satisfiable) << text;
  }
  EXPECT_GT(conflicts, 20);
}

TEST(CanonicalString, RoundTrip) {
  std::mt19937_64 rng(7);
  int tested = 0;
  while (tested < 1000) {
    const std::size_t n = 1 + rng() % 24;
    PartialAssignment pa = PartialAssignment::identity(n);
    try {
      pa = parse_assignment_expr(random_expr(rng, n, 1 + rng() % 6), n);
    } catch (const ConflictError&) {
      continue;
    }
    ++tested;
    const auto again = parse_assignment_expr(pa.to_string(), n);
    EXPECT_EQ(again, pa);
    EXPECT_EQ(again.to_string(), pa.to_string());
  }
}

TEST(CanonicalString, GroupsAndOrientation) {
  const auto pa = parse_assignment_expr(
      "x13 = 0; x8 = 0; x5 = 0; x11 = 0; x16 = 1; x0 = 1; x3 = 1; x6 = 1; x9 = 1; x15 = 1; "
      "x1 != x17",
      18);
  EXPECT_EQ(pa.to_string(), "x5, x8, x11, x13 = 0; x0, x3, x6, x9, x15, x16 = 1; x17 != x1");
}
