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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "qubokit/qubokit.hpp"

#ifndef QUBO_EXECUTABLE
#error "QUBO_EXECUTABLE must name the command-line tool"
#endif

using namespace qubokit;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Brute force equals naive enumeration.
Outcome exact_solver_oracle() {
  const auto t = std::chrono::steady_clock::now();
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 1 + seed % 16;
    const double density = std::array{0.1, 0.3, 0.6, 1.0}[seed % 4];
    const auto q = QuboInstance::random(n, WeightDistribution::normal, density, 1000 + seed);
    if (std::abs(brute_force(q).solution.energy - oracle::minimize(q).energy) <= 1e-9) ++ok;
  }
  const double secs = seconds_since(t);
  return {ok == 50 && secs < 30.0, fmt("%d/50 match, %.2f s", ok, secs)};
}

// 2. Thread count does not change the answer; n = 24 on 8 threads.
Outcome thread_determinism() {
  int same = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto q = QuboInstance::random(20, WeightDistribution::normal, 0.5, 2000 + seed);
    std::set<std::pair<double, std::uint64_t>> results;
    for (std::size_t threads : {1, 2, 8}) {
      BruteForceOptions opt;
      opt.threads = threads;
      const auto r = brute_force(q, opt);
      results.insert({r.solution.energy, r.solution.x.index()});
    }
    if (results.size() == 1) ++same;
  }
  const auto t = std::chrono::steady_clock::now();
  BruteForceOptions opt;
  opt.threads = 8;
  brute_force(QuboInstance::random(24, WeightDistribution::normal, 0.5, 2100), opt);
  const double secs = seconds_since(t);
  return {same == 10 && secs < 60.0, fmt("%d/10 identical, n=24 on 8 threads %.2f s", same, secs)};
}

// 3. dx and dx2 against direct energy differences.
Outcome derivative_identities() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + (seed * 37) % 64;
    const auto q = QuboInstance::random(n, WeightDistribution::normal, 0.5, 3000 + seed);
    const auto x = random_bits(n, 3500 + seed);
    const double e = q.energy(x);
    const auto g = q.dx(x);
    const auto d = q.dx2(x);
    for (std::size_t i = 0; i < n; ++i) {
      auto y = x;
      y.flip(i);
      worst = std::max(worst, std::abs(g[i] - (q.energy(y) - e)));
      worst = std::max(worst, std::abs(d(i, i) - g[i]));
      for (std::size_t j = i + 1; j < n; ++j) {
        auto z = y;
        z.flip(j);
        const double ref = q.energy(z) - e;
        worst = std::max({worst, std::abs(d(i, j) - ref), std::abs(d(j, i) - ref)});
      }
    }
  }
  return {worst <= 1e-9, fmt("max deviation %.3g", worst)};
}

// 4. Ising form reproduces every energy.
Outcome ising_equivalence() {
  double worst = 0.0;
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto q = QuboInstance::random(n, WeightDistribution::normal, 0.7, 4000 + n);
    const auto ising = q.to_ising();
    for (const auto& x : all_bitvectors(n))
      worst = std::max(worst, std::abs(q.energy(x) - ising.energy(x)));
  }
  return {worst <= 1e-9, fmt("max deviation %.3g over n = 1..10", worst)};
}

std::string random_expr(std::mt19937_64& rng, std::size_t n, std::size_t statements) {
  std::uniform_int_distribution<std::size_t> var(0, n - 1);
  std::uniform_int_distribution<int> pick(0, 3);
  std::string s;
  for (std::size_t k = 0; k < statements; ++k) {
    if (k) s += "; ";
    s += "x" + std::to_string(var(rng));
    while (pick(rng) == 0) s += ", x" + std::to_string(var(rng));
    s += pick(rng) % 2 ? " != " : " = ";
    switch (pick(rng)) {
      case 0: s += "0"; break;
      case 1: s += "1"; break;
      case 2: s += "!x" + std::to_string(var(rng)); break;
      default: s += "x" + std::to_string(var(rng)); break;
    }
  }
  return s;
}

// 5. Clamping energy identity, exhaustive over reduced vectors.
Outcome clamping_identity() {
  std::mt19937_64 rng(5000);
  double worst = 0.0;
  int pairs = 0;
  while (pairs < 100) {
    const std::size_t n = 1 + rng() % 12;
    const auto q = QuboInstance::random(n, WeightDistribution::normal, 0.7, rng());
    std::optional<PartialAssignment> pa;
    try {
      pa = parse_assignment_expr(random_expr(rng, n, 1 + rng() % 4), n);
    } catch (const ConflictError&) {
      continue;
    }
    ++pairs;
    const auto [sub, constant] = pa->apply(q);
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << sub.n()); ++k) {
      const auto y = BitVector::from_index(k, sub.n());
      worst = std::max(worst, std::abs(oracle::energy(q, pa->expand(y)) -
                                       (sub.energy(y) + constant)));
    }
  }
  return {worst <= 1e-9, fmt("100 pairs, max deviation %.3g", worst)};
}

// 6. QPRO+ keeps the minimum energy.
Outcome qpro_soundness() {
  int ok = 0, fired_sparse = 0, sparse = 0;
  std::size_t removed = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 1 + seed % 14;
    const double density = seed % 2 ? 0.8 : 0.3;
    const auto q = QuboInstance::random(n, WeightDistribution::normal, density, 6000 + seed);
    const auto rep = qpro_plus(q);
    const auto [sub, constant] = rep.assignment.apply(q);
    const double reduced = sub.n() ? oracle::minimize(sub).energy + constant : constant;
    if (std::abs(reduced - oracle::minimize(q).energy) <= 1e-9) ++ok;
    if (density == 0.3) {
      ++sparse;
      if (!rep.assignment.is_identity()) ++fired_sparse;
      removed += n - sub.n();
    }
  }
  return {ok == 200, fmt("%d/200 preserve min E; density 0.3: %d/%d non-identity, %zu variables "
                         "removed",
                         ok, fired_sparse, sparse, removed)};
}

// 7. Dynamic range reduction.
Outcome dynamic_range_reduction() {
  int monotone = 0, intersect = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 12;
    const double density = std::array{0.25, 0.5, 0.75, 1.0}[seed % 4];
    const auto q = QuboInstance::random(n, WeightDistribution::normal, density, 7000 + seed);
    const auto out = reduce_dynamic_range(q, {seed});
    if (out.dynamic_range() <= q.dynamic_range()) ++monotone;
    const auto a = oracle::minimize(q).argmins;
    const auto b = oracle::minimize(out).argmins;
    std::vector<std::uint64_t> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (!common.empty()) ++intersect;
  }
  int decreased = 0;
  double before = 0.0, after = 0.0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto q = QuboInstance::random(16, WeightDistribution::normal, 0.25, 7500 + seed);
    const auto out = reduce_dynamic_range(q, {seed});
    before += q.dynamic_range();
    after += out.dynamic_range();
    if (out.dynamic_range() < q.dynamic_range()) ++decreased;
  }
  return {monotone == 100 && intersect == 100 && decreased * 2 > 25,
          fmt("DR non-increasing %d/100, minimizers intersect %d/100; n=16 density 0.25: %d/25 "
              "decrease, mean DR %.2f -> %.2f",
              monotone, intersect, decreased, before / 25, after / 25)};
}

// 8. Gibbs quantities.
Outcome gibbs_correctness() {
  double norm = 0.0, logz = 0.0, marg = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    const auto q = QuboInstance::random(n, WeightDistribution::normal, 0.6, 8000 + n);
    for (double beta : {0.3, 1.0, 3.0}) {
      const auto p = probabilities(q, beta);
      norm = std::max(norm, std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
      logz = std::max(logz, std::abs(log_partition(q, beta) - oracle::log_partition(q, beta)));
      const auto m = pairwise_marginals(q, beta);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double ref = 0.0;
          for (std::uint64_t k = 0; k < p.size(); ++k)
            if (((k >> i) & 1) && ((k >> j) & 1)) ref += p[k];
          marg = std::max(marg, std::abs(m(i, j) - ref));
        }
    }
  }
  const auto p16 = probabilities(QuboInstance::random(16, WeightDistribution::normal, 0.8, 8100), 1.0);
  norm = std::max(norm, std::abs(std::accumulate(p16.begin(), p16.end(), 0.0) - 1.0));
  return {norm <= 1e-9 && logz <= 1e-9 && marg <= 1e-9 && p16.size() == 65536,
          fmt("sum-1 %.3g, log Z %.3g, marginals %.3g, n=16 length %zu", norm, logz, marg,
              p16.size())};
}

// 9. Parsers.
Outcome parsers() {
  std::mt19937_64 rng(9000);
  int round_trips = 0, valid = 0;
  while (valid < 1000) {
    const std::size_t n = 1 + rng() % 30;
    const std::string text = random_expr(rng, n, 1 + rng() % 6);
    std::optional<PartialAssignment> pa;
    try {
      pa = parse_assignment_expr(text, n);
    } catch (const ConflictError&) {
      continue;
    }
    ++valid;
    if (parse_assignment_expr(pa->to_string(), n) == *pa) ++round_trips;
  }

  // Invalid inputs: syntax (a stray character), range, conflict.
  int invalid = 0, rejected = 0;
  auto positioned = [](std::size_t pos, std::size_t len) { return pos <= len; };
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng() % 20;
    std::string text = random_expr(rng, n, 1 + rng() % 4);
    try {
      parse_assignment_expr(text, n);
    } catch (const ConflictError&) {
      --t;  // corrupt only valid expressions
      continue;
    }
    std::string bad;
    int kind = t % 3;
    if (kind == 0) {
      bad = text;
      bad.insert(rng() % (bad.size() + 1), 1, "#@?&"[rng() % 4]);
    } else if (kind == 1) {
      bad = text + "; x" + std::to_string(n + rng() % 5) + " = 1";
    } else {
      bad = "x0 = 1; x1 = x0; " + text + "; x1 = 0";
    }
    ++invalid;
    try {
      parse_assignment_expr(bad, n);
    } catch (const ConflictError& e) {
      if (kind == 2 && positioned(e.position(), bad.size()) && !e.variables().empty()) ++rejected;
    } catch (const ParseError& e) {
      if (kind != 2 && positioned(e.position(), bad.size())) ++rejected;
    }
  }
  for (const char* bad : {"*[", "*[9]", "*[!a]", "*x", "[!0]", "[1][!0]"}) {
    ++invalid;
    try {
      parse_bitvec_expr(bad);
    } catch (const ConflictError& e) {
      if (positioned(e.position(), std::strlen(bad))) ++rejected;
    } catch (const ParseError& e) {
      if (positioned(e.position(), std::strlen(bad))) ++rejected;
    }
  }

  const auto pa = parse_bitvec_expr("**00**[1]*1[!4]1");
  const auto matches = pa.matches();
  std::set<BitVector> distinct(matches.begin(), matches.end());
  bool tokens_hold = true;
  for (const auto& x : matches)
    tokens_hold = tokens_hold && x[2] == 0 && x[3] == 0 && x[6] == x[1] && x[8] == 1 &&
                  x[9] != x[4] && x[10] == 1;
  const bool pattern_ok = matches.size() == 32 && distinct.size() == 32 && tokens_hold;
  return {round_trips == 1000 && rejected == invalid && pattern_ok,
          fmt("round trips %d/1000, invalid rejected with position %d/%d, pattern matches %zu",
              round_trips, rejected, invalid, matches.size())};
}

// 10. Serialization.
Outcome serialization() {
  int exact = 0, total = 0;
  std::uint64_t seed = 10000;
  for (int rep = 0; rep < 7; ++rep)
    for (std::size_t n : {1, 2, 16, 64})
      for (double d : {0.0, 0.1, 0.5, 1.0}) {
        const auto q = QuboInstance::random(n, WeightDistribution::normal, d, ++seed);
        const auto bytes = qbfile::encode(q);
        const auto back = qbfile::decode(bytes);
        bool same = back.n() == q.n();
        for (std::size_t i = 0; same && i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            same = same && std::bit_cast<std::uint64_t>(back(i, j)) ==
                               std::bit_cast<std::uint64_t>(q(i, j));
        const bool sparse = 16 * q.nnz() < 8 * n * (n + 1) / 2;
        same = same && (bytes[4] == (sparse ? qbfile::kSparse : qbfile::kDense));
        exact += same;
        ++total;
      }
  bool boundary = true;
  for (std::size_t n = 1; n < 64; ++n) {
    const std::size_t tri = n * (n + 1) / 2;
    if (tri % 2) continue;
    boundary = boundary && qbfile::choose_mode(n, tri / 2) == qbfile::Mode::dense &&
               qbfile::choose_mode(n, tri / 2 - 1) == qbfile::Mode::sparse;
  }
  return {exact == total && boundary,
          fmt("%d/%d bit-exact round trips with expected mode, equality boundary -> dense: %s",
              exact, total, boundary ? "yes" : "no")};
}

// 11. Hellinger distance.
Outcome sampling() {
  std::mt19937_64 rng(11000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto dist = [&](std::size_t len) {
    std::vector<double> v(len);
    double s = 0.0;
    for (double& x : v) s += x = u(rng) < 0.25 ? 0.0 : u(rng);
    if (s == 0.0) v[0] = s = 1.0;
    for (double& x : v) x /= s;
    return v;
  };
  int metric = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t len = std::size_t{1} << (1 + t % 6);
    const auto p = dist(len), q = dist(len), r = dist(len);
    const double pq = hellinger(p, q);
    const bool ok = pq == hellinger(q, p) && pq >= 0.0 && pq <= 1.0 && hellinger(p, p) == 0.0 &&
                    (pq > 0.0) == (p != q) &&
                    pq <= hellinger(p, r) + hellinger(r, q) + 1e-12;
    metric += ok;
  }
  std::vector<double> medians;
  for (std::uint64_t m : {100, 1000, 10000}) {
    std::vector<double> d;
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const auto q = QuboInstance::random(8, WeightDistribution::normal, 0.5, 11100 + seed);
      d.push_back(hellinger(gibbs_sample_exact(q, 1.0, m, seed), probabilities(q, 1.0)));
    }
    std::nth_element(d.begin(), d.begin() + 7, d.end());
    medians.push_back(d[7]);
  }
  return {metric == 100 && medians[0] > medians[1] && medians[1] > medians[2],
          fmt("metric properties %d/100; median H at m=1e2,1e3,1e4: %.4f, %.4f, %.4f", metric,
              medians[0], medians[1], medians[2])};
}

// 12. End-to-end through the command-line tool.
std::pair<int, std::string> shell(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return {-1, ""};
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome end_to_end() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qubokit_acceptance";
  fs::create_directories(dir);
  const std::string tool = QUBO_EXECUTABLE;
  auto p = [&](const char* name) { return (dir / name).string(); };
  using nlohmann::json;

  std::vector<std::string> steps = {
      tool + " gen --n 16 --distr normal --density 0.8 --seed 7 -o " + p("q.qbf"),
      tool + " clamp " + p("q.qbf") + " --expr 'x1=0; x5=!x4' -o " + p("c.qbf") +
          " --assignment-out " + p("a.txt"),
      tool + " preprocess " + p("c.qbf") + " --dr-reduce --seed 7 -o " + p("d.qbf"),
      tool + " solve " + p("d.qbf") + " --method brute --threads 4",
  };
  std::vector<json> outputs;
  for (const auto& cmd : steps) {
    const auto [code, out] = shell(cmd);
    if (code != 0) return {false, "step failed: " + cmd + "\n" + out};
    outputs.push_back(json::parse(out));
  }
  const double constant = outputs[1]["constant"];
  const std::string reduced_x = outputs[3]["x"];
  const auto [code, out] = shell(tool + " expand --assignment-file " + p("a.txt") + " --x " +
                                 reduced_x + " --instance " + p("q.qbf"));
  if (code != 0) return {false, "expand failed\n" + out};
  const auto expanded = json::parse(out);
  const double full = expanded["energy"];

  const auto clamped = qbfile::load(p("c.qbf"));
  const double reduced_energy = clamped.energy(from_string(reduced_x));
  const double optimum = oracle::minimize(clamped).energy + constant;
  const double id_gap = std::abs(full - (reduced_energy + constant));
  const double opt_gap = std::abs(full - optimum);
  fs::remove_all(dir);
  return {id_gap <= 1e-9 && opt_gap <= 1e-9 && reduced_x.size() == 14,
          fmt("n 16 -> %zu, DR %.2f -> %.2f, E_full %.6f, |E_full - (E_red + c)| %.3g, "
              "|E_full - min| %.3g",
              reduced_x.size(), outputs[2]["dynamic_range_before"].get<double>(),
              outputs[2]["dynamic_range_after"].get<double>(), full, id_gap, opt_gap)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exact solver matches enumeration oracle", exact_solver_oracle},
      {"brute force is thread-count invariant", thread_determinism},
      {"derivative identities", derivative_identities},
      {"Ising equivalence", ising_equivalence},
      {"clamping energy identity", clamping_identity},
      {"QPRO+ preserves the minimum", qpro_soundness},
      {"dynamic range reduction", dynamic_range_reduction},
      {"Gibbs distribution quantities", gibbs_correctness},
      {"assignment parsers", parsers},
      {"binary file round trip", serialization},
      {"sampling and Hellinger distance", sampling},
      {"end-to-end command-line pipeline", end_to_end},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("AC%-2zu %s  %s (%.2f s): %s\n", k + 1, o.pass ? "PASS" : "FAIL",
                criteria[k].first, seconds_since(t), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}
