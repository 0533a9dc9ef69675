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

// The `qubo` command-line tool. Every subcommand reads instances in the
// binary file format (path or "-" for stdin) and prints one JSON object per
// line on stdout. Diagnostics go to stderr.
//
// Exit codes: 0 success, 1 usage error, 2 data or format error,
// 3 resource cap exceeded.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qubokit/qubokit.hpp"

namespace qubokit::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kResource = 3 };

namespace detail {

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

inline QuboInstance read_instance(const std::string& path, Io& io) {
  if (path == "-") return qbfile::load(io.in);
  return qbfile::load(path);
}

inline void write_instance(const QuboInstance& q, const std::string& path, Io& io) {
  if (path == "-")
    qbfile::save(q, io.out);
  else
    qbfile::save(q, path);
}

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (double v : m.row(i)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json meta_json(const std::map<std::string, double>& meta) {
  Json j = Json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

/// "0:1,1:1,5:0"
inline std::map<std::size_t, int> parse_pairs(const std::string& text) {
  std::map<std::size_t, int> pairs;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, end - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= item.size() ||
        item.find_first_not_of("0123456789:") != std::string::npos)
      throw ParseError("expected <index>:<bit>", pos);
    pairs[std::stoull(item.substr(0, colon))] = std::stoi(item.substr(colon + 1));
    pos = end + 1;
  }
  return pairs;
}

/// Assignment text file: an assignment expression, optionally preceded by a
/// header line "# n = <count>". Other lines starting with '#' are comments.
inline std::string assignment_file_text(const PartialAssignment& pa) {
  return "# n = " + std::to_string(pa.n()) + "\n" + pa.to_string() + "\n";
}

inline PartialAssignment read_assignment_file(const std::string& path,
                                              std::optional<std::size_t> n) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line, expr;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::string body = line.substr(first + 1);
      body.erase(std::remove_if(body.begin(), body.end(), ::isspace), body.end());
      if (body.rfind("n=", 0) == 0 && !n) n = std::stoull(body.substr(2));
      continue;
    }
    if (!expr.empty()) expr += ";";
    expr += line;
  }
  if (!n) throw InvalidArgument("assignment file lacks a '# n = <count>' header; pass --n");
  return parse_assignment_expr(expr, *n);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << text;
}

}  // namespace detail

/// Runs the tool on `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
               std::ostream& err) {
  detail::Io io{in, out, err};
  CLI::App app{"Create, analyze, preprocess and solve QUBO instances", "qubo"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Sample a random instance");
  std::size_t gen_n = 0;
  std::string gen_distr = "normal";
  double gen_density = 1.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "-";
  gen->add_option("--n", gen_n, "Number of variables")->required()->check(CLI::PositiveNumber);
  gen->add_option("--distr", gen_distr, "Weight distribution")
      ->check(CLI::IsMember({"normal", "uniform"}));
  gen->add_option("--density", gen_density, "Probability of a nonzero weight")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("-o,--output", gen_out, "Output file, '-' for stdout");

  // Subcommands that read one instance.
  std::string input = "-";
  auto with_input = [&](CLI::App* sub) {
    sub->add_option("input", input, "Instance file, '-' for stdin");
  };

  auto* info = app.add_subcommand("info", "Print size, density and dynamic range");
  with_input(info);

  auto* energy = app.add_subcommand("energy", "Evaluate the energy of a bit string");
  with_input(energy);
  std::string energy_x;
  energy->add_option("--x", energy_x, "Bit string")->required();

  auto* clamp = app.add_subcommand("clamp", "Apply a partial assignment");
  with_input(clamp);
  std::string clamp_expr, clamp_bitvec, clamp_pairs, clamp_out, clamp_pa_out;
  auto* o_expr = clamp->add_option("--expr", clamp_expr, "Assignment expression");
  auto* o_bitvec = clamp->add_option("--bitvec-expr", clamp_bitvec, "Bit vector expression");
  auto* o_pairs = clamp->add_option("--pairs", clamp_pairs, "Fixed values as i:b,i:b,...");
  o_expr->excludes(o_bitvec)->excludes(o_pairs);
  o_bitvec->excludes(o_pairs);
  clamp->add_option("-o,--output", clamp_out, "Write the reduced instance here");
  clamp->add_option("--assignment-out", clamp_pa_out, "Write the assignment here");

  auto* prep = app.add_subcommand("preprocess", "Persistency and dynamic range reduction");
  with_input(prep);
  bool prep_qpro = false, prep_dr = false;
  std::uint64_t prep_seed = 0;
  std::string prep_out, prep_pa_out;
  prep->add_flag("--qpro-plus", prep_qpro, "Fix variables by persistency rules");
  prep->add_flag("--dr-reduce", prep_dr, "Reduce the dynamic range");
  prep->add_option("--seed", prep_seed, "Seed for the bound heuristics");
  prep->add_option("-o,--output", prep_out, "Write the resulting instance here");
  prep->add_option("--assignment-out", prep_pa_out, "Write the persistency assignment here");

  auto* solve = app.add_subcommand("solve", "Minimize the energy");
  with_input(solve);
  std::string method = "brute";
  std::size_t threads = 1, steps = 10000, restarts = 10, max_n = 30;
  std::optional<double> alpha, t0;
  std::uint64_t solve_seed = 0;
  solve->add_option("--method", method, "brute, sa or local")
      ->check(CLI::IsMember({"brute", "sa", "local"}));
  solve->add_option("--threads", threads, "Worker threads (brute)")->check(CLI::PositiveNumber);
  solve->add_option("--max-n", max_n, "Size cap for brute force");
  solve->add_option("--steps", steps, "Annealing steps (sa)")->check(CLI::PositiveNumber);
  solve->add_option("--alpha", alpha, "Cooling factor in (0, 1) (sa)");
  solve->add_option("--t0", t0, "Initial temperature (sa); derived when omitted");
  solve->add_option("--restarts", restarts, "Random restarts (local)")->check(CLI::PositiveNumber);
  solve->add_option("--seed", solve_seed, "Random seed (sa, local)");

  auto* expand = app.add_subcommand("expand", "Re-insert clamped variables into a solution");
  std::string expand_file, expand_x, expand_instance;
  std::optional<std::size_t> expand_n;
  expand->add_option("--assignment-file", expand_file, "Assignment text file")->required();
  expand->add_option("--x", expand_x, "Reduced bit string")->required();
  expand->add_option("--n", expand_n, "Full size when the file has no header");
  expand->add_option("--instance", expand_instance, "Full instance to report the energy");

  auto* convert = app.add_subcommand("convert", "Convert to another model");
  with_input(convert);
  std::string convert_to = "ising";
  convert->add_option("--to", convert_to, "Target model")->check(CLI::IsMember({"ising"}));

  auto* probs = app.add_subcommand("probs", "Exact Gibbs distribution quantities");
  with_input(probs);
  double beta = 1.0;
  bool want_marginals = false, want_logz = false;
  std::size_t prob_threads = 1;
  probs->add_option("--beta", beta, "Inverse temperature");
  probs->add_flag("--marginals", want_marginals, "Pairwise marginals");
  probs->add_flag("--log-partition", want_logz, "Natural log of the partition function");
  probs->add_option("--threads", prob_threads, "Worker threads for the partition function")
      ->check(CLI::PositiveNumber);

  auto* sample = app.add_subcommand("sample", "Draw exact Gibbs samples");
  with_input(sample);
  double sample_beta = 1.0;
  std::uint64_t sample_m = 1000, sample_seed = 0;
  std::string sample_out;
  sample->add_option("--beta", sample_beta, "Inverse temperature");
  sample->add_option("--m", sample_m, "Number of draws")->check(CLI::PositiveNumber);
  sample->add_option("--seed", sample_seed, "Random seed");
  sample->add_option("-o,--output", sample_out, "Also write the sample in text form");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*gen) {
      const auto q = QuboInstance::random(
          gen_n, gen_distr == "uniform" ? WeightDistribution::uniform : WeightDistribution::normal,
          gen_density, gen_seed);
      detail::write_instance(q, gen_out, io);
      if (gen_out != "-")
        out << Json{{"n", q.n()}, {"nnz", q.nnz()}, {"seed", gen_seed}, {"output", gen_out}}.dump()
            << '\n';
    } else if (*info) {
      const auto q = detail::read_instance(input, io);
      out << Json{{"n", q.n()},
                  {"nnz", q.nnz()},
                  {"density", q.density()},
                  {"dynamic_range", q.dynamic_range()}}
                 .dump()
          << '\n';
    } else if (*energy) {
      const auto q = detail::read_instance(input, io);
      const auto x = from_string(energy_x);
      out << Json{{"x", energy_x}, {"energy", q.energy(x)}}.dump() << '\n';
    } else if (*clamp) {
      if (clamp_expr.empty() && clamp_bitvec.empty() && clamp_pairs.empty()) {
        err << "clamp: one of --expr, --bitvec-expr, --pairs is required\n";
        return kUsage;
      }
      const auto q = detail::read_instance(input, io);
      const PartialAssignment pa =
          !clamp_bitvec.empty() ? parse_bitvec_expr(clamp_bitvec)
          : !clamp_pairs.empty() ? from_pairs(detail::parse_pairs(clamp_pairs), q.n())
                                 : parse_assignment_expr(clamp_expr, q.n());
      const auto clamped = pa.apply(q);
      if (!clamp_out.empty()) detail::write_instance(clamped.instance, clamp_out, io);
      if (!clamp_pa_out.empty())
        detail::write_text(clamp_pa_out, detail::assignment_file_text(pa));
      out << Json{{"n", q.n()},
                  {"n_reduced", clamped.instance.n()},
                  {"constant", clamped.constant},
                  {"assignment", pa.to_string()},
                  {"free", pa.free_variables()}}
                 .dump()
          << '\n';
    } else if (*prep) {
      if (!prep_qpro && !prep_dr) {
        err << "preprocess: pass --qpro-plus and/or --dr-reduce\n";
        return kUsage;
      }
      const auto q = detail::read_instance(input, io);
      Json report{{"n", q.n()}};
      QuboInstance current = q;
      PartialAssignment pa = PartialAssignment::identity(q.n());
      double constant = 0.0;
      if (prep_qpro) {
        const auto persist = qpro_plus(q);
        pa = persist.assignment;
        const auto clamped = pa.apply(q);
        current = clamped.instance;
        constant = clamped.constant;
        Json fired = Json::array();
        for (const auto& f : persist.rules_fired)
          fired.push_back(Json{{"rule", rule_name(f.rule)}, {"variables", f.variables}});
        report["rules_fired"] = std::move(fired);
      }
      report["assignment"] = pa.to_string();
      report["constant"] = constant;
      if (prep_dr) {
        DynamicRangeOptions opt;
        opt.seed = prep_seed;
        const auto dr = reduce_dynamic_range_trace(current, opt);
        report["dynamic_range_before"] = dr.initial_dynamic_range;
        current = dr.instance;
        report["dynamic_range_after"] = current.dynamic_range();
        report["dr_moves"] = dr.moves.size();
      }
      report["n_reduced"] = current.n();
      if (!prep_out.empty()) detail::write_instance(current, prep_out, io);
      if (!prep_pa_out.empty()) detail::write_text(prep_pa_out, detail::assignment_file_text(pa));
      out << report.dump() << '\n';
    } else if (*solve) {
      const auto q = detail::read_instance(input, io);
      Json result{{"method", method}};
      Solution s;
      if (method == "brute") {
        BruteForceOptions opt;
        opt.threads = threads;
        opt.max_n = max_n;
        auto bf = brute_force(q, opt);
        s = bf.solution;
        Json ties = Json::array();
        for (const auto& x : bf.minimizers) ties.push_back(to_string(x));
        result["minimizers"] = std::move(ties);
      } else if (method == "sa") {
        AnnealingOptions opt;
        opt.steps = steps;
        opt.alpha = alpha ? *alpha : alpha_for(steps);
        opt.t0 = t0;
        opt.seed = solve_seed;
        s = simulated_annealing(q, opt);
      } else {
        s = local_search(q, {restarts, solve_seed});
      }
      result["x"] = to_string(s.x);
      result["energy"] = s.energy;
      result["meta"] = detail::meta_json(s.meta);
      out << result.dump() << '\n';
    } else if (*expand) {
      const auto pa = detail::read_assignment_file(expand_file, expand_n);
      const BitVector reduced = pa.num_free() == 0 && expand_x == "-" ? BitVector()
                                                                      : from_string(expand_x);
      const auto full = pa.expand(reduced);
      Json result{{"x", to_string(full)}};
      if (!expand_instance.empty()) result["energy"] = qbfile::load(expand_instance).energy(full);
      out << result.dump() << '\n';
    } else if (*convert) {
      const auto q = detail::read_instance(input, io);
      const auto ising = q.to_ising();
      out << Json{{"h", ising.h}, {"J", detail::matrix_json(ising.J)}, {"constant", ising.constant}}
                 .dump()
          << '\n';
    } else if (*probs) {
      const auto q = detail::read_instance(input, io);
      GibbsOptions opt;
      opt.beta = beta;
      opt.threads = prob_threads;
      Json result{{"n", q.n()}, {"beta", beta}};
      if (want_logz) result["log_partition"] = log_partition(q, opt);
      if (want_marginals) result["marginals"] = detail::matrix_json(pairwise_marginals(q, opt));
      if (!want_logz && !want_marginals) result["probabilities"] = probabilities(q, opt);
      out << result.dump() << '\n';
    } else if (*sample) {
      const auto q = detail::read_instance(input, io);
      const auto s = gibbs_sample_exact(q, sample_beta, sample_m, sample_seed);
      if (!sample_out.empty()) {
        std::ostringstream text;
        s.write(text);
        detail::write_text(sample_out, text.str());
      }
      Json counts = Json::object();
      for (const auto& [x, c] : s.counts()) counts[to_string(x)] = c;
      out << Json{{"n", s.n()}, {"total", s.total()}, {"counts", std::move(counts)}}.dump()
          << '\n';
    }
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << '\n';
    return kResource;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cin, std::cout, std::cerr);
}

}  // namespace qubokit::cli
