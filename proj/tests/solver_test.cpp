// Copyright 2026 The joinmilp Authors
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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "joinmilp/error.hpp"
#include "joinmilp/formulation.hpp"
#include "joinmilp/solver.hpp"
#include "oracles.hpp"

using namespace joinmilp;

namespace {

// Random covering/packing problem over `nb` binaries and one continuous
// variable.
MilpProblem random_problem(std::mt19937_64& rng, int nb) {
  std::uniform_int_distribution<int> coef(-6, 9);
  MilpProblem p;
  for (int i = 0; i < nb; ++i) p.add_binary("b" + std::to_string(i));
  const VarId c = p.add_continuous("c", 0.0, 4.0);
  LinearExpr obj;
  for (int i = 0; i < nb; ++i) obj.add(i, coef(rng));
  obj.add(c, 1.5);
  p.set_objective(obj);
  for (int r = 0; r < 4; ++r) {
    LinearExpr row;
    for (int i = 0; i < nb; ++i) row.add(i, coef(rng));
    row.add(c, r % 2 == 0 ? 1.0 : -1.0);
    p.add_constraint(row, r % 2 == 0 ? Sense::kGreaterEqual : Sense::kLessEqual,
                     r % 2 == 0 ? 2.0 : 8.0, "r" + std::to_string(r));
  }
  return p;
}

// Optimum over all binary assignments; the continuous variable is tried on
// a fine grid and at every value making a row tight.
double enumerate_optimum(const MilpProblem& p, int nb) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> x(nb + 1);
  for (int mask = 0; mask < (1 << nb); ++mask) {
    for (int i = 0; i < nb; ++i) x[i] = (mask >> i) & 1;
    std::vector<double> candidates = {0.0, 4.0};
    for (const Constraint& row : p.constraints()) {
      double rest = 0.0;
      double cc = 0.0;
      for (const Term& t : row.expr.terms()) {
        if (t.var == nb) cc = t.coeff; else rest += t.coeff * x[t.var];
      }
      if (cc != 0.0) candidates.push_back((row.rhs - rest) / cc);
    }
    for (double c : candidates) {
      if (c < 0.0 || c > 4.0) continue;
      x[nb] = c;
      if (p.is_feasible(x, 1e-9)) best = std::min(best, p.objective_value(x));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("LP relaxation of tiny problems") {
  MilpProblem p;
  const VarId x = p.add_binary("x");
  p.set_objective(LinearExpr().add(x, 1.0));
  LpRelaxation lp = lp_relax(p);
  CHECK(lp.feasible);
  CHECK(lp.objective == doctest::Approx(0.0));

  MilpProblem q;
  const VarId a = q.add_binary("a");
  const VarId b = q.add_binary("b");
  q.add_constraint(LinearExpr().add(a, 1).add(b, 1), Sense::kGreaterEqual, 1.0,
                   "cover");
  q.set_objective(LinearExpr().add(a, 1).add(b, 1));
  lp = lp_relax(q);
  CHECK(lp.feasible);
  CHECK(lp.objective == doctest::Approx(1.0));
}

TEST_CASE("relaxation bound of the three-table model") {
  const JoinOrderMilp milp = compile(fixtures::three_tables());
  const LpRelaxation lp = lp_relax(milp.problem);
  REQUIRE(lp.feasible);
  CHECK(lp.objective <= 1000.0 + 1e-6);
}

TEST_CASE("three-table model solves to 1000") {
  const JoinOrderMilp milp = compile(fixtures::three_tables());
  const SolveReport r = solve(milp.problem);
  CHECK(r.final.status == SolveStatus::kOptimal);
  CHECK(r.final.objective == doctest::Approx(1000.0));
  CHECK(r.final.gap <= 1e-6);
}

TEST_CASE("infeasible problems are reported") {
  MilpProblem p;
  const VarId x = p.add_binary("x");
  p.add_constraint(LinearExpr().add(x, 1.0), Sense::kGreaterEqual, 1.0, "up");
  p.add_constraint(LinearExpr().add(x, 1.0), Sense::kLessEqual, 0.0, "down");
  CHECK(solve(p).final.status == SolveStatus::kInfeasible);

  MilpProblem q;
  const VarId a = q.add_binary("a");
  const VarId b = q.add_binary("b");
  q.add_constraint(LinearExpr().add(a, 2).add(b, 2), Sense::kEqual, 1.0, "odd");
  CHECK(solve(q).final.status == SolveStatus::kInfeasible);
}

TEST_CASE("solver rejects bad input") {
  MilpProblem p;
  p.add_continuous("free", -std::numeric_limits<double>::infinity(), 1.0);
  CHECK_THROWS_AS(solve(p), InvalidInput);
  MilpProblem q;
  q.add_binary("x");
  SolverConfig config;
  config.time_limit = 0.0;
  CHECK_THROWS_AS(solve(q, config), InvalidInput);
}

TEST_CASE("optimum matches enumeration on random problems") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 150; ++trial) {
    const int nb = 4 + trial % 9;
    const MilpProblem p = random_problem(rng, nb);
    const double expected = enumerate_optimum(p, nb);
    for (BranchRule rule : {BranchRule::kPseudoCost, BranchRule::kMostFractional,
                            BranchRule::kFirstFractional}) {
      SolverConfig config;
      config.branch_rule = rule;
      config.node_selection = trial % 2 ? NodeSelection::kDepthFirst
                                        : NodeSelection::kBestBound;
      const SolveReport r = solve(p, config);
      if (!std::isfinite(expected)) {
        CHECK(r.final.status == SolveStatus::kInfeasible);
        continue;
      }
      REQUIRE(r.final.status == SolveStatus::kOptimal);
      CHECK(p.is_feasible(r.final.values));
      CHECK(r.final.objective == doctest::Approx(expected).epsilon(1e-6));
      for (const TracePoint& t : r.trace) {
        CHECK(t.lower_bound <= expected + 1e-6 * std::max(1.0, std::abs(expected)));
      }
    }
  }
}

TEST_CASE("trace is monotone and callbacks see every incumbent") {
  const Query q = generate_random_query(9, JoinGraphKind::kChain, 3);
  const JoinOrderMilp milp = compile(q);
  SolverConfig config;
  config.time_limit = 3.0;
  config.heuristic = make_plan_heuristic(milp);
  config.cuts = envelope_cuts(milp);
  int calls = 0;
  double last = std::numeric_limits<double>::infinity();
  const SolveReport r = solve(milp.problem, config,
                              [&](const TracePoint& p, std::span<const double> x) {
                                ++calls;
                                CHECK(p.incumbent < last);
                                last = p.incumbent;
                                CHECK(milp.problem.is_feasible(x));
                                CHECK(milp.problem.objective_value(x) ==
                                      doctest::Approx(p.incumbent));
                              });
  REQUIRE_FALSE(r.trace.empty());
  CHECK(calls >= 1);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].incumbent <= r.trace[i - 1].incumbent);
    CHECK(r.trace[i].lower_bound >= r.trace[i - 1].lower_bound);
    CHECK(r.trace[i].elapsed >= r.trace[i - 1].elapsed);
  }
  CHECK(r.trace.back().incumbent == r.final.objective);
}

TEST_CASE("identical configurations give identical results") {
  const Query q = generate_random_query(7, JoinGraphKind::kStar, 9);
  const JoinOrderMilp milp = compile(q);
  SolverConfig config;
  config.heuristic = make_plan_heuristic(milp);
  const SolveReport a = solve(milp.problem, config);
  const SolveReport b = solve(milp.problem, config);
  CHECK(a.final.values == b.final.values);
  CHECK(a.nodes_explored == b.nodes_explored);
  CHECK(a.lp_iterations == b.lp_iterations);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].incumbent == b.trace[i].incumbent);
    CHECK(a.trace[i].lower_bound == b.trace[i].lower_bound);
  }
}

TEST_CASE("tiny time limit times out") {
  const Query q = generate_random_query(14, JoinGraphKind::kCycle, 1);
  const JoinOrderMilp milp = compile(q);
  SolverConfig config;
  config.time_limit = 0.001;
  const SolveReport r = solve(milp.problem, config);
  CHECK(r.final.status == SolveStatus::kTimedOut);
}

TEST_CASE("cuts referencing unknown variables are rejected") {
  MilpProblem p;
  p.add_binary("x");
  SolverConfig config;
  config.cuts.push_back({"bad", LinearExpr().add(7, 1.0), Sense::kLessEqual, 1.0});
  CHECK_THROWS_AS(solve(p, config), InvalidInput);
}

TEST_CASE("solution files") {
  MilpProblem p;
  const VarId x = p.add_binary("x");
  const VarId y = p.add_continuous("y", 0.0, 5.0);
  p.add_constraint(LinearExpr().add(x, 1).add(y, 1), Sense::kGreaterEqual, 2.5,
                   "need");
  const std::vector<double> v =
      parse_solution_file(p, "# comment\nx 1\n\ny 1.5  # trailing\n");
  CHECK(v[x] == 1.0);
  CHECK(v[y] == 1.5);
  CHECK_THROWS_AS(parse_solution_file(p, "z 1\n"), ParseError);
  Solution s;
  s.values = {1.0, 1.5};
  s.objective = 0.0;
  s.status = SolveStatus::kOptimal;
  const std::vector<double> again =
      parse_solution_file(p, format_solution_file(p, s));
  CHECK(again == s.values);
}

TEST_CASE("external solver adapter") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "joinmilp_adapter_test";
  fs::create_directories(dir);
  MilpProblem p;
  const VarId x = p.add_binary("x");
  const VarId y = p.add_continuous("y", 0.0, 5.0);
  p.add_constraint(LinearExpr().add(x, 1).add(y, 1), Sense::kGreaterEqual, 2.5,
                   "need");
  p.set_objective(LinearExpr().add(x, 1).add(y, 1));

  const fs::path good = dir / "good.txt";
  std::ofstream(good) << "# status optimal\nx 1\ny 1.5\n";
  Solution s = external_solve(p, "cp " + good.string() + " {out} # {in}",
                              (dir / "w1").string());
  CHECK(s.status == SolveStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(2.5));

  const fs::path bad = dir / "bad.txt";
  std::ofstream(bad) << "x 1\ny 1.499\n";
  CHECK_THROWS_AS(external_solve(p, "cp " + bad.string() + " {out} # {in}",
                                 (dir / "w2").string()),
                  Error);
  CHECK_THROWS_AS(external_solve(p, "true {in} {out}", (dir / "w3").string()),
                  Error);
  CHECK_THROWS_AS(external_solve(p, "false {in} {out}", (dir / "w4").string()),
                  Error);
  CHECK_THROWS_AS(external_solve(p, "true", (dir / "w5").string()),
                  InvalidInput);
  fs::remove_all(dir);
}
