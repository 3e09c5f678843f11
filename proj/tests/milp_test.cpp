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
#include <random>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "joinmilp/error.hpp"
#include "joinmilp/formulation.hpp"
#include "joinmilp/milp.hpp"
#include "joinmilp/mps.hpp"
#include "joinmilp/solver.hpp"

using namespace joinmilp;

TEST_CASE("variables get dense ids and unique names") {
  MilpProblem p;
  CHECK(p.add_binary("tio_R_0") == 0);
  const VarId lco = p.add_continuous("lco_0", 0.0, 12.0);
  CHECK(lco == 1);
  CHECK(p.variable(lco).domain.type == VarType::kContinuous);
  CHECK(p.variable(lco).domain.upper == 12.0);
  CHECK(p.find_variable("lco_0") == lco);
  CHECK_FALSE(p.find_variable("nope").has_value());
  CHECK_THROWS_AS(p.add_binary("tio_R_0"), InvalidInput);
  CHECK_THROWS_AS(p.add_continuous("bad", 2.0, 1.0), InvalidInput);
}

TEST_CASE("constraints are stored verbatim") {
  MilpProblem p;
  const VarId x = p.add_binary("x");
  const VarId y = p.add_binary("y");
  const RowId r = p.add_constraint(LinearExpr().add(x, 1).add(y, 1), Sense::kEqual,
                                   1.0, "one");
  CHECK(p.constraint(r).sense == Sense::kEqual);
  CHECK(p.constraint(r).expr.terms().size() == 2);
  const VarId b = p.add_binary("b");
  p.add_constraint(LinearExpr().add(x, 1).add(b, -1e6), Sense::kLessEqual, 3.0,
                   "bigm");
  CHECK(p.num_constraints() == 2);
  CHECK_THROWS_AS(p.add_constraint(LinearExpr().add(999, 1.0), Sense::kLessEqual,
                                   0.0, "bad"),
                  InvalidInput);
}

TEST_CASE("linear expressions normalize and evaluate") {
  LinearExpr e(2.0);
  e.add(1, 3.0).add(0, 1.0).add(1, -3.0).add(0, 0.5);
  e.normalize();
  REQUIRE(e.terms().size() == 1);
  CHECK(e.terms()[0].var == 0);
  CHECK(e.terms()[0].coeff == 1.5);
  const std::vector<double> values = {2.0, 7.0};
  CHECK(e.evaluate(values) == doctest::Approx(5.0));
}

TEST_CASE("violation measure covers bounds, integrality and rows") {
  MilpProblem p;
  const VarId x = p.add_binary("x");
  const VarId y = p.add_continuous("y", 0.0, 10.0);
  p.add_constraint(LinearExpr().add(x, 1).add(y, 1), Sense::kGreaterEqual, 2.0,
                   "cover");
  CHECK(p.is_feasible(std::vector<double>{1.0, 1.0}));
  CHECK_FALSE(p.is_feasible(std::vector<double>{0.5, 1.5}));
  CHECK_FALSE(p.is_feasible(std::vector<double>{0.0, 1.0}));
  CHECK_FALSE(p.is_feasible(std::vector<double>{1.0, 11.0}));
  CHECK(p.violations(std::vector<double>{0.0, 1.0}).size() == 1);
}

TEST_CASE("product linearization pins z to b times x") {
  for (double b : {0.0, 1.0}) {
    for (double x : {0.0, 5.0, 10.0, 3.5}) {
      MilpProblem p;
      const VarId bv = p.add_binary("b");
      const VarId xv = p.add_continuous("x", 0.0, 10.0);
      const VarId z = linearize_product(p, bv, xv, "z");
      p.set_bounds(bv, b, b);
      p.set_bounds(xv, x, x);
      p.set_objective(LinearExpr().add(z, 1.0));
      const LpRelaxation lo = lp_relax(p);
      p.set_objective(LinearExpr().add(z, -1.0));
      const LpRelaxation hi = lp_relax(p);
      REQUIRE(lo.feasible);
      REQUIRE(hi.feasible);
      CHECK(lo.values[z] == doctest::Approx(b * x).epsilon(1e-9));
      CHECK(hi.values[z] == doctest::Approx(b * x).epsilon(1e-9));
    }
  }
  MilpProblem p;
  const VarId b = p.add_binary("b");
  const VarId free = p.add_continuous("x", -1.0, 3.0);
  CHECK_THROWS_AS(linearize_product(p, b, free, "z"), InvalidInput);
  const VarId c = p.add_continuous("c", 0.0, 1.0);
  CHECK_THROWS_AS(linearize_product(p, c, c, "z2"), InvalidInput);
}

TEST_CASE("MPS export of a one-variable problem") {
  MilpProblem p;
  const VarId x = p.add_continuous("x", 0.0, 1.0);
  p.set_objective(LinearExpr().add(x, 1.0));
  const std::string mps = export_mps(p);
  CHECK(mps.find("ROWS") != std::string::npos);
  CHECK(mps.find(" N  OBJ") != std::string::npos);
  CHECK(mps.find("COLUMNS") != std::string::npos);
  CHECK(mps.find("ENDATA") != std::string::npos);
  const MilpProblem back = import_mps(mps);
  CHECK(back.num_variables() == 1);
}

TEST_CASE("MPS carries objective constants and binaries") {
  MilpProblem p;
  const VarId x = p.add_binary("x");
  const VarId y = p.add_continuous("y", -2.0, 4.5);
  p.add_constraint(LinearExpr().add(x, 2.0).add(y, -1.0), Sense::kLessEqual, 1.0,
                   "c0");
  p.add_constraint(LinearExpr().add(x, 1.0).add(y, 1.0), Sense::kEqual, 1.5,
                   "c1");
  LinearExpr obj(7.25);
  obj.add(x, 3.0).add(y, 1.0);
  p.set_objective(obj);
  const MilpProblem back = import_mps(export_mps(p));
  REQUIRE(back.num_variables() == 2);
  REQUIRE(back.num_constraints() == 2);
  CHECK(back.variable(0).is_binary());
  CHECK(back.variable(1).domain.lower == -2.0);
  CHECK(back.variable(1).domain.upper == 4.5);
  CHECK(back.objective().constant() == doctest::Approx(7.25));
  const std::vector<double> point = {1.0, 0.5};
  CHECK(back.objective_value(point) == doctest::Approx(p.objective_value(point)));
  CHECK(back.constraint(1).sense == Sense::kEqual);
}

TEST_CASE("MPS round trip of the three-table model keeps its size and optimum") {
  FormulationConfig config;
  config.ladder = ThresholdLadder::from_thresholds({10.0, 1000.0});
  config.allow_partial_ladder = true;
  const JoinOrderMilp milp = compile(fixtures::three_tables(), config);
  const MilpProblem back = import_mps(export_mps(milp.problem));
  CHECK(back.num_variables() == 24);
  CHECK(back.num_constraints() == milp.problem.num_constraints());
  const SolveReport a = solve(milp.problem);
  const SolveReport b = solve(back);
  CHECK(a.final.status == SolveStatus::kOptimal);
  CHECK(b.final.status == SolveStatus::kOptimal);
  CHECK(b.final.objective == doctest::Approx(a.final.objective).epsilon(1e-6));
}

TEST_CASE("MPS reader rejects malformed input") {
  CHECK_THROWS_AS(import_mps(""), ParseError);
  CHECK_THROWS_AS(import_mps("NAME X\nCOLUMNS\n x OBJ 1\nROWS\n N OBJ\nENDATA\n"),
                  ParseError);
  CHECK_THROWS_AS(
      import_mps("NAME X\nROWS\n N OBJ\nCOLUMNS\n x NOROW 1\nENDATA\n"),
      ParseError);
}

TEST_CASE("random small problems survive the MPS round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    MilpProblem p;
    const int nb = 3 + trial % 4;
    for (int i = 0; i < nb; ++i) p.add_binary("b" + std::to_string(i));
    p.add_continuous("c", 0.0, 3.0);
    LinearExpr obj;
    for (int i = 0; i <= nb; ++i) obj.add(i, std::round(coef(rng) * 100) / 100);
    p.set_objective(obj);
    for (int r = 0; r < 3; ++r) {
      LinearExpr row;
      for (int i = 0; i <= nb; ++i) row.add(i, std::round(coef(rng) * 100) / 100);
      p.add_constraint(row, Sense::kLessEqual, 4.0, "r" + std::to_string(r));
    }
    const MilpProblem back = import_mps(export_mps(p));
    CHECK(back.num_variables() == p.num_variables());
    CHECK(back.num_constraints() == p.num_constraints());
    const SolveReport a = solve(p);
    const SolveReport b = solve(back);
    REQUIRE(a.final.status == b.final.status);
    if (a.final.status == SolveStatus::kOptimal) {
      CHECK(std::abs(a.final.objective - b.final.objective) <=
            1e-6 * std::max(1.0, std::abs(a.final.objective)));
    }
  }
}

TEST_CASE("LP writer names every row") {
  MilpProblem p;
  const VarId x = p.add_binary("x");
  p.add_constraint(LinearExpr().add(x, 1.0), Sense::kGreaterEqual, 1.0, "force");
  p.set_objective(LinearExpr().add(x, 2.0));
  const std::string lp = export_lp(p);
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("force:") != std::string::npos);
  CHECK(lp.find("Binar") != std::string::npos);
}
