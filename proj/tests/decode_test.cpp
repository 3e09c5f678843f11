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

#include "doctest.h"
#include "fixtures.hpp"
#include "joinmilp/baseline.hpp"
#include "joinmilp/decode.hpp"
#include "joinmilp/error.hpp"
#include "joinmilp/formulation.hpp"
#include "oracles.hpp"

using namespace joinmilp;

namespace {

LeftDeepPlan order(std::vector<TableId> tables) {
  LeftDeepPlan plan;
  plan.order = std::move(tables);
  return plan;
}

}  // namespace

TEST_CASE("decode recovers the order of an encoded plan") {
  const JoinOrderMilp milp = compile(fixtures::three_tables());
  const std::vector<double> x = encode_plan(milp, order({0, 1, 2}));
  CHECK(milp.problem.is_feasible(x));
  const LeftDeepPlan plan = decode(milp, x);
  CHECK(plan.order == std::vector<TableId>{0, 1, 2});
  CHECK(validate(milp.query(), plan).empty());
}

TEST_CASE("decode inverts encode for every order up to five tables") {
  for (int n = 2; n <= 5; ++n) {
    const Query q = generate_random_query(n, JoinGraphKind::kCycle, 10 + n);
    const JoinOrderMilp milp = compile(q);
    oracle::for_each_permutation(n, [&](const std::vector<int>& p) {
      const std::vector<double> x = encode_plan(milp, order(p));
      REQUIRE(milp.problem.is_feasible(x));
      CHECK(decode(milp, x).order == p);
    });
  }
}

TEST_CASE("decode keeps operators and evaluation joins") {
  const Query q = generate_random_query(4, JoinGraphKind::kChain, 3);
  FormulationConfig config;
  config.cost_model = CostModel::kOperatorChoice;
  const JoinOrderMilp milp = compile(q, config);
  LeftDeepPlan plan = order({1, 2, 0, 3});
  plan.operators = {JoinImpl::kSortMerge, JoinImpl::kHashJoin,
                    JoinImpl::kBlockNestedLoop};
  const LeftDeepPlan back = decode(milp, encode_plan(milp, plan));
  CHECK(back.order == plan.order);
  CHECK(back.operators == plan.operators);
  REQUIRE(back.evaluated_at.size() == 3);
  for (PredicateId p = 0; p < 3; ++p) {
    CHECK(back.evaluated_at[p] == earliest_evaluation(q, plan.order, p));
  }
}

TEST_CASE("decode rejects malformed assignments") {
  const JoinOrderMilp milp = compile(fixtures::three_tables());
  std::vector<double> x = encode_plan(milp, order({0, 1, 2}));
  CHECK_THROWS_AS(decode(milp, std::vector<double>(3, 0.0)), InvalidInput);
  std::vector<double> fractional = x;
  fractional[milp.vars.tio[0][0]] = 0.5;
  CHECK_THROWS_AS(decode(milp, fractional), InvalidInput);
  std::vector<double> empty = x;
  for (TableId t = 0; t < 3; ++t) empty[milp.vars.tii[t][0]] = 0.0;
  CHECK_THROWS_AS(decode(milp, empty), InternalError);
}

TEST_CASE("plan validation") {
  const Query q = fixtures::three_tables();
  CHECK(validate(q, order({2, 0, 1})).empty());
  CHECK_FALSE(validate(q, order({0, 0, 1})).empty());
  CHECK_FALSE(validate(q, order({0, 1})).empty());
  LeftDeepPlan early = order({0, 2, 1});
  early.evaluated_at = {0};
  CHECK_FALSE(validate(q, early).empty());
  early.evaluated_at = {1};
  CHECK(validate(q, early).empty());
  early.evaluated_at = {2};
  CHECK_FALSE(validate(q, early).empty());
  LeftDeepPlan ops = order({0, 1, 2});
  ops.operators = {JoinImpl::kHashJoin};
  CHECK_FALSE(validate(q, ops).empty());
}

TEST_CASE("approximation report brackets the true cardinality") {
  const Query q({{"A", 50}, {"B", 10}, {"C", 2}}, {});
  const JoinOrderMilp milp = compile(q);
  const std::vector<double> x = encode_plan(milp, order({0, 1, 2}));
  const ApproximationReport r = approximation_report(milp, x);
  REQUIRE(r.joins.size() == 1);
  CHECK(r.joins[0].join == 1);
  CHECK(r.joins[0].true_cardinality == doctest::Approx(500));
  CHECK(r.joins[0].approximate == doctest::Approx(100));
  CHECK(r.joins[0].ratio == doctest::Approx(5));
  CHECK(r.within_bracket);
  CHECK(r.true_cost == doctest::Approx(500));
  CHECK(r.milp_objective == doctest::Approx(100));

  const Query tiny({{"A", 1}, {"B", 1}, {"C", 1}}, {});
  const JoinOrderMilp small = compile(tiny);
  const ApproximationReport s =
      approximation_report(small, encode_plan(small, order({2, 1, 0})));
  REQUIRE(s.joins.size() == 1);
  CHECK(s.joins[0].approximate == doctest::Approx(1));
  CHECK(s.within_bracket);
}

TEST_CASE("bracket holds for every order of random queries") {
  for (int seed = 0; seed < 6; ++seed) {
    const Query q = generate_random_query(5, JoinGraphKind(seed % 3), seed);
    const JoinOrderMilp milp = compile(q);
    oracle::for_each_permutation(5, [&](const std::vector<int>& p) {
      const ApproximationReport r = approximation_report(milp, encode_plan(milp, order(p)));
      CHECK(r.within_bracket);
      CHECK(r.true_cost == doctest::Approx(oracle::cout_cost(q, p)).epsilon(1e-12));
      CHECK(r.max_ratio < 10.0);
    });
  }
}
