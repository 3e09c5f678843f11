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
#include "joinmilp/error.hpp"
#include "oracles.hpp"

using namespace joinmilp;

namespace {

LeftDeepPlan order(std::vector<TableId> tables) {
  LeftDeepPlan plan;
  plan.order = std::move(tables);
  return plan;
}

}  // namespace

TEST_CASE("exact C_out of the three-table example") {
  const Query q = fixtures::three_tables();
  const CostModelExact cout_model;
  CHECK(exact_plan_cost(q, order({0, 1, 2}), cout_model).total == doctest::Approx(1000));
  CHECK(exact_plan_cost(q, order({1, 2, 0}), cout_model).total ==
        doctest::Approx(100000));
  const PlanCost c = exact_plan_cost(q, order({0, 1, 2}), cout_model);
  REQUIRE(c.per_join.size() == 2);
  CHECK(c.per_join[0] == 0.0);
  CHECK(c.per_join[1] == doctest::Approx(1000));
}

TEST_CASE("DP and enumeration find the example optimum") {
  const Query q = fixtures::three_tables();
  const CostModelExact model;
  const LeftDeepPlan dp = optimize_dp(q, model);
  const LeftDeepPlan bf = optimize_bruteforce(q, model);
  CHECK(exact_plan_cost(q, dp, model).total == doctest::Approx(1000));
  CHECK(exact_plan_cost(q, bf, model).total == doctest::Approx(1000));
  CHECK(dp.order == bf.order);
  CHECK(dp.order == std::vector<TableId>{0, 1, 2});
}

TEST_CASE("two-table queries") {
  const Query q({{"R", 100}, {"S", 1000}}, {});
  CostModelExact hash;
  hash.model = CostModel::kHashJoin;
  const LeftDeepPlan plan = optimize_dp(q, hash);
  CHECK(plan.order.size() == 2);
  CHECK(exact_plan_cost(q, plan, hash).total == doctest::Approx(3.0 * (2 + 13)));
  CHECK(exact_plan_cost(q, optimize_bruteforce(q, CostModelExact{}), {}).total == 0.0);
}

TEST_CASE("hash join cost with 13 and 2 pages") {
  const Query q({{"R", 1000}, {"S", 100}}, {});
  CostModelExact hash;
  hash.model = CostModel::kHashJoin;
  CHECK(exact_plan_cost(q, order({0, 1}), hash).total == 45.0);
}

TEST_CASE("DP agrees with enumeration on random queries") {
  for (CostModel m : {CostModel::kCout, CostModel::kHashJoin, CostModel::kSortMerge,
                      CostModel::kBlockNestedLoop, CostModel::kOperatorChoice}) {
    CostModelExact model;
    model.model = m;
    for (int seed = 0; seed < 15; ++seed) {
      const int n = 3 + seed % 4;
      const Query q = generate_random_query(n, JoinGraphKind(seed % 3), seed);
      const LeftDeepPlan dp = optimize_dp(q, model);
      const LeftDeepPlan bf = optimize_bruteforce(q, model);
      const double a = exact_plan_cost(q, dp, model).total;
      const double b = exact_plan_cost(q, bf, model).total;
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact C_out matches the reference sum") {
  for (int seed = 0; seed < 5; ++seed) {
    const Query q = generate_random_query(5, JoinGraphKind::kCycle, seed);
    oracle::for_each_permutation(5, [&](const std::vector<int>& p) {
      CHECK(exact_plan_cost(q, order(p), {}).total ==
            doctest::Approx(oracle::cout_cost(q, p)).epsilon(1e-12));
    });
  }
}

TEST_CASE("appending a table never lowers accumulated C_out") {
  const Query q = generate_random_query(6, JoinGraphKind::kStar, 4);
  oracle::for_each_permutation(6, [&](const std::vector<int>& p) {
    double previous = 0.0;
    for (std::size_t k = 2; k <= p.size(); ++k) {
      std::vector<int> prefix(p.begin(), p.begin() + k);
      const double c = oracle::cout_cost(q, prefix);
      CHECK(c >= previous);
      previous = c;
    }
  });
}

TEST_CASE("evaluation is deterministic") {
  const Query q = generate_random_query(7, JoinGraphKind::kChain, 2);
  CostModelExact model;
  model.model = CostModel::kSortMerge;
  const PlanCost a = exact_plan_cost(q, order({3, 2, 4, 1, 5, 0, 6}), model);
  const PlanCost b = exact_plan_cost(q, order({3, 2, 4, 1, 5, 0, 6}), model);
  CHECK(a.per_join == b.per_join);
  CHECK(a.total == b.total);
}

TEST_CASE("baseline errors") {
  const Query q = fixtures::three_tables();
  CHECK_THROWS_AS(exact_plan_cost(q, order({0, 0, 1}), {}), InvalidInput);
  CHECK_THROWS_AS(exact_plan_cost(q, order({0, 1}), {}), InvalidInput);
  CHECK_THROWS_AS(optimize_bruteforce(generate_random_query(9, JoinGraphKind::kChain, 0), {}),
                  CapacityError);
  CHECK_THROWS_AS(optimize_dp(generate_random_query(31, JoinGraphKind::kChain, 0), {}),
                  CapacityError);
}
