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
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "joinmilp/bench.hpp"
#include "joinmilp/error.hpp"

using namespace joinmilp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("precision presets") {
  CHECK(precision_preset("high").ratio == 3.0);
  CHECK(precision_preset("medium").ratio == 10.0);
  CHECK(precision_preset("low").ratio == 100.0);
  CHECK_THROWS_AS(precision_preset("extreme"), InvalidInput);
  CHECK(all_presets().size() == 3);
}

TEST_CASE("CSV rows") {
  BenchRow row;
  row.query_id = "chain_n4_s1";
  row.kind = "chain";
  row.n = 4;
  row.method = "milp";
  row.preset = "high";
  row.elapsed_s = 1.23456;
  row.incumbent = 200.0;
  row.lower_bound = 100.0;
  row.true_cost = 250.0;
  row.status = "optimal";
  CHECK(row.cost_over_lb() == 2.0);
  CHECK(to_csv(row) == "chain_n4_s1,chain,4,milp,high,1.235,200,100,2,250,optimal");
  CHECK(csv_header() ==
        "query_id,kind,n,method,preset,elapsed_s,incumbent,lower_bound,"
        "cost_over_lb,true_cost,status");
  row.incumbent = std::nan("");
  row.lower_bound = std::nan("");
  CHECK(std::isnan(row.cost_over_lb()));
  CHECK(to_csv(row) == "chain_n4_s1,chain,4,milp,high,1.235,,,,250,optimal");
  row.incumbent = 0.0;
  row.lower_bound = 0.0;
  CHECK(row.cost_over_lb() == 1.0);
}

TEST_CASE("trace sampling") {
  BenchRow prototype;
  prototype.method = "milp";
  const std::vector<TracePoint> trace = {
      {0.2, kInf, 10.0}, {0.5, 80.0, 20.0}, {2.5, 50.0, 40.0}};
  const std::vector<std::pair<double, double>> costs = {{0.5, 90.0}, {2.5, 55.0}};
  const std::vector<BenchRow> rows =
      sample_trace(prototype, trace, costs, 1.0, 3.2, "timed_out");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].elapsed_s == 1.0);
  CHECK(rows[0].incumbent == 80.0);
  CHECK(rows[0].true_cost == 90.0);
  CHECK(rows[0].status == "running");
  CHECK(rows[1].lower_bound == 20.0);
  CHECK(rows[2].incumbent == 50.0);
  CHECK(rows[2].true_cost == 55.0);
  CHECK(rows[3].status == "timed_out");
  CHECK(rows[3].elapsed_s == 3.2);
  CHECK(rows[3].lower_bound == 40.0);

  const std::vector<BenchRow> early =
      sample_trace(prototype, {{0.2, kInf, 10.0}}, {}, 1.0, 0.4, "timed_out");
  REQUIRE(early.size() == 1);
  CHECK(std::isnan(early[0].incumbent));
  CHECK(std::isnan(early[0].true_cost));
}

TEST_CASE("DP rows") {
  const BenchRow row = run_dp(fixtures::three_tables(), "three", CostModel::kCout, 10.0);
  CHECK(row.status == "optimal");
  CHECK(row.method == "dp");
  CHECK(row.incumbent == doctest::Approx(1000));
  CHECK(row.true_cost == doctest::Approx(1000));
  const BenchRow big = run_dp(generate_random_query(31, JoinGraphKind::kChain, 0), "big",
                              CostModel::kCout, 10.0);
  CHECK(big.status == "no_plan");
  CHECK(big.kind == "chain");
}

TEST_CASE("MILP run on the three-table example") {
  MilpRunOptions options;
  options.time_limit = 10.0;
  const MilpRun run = run_milp(fixtures::three_tables(), "three", options);
  CHECK(run.status == SolveStatus::kOptimal);
  CHECK(run.plan.order == std::vector<TableId>{0, 1, 2});
  CHECK(run.true_cost == doctest::Approx(1000));
  REQUIRE_FALSE(run.rows.empty());
  CHECK(run.rows.back().status == "optimal");
  CHECK(run.rows.back().preset == "medium");
  CHECK(query_id_from_path("/tmp/x/chain_n4_s1.json") == "chain_n4_s1");
}
