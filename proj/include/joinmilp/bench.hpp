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

// Benchmark driver behind the command-line tool: precision presets, MILP and
// DP runs on single queries, anytime sampling and the CSV row format.

#ifndef JOINMILP_BENCH_HPP_
#define JOINMILP_BENCH_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "joinmilp/formulation.hpp"
#include "joinmilp/plan.hpp"
#include "joinmilp/query.hpp"
#include "joinmilp/solver.hpp"

namespace joinmilp {

struct PrecisionPreset {
  std::string name;  // high, medium or low
  double ratio = 10.0;
};

// high -> 3, medium -> 10, low -> 100.
PrecisionPreset precision_preset(std::string_view name);
std::vector<PrecisionPreset> all_presets();

struct BenchRow {
  std::string query_id;
  std::string kind;  // empty for hand-written queries
  int n = 0;
  std::string method;  // dp, milp or external
  std::string preset;  // empty for dp
  double elapsed_s = 0.0;
  double incumbent = 0.0;    // NaN when there is none
  double lower_bound = 0.0;  // NaN when unknown
  double true_cost = 0.0;    // exact cost of the incumbent plan, NaN if none
  std::string status;        // optimal, feasible, timed_out, infeasible,
                             // running, no_plan, error

  // incumbent / lower_bound, NaN unless both are finite and the ratio is
  // defined.
  double cost_over_lb() const;
};

std::string csv_header();
std::string to_csv(const BenchRow& row);

struct MilpRunOptions {
  PrecisionPreset preset = {"medium", 10.0};
  CostModel cost_model = CostModel::kCout;
  double time_limit = 60.0;
  double sample_interval = 1.0;
  // Command template with {in} and {out}; the internal solver when empty.
  std::string external_solver;
  std::string workdir = ".";
  // Overrides the preset ladder when set; it may stop below the cardinality
  // product.
  std::optional<ThresholdLadder> ladder;
};

FormulationConfig formulation_config(const MilpRunOptions& options);

struct MilpRun {
  LeftDeepPlan plan;  // empty order when no incumbent was found
  SolveStatus status = SolveStatus::kTimedOut;
  double objective = 0.0;
  double lower_bound = 0.0;
  double true_cost = 0.0;
  double elapsed = 0.0;
  std::vector<TracePoint> trace;
  // Cost of each incumbent's plan, parallel to the incumbent changes in trace.
  std::vector<std::pair<double, double>> incumbent_true_costs;
  // One row per sampling tick plus a final row.
  std::vector<BenchRow> rows;
};

MilpRun run_milp(const Query& query, const std::string& query_id,
                 const MilpRunOptions& options);

// DP baseline; rows report no_plan above the subset-table capacity and
// timed_out when the run overshoots `time_limit`.
BenchRow run_dp(const Query& query, const std::string& query_id,
                CostModel cost_model, double time_limit,
                LeftDeepPlan* plan = nullptr);

// Rows sampled from a solver trace at multiples of `interval` up to
// `elapsed`, then one final row carrying `final_status`.
std::vector<BenchRow> sample_trace(const BenchRow& prototype,
                                   const std::vector<TracePoint>& trace,
                                   const std::vector<std::pair<double, double>>&
                                       incumbent_true_costs,
                                   double interval, double elapsed,
                                   std::string_view final_status);

std::string query_id_from_path(std::string_view path);

}  // namespace joinmilp

#endif  // JOINMILP_BENCH_HPP_
