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

#include "joinmilp/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "joinmilp/baseline.hpp"
#include "joinmilp/decode.hpp"
#include "joinmilp/error.hpp"

namespace joinmilp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_number(double value) {
  if (!std::isfinite(value)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double finite_or_nan(double value) {
  return std::isfinite(value) ? value : kNaN;
}

}  // namespace

PrecisionPreset precision_preset(std::string_view name) {
  if (name == "high") return {"high", 3.0};
  if (name == "medium") return {"medium", 10.0};
  if (name == "low") return {"low", 100.0};
  throw InvalidInput("unknown precision preset '" + std::string(name) +
                     "' (expected high, medium or low)");
}

std::vector<PrecisionPreset> all_presets() {
  return {precision_preset("high"), precision_preset("medium"),
          precision_preset("low")};
}

double BenchRow::cost_over_lb() const {
  if (!std::isfinite(incumbent) || !std::isfinite(lower_bound)) return kNaN;
  if (lower_bound > 0.0) return incumbent / lower_bound;
  if (incumbent == lower_bound) return 1.0;
  return kNaN;
}

std::string csv_header() {
  return "query_id,kind,n,method,preset,elapsed_s,incumbent,lower_bound,"
         "cost_over_lb,true_cost,status";
}

std::string to_csv(const BenchRow& row) {
  char elapsed[32];
  std::snprintf(elapsed, sizeof(elapsed), "%.3f", row.elapsed_s);
  return csv_field(row.query_id) + "," + row.kind + "," +
         std::to_string(row.n) + "," + row.method + "," + row.preset + "," +
         elapsed + "," + format_number(row.incumbent) + "," +
         format_number(row.lower_bound) + "," +
         format_number(row.cost_over_lb()) + "," +
         format_number(row.true_cost) + "," + row.status;
}

FormulationConfig formulation_config(const MilpRunOptions& options) {
  FormulationConfig config;
  config.ladder_ratio = options.preset.ratio;
  config.ladder = options.ladder;
  config.allow_partial_ladder = options.ladder.has_value();
  config.cost_model = options.cost_model;
  return config;
}

std::vector<BenchRow> sample_trace(
    const BenchRow& prototype, const std::vector<TracePoint>& trace,
    const std::vector<std::pair<double, double>>& incumbent_true_costs,
    double interval, double elapsed, std::string_view final_status) {
  std::vector<BenchRow> rows;
  auto fill = [&](double t, BenchRow& row) {
    row.incumbent = kNaN;
    row.lower_bound = kNaN;
    row.true_cost = kNaN;
    for (const TracePoint& p : trace) {
      if (p.elapsed > t) break;
      row.incumbent = finite_or_nan(p.incumbent);
      row.lower_bound = finite_or_nan(p.lower_bound);
    }
    for (const auto& [at, cost] : incumbent_true_costs) {
      if (at > t) break;
      row.true_cost = cost;
    }
  };
  if (interval > 0.0) {
    for (int k = 1; k * interval < elapsed; ++k) {
      BenchRow row = prototype;
      row.elapsed_s = k * interval;
      fill(row.elapsed_s, row);
      row.status = "running";
      rows.push_back(row);
    }
  }
  BenchRow last = prototype;
  last.elapsed_s = elapsed;
  fill(std::numeric_limits<double>::infinity(), last);
  last.status = std::string(final_status);
  rows.push_back(last);
  return rows;
}

MilpRun run_milp(const Query& query, const std::string& query_id,
                 const MilpRunOptions& options) {
  const FormulationConfig config = formulation_config(options);
  const CostModelExact exact = CostModelExact::from(config);
  const auto start = Clock::now();
  const JoinOrderMilp milp = compile(query, config);

  MilpRun run;
  Solution final;
  if (options.external_solver.empty()) {
    SolverConfig solver;
    solver.time_limit = options.time_limit;
    solver.heuristic = make_plan_heuristic(milp);
    solver.cuts = envelope_cuts(milp);
    auto on_incumbent = [&](const TracePoint& point,
                            std::span<const double> values) {
      const LeftDeepPlan plan = decode(milp, values);
      run.incumbent_true_costs.emplace_back(
          point.elapsed, exact_plan_cost(query, plan, exact).total);
    };
    SolveReport report = solve(milp.problem, solver, on_incumbent);
    final = std::move(report.final);
    run.trace = std::move(report.trace);
    run.lower_bound = report.lower_bound;
  } else {
    final = external_solve(milp.problem, options.external_solver,
                           options.workdir);
    run.lower_bound = final.status == SolveStatus::kOptimal
                          ? final.objective
                          : -std::numeric_limits<double>::infinity();
  }
  run.elapsed = seconds_since(start);
  run.status = final.status;
  run.objective = final.has_values() ? final.objective : kNaN;
  run.true_cost = kNaN;
  if (final.has_values()) {
    run.plan = decode(milp, final.values);
    run.true_cost = exact_plan_cost(query, run.plan, exact).total;
  }
  if (!options.external_solver.empty()) {
    run.trace.push_back({run.elapsed, final.has_values()
                                          ? final.objective
                                          : std::numeric_limits<double>::infinity(),
                         run.lower_bound});
    if (final.has_values()) {
      run.incumbent_true_costs.emplace_back(run.elapsed, run.true_cost);
    }
  }

  BenchRow prototype;
  prototype.query_id = query_id;
  if (query.kind()) prototype.kind = std::string(to_string(*query.kind()));
  prototype.n = query.num_tables();
  prototype.method = options.external_solver.empty() ? "milp" : "external";
  prototype.preset = options.preset.name;
  run.rows = sample_trace(prototype, run.trace, run.incumbent_true_costs,
                          options.sample_interval, run.elapsed,
                          to_string(run.status));
  return run;
}

BenchRow run_dp(const Query& query, const std::string& query_id,
                CostModel cost_model, double time_limit, LeftDeepPlan* plan) {
  BenchRow row;
  row.query_id = query_id;
  if (query.kind()) row.kind = std::string(to_string(*query.kind()));
  row.n = query.num_tables();
  row.method = "dp";
  row.incumbent = kNaN;
  row.lower_bound = kNaN;
  row.true_cost = kNaN;
  if (query.num_tables() > kMaxDpTables) {
    row.status = "no_plan";
    return row;
  }
  FormulationConfig config;
  config.cost_model = cost_model;
  const CostModelExact exact = CostModelExact::from(config);
  const auto start = Clock::now();
  LeftDeepPlan best = optimize_dp(query, exact);
  row.elapsed_s = seconds_since(start);
  const double cost = exact_plan_cost(query, best, exact).total;
  row.true_cost = cost;
  if (row.elapsed_s > time_limit) {
    row.status = "timed_out";
  } else {
    row.incumbent = cost;
    row.lower_bound = cost;
    row.status = "optimal";
  }
  if (plan != nullptr) *plan = std::move(best);
  return row;
}

std::string query_id_from_path(std::string_view path) {
  return std::filesystem::path(path).stem().string();
}

}  // namespace joinmilp
