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

#include "joinmilp/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "joinmilp/baseline.hpp"
#include "joinmilp/error.hpp"

namespace joinmilp {
namespace {

constexpr double kIntegralityTol = 1e-6;

bool is_set(std::span<const double> values, VarId var) {
  return values[var] > 0.5;
}

}  // namespace

LeftDeepPlan decode(const JoinOrderMilp& milp, std::span<const double> values) {
  const MilpProblem& problem = milp.problem;
  if (static_cast<int>(values.size()) != problem.num_variables()) {
    throw InvalidInput("solution has " + std::to_string(values.size()) +
                       " values for " + std::to_string(problem.num_variables()) +
                       " variables");
  }
  for (VarId v = 0; v < problem.num_variables(); ++v) {
    if (!problem.variable(v).is_binary()) continue;
    if (std::abs(values[v] - std::round(values[v])) > kIntegralityTol) {
      throw InvalidInput("binary " + problem.variable(v).name +
                         " is fractional (" + std::to_string(values[v]) + ")");
    }
  }
  const Query& q = milp.query();
  const VarRegistry& vars = milp.vars;
  const int n = q.num_tables();
  const int joins = milp.num_joins();
  LeftDeepPlan plan;
  auto single = [&](const VarRegistry::Grid& g, int j, const char* what) {
    int found = -1;
    for (TableId t = 0; t < n; ++t) {
      if (!is_set(values, g[t][j])) continue;
      if (found >= 0) {
        throw InternalError(std::string("two tables in the ") + what +
                            " operand of join " + std::to_string(j));
      }
      found = t;
    }
    if (found < 0) {
      throw InternalError(std::string("no table in the ") + what +
                          " operand of join " + std::to_string(j));
    }
    return found;
  };
  plan.order.push_back(single(vars.tio, 0, "outer"));
  for (int j = 0; j < joins; ++j) plan.order.push_back(single(vars.tii, j, "inner"));

  if (!vars.jos.empty()) {
    for (int j = 0; j < joins; ++j) {
      int chosen = -1;
      for (std::size_t i = 0; i < vars.jos.size(); ++i) {
        if (is_set(values, vars.jos[i][j])) chosen = static_cast<int>(i);
      }
      if (chosen < 0) throw InternalError("join without an implementation");
      plan.operators.push_back(milp.implementations()[chosen]);
    }
  }

  if (!vars.pao.empty()) plan.evaluated_at.assign(q.num_predicates(), joins - 1);
  for (PredicateId p = 0; p < q.num_predicates() && !vars.pao.empty(); ++p) {
    if (!vars.pco.empty()) {
      for (int j = 0; j < joins; ++j) {
        if (is_set(values, vars.pco[p][j])) plan.evaluated_at[p] = j;
      }
      continue;
    }
    for (int j = 0; j < joins; ++j) {
      if (is_set(values, vars.pao[p][j])) {
        plan.evaluated_at[p] = std::max(0, j - 1);
        break;
      }
    }
  }

  if (!vars.clo.empty()) {
    plan.retained_columns.resize(joins);
    for (int j = 0; j < joins; ++j) {
      for (ColumnId l = 0; l < q.num_columns(); ++l) {
        if (is_set(values, vars.clo[l][j]) || is_set(values, vars.cli[l][j])) {
          plan.retained_columns[j].push_back(l);
        }
      }
    }
  }

  const std::vector<std::string> problems = validate(q, plan);
  if (!problems.empty()) {
    throw InternalError("decoded plan is invalid: " + problems.front());
  }
  return plan;
}

ApproximationReport approximation_report(const JoinOrderMilp& milp,
                                         std::span<const double> values) {
  const LeftDeepPlan plan = decode(milp, values);
  const Query& q = milp.query();
  ApproximationReport report;
  const double ratio = milp.ladder().ratio();
  TableSet outer = TableSet{1} << plan.order[0];
  for (int j = 1; j < milp.num_joins(); ++j) {
    outer |= TableSet{1} << plan.order[j];
    JoinApproximation row;
    row.join = j;
    row.true_cardinality = q.true_cardinality(outer);
    row.approximate = values[milp.vars.co[j]];
    if (row.approximate > 0.0) {
      row.ratio = row.true_cardinality / row.approximate;
    } else {
      row.ratio = row.true_cardinality >= 1.0
                      ? std::numeric_limits<double>::infinity()
                      : 1.0;
    }
    if (row.true_cardinality >= 1.0) {
      // Cardinalities within the boundary epsilon below a rung count as
      // reaching it.
      const double slack =
          row.true_cardinality *
          (std::pow(milp.config().log_base, milp.config().boundary_epsilon) -
           1.0 + 1e-9);
      const bool ok = row.approximate <= row.true_cardinality + slack &&
                      row.true_cardinality < row.approximate * ratio;
      report.within_bracket = report.within_bracket && ok;
    }
    report.max_ratio = std::max(report.max_ratio, row.ratio);
    report.joins.push_back(row);
  }
  report.milp_objective = milp.problem.objective_value(values);
  report.true_cost =
      exact_plan_cost(q, plan, CostModelExact::from(milp.config())).total;
  return report;
}

}  // namespace joinmilp
