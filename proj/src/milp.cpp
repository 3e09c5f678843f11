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

#include "joinmilp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "joinmilp/error.hpp"

namespace joinmilp {

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

void LinearExpr::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const Term& t : terms_) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
  terms_ = std::move(merged);
}

double LinearExpr::evaluate(std::span<const double> values) const {
  double sum = constant_;
  for (const Term& t : terms_) sum += t.coeff * values[t.var];
  return sum;
}

std::string_view to_string(Sense sense) {
  switch (sense) {
    case Sense::kLessEqual:
      return "<=";
    case Sense::kEqual:
      return "=";
    case Sense::kGreaterEqual:
      return ">=";
  }
  return "<=";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasible:
      return "feasible";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kTimedOut:
      return "timed_out";
  }
  return "infeasible";
}

VarId MilpProblem::add_variable(std::string name, Domain domain) {
  if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos) {
    throw InvalidInput("variable names must be non-empty without whitespace");
  }
  if (by_name_.contains(name)) {
    throw InvalidInput("duplicate variable name '" + name + "'");
  }
  if (std::isnan(domain.lower) || std::isnan(domain.upper) ||
      domain.lower > domain.upper) {
    throw InvalidInput("variable '" + name + "' has an empty domain");
  }
  if (domain.type == VarType::kBinary) {
    domain.lower = 0.0;
    domain.upper = 1.0;
  }
  const VarId id = static_cast<VarId>(variables_.size());
  by_name_.emplace(name, id);
  variables_.push_back({std::move(name), domain, 0});
  return id;
}

void MilpProblem::check_var(VarId var) const {
  if (var < 0 || var >= num_variables()) {
    throw InvalidInput("unknown variable id " + std::to_string(var));
  }
}

RowId MilpProblem::add_constraint(LinearExpr expr, Sense sense, double rhs,
                                  std::string name) {
  for (const Term& t : expr.terms()) {
    check_var(t.var);
    if (!std::isfinite(t.coeff)) {
      throw InvalidInput("constraint '" + name + "' has a non-finite coefficient");
    }
  }
  if (!std::isfinite(rhs)) {
    throw InvalidInput("constraint '" + name + "' has a non-finite rhs");
  }
  expr.normalize();
  rhs -= expr.constant();
  expr.add_constant(-expr.constant());
  const RowId id = static_cast<RowId>(constraints_.size());
  constraints_.push_back({std::move(name), std::move(expr), sense, rhs});
  return id;
}

void MilpProblem::add_to_constraint(RowId row, VarId var, double coeff) {
  check_var(var);
  Constraint& c = constraints_.at(row);
  c.expr.add(var, coeff);
  c.expr.normalize();
}

void MilpProblem::set_bounds(VarId var, double lower, double upper) {
  check_var(var);
  Variable& v = variables_[var];
  if (v.is_binary()) {
    if (lower < 0.0 || upper > 1.0) {
      throw InvalidInput("binary bounds must stay within [0, 1]");
    }
  }
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw InvalidInput("variable '" + v.name + "' would get an empty domain");
  }
  v.domain.lower = lower;
  v.domain.upper = upper;
}

void MilpProblem::set_branch_priority(VarId var, int priority) {
  check_var(var);
  variables_[var].branch_priority = priority;
}

void MilpProblem::set_objective(LinearExpr objective) {
  for (const Term& t : objective.terms()) check_var(t.var);
  objective.normalize();
  objective_ = std::move(objective);
}

int MilpProblem::num_binaries() const {
  return static_cast<int>(std::count_if(
      variables_.begin(), variables_.end(),
      [](const Variable& v) { return v.is_binary(); }));
}

std::optional<VarId> MilpProblem::find_variable(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

namespace {

double row_violation(const Constraint& c, std::span<const double> values) {
  double activity = 0.0;
  double magnitude = std::abs(c.rhs);
  for (const Term& t : c.expr.terms()) {
    const double v = t.coeff * values[t.var];
    activity += v;
    magnitude += std::abs(v);
  }
  double excess = 0.0;
  switch (c.sense) {
    case Sense::kLessEqual:
      excess = activity - c.rhs;
      break;
    case Sense::kGreaterEqual:
      excess = c.rhs - activity;
      break;
    case Sense::kEqual:
      excess = std::abs(activity - c.rhs);
      break;
  }
  return std::max(0.0, excess) / std::max(1.0, magnitude);
}

double bound_violation(const Variable& v, double x) {
  const double scale = std::max(1.0, std::abs(x));
  double excess = std::max(v.domain.lower - x, x - v.domain.upper);
  if (v.is_binary()) {
    excess = std::max(excess, std::min(std::abs(x), std::abs(x - 1.0)));
  }
  return std::max(0.0, excess) / scale;
}

}  // namespace

double MilpProblem::max_violation(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != num_variables()) {
    throw InvalidInput("solution vector has the wrong length");
  }
  double worst = 0.0;
  for (int v = 0; v < num_variables(); ++v) {
    if (!std::isfinite(values[v])) return INFINITY;
    worst = std::max(worst, bound_violation(variables_[v], values[v]));
  }
  for (const Constraint& c : constraints_) {
    worst = std::max(worst, row_violation(c, values));
  }
  return worst;
}

std::vector<std::string> MilpProblem::violations(std::span<const double> values,
                                                 double tol) const {
  std::vector<std::string> out;
  if (static_cast<int>(values.size()) != num_variables()) {
    out.push_back("solution vector has the wrong length");
    return out;
  }
  for (int v = 0; v < num_variables(); ++v) {
    const double amount = bound_violation(variables_[v], values[v]);
    if (!(amount <= tol)) {
      std::ostringstream msg;
      msg << "variable " << variables_[v].name << " = " << values[v]
          << " violates its domain";
      out.push_back(msg.str());
    }
  }
  for (const Constraint& c : constraints_) {
    const double amount = row_violation(c, values);
    if (amount > tol) {
      std::ostringstream msg;
      msg << "constraint " << c.name << " violated by " << amount;
      out.push_back(msg.str());
    }
  }
  return out;
}

VarId linearize_product(MilpProblem& problem, VarId binary, VarId continuous,
                        std::string name) {
  const Variable& b = problem.variable(binary);
  const Variable& x = problem.variable(continuous);
  if (!b.is_binary()) {
    throw InvalidInput("linearize_product: '" + b.name + "' is not binary");
  }
  const double upper = x.domain.upper;
  if (x.domain.lower < 0.0 || !std::isfinite(upper)) {
    throw InvalidInput("linearize_product: '" + x.name +
                       "' must be non-negative and upper-bounded");
  }
  const VarId z = problem.add_continuous(name, 0.0, upper);
  // z <= U b
  problem.add_constraint(LinearExpr().add(z, 1.0).add(binary, -upper),
                         Sense::kLessEqual, 0.0, name + "_ub_bin");
  // z <= x
  problem.add_constraint(LinearExpr().add(z, 1.0).add(continuous, -1.0),
                         Sense::kLessEqual, 0.0, name + "_ub_x");
  // z >= x - U (1 - b)  <=>  z - x - U b >= -U
  problem.add_constraint(
      LinearExpr().add(z, 1.0).add(continuous, -1.0).add(binary, -upper),
      Sense::kGreaterEqual, -upper, name + "_lb_x");
  problem.add_constraint(LinearExpr().add(z, 1.0), Sense::kGreaterEqual, 0.0,
                         name + "_lb_zero");
  return z;
}

}  // namespace joinmilp
