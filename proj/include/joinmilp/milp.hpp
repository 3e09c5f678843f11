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

// Generic mixed integer linear program: bounded variables, linear
// constraints and a minimisation objective.

#ifndef JOINMILP_MILP_HPP_
#define JOINMILP_MILP_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace joinmilp {

using VarId = std::int32_t;
using RowId = std::int32_t;

// Feasibility and integrality tolerance shared by the solver, validators and
// the external-solver gate.
inline constexpr double kFeasibilityTol = 1e-6;

enum class VarType { kBinary, kContinuous };

struct Domain {
  VarType type = VarType::kContinuous;
  double lower = 0.0;
  double upper = 0.0;

  static Domain binary() { return {VarType::kBinary, 0.0, 1.0}; }
  static Domain continuous(double lower, double upper) {
    return {VarType::kContinuous, lower, upper};
  }
};

struct Variable {
  std::string name;
  Domain domain;
  // Fractional variables of the highest priority class are branched on first.
  int branch_priority = 0;

  bool is_binary() const { return domain.type == VarType::kBinary; }
};

struct Term {
  VarId var;
  double coeff;
};

class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}

  LinearExpr& add(VarId var, double coeff) {
    terms_.push_back({var, coeff});
    return *this;
  }
  LinearExpr& add_constant(double value) {
    constant_ += value;
    return *this;
  }
  LinearExpr& operator+=(const LinearExpr& other);

  // Merges duplicate variables, drops exact zeros, orders terms by variable.
  void normalize();

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  double evaluate(std::span<const double> values) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

std::string_view to_string(Sense sense);

struct Constraint {
  std::string name;
  LinearExpr expr;  // normalized, constant folded into rhs
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

class MilpProblem {
 public:
  VarId add_variable(std::string name, Domain domain);
  VarId add_binary(std::string name) {
    return add_variable(std::move(name), Domain::binary());
  }
  VarId add_continuous(std::string name, double lower, double upper) {
    return add_variable(std::move(name), Domain::continuous(lower, upper));
  }

  RowId add_constraint(LinearExpr expr, Sense sense, double rhs,
                       std::string name);

  // Appends a term to an existing row (used by model extensions that refine
  // an already-defined quantity).
  void add_to_constraint(RowId row, VarId var, double coeff);
  void set_bounds(VarId var, double lower, double upper);
  void set_branch_priority(VarId var, int priority);

  LinearExpr& objective() { return objective_; }
  const LinearExpr& objective() const { return objective_; }
  void set_objective(LinearExpr objective);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const;
  const Variable& variable(VarId id) const { return variables_.at(id); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Constraint& constraint(RowId id) const { return constraints_.at(id); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::optional<VarId> find_variable(std::string_view name) const;

  double objective_value(std::span<const double> values) const {
    return objective_.evaluate(values);
  }

  // Largest scaled violation over bounds, integrality and rows. Row
  // violations are divided by max(1, |rhs|, sum |a_k x_k|).
  double max_violation(std::span<const double> values) const;
  bool is_feasible(std::span<const double> values,
                   double tol = kFeasibilityTol) const {
    return max_violation(values) <= tol;
  }

  // Human-readable list of the rows/bounds violated beyond `tol`.
  std::vector<std::string> violations(std::span<const double> values,
                                      double tol = kFeasibilityTol) const;

 private:
  void check_var(VarId var) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  LinearExpr objective_;
  std::unordered_map<std::string, VarId> by_name_;
};

// Introduces z = b * x for a binary b and a continuous x in [0, U]:
//   z <= U b,  z <= x,  z >= x - U (1 - b),  z >= 0.
VarId linearize_product(MilpProblem& problem, VarId binary, VarId continuous,
                        std::string name);

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kTimedOut };

std::string_view to_string(SolveStatus status);

struct Solution {
  std::vector<double> values;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  // Relative gap (incumbent - bound) / max(|incumbent|, 1); NaN when unknown.
  double gap = 0.0;

  bool has_values() const { return !values.empty(); }
};

}  // namespace joinmilp

#endif  // JOINMILP_MILP_HPP_
