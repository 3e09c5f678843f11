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

// Compiles a join-ordering query into a MILP over left-deep plans.
//
// Joins are numbered 0..J-1 with J = n - 1. For join j, tio[t][j] / tii[t][j]
// mark table t in the outer / inner operand, pao[p][j] marks predicate p as
// applied within the outer operand, lco[j] is the log-cardinality of the outer
// operand and cto[r][j] flags that it reaches threshold r of the ladder. co[j]
// is the threshold-approximated outer cardinality.

#ifndef JOINMILP_FORMULATION_HPP_
#define JOINMILP_FORMULATION_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "joinmilp/milp.hpp"
#include "joinmilp/plan.hpp"
#include "joinmilp/query.hpp"
#include "joinmilp/solver.hpp"

namespace joinmilp {

class ThresholdLadder {
 public:
  ThresholdLadder() = default;

  // 1, ratio, ratio^2, ... up to the first rung >= cover.
  static ThresholdLadder geometric(double ratio, double cover);
  // Strictly increasing rungs >= 1, used as given.
  static ThresholdLadder from_thresholds(std::vector<double> thresholds);

  const std::vector<double>& thresholds() const { return thresholds_; }
  double threshold(int r) const { return thresholds_.at(r); }
  int size() const { return static_cast<int>(thresholds_.size()); }
  bool empty() const { return thresholds_.empty(); }
  double top() const { return thresholds_.back(); }
  // Largest ratio between consecutive rungs.
  double ratio() const { return ratio_; }

  // Largest rung not above `card` (within the boundary epsilon in log
  // space), or 0 when card lies below the first rung.
  double floor(double card, double log_base = 10.0,
               double epsilon = 1e-6) const;

 private:
  std::vector<double> thresholds_;
  double ratio_ = 0.0;
};

struct Extensions {
  bool nary = false;
  bool correlated = false;
  bool expensive_predicates = false;
  bool projection = false;
  bool properties = false;
};

// Physical properties of intermediate results (for instance a sort order).
struct PropertySpec {
  std::vector<std::string> names;
  std::vector<std::pair<JoinImpl, int>> requirements;  // impl needs property
  std::vector<std::vector<JoinImpl>> produces;       // per property
  std::vector<std::vector<TableId>> table_provides;  // per property
};

struct FormulationConfig {
  // Defaults to a geometric ladder with ladder_ratio covering the product of
  // all table cardinalities.
  std::optional<ThresholdLadder> ladder;
  double ladder_ratio = 10.0;
  // Accept a ladder whose top rung is below the cardinality product.
  bool allow_partial_ladder = false;
  // Weight each rung by the geometric midpoint to the next rung instead of
  // the rung itself.
  bool midpoint_approximation = false;
  double log_base = 10.0;
  CostModel cost_model = CostModel::kCout;
  // Candidates for CostModel::kOperatorChoice.
  std::vector<JoinImpl> implementations = {
      JoinImpl::kHashJoin, JoinImpl::kSortMerge, JoinImpl::kBlockNestedLoop};
  Extensions extensions;
  PropertySpec properties;
  double tup_size = 100.0;   // bytes
  double page_size = 8192.0;  // bytes
  double buffer = 64.0;      // pages
  double boundary_epsilon = 1e-6;

  void validate() const;
};

// Structured indices of every model variable. Grids are indexed
// [item][join].
struct VarRegistry {
  using Grid = std::vector<std::vector<VarId>>;

  Grid tio, tii;
  Grid pao;  // per predicate
  Grid pai;  // per predicate; only single-table predicates, inner operand
  Grid pag;  // per correlated group
  Grid cto;  // per threshold
  std::vector<VarId> lco, co, ci;
  std::vector<VarId> pgo, pgi, blocks;
  Grid bnl;  // per table: tii * blocks
  Grid pco;  // per predicate
  Grid pce;  // per predicate: pco * co
  Grid clo, cli;  // per column
  Grid clb;       // per column: clo * co
  std::vector<VarId> obytes, ibytes;
  Grid jos, pjc, ajc;  // per implementation slot
  Grid ohp;            // per property
  // Products of 0/1 variables introduced when linearizing binary products.
  std::vector<VarId> ind;

  // Every registered variable as ("family[i][j]", id) in a stable order.
  std::vector<std::pair<std::string, VarId>> entries() const;
};

class JoinOrderMilp {
 public:
  JoinOrderMilp(Query query, FormulationConfig config);

  MilpProblem problem;
  VarRegistry vars;

  const Query& query() const { return query_; }
  const FormulationConfig& config() const { return config_; }
  const ThresholdLadder& ladder() const { return ladder_; }
  int num_joins() const { return query_.num_tables() - 1; }
  int j_max() const { return num_joins() - 1; }
  // Implementations selectable per join (slot order of jos/pjc/ajc).
  const std::vector<JoinImpl>& implementations() const { return impls_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  double log(double value) const;
  double pages(double cardinality) const;
  // Approximate cardinality represented by each rung.
  double rung_value(int r) const { return rung_values_.at(r); }
  double lco_lower() const { return lco_lower_; }
  double lco_upper() const { return lco_upper_; }

 private:
  friend JoinOrderMilp build_join_order_core(const Query&,
                                             const FormulationConfig&);
  friend void add_predicate_applicability(JoinOrderMilp&);
  friend void add_cardinality(JoinOrderMilp&);
  friend void add_cout_objective(JoinOrderMilp&);
  friend void add_page_counts(JoinOrderMilp&);
  friend void add_hash_join_cost(JoinOrderMilp&);
  friend void add_sort_merge_cost(JoinOrderMilp&);
  friend void add_bnl_cost(JoinOrderMilp&);
  friend void add_correlated_group(JoinOrderMilp&, int);
  friend void add_expensive_predicates(JoinOrderMilp&);
  friend void add_projection(JoinOrderMilp&);
  friend void add_operator_selection(JoinOrderMilp&,
                                     const std::vector<JoinImpl>&);
  friend void add_result_properties(JoinOrderMilp&, const PropertySpec&);
  friend std::vector<double> encode_plan(const JoinOrderMilp&,
                                         const LeftDeepPlan&);
  friend LinearExpr join_cost_expr(JoinOrderMilp&, JoinImpl, int);

  // A continuous variable equal to a linear expression, or to the product of
  // a binary and a 0/1-valued variable.
  struct Definition {
    VarId var;
    LinearExpr expr;
    VarId binary = -1;
    VarId factor = -1;
  };
  VarId define(std::string name, double lower, double upper, LinearExpr expr);
  // binary * continuous, written as a combination of binary products after
  // substituting the definitions behind `continuous`.
  VarId define_product(VarId binary, VarId continuous, std::string name);
  // `var` as a constant plus a combination of 0/1-valued variables, or
  // nullopt when it depends on a free continuous variable.
  std::optional<LinearExpr> expand(VarId var) const;
  VarId indicator(VarId binary, VarId other);

  Query query_;
  FormulationConfig config_;
  ThresholdLadder ladder_;
  std::vector<double> rung_values_;
  std::vector<JoinImpl> impls_;
  std::vector<std::string> warnings_;
  std::vector<Definition> defs_;
  std::map<VarId, std::size_t> def_of_;
  std::map<std::pair<VarId, VarId>, VarId> indicators_;
  std::vector<RowId> lco_rows_;
  double lco_lower_ = 0.0;
  double lco_upper_ = 0.0;
  bool projection_pages_ = false;
};

JoinOrderMilp build_join_order_core(const Query& query,
                                    const FormulationConfig& config);
void add_predicate_applicability(JoinOrderMilp& milp);
void add_cardinality(JoinOrderMilp& milp);
void add_cout_objective(JoinOrderMilp& milp);
void add_page_counts(JoinOrderMilp& milp);
void add_hash_join_cost(JoinOrderMilp& milp);
void add_sort_merge_cost(JoinOrderMilp& milp);
void add_bnl_cost(JoinOrderMilp& milp);
void add_correlated_group(JoinOrderMilp& milp, int group);
void add_expensive_predicates(JoinOrderMilp& milp);
void add_projection(JoinOrderMilp& milp);
void add_operator_selection(JoinOrderMilp& milp,
                            const std::vector<JoinImpl>& implementations);
void add_result_properties(JoinOrderMilp& milp, const PropertySpec& spec);

// Cost expression of one join under one implementation; requires page counts.
LinearExpr join_cost_expr(JoinOrderMilp& milp, JoinImpl impl, int join);

// Runs every step the configuration asks for, in dependency order.
JoinOrderMilp compile(const Query& query, const FormulationConfig& config = {});

struct ModelCounts {
  std::int64_t variables = 0;
  std::int64_t constraints = 0;
};

// Size of the base model (C_out objective, no extensions) with n tables, m
// binary predicates and l thresholds.
ModelCounts count_model(int n, int m, int l);

// Full variable assignment representing `plan`: minimal threshold flags,
// every applicable predicate applied (or applied after plan.evaluated_at when
// predicates are evaluated explicitly), cheapest admissible operator when the
// plan does not fix one, and only the columns still needed.
std::vector<double> encode_plan(const JoinOrderMilp& milp,
                                const LeftDeepPlan& plan);

// Objective of encode_plan(plan).
double approximate_plan_cost(const JoinOrderMilp& milp,
                             const LeftDeepPlan& plan);

// Primal heuristic for the solver: a greedy plan before the root LP, then
// plans rounded from LP points, each polished by adjacent swaps.
PrimalHeuristic make_plan_heuristic(const JoinOrderMilp& milp);

// Lower convex envelope of the rung staircase, co[j] >= a + b * lco[j], one
// row per hull edge and join. Valid for every feasible point; meant for
// SolverConfig::cuts.
std::vector<Constraint> envelope_cuts(const JoinOrderMilp& milp);

// Sidecar mapping registry keys to variable names.
std::string registry_to_json(const JoinOrderMilp& milp, int indent = 2);

}  // namespace joinmilp

#endif  // JOINMILP_FORMULATION_HPP_
