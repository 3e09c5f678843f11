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

#include "joinmilp/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>

#include "joinmilp/error.hpp"
#include "json.hpp"

namespace joinmilp {
namespace {

constexpr int kPlanPriority = 2;

std::string key(const char* family, int i, int j) {
  return std::string(family) + "_" + std::to_string(i) + "_" + std::to_string(j);
}
std::string key(const char* family, int j) {
  return std::string(family) + "_" + std::to_string(j);
}

VarRegistry::Grid grid(int items, int joins) {
  return VarRegistry::Grid(items, std::vector<VarId>(joins, -1));
}

void add_objective(MilpProblem& problem, const LinearExpr& expr) {
  LinearExpr objective = problem.objective();
  objective += expr;
  problem.set_objective(std::move(objective));
}

double ceil_log2(double pages) {
  return pages <= 1.0 ? 0.0 : std::ceil(std::log2(pages) - 1e-12);
}

// Sort-merge cost of one operand with the given page count, minus the linear
// pass that pgo/pgi already account for.
double sort_weight(double pages) { return 2.0 * pages * ceil_log2(pages); }

}  // namespace

ThresholdLadder ThresholdLadder::geometric(double ratio, double cover) {
  if (!(ratio > 1.0) || !std::isfinite(ratio)) {
    throw InvalidInput("ladder ratio must be a finite value > 1");
  }
  if (!(cover >= 1.0) || !std::isfinite(cover)) {
    throw InvalidInput("ladder must cover a finite cardinality >= 1");
  }
  ThresholdLadder ladder;
  ladder.ratio_ = ratio;
  ladder.thresholds_.push_back(1.0);
  while (ladder.thresholds_.back() < cover * (1.0 - 1e-12)) {
    ladder.thresholds_.push_back(ladder.thresholds_.back() * ratio);
  }
  return ladder;
}

ThresholdLadder ThresholdLadder::from_thresholds(std::vector<double> thresholds) {
  if (thresholds.empty()) throw InvalidInput("ladder needs at least one rung");
  ThresholdLadder ladder;
  ladder.ratio_ = thresholds.size() == 1
                      ? std::numeric_limits<double>::infinity()
                      : 0.0;
  for (std::size_t r = 0; r < thresholds.size(); ++r) {
    if (!(thresholds[r] >= 1.0) || !std::isfinite(thresholds[r])) {
      throw InvalidInput("ladder rungs must be finite and >= 1");
    }
    if (r > 0) {
      if (!(thresholds[r] > thresholds[r - 1])) {
        throw InvalidInput("ladder rungs must be strictly increasing");
      }
      ladder.ratio_ = std::max(ladder.ratio_, thresholds[r] / thresholds[r - 1]);
    }
  }
  ladder.thresholds_ = std::move(thresholds);
  return ladder;
}

double ThresholdLadder::floor(double card, double log_base,
                              double epsilon) const {
  if (!(card > 0.0)) return 0.0;
  const double lc = std::log(card) / std::log(log_base);
  double out = 0.0;
  for (double theta : thresholds_) {
    if (lc > std::log(theta) / std::log(log_base) - epsilon) out = theta;
  }
  return out;
}

void FormulationConfig::validate() const {
  if (!(log_base > 1.0) || !std::isfinite(log_base)) {
    throw InvalidInput("log base must be > 1");
  }
  if (!(tup_size > 0.0) || !(page_size > 0.0) || !(buffer > 0.0)) {
    throw InvalidInput("tup_size, page_size and buffer must be positive");
  }
  if (!(boundary_epsilon >= 0.0) || boundary_epsilon >= 0.5) {
    throw InvalidInput("boundary epsilon must lie in [0, 0.5)");
  }
  if (!ladder && (!(ladder_ratio > 1.0) || !std::isfinite(ladder_ratio))) {
    throw InvalidInput("ladder ratio must be a finite value > 1");
  }
  if (extensions.properties && cost_model != CostModel::kOperatorChoice) {
    throw InvalidInput("result properties need the operator-choice cost model");
  }
}

std::vector<std::pair<std::string, VarId>> VarRegistry::entries() const {
  std::vector<std::pair<std::string, VarId>> out;
  auto add_grid = [&](const char* family, const Grid& g) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g[i].size(); ++j) {
        if (g[i][j] < 0) continue;
        out.emplace_back(std::string(family) + "[" + std::to_string(i) + "][" +
                             std::to_string(j) + "]",
                         g[i][j]);
      }
    }
  };
  auto add_row = [&](const char* family, const std::vector<VarId>& v) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < 0) continue;
      out.emplace_back(std::string(family) + "[" + std::to_string(j) + "]", v[j]);
    }
  };
  add_grid("tio", tio);
  add_grid("tii", tii);
  add_grid("pao", pao);
  add_grid("pai", pai);
  add_grid("pag", pag);
  add_grid("cto", cto);
  add_row("lco", lco);
  add_row("co", co);
  add_row("ci", ci);
  add_row("pgo", pgo);
  add_row("pgi", pgi);
  add_row("blocks", blocks);
  add_grid("bnl", bnl);
  add_grid("pco", pco);
  add_grid("pce", pce);
  add_grid("clo", clo);
  add_grid("cli", cli);
  add_grid("clb", clb);
  add_row("obytes", obytes);
  add_row("ibytes", ibytes);
  add_grid("jos", jos);
  add_grid("pjc", pjc);
  add_grid("ajc", ajc);
  add_grid("ohp", ohp);
  add_row("ind", ind);
  return out;
}

JoinOrderMilp::JoinOrderMilp(Query query, FormulationConfig config)
    : query_(std::move(query)), config_(std::move(config)) {
  config_.validate();
  query_.validate();
  const int n = query_.num_tables();
  if (n < 2) throw InvalidInput("join ordering needs at least two tables");
  const double product = query_.cardinality_product();
  if (!std::isfinite(product)) {
    throw InvalidInput("cardinality product overflows; too many large tables");
  }
  if (config_.ladder) {
    ladder_ = *config_.ladder;
    if (ladder_.empty()) throw InvalidInput("ladder needs at least one rung");
    if (ladder_.top() < product * (1.0 - 1e-9) && !config_.allow_partial_ladder) {
      throw InvalidInput("threshold ladder tops out at " +
                         std::to_string(ladder_.top()) +
                         " below the cardinality product " +
                         std::to_string(product));
    }
  } else {
    ladder_ = ThresholdLadder::geometric(config_.ladder_ratio, product);
  }
  for (int r = 0; r < ladder_.size(); ++r) {
    double value = ladder_.threshold(r);
    if (config_.midpoint_approximation && r + 1 < ladder_.size()) {
      value = std::sqrt(value * ladder_.threshold(r + 1));
    }
    rung_values_.push_back(value);
  }
  for (const Table& t : query_.tables()) lco_upper_ += log(t.cardinality);
  for (const Predicate& p : query_.predicates()) {
    lco_lower_ += std::min(0.0, log(p.selectivity));
  }
  if (config_.extensions.correlated) {
    for (const CorrelatedGroup& g : query_.groups()) {
      lco_lower_ += std::min(0.0, log(g.correction));
    }
  }
}

double JoinOrderMilp::log(double value) const {
  return std::log(value) / std::log(config_.log_base);
}

double JoinOrderMilp::pages(double cardinality) const {
  if (cardinality <= 0.0) return 0.0;
  return std::ceil(cardinality * config_.tup_size / config_.page_size - 1e-9);
}

VarId JoinOrderMilp::define(std::string name, double lower, double upper,
                            LinearExpr expr) {
  const VarId var = problem.add_continuous(name, lower, upper);
  LinearExpr row;
  row.add(var, 1.0);
  for (const Term& t : expr.terms()) row.add(t.var, -t.coeff);
  problem.add_constraint(std::move(row), Sense::kEqual, expr.constant(),
                         "def_" + name);
  def_of_[var] = defs_.size();
  defs_.push_back({var, std::move(expr)});
  return var;
}

std::optional<LinearExpr> JoinOrderMilp::expand(VarId var) const {
  const auto it = def_of_.find(var);
  if (it == def_of_.end() || defs_[it->second].binary >= 0) {
    const Domain& d = problem.variable(var).domain;
    if (!problem.variable(var).is_binary() && !(d.lower == 0.0 && d.upper == 1.0 &&
                                                it != def_of_.end())) {
      return std::nullopt;
    }
    return LinearExpr().add(var, 1.0);
  }
  const LinearExpr& expr = defs_[it->second].expr;
  LinearExpr out(expr.constant());
  for (const Term& t : expr.terms()) {
    const std::optional<LinearExpr> inner = expand(t.var);
    if (!inner) return std::nullopt;
    out.add_constant(t.coeff * inner->constant());
    for (const Term& u : inner->terms()) out.add(u.var, t.coeff * u.coeff);
  }
  out.normalize();
  return out;
}

VarId JoinOrderMilp::indicator(VarId binary, VarId other) {
  if (binary == other) return binary;
  const auto k = std::minmax(binary, other);
  const auto it = indicators_.find(k);
  if (it != indicators_.end()) return it->second;
  const VarId w = problem.add_continuous(
      "ind_" + std::to_string(k.first) + "_" + std::to_string(k.second), 0.0, 1.0);
  problem.add_constraint(LinearExpr().add(w, 1.0).add(binary, -1.0),
                         Sense::kLessEqual, 0.0, problem.variable(w).name + "_b");
  problem.add_constraint(LinearExpr().add(w, 1.0).add(other, -1.0),
                         Sense::kLessEqual, 0.0, problem.variable(w).name + "_y");
  problem.add_constraint(LinearExpr().add(w, 1.0).add(binary, -1.0).add(other, -1.0),
                         Sense::kGreaterEqual, -1.0, problem.variable(w).name + "_both");
  Definition def;
  def.var = w;
  def.binary = binary;
  def.factor = other;
  def_of_[w] = defs_.size();
  defs_.push_back(std::move(def));
  indicators_[k] = w;
  vars.ind.push_back(w);
  return w;
}

VarId JoinOrderMilp::define_product(VarId binary, VarId continuous,
                                    std::string name) {
  const std::optional<LinearExpr> factor = expand(continuous);
  if (!factor) {
    const VarId var = linearize_product(problem, binary, continuous, std::move(name));
    Definition def;
    def.var = var;
    def.binary = binary;
    def.factor = continuous;
    def_of_[var] = defs_.size();
    defs_.push_back(std::move(def));
    return var;
  }
  LinearExpr expr;
  expr.add(binary, factor->constant());
  for (const Term& t : factor->terms()) expr.add(indicator(binary, t.var), t.coeff);
  expr.normalize();
  const Domain d = problem.variable(continuous).domain;
  return define(std::move(name), 0.0, d.upper, std::move(expr));
}

JoinOrderMilp build_join_order_core(const Query& query,
                                    const FormulationConfig& config) {
  JoinOrderMilp milp(query, config);
  const Query& q = milp.query_;
  const Extensions& ext = milp.config_.extensions;
  for (PredicateId p = 0; p < q.num_predicates(); ++p) {
    const std::size_t arity = q.predicate(p).refs.size();
    if (arity != 2 && !ext.nary) {
      throw InvalidInput("predicate " + std::to_string(p) + " references " +
                         std::to_string(arity) +
                         " tables; enable the n-ary extension");
    }
    if (q.predicate(p).eval_cost > 0.0 && !ext.expensive_predicates) {
      milp.warnings_.push_back("predicate " + std::to_string(p) +
                               " has an evaluation cost but expensive "
                               "predicates are not modelled; cost ignored");
    }
  }
  if (!q.groups().empty() && !ext.correlated) {
    throw InvalidInput(
        "query has correlated predicate groups; enable the correlated "
        "extension");
  }

  const int n = q.num_tables();
  const int joins = milp.num_joins();
  MilpProblem& problem = milp.problem;
  VarRegistry& v = milp.vars;
  v.tio = grid(n, joins);
  v.tii = grid(n, joins);
  for (int j = 0; j < joins; ++j) {
    for (TableId t = 0; t < n; ++t) {
      v.tio[t][j] = problem.add_binary(key("tio", t, j));
      v.tii[t][j] = problem.add_binary(key("tii", t, j));
      problem.set_branch_priority(v.tio[t][j], kPlanPriority);
      problem.set_branch_priority(v.tii[t][j], kPlanPriority);
    }
  }
  LinearExpr first;
  for (TableId t = 0; t < n; ++t) first.add(v.tio[t][0], 1.0);
  problem.add_constraint(std::move(first), Sense::kEqual, 1.0, "outer_first");
  for (int j = 0; j < joins; ++j) {
    LinearExpr inner;
    for (TableId t = 0; t < n; ++t) inner.add(v.tii[t][j], 1.0);
    problem.add_constraint(std::move(inner), Sense::kEqual, 1.0, key("inner", j));
  }
  for (int j = 0; j < joins; ++j) {
    for (TableId t = 0; t < n; ++t) {
      LinearExpr disjoint;
      disjoint.add(v.tio[t][j], 1.0).add(v.tii[t][j], 1.0);
      problem.add_constraint(std::move(disjoint), Sense::kLessEqual, 1.0,
                             key("disjoint", t, j));
    }
  }
  for (int j = 1; j < joins; ++j) {
    for (TableId t = 0; t < n; ++t) {
      LinearExpr carry;
      carry.add(v.tio[t][j], 1.0)
          .add(v.tii[t][j - 1], -1.0)
          .add(v.tio[t][j - 1], -1.0);
      problem.add_constraint(std::move(carry), Sense::kEqual, 0.0,
                             key("carry", t, j));
    }
  }
  return milp;
}

void add_predicate_applicability(JoinOrderMilp& milp) {
  const Query& q = milp.query_;
  const int joins = milp.num_joins();
  VarRegistry& v = milp.vars;
  MilpProblem& problem = milp.problem;
  v.pao = grid(q.num_predicates(), joins);
  v.pai = grid(q.num_predicates(), joins);
  std::vector<int> unary_on(q.num_tables(), -1);
  for (PredicateId p = 0; p < q.num_predicates(); ++p) {
    const auto& refs = q.predicate(p).refs;
    if (refs.size() == 1) {
      if (unary_on[refs[0]] >= 0) {
        throw InvalidInput("table " + q.table(refs[0]).name +
                           " has more than one single-table predicate; merge "
                           "them into one");
      }
      unary_on[refs[0]] = p;
    }
    for (int j = 0; j < joins; ++j) {
      v.pao[p][j] = problem.add_binary(key("pao", p, j));
      for (TableId t : refs) {
        LinearExpr app;
        app.add(v.pao[p][j], 1.0).add(v.tio[t][j], -1.0);
        problem.add_constraint(std::move(app), Sense::kLessEqual, 0.0,
                               "app_" + std::to_string(p) + "_" +
                                   std::to_string(t) + "_" + std::to_string(j));
      }
      if (refs.size() == 1) {
        v.pai[p][j] = problem.add_binary(key("pai", p, j));
        LinearExpr app;
        app.add(v.pai[p][j], 1.0).add(v.tii[refs[0]][j], -1.0);
        problem.add_constraint(std::move(app), Sense::kLessEqual, 0.0,
                               key("appi", p, j));
      }
    }
  }
}

void add_cardinality(JoinOrderMilp& milp) {
  const Query& q = milp.query_;
  const int n = q.num_tables();
  const int joins = milp.num_joins();
  const ThresholdLadder& ladder = milp.ladder_;
  const double eps = milp.config_.boundary_epsilon;
  VarRegistry& v = milp.vars;
  MilpProblem& problem = milp.problem;
  if (v.pao.size() != static_cast<std::size_t>(q.num_predicates())) {
    throw InvalidInput("add_predicate_applicability must run first");
  }
  v.ci.assign(joins, -1);
  v.lco.assign(joins, -1);
  v.co.assign(joins, -1);
  v.cto = grid(ladder.size(), joins);
  double max_card = 0.0;
  for (const Table& t : q.tables()) max_card = std::max(max_card, t.cardinality);
  for (int j = 0; j < joins; ++j) {
    LinearExpr inner;
    for (TableId t = 0; t < n; ++t) inner.add(v.tii[t][j], q.table(t).cardinality);
    for (PredicateId p = 0; p < q.num_predicates(); ++p) {
      if (v.pai[p][j] < 0) continue;
      const double card = q.table(q.predicate(p).refs[0]).cardinality;
      inner.add(v.pai[p][j], -card * (1.0 - q.predicate(p).selectivity));
    }
    v.ci[j] = milp.define(key("ci", j), 0.0, max_card, std::move(inner));

    LinearExpr log_card;
    for (TableId t = 0; t < n; ++t) {
      log_card.add(v.tio[t][j], milp.log(q.table(t).cardinality));
    }
    for (PredicateId p = 0; p < q.num_predicates(); ++p) {
      log_card.add(v.pao[p][j], milp.log(q.predicate(p).selectivity));
    }
    v.lco[j] = milp.define(key("lco", j), milp.lco_lower_, milp.lco_upper_,
                           std::move(log_card));
    milp.lco_rows_.push_back(problem.num_constraints() - 1);

    LinearExpr approx;
    for (int r = 0; r < ladder.size(); ++r) {
      const VarId flag = problem.add_binary(key("cto", r, j));
      v.cto[r][j] = flag;
      const double log_theta = milp.log(ladder.threshold(r));
      const double big_m = milp.lco_upper_ - log_theta + 1.0;
      LinearExpr row;
      row.add(v.lco[j], 1.0).add(flag, -std::max(big_m, 1.0));
      problem.add_constraint(std::move(row), Sense::kLessEqual, log_theta - eps,
                             key("thr", r, j));
      const double prev = r == 0 ? 0.0 : milp.rung_values_[r - 1];
      approx.add(flag, milp.rung_values_[r] - prev);
    }
    v.co[j] = milp.define(key("co", j), 0.0, milp.rung_values_.back(),
                          std::move(approx));
  }
}

void add_cout_objective(JoinOrderMilp& milp) {
  if (milp.vars.co.empty()) throw InvalidInput("add_cardinality must run first");
  LinearExpr cost;
  for (int j = 1; j < milp.num_joins(); ++j) cost.add(milp.vars.co[j], 1.0);
  add_objective(milp.problem, cost);
}

void add_correlated_group(JoinOrderMilp& milp, int group) {
  const Query& q = milp.query_;
  if (group < 0 || group >= static_cast<int>(q.groups().size())) {
    throw InvalidInput("unknown correlated group " + std::to_string(group));
  }
  if (milp.vars.lco.empty()) throw InvalidInput("add_cardinality must run first");
  const CorrelatedGroup& g = q.groups()[group];
  if (g.members.size() < 2) {
    throw InvalidInput("correlated group needs at least two predicates");
  }
  double joint = g.correction;
  for (PredicateId p : g.members) {
    if (p < 0 || p >= q.num_predicates()) {
      throw InvalidInput("correlated group references unknown predicate");
    }
    joint *= q.predicate(p).selectivity;
  }
  if (joint > 1.0 + 1e-12) {
    throw InvalidInput("correlated group " + std::to_string(group) +
                       " yields a joint selectivity above 1");
  }
  for (int other = 0; other < group; ++other) {
    for (PredicateId p : q.groups()[other].members) {
      if (std::find(g.members.begin(), g.members.end(), p) != g.members.end()) {
        throw InvalidInput("correlated groups must not share predicates");
      }
    }
  }
  const int joins = milp.num_joins();
  VarRegistry& v = milp.vars;
  MilpProblem& problem = milp.problem;
  if (v.pag.size() < q.groups().size()) v.pag.resize(q.groups().size());
  v.pag[group].assign(joins, -1);
  const double log_corr = milp.log(g.correction);
  for (int j = 0; j < joins; ++j) {
    const VarId active = problem.add_binary(key("pag", group, j));
    v.pag[group][j] = active;
    LinearExpr lower;
    lower.add(active, 1.0);
    for (PredicateId p : g.members) lower.add(v.pao[p][j], -1.0);
    problem.add_constraint(std::move(lower), Sense::kGreaterEqual,
                           1.0 - static_cast<double>(g.members.size()),
                           key("grp_all", group, j));
    for (PredicateId p : g.members) {
      LinearExpr upper;
      upper.add(active, 1.0).add(v.pao[p][j], -1.0);
      problem.add_constraint(std::move(upper), Sense::kLessEqual, 0.0,
                             "grp_" + std::to_string(group) + "_" +
                                 std::to_string(p) + "_" + std::to_string(j));
    }
    problem.add_to_constraint(milp.lco_rows_[j], active, -log_corr);
    for (auto& def : milp.defs_) {
      if (def.var == v.lco[j]) def.expr.add(active, log_corr);
    }
  }
}

void add_expensive_predicates(JoinOrderMilp& milp) {
  const Query& q = milp.query_;
  if (milp.vars.co.empty()) throw InvalidInput("add_cardinality must run first");
  const int joins = milp.num_joins();
  VarRegistry& v = milp.vars;
  MilpProblem& problem = milp.problem;
  v.pco = grid(q.num_predicates(), joins);
  v.pce = grid(q.num_predicates(), joins);
  LinearExpr cost;
  for (PredicateId p = 0; p < q.num_predicates(); ++p) {
    problem.set_bounds(v.pao[p][0], 0.0, 0.0);
    for (int j = 0; j + 1 < joins; ++j) {
      LinearExpr mono;
      mono.add(v.pao[p][j + 1], 1.0).add(v.pao[p][j], -1.0);
      problem.add_constraint(std::move(mono), Sense::kGreaterEqual, 0.0,
                             key("keep", p, j));
    }
    for (int j = 0; j < joins; ++j) {
      const VarId eval = problem.add_binary(key("pco", p, j));
      v.pco[p][j] = eval;
      LinearExpr diff;
      diff.add(eval, 1.0).add(v.pao[p][j], 1.0);
      double rhs = 1.0;
      if (j + 1 < joins) {
        diff.add(v.pao[p][j + 1], -1.0);
        rhs = 0.0;
      }
      problem.add_constraint(std::move(diff), Sense::kEqual, rhs,
                             key("evalat", p, j));
      const double per_tuple = q.predicate(p).eval_cost;
      if (per_tuple > 0.0) {
        v.pce[p][j] = milp.define_product(eval, v.co[j], key("pce", p, j));
        cost.add(v.pce[p][j], per_tuple);
      }
    }
  }
  add_objective(problem, cost);
}

void add_projection(JoinOrderMilp& milp) {
  const Query& q = milp.query_;
  if (q.num_columns() == 0) {
    throw InvalidInput("projection needs a query with columns");
  }
  if (milp.vars.co.empty()) throw InvalidInput("add_cardinality must run first");
  const int joins = milp.num_joins();
  const bool expensive = !milp.vars.pco.empty();
  VarRegistry& v = milp.vars;
  MilpProblem& problem = milp.problem;
  const int cols = q.num_columns();
  v.clo = grid(cols, joins);
  v.cli = grid(cols, joins);
  v.clb = grid(cols, joins);
  v.obytes.assign(joins, -1);
  v.ibytes.assign(joins, -1);
  for (PredicateId p = 0; p < q.num_predicates(); ++p) {
    for (ColumnId l : q.predicate(p).columns) {
      const auto& refs = q.predicate(p).refs;
      if (std::find(refs.begin(), refs.end(), q.columns()[l].table) == refs.end()) {
        throw InvalidInput("predicate " + std::to_string(p) + " reads column " +
                           q.columns()[l].name +
                           " of a table it does not reference");
      }
    }
  }
  auto present = [&](ColumnId l, int j) {
    LinearExpr e;
    e.add(v.clo[l][j], 1.0).add(v.cli[l][j], 1.0);
    return e;
  };
  for (ColumnId l = 0; l < cols; ++l) {
    const TableId t = q.columns()[l].table;
    for (int j = 0; j < joins; ++j) {
      v.clo[l][j] = problem.add_binary(key("clo", l, j));
      v.cli[l][j] = problem.add_binary(key("cli", l, j));
      LinearExpr outer;
      outer.add(v.clo[l][j], 1.0).add(v.tio[t][j], -1.0);
      problem.add_constraint(std::move(outer), Sense::kLessEqual, 0.0,
                             key("colo", l, j));
      LinearExpr inner;
      inner.add(v.cli[l][j], 1.0).add(v.tii[t][j], -1.0);
      problem.add_constraint(std::move(inner), Sense::kLessEqual, 0.0,
                             key("coli", l, j));
      if (j > 0) {
        LinearExpr persist;
        persist.add(v.clo[l][j], 1.0)
            .add(v.clo[l][j - 1], -1.0)
            .add(v.cli[l][j - 1], -1.0);
        problem.add_constraint(std::move(persist), Sense::kLessEqual, 0.0,
                               key("persist", l, j));
      }
    }
  }
  for (ColumnId l : q.output_columns()) {
    problem.add_constraint(present(l, joins - 1), Sense::kGreaterEqual, 1.0,
                           key("output", l));
  }
  for (PredicateId p = 0; p < q.num_predicates(); ++p) {
    for (ColumnId l : q.predicate(p).columns) {
      for (int j = 0; j < joins; ++j) {
        LinearExpr need = present(l, j);
        double rhs = 0.0;
        if (expensive) {
          need.add(v.pco[p][j], -1.0);
        } else if (j + 1 < joins) {
          need.add(v.pao[p][j + 1], -1.0);
        } else {
          need.add(v.pao[p][j], 1.0);
          rhs = 1.0;
        }
        problem.add_constraint(std::move(need), Sense::kGreaterEqual, rhs,
                               "need_" + std::to_string(p) + "_" +
                                   std::to_string(l) + "_" + std::to_string(j));
      }
    }
  }
  for (int j = 0; j < joins; ++j) {
    LinearExpr outer_bytes;
    LinearExpr inner_bytes;
    double inner_max = 0.0;
    std::vector<double> per_table(q.num_tables(), 0.0);
    for (ColumnId l = 0; l < cols; ++l) {
      const Column& c = q.columns()[l];
      v.clb[l][j] = milp.define_product(v.clo[l][j], v.co[j], key("clb", l, j));
      outer_bytes.add(v.clb[l][j], c.byte_size);
      const double bytes = c.byte_size * q.table(c.table).cardinality;
      inner_bytes.add(v.cli[l][j], bytes);
      per_table[c.table] += bytes;
    }
    for (double b : per_table) inner_max = std::max(inner_max, b);
    double outer_max = 0.0;
    for (const Column& c : q.columns()) {
      outer_max += c.byte_size * milp.rung_values_.back();
    }
    v.obytes[j] = milp.define(key("obytes", j), 0.0, outer_max, std::move(outer_bytes));
    v.ibytes[j] = milp.define(key("ibytes", j), 0.0, inner_max, std::move(inner_bytes));
  }
  milp.projection_pages_ = true;
}

void add_page_counts(JoinOrderMilp& milp) {
  const Query& q = milp.query_;
  if (milp.vars.co.empty()) throw InvalidInput("add_cardinality must run first");
  const int joins = milp.num_joins();
  VarRegistry& v = milp.vars;
  const double page = milp.config_.page_size;
  v.pgo.assign(joins, -1);
  v.pgi.assign(joins, -1);
  double inner_max = 0.0;
  for (const Table& t : q.tables()) {
    inner_max = std::max(inner_max, milp.pages(t.cardinality));
  }
  for (int j = 0; j < joins; ++j) {
    LinearExpr outer;
    LinearExpr inner;
    double outer_max = 0.0;
    double inner_ub = inner_max;
    if (milp.projection_pages_) {
      outer.add(v.obytes[j], 1.0 / page);
      inner.add(v.ibytes[j], 1.0 / page);
      outer_max = milp.problem.variable(v.obytes[j]).domain.upper / page;
      inner_ub = milp.problem.variable(v.ibytes[j]).domain.upper / page;
    } else {
      double prev = 0.0;
      for (int r = 0; r < milp.ladder_.size(); ++r) {
        const double pages = milp.pages(milp.rung_values_[r]);
        outer.add(v.cto[r][j], pages - prev);
        prev = pages;
      }
      outer_max = prev;
      for (TableId t = 0; t < q.num_tables(); ++t) {
        inner.add(v.tii[t][j], milp.pages(q.table(t).cardinality));
      }
    }
    v.pgo[j] = milp.define(key("pgo", j), 0.0, outer_max, std::move(outer));
    v.pgi[j] = milp.define(key("pgi", j), 0.0, inner_ub, std::move(inner));
  }
}

LinearExpr join_cost_expr(JoinOrderMilp& milp, JoinImpl impl, int j) {
  VarRegistry& v = milp.vars;
  if (v.pgo.empty()) throw InvalidInput("add_page_counts must run first");
  const Query& q = milp.query_;
  LinearExpr cost;
  switch (impl) {
    case JoinImpl::kHashJoin:
      cost.add(v.pgo[j], 3.0).add(v.pgi[j], 3.0);
      break;
    case JoinImpl::kSortMerge: {
      cost.add(v.pgo[j], 1.0).add(v.pgi[j], 1.0);
      double prev = 0.0;
      for (int r = 0; r < milp.ladder_.size(); ++r) {
        const double w = sort_weight(milp.pages(milp.rung_values_[r]));
        cost.add(v.cto[r][j], w - prev);
        prev = w;
      }
      for (TableId t = 0; t < q.num_tables(); ++t) {
        const double w = sort_weight(milp.pages(q.table(t).cardinality));
        if (w > 0.0) cost.add(v.tii[t][j], w);
      }
      break;
    }
    case JoinImpl::kBlockNestedLoop: {
      if (v.blocks.empty()) {
        v.blocks.assign(milp.num_joins(), -1);
        v.bnl = grid(q.num_tables(), milp.num_joins());
      }
      const double buffer = milp.config_.buffer;
      if (v.blocks[j] < 0) {
        LinearExpr blocks;
        blocks.add(v.pgo[j], 1.0 / buffer);
        v.blocks[j] = milp.define(
            key("blocks", j), 0.0,
            milp.problem.variable(v.pgo[j]).domain.upper / buffer,
            std::move(blocks));
        for (TableId t = 0; t < q.num_tables(); ++t) {
          v.bnl[t][j] = milp.define_product(v.tii[t][j], v.blocks[j],
                                            key("bnl", t, j));
        }
      }
      for (TableId t = 0; t < q.num_tables(); ++t) {
        cost.add(v.bnl[t][j], milp.pages(q.table(t).cardinality));
      }
      break;
    }
  }
  return cost;
}

namespace {

void add_single_model_cost(JoinOrderMilp& milp, JoinImpl impl) {
  LinearExpr total;
  for (int j = 0; j < milp.num_joins(); ++j) {
    total += join_cost_expr(milp, impl, j);
  }
  add_objective(milp.problem, total);
}

// Largest value a join's cost expression can take (outer operand at the top
// rung, largest inner table).
double cost_upper_bound(const JoinOrderMilp& milp, JoinImpl impl, int j) {
  const VarRegistry& v = milp.vars;
  const MilpProblem& problem = milp.problem;
  const double pgo = problem.variable(v.pgo[j]).domain.upper;
  const double pgi = problem.variable(v.pgi[j]).domain.upper;
  const Query& q = milp.query();
  double inner_pages = 0.0;
  double inner_sort = 0.0;
  for (const Table& t : q.tables()) {
    inner_pages = std::max(inner_pages, milp.pages(t.cardinality));
    inner_sort = std::max(inner_sort, sort_weight(milp.pages(t.cardinality)));
  }
  switch (impl) {
    case JoinImpl::kHashJoin:
      return 3.0 * (pgo + pgi);
    case JoinImpl::kSortMerge:
      return sort_weight(milp.pages(milp.rung_value(milp.ladder().size() - 1))) +
             pgo + inner_sort + pgi;
    case JoinImpl::kBlockNestedLoop:
      return inner_pages * problem.variable(v.blocks[j]).domain.upper;
  }
  return 0.0;
}

}  // namespace

void add_hash_join_cost(JoinOrderMilp& milp) {
  add_single_model_cost(milp, JoinImpl::kHashJoin);
}

void add_sort_merge_cost(JoinOrderMilp& milp) {
  add_single_model_cost(milp, JoinImpl::kSortMerge);
}

void add_bnl_cost(JoinOrderMilp& milp) {
  add_single_model_cost(milp, JoinImpl::kBlockNestedLoop);
}

void add_operator_selection(JoinOrderMilp& milp,
                            const std::vector<JoinImpl>& implementations) {
  if (implementations.empty()) {
    throw InvalidInput("operator selection needs at least one implementation");
  }
  std::set<JoinImpl> unique(implementations.begin(), implementations.end());
  if (unique.size() != implementations.size()) {
    throw InvalidInput("operator selection lists an implementation twice");
  }
  const int joins = milp.num_joins();
  const int slots = static_cast<int>(implementations.size());
  VarRegistry& v = milp.vars;
  MilpProblem& problem = milp.problem;
  milp.impls_ = implementations;
  v.jos = grid(slots, joins);
  v.pjc = grid(slots, joins);
  v.ajc = grid(slots, joins);
  LinearExpr total;
  for (int j = 0; j < joins; ++j) {
    LinearExpr one;
    for (int i = 0; i < slots; ++i) {
      v.jos[i][j] = problem.add_binary(key("jos", i, j));
      problem.set_branch_priority(v.jos[i][j], kPlanPriority);
      one.add(v.jos[i][j], 1.0);
    }
    problem.add_constraint(std::move(one), Sense::kEqual, 1.0, key("one_impl", j));
    for (int i = 0; i < slots; ++i) {
      LinearExpr cost = join_cost_expr(milp, implementations[i], j);
      const double upper = cost_upper_bound(milp, implementations[i], j);
      v.pjc[i][j] = milp.define(key("pjc", i, j), 0.0, upper, std::move(cost));
      v.ajc[i][j] = milp.define_product(v.jos[i][j], v.pjc[i][j], key("ajc", i, j));
      total.add(v.ajc[i][j], 1.0);
    }
  }
  add_objective(problem, total);
}

void add_result_properties(JoinOrderMilp& milp, const PropertySpec& spec) {
  VarRegistry& v = milp.vars;
  if (v.jos.empty()) {
    throw InvalidInput("result properties need operator selection");
  }
  const Query& q = milp.query_;
  const int props = static_cast<int>(spec.names.size());
  if (spec.produces.size() > spec.names.size() ||
      spec.table_provides.size() > spec.names.size()) {
    throw InvalidInput("property spec lists more producers than properties");
  }
  auto slot_of = [&](JoinImpl impl) {
    for (std::size_t i = 0; i < milp.impls_.size(); ++i) {
      if (milp.impls_[i] == impl) return static_cast<int>(i);
    }
    throw InvalidInput("implementation " + std::string(to_string(impl)) +
                       " is not selectable");
  };
  for (const auto& [impl, x] : spec.requirements) {
    if (x < 0 || x >= props) throw InvalidInput("unknown property index");
    slot_of(impl);
  }
  const int joins = milp.num_joins();
  MilpProblem& problem = milp.problem;
  v.ohp = grid(props, joins);
  for (int x = 0; x < props; ++x) {
    for (int j = 0; j < joins; ++j) {
      v.ohp[x][j] = problem.add_binary(key("ohp", x, j));
    }
    LinearExpr base;
    base.add(v.ohp[x][0], 1.0);
    if (static_cast<std::size_t>(x) < spec.table_provides.size()) {
      for (TableId t : spec.table_provides[x]) {
        if (t < 0 || t >= q.num_tables()) {
          throw InvalidInput("property provided by unknown table");
        }
        base.add(v.tio[t][0], -1.0);
      }
    }
    problem.add_constraint(std::move(base), Sense::kEqual, 0.0, key("prop_base", x));
    for (int j = 1; j < joins; ++j) {
      LinearExpr made;
      made.add(v.ohp[x][j], 1.0);
      if (static_cast<std::size_t>(x) < spec.produces.size()) {
        for (JoinImpl impl : spec.produces[x]) {
          made.add(v.jos[slot_of(impl)][j - 1], -1.0);
        }
      }
      problem.add_constraint(std::move(made), Sense::kEqual, 0.0,
                             key("prop_made", x, j));
    }
  }
  for (const auto& [impl, x] : spec.requirements) {
    const int i = slot_of(impl);
    for (int j = 0; j < joins; ++j) {
      LinearExpr need;
      need.add(v.jos[i][j], 1.0).add(v.ohp[x][j], -1.0);
      problem.add_constraint(std::move(need), Sense::kLessEqual, 0.0,
                             "prop_need_" + std::to_string(i) + "_" +
                                 std::to_string(x) + "_" + std::to_string(j));
    }
  }
}

JoinOrderMilp compile(const Query& query, const FormulationConfig& config) {
  JoinOrderMilp milp = build_join_order_core(query, config);
  const Extensions& ext = config.extensions;
  add_predicate_applicability(milp);
  add_cardinality(milp);
  if (ext.correlated) {
    for (int g = 0; g < static_cast<int>(query.groups().size()); ++g) {
      add_correlated_group(milp, g);
    }
  }
  if (ext.expensive_predicates) add_expensive_predicates(milp);
  if (ext.projection) add_projection(milp);
  switch (config.cost_model) {
    case CostModel::kCout:
      add_cout_objective(milp);
      break;
    case CostModel::kHashJoin:
      add_page_counts(milp);
      add_hash_join_cost(milp);
      break;
    case CostModel::kSortMerge:
      add_page_counts(milp);
      add_sort_merge_cost(milp);
      break;
    case CostModel::kBlockNestedLoop:
      add_page_counts(milp);
      add_bnl_cost(milp);
      break;
    case CostModel::kOperatorChoice:
      add_page_counts(milp);
      add_operator_selection(milp, config.implementations);
      break;
  }
  if (ext.properties) add_result_properties(milp, config.properties);
  return milp;
}

ModelCounts count_model(int n, int m, int l) {
  if (n < 2 || m < 0 || l < 1) {
    throw InvalidInput("count_model needs n >= 2, m >= 0, l >= 1");
  }
  const std::int64_t nn = n;
  const std::int64_t mm = m;
  const std::int64_t ll = l;
  const std::int64_t joins = nn - 1;
  ModelCounts counts;
  counts.variables = joins * (2 * nn + mm + ll + 3);
  counts.constraints =
      1 + joins * (1 + nn) + nn * (joins - 1) + 2 * mm * joins + 3 * joins + ll * joins;
  return counts;
}

std::vector<double> encode_plan(const JoinOrderMilp& milp,
                                const LeftDeepPlan& plan) {
  const Query& q = milp.query_;
  const std::vector<std::string> problems = validate(q, plan);
  if (!problems.empty()) throw InvalidInput("invalid plan: " + problems.front());
  const int n = q.num_tables();
  const int joins = milp.num_joins();
  const VarRegistry& v = milp.vars;
  const MilpProblem& problem = milp.problem;
  std::vector<double> x(problem.num_variables(), 0.0);

  std::vector<TableSet> outer(joins);
  TableSet seen = 0;
  for (int j = 0; j < joins; ++j) {
    seen |= TableSet{1} << plan.order[j];
    outer[j] = seen;
  }
  for (int j = 0; j < joins; ++j) {
    for (TableId t = 0; t < n; ++t) {
      x[v.tio[t][j]] = (outer[j] >> t) & 1 ? 1.0 : 0.0;
    }
    x[v.tii[plan.order[j + 1]][j]] = 1.0;
  }

  const bool expensive = !v.pco.empty();
  std::vector<int> eval_at(q.num_predicates(), 0);
  for (PredicateId p = 0; p < q.num_predicates(); ++p) {
    eval_at[p] = plan.evaluated_at.empty() ? earliest_evaluation(q, plan.order, p)
                                           : plan.evaluated_at[p];
    const TableSet refs = q.predicate_tables(p);
    for (int j = 0; j < joins; ++j) {
      bool applied = (outer[j] & refs) == refs;
      if (expensive) {
        applied = j > eval_at[p];
        x[v.pco[p][j]] = j == eval_at[p] ? 1.0 : 0.0;
      }
      x[v.pao[p][j]] = applied ? 1.0 : 0.0;
      if (v.pai[p][j] >= 0) x[v.pai[p][j]] = x[v.tii[q.predicate(p).refs[0]][j]];
    }
  }
  for (std::size_t g = 0; g < v.pag.size(); ++g) {
    if (v.pag[g].empty()) continue;
    for (int j = 0; j < joins; ++j) {
      bool all = true;
      for (PredicateId p : q.groups()[g].members) all = all && x[v.pao[p][j]] > 0.5;
      x[v.pag[g][j]] = all ? 1.0 : 0.0;
    }
  }

  if (!v.clo.empty()) {
    const int cols = q.num_columns();
    std::vector<std::vector<char>> needed(cols, std::vector<char>(joins, 0));
    for (ColumnId l : q.output_columns()) needed[l][joins - 1] = 1;
    for (PredicateId p = 0; p < q.num_predicates(); ++p) {
      for (ColumnId l : q.predicate(p).columns) {
        for (int j = 0; j < joins; ++j) {
          bool need;
          if (expensive) {
            need = j == eval_at[p];
          } else if (j + 1 < joins) {
            need = x[v.pao[p][j + 1]] > 0.5;
          } else {
            need = x[v.pao[p][j]] < 0.5;
          }
          if (need) needed[l][j] = 1;
        }
      }
    }
    for (ColumnId l = 0; l < cols; ++l) {
      const TableId t = q.columns()[l].table;
      bool later = false;
      for (int j = joins - 1; j >= 0; --j) {
        later = later || needed[l][j];
        x[v.clo[l][j]] = later && ((outer[j] >> t) & 1) ? 1.0 : 0.0;
        x[v.cli[l][j]] = later && plan.order[j + 1] == t ? 1.0 : 0.0;
      }
    }
  }

  auto evaluate_definitions = [&]() {
    for (const auto& def : milp.defs_) {
      if (def.binary >= 0) {
        x[def.var] = x[def.binary] * x[def.factor];
      } else {
        x[def.var] = def.expr.evaluate(x);
      }
    }
  };
  evaluate_definitions();
  const double eps = milp.config_.boundary_epsilon;
  for (int j = 0; j < joins; ++j) {
    for (int r = 0; r < milp.ladder_.size(); ++r) {
      const double log_theta = milp.log(milp.ladder_.threshold(r));
      x[v.cto[r][j]] = x[v.lco[j]] > log_theta - eps ? 1.0 : 0.0;
    }
  }
  evaluate_definitions();

  if (!v.jos.empty()) {
    const int slots = static_cast<int>(milp.impls_.size());
    const PropertySpec& spec = milp.config_.properties;
    for (int j = 0; j < joins; ++j) {
      for (std::size_t px = 0; px < v.ohp.size(); ++px) {
        double has = 0.0;
        if (j == 0) {
          if (px < spec.table_provides.size()) {
            for (TableId t : spec.table_provides[px]) has += x[v.tio[t][0]];
          }
        } else if (px < spec.produces.size()) {
          for (JoinImpl impl : spec.produces[px]) {
            for (int i = 0; i < slots; ++i) {
              if (milp.impls_[i] == impl) has += x[v.jos[i][j - 1]];
            }
          }
        }
        x[v.ohp[px][j]] = has;
      }
      auto admissible = [&](int i) {
        if (v.ohp.empty()) return true;
        for (const auto& [impl, px] : spec.requirements) {
          if (impl == milp.impls_[i] && x[v.ohp[px][j]] < 0.5) return false;
        }
        return true;
      };
      int chosen = -1;
      if (!plan.operators.empty()) {
        for (int i = 0; i < slots; ++i) {
          if (milp.impls_[i] == plan.operators[j]) chosen = i;
        }
        if (chosen < 0) {
          throw InvalidInput("plan uses an implementation the model cannot select");
        }
      } else {
        for (int i = 0; i < slots; ++i) {
          if (!admissible(i)) continue;
          if (chosen < 0 || x[v.pjc[i][j]] < x[v.pjc[chosen][j]]) chosen = i;
        }
        if (chosen < 0) chosen = 0;
      }
      for (int i = 0; i < slots; ++i) x[v.jos[i][j]] = i == chosen ? 1.0 : 0.0;
    }
    evaluate_definitions();
  }
  return x;
}

double approximate_plan_cost(const JoinOrderMilp& milp, const LeftDeepPlan& plan) {
  return milp.problem.objective_value(encode_plan(milp, plan));
}

namespace {

LeftDeepPlan greedy_plan(const Query& q) {
  const int n = q.num_tables();
  LeftDeepPlan plan;
  TableId start = 0;
  for (TableId t = 1; t < n; ++t) {
    if (q.table(t).cardinality < q.table(start).cardinality) start = t;
  }
  plan.order.push_back(start);
  TableSet joined = TableSet{1} << start;
  while (static_cast<int>(plan.order.size()) < n) {
    TableId best = -1;
    double best_card = 0.0;
    for (TableId t = 0; t < n; ++t) {
      if ((joined >> t) & 1) continue;
      const double card = q.true_cardinality(joined | (TableSet{1} << t));
      if (best < 0 || card < best_card) {
        best = t;
        best_card = card;
      }
    }
    plan.order.push_back(best);
    joined |= TableSet{1} << best;
  }
  return plan;
}

LeftDeepPlan rounded_plan(const JoinOrderMilp& milp, std::span<const double> point) {
  const int n = milp.query().num_tables();
  const int joins = milp.num_joins();
  std::vector<std::pair<double, TableId>> arrival;
  for (TableId t = 0; t < n; ++t) {
    double late = 0.0;
    for (int j = 0; j < joins; ++j) late += 1.0 - point[milp.vars.tio[t][j]];
    late -= 0.5 * point[milp.vars.tio[t][0]];
    arrival.emplace_back(late, t);
  }
  std::sort(arrival.begin(), arrival.end());
  LeftDeepPlan plan;
  for (const auto& [late, t] : arrival) plan.order.push_back(t);
  return plan;
}

void polish(const JoinOrderMilp& milp, LeftDeepPlan& plan) {
  double cost = approximate_plan_cost(milp, plan);
  const int n = static_cast<int>(plan.order.size());
  for (int pass = 0; pass < 4 * n; ++pass) {
    bool improved = false;
    for (int k = 0; k + 1 < n; ++k) {
      std::swap(plan.order[k], plan.order[k + 1]);
      const double candidate = approximate_plan_cost(milp, plan);
      if (candidate < cost - 1e-9 * std::max(1.0, std::abs(cost))) {
        cost = candidate;
        improved = true;
      } else {
        std::swap(plan.order[k], plan.order[k + 1]);
      }
    }
    if (!improved) break;
  }
}

}  // namespace

std::vector<Constraint> envelope_cuts(const JoinOrderMilp& milp) {
  const ThresholdLadder& ladder = milp.ladder();
  const double eps = milp.config().boundary_epsilon;
  const double lo = milp.lco_lower();
  const double hi = milp.lco_upper();
  std::vector<double> breaks;
  std::vector<double> steps;
  for (int r = 0; r < ladder.size(); ++r) {
    breaks.push_back(milp.log(ladder.threshold(r)) - eps);
    steps.push_back(milp.rung_value(r) - (r == 0 ? 0.0 : milp.rung_value(r - 1)));
  }
  // Staircase value at x: rungs whose break lies strictly below x are on.
  auto stair = [&](double x) {
    double sum = 0.0;
    for (std::size_t r = 0; r < breaks.size(); ++r) {
      if (breaks[r] < x) sum += steps[r];
    }
    return sum;
  };
  std::vector<std::pair<double, double>> points{{lo, stair(lo)}};
  for (double b : breaks) {
    if (b > lo && b < hi) points.emplace_back(b, stair(b));
  }
  points.emplace_back(hi, stair(hi));

  std::vector<std::pair<double, double>> hull;
  for (const auto& p : points) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.first - a.first) * (p.second - a.second) -
                           (b.second - a.second) * (p.first - a.first);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }

  std::vector<Constraint> cuts;
  const auto& vars = milp.vars;
  for (int j = 0; j < milp.num_joins(); ++j) {
    if (vars.co.empty() || vars.co[j] < 0) continue;
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
      const auto [x1, y1] = hull[e];
      const auto [x2, y2] = hull[e + 1];
      if (!(x2 > x1)) continue;
      const double slope = (y2 - y1) / (x2 - x1);
      if (slope <= 0.0) continue;
      double rhs = y1 - slope * x1;
      rhs -= 1e-9 * (std::abs(y1) + std::abs(slope * x1));
      Constraint cut;
      cut.name = key("env", static_cast<int>(e), j);
      cut.expr.add(vars.co[j], 1.0).add(vars.lco[j], -slope);
      cut.sense = Sense::kGreaterEqual;
      cut.rhs = rhs;
      cuts.push_back(std::move(cut));
    }
  }
  return cuts;
}

PrimalHeuristic make_plan_heuristic(const JoinOrderMilp& milp) {
  auto tried = std::make_shared<std::set<std::vector<TableId>>>();
  return [&milp, tried](std::span<const double> point) -> std::optional<Fixings> {
    // An empty point starts a new solve.
    if (point.empty()) tried->clear();
    LeftDeepPlan plan =
        point.empty() ? greedy_plan(milp.query()) : rounded_plan(milp, point);
    polish(milp, plan);
    if (!tried->insert(plan.order).second) return std::nullopt;
    const std::vector<double> x = encode_plan(milp, plan);
    Fixings fixings;
    for (VarId var = 0; var < milp.problem.num_variables(); ++var) {
      if (milp.problem.variable(var).is_binary()) fixings.emplace_back(var, x[var]);
    }
    return fixings;
  };
}

std::string registry_to_json(const JoinOrderMilp& milp, int indent) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [name, var] : milp.vars.entries()) {
    doc[name] = milp.problem.variable(var).name;
  }
  return doc.dump(indent);
}

}  // namespace joinmilp
