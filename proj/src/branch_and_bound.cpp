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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <queue>
#include <set>
#include <tuple>

#include "dual_simplex.hpp"
#include "joinmilp/error.hpp"
#include "joinmilp/solver.hpp"

namespace joinmilp {
namespace {

using internal::Clock;
using internal::DualSimplex;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Integrality tolerance used inside the search. Tighter than the public
// feasibility tolerance so that epsilon-offset big-M rows are enforced.
constexpr double kIntTol = 1e-9;

// Activity-based bound tightening over the rows plus an optional objective
// cutoff row. Operates on caller-owned bound vectors.
class Propagator {
 public:
  explicit Propagator(const MilpProblem& problem)
      : num_vars_(problem.num_variables()),
        binary_(problem.num_variables(), 0),
        col_rows_(problem.num_variables()) {
    for (int v = 0; v < num_vars_; ++v) {
      binary_[v] = problem.variable(v).is_binary() ? 1 : 0;
    }
    for (const Constraint& c : problem.constraints()) {
      Row row;
      row.terms = c.expr.terms();
      row.lo = c.sense == Sense::kLessEqual ? -kInf : c.rhs;
      row.hi = c.sense == Sense::kGreaterEqual ? kInf : c.rhs;
      add_row(std::move(row));
    }
    Row objective;
    objective.terms = problem.objective().terms();
    objective.lo = -kInf;
    objective.hi = kInf;
    objective_constant_ = problem.objective().constant();
    objective_row_ = static_cast<int>(rows_.size());
    add_row(std::move(objective));
  }

  // Returns false when the bounds admit no solution with objective <= cutoff.
  bool run(std::vector<double>& lo, std::vector<double>& hi, double cutoff) {
    rows_[objective_row_].hi =
        std::isfinite(cutoff) ? cutoff - objective_constant_ : kInf;
    const int num_rows = static_cast<int>(rows_.size());
    std::vector<char> queued(num_rows, 1);
    std::deque<int> work;
    for (int r = 0; r < num_rows; ++r) work.push_back(r);
    std::int64_t budget = 30LL * num_rows + 1000;
    while (!work.empty()) {
      if (--budget < 0) break;
      const int r = work.front();
      work.pop_front();
      queued[r] = 0;
      const Row& row = rows_[r];
      if (!std::isfinite(row.lo) && !std::isfinite(row.hi)) continue;
      double min_act = 0.0;
      double max_act = 0.0;
      double mag = 0.0;
      for (const Term& t : row.terms) {
        const double a = t.coeff * lo[t.var];
        const double b = t.coeff * hi[t.var];
        min_act += std::min(a, b);
        max_act += std::max(a, b);
        mag += std::max(std::abs(a), std::abs(b));
      }
      const double tol = 1e-9 * (1.0 + std::abs(std::isfinite(row.hi) ? row.hi : row.lo)) +
                         1e-12 * mag;
      if (min_act > row.hi + tol || max_act < row.lo - tol) return false;
      for (const Term& t : row.terms) {
        const int v = t.var;
        const double a = t.coeff;
        const double own_min = std::min(a * lo[v], a * hi[v]);
        const double own_max = std::max(a * lo[v], a * hi[v]);
        double new_lo = lo[v];
        double new_hi = hi[v];
        const double slack_tol = tol / std::abs(a);
        if (std::isfinite(row.hi)) {
          const double bound = (row.hi - (min_act - own_min)) / a;
          if (a > 0) {
            new_hi = std::min(new_hi, bound + slack_tol);
          } else {
            new_lo = std::max(new_lo, bound - slack_tol);
          }
        }
        if (std::isfinite(row.lo)) {
          const double bound = (row.lo - (max_act - own_max)) / a;
          if (a > 0) {
            new_lo = std::max(new_lo, bound - slack_tol);
          } else {
            new_hi = std::min(new_hi, bound + slack_tol);
          }
        }
        bool changed = false;
        if (binary_[v]) {
          if (new_lo > kIntTol && lo[v] < 1.0) {
            if (hi[v] < 1.0) return false;
            lo[v] = 1.0;
            changed = true;
          }
          if (new_hi < 1.0 - kIntTol && hi[v] > 0.0) {
            if (lo[v] > 0.0) return false;
            hi[v] = 0.0;
            changed = true;
          }
        } else {
          const double width = hi[v] - lo[v];
          const double min_step = std::max(1e-7 * (1.0 + std::abs(hi[v])), 1e-3 * width);
          if (new_hi < hi[v] - min_step) {
            if (new_hi < lo[v] - 1e-9 * (1.0 + std::abs(lo[v]))) return false;
            hi[v] = std::max(new_hi, lo[v]);
            changed = true;
          }
          const double min_step_lo = std::max(1e-7 * (1.0 + std::abs(lo[v])), 1e-3 * width);
          if (new_lo > lo[v] + min_step_lo) {
            if (new_lo > hi[v] + 1e-9 * (1.0 + std::abs(hi[v]))) return false;
            lo[v] = std::min(new_lo, hi[v]);
            changed = true;
          }
        }
        if (changed) {
          for (int other : col_rows_[v]) {
            if (!queued[other]) {
              queued[other] = 1;
              work.push_back(other);
            }
          }
        }
      }
    }
    return true;
  }

 private:
  struct Row {
    std::vector<Term> terms;
    double lo = -kInf;
    double hi = kInf;
  };

  void add_row(Row row) {
    const int id = static_cast<int>(rows_.size());
    for (const Term& t : row.terms) col_rows_[t.var].push_back(id);
    rows_.push_back(std::move(row));
  }

  int num_vars_;
  std::vector<char> binary_;
  std::vector<std::vector<int>> col_rows_;
  std::vector<Row> rows_;
  int objective_row_ = 0;
  double objective_constant_ = 0.0;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// LP over the columns that are not globally fixed. Fixed columns are folded
// into row right-hand sides and the objective offset; rows that the fixings
// make redundant are dropped. Continuous columns defined by an equality row
// whose bounds the row already implies are substituted out, which keeps wide
// ranged definitions away from the simplex tolerances.
class ReducedLp {
 public:
  ReducedLp(const MilpProblem& relaxation, const std::vector<double>& lo,
            const std::vector<double>& hi)
      : to_reduced_(relaxation.num_variables(), -1), fixed_(lo) {
    const int n = relaxation.num_variables();
    std::vector<char> open(n, 0);
    for (VarId v = 0; v < n; ++v) open[v] = lo[v] != hi[v];

    struct Row {
      LinearExpr expr;
      Sense sense;
      double rhs;
      double mag;
      const std::string* name;
    };
    std::vector<Row> rows;
    std::vector<std::vector<int>> col_rows(n);
    for (const Constraint& c : relaxation.constraints()) {
      Row row{LinearExpr(), c.sense, c.rhs, std::abs(c.rhs), &c.name};
      for (const Term& t : c.expr.terms()) {
        if (!open[t.var]) {
          row.rhs -= t.coeff * lo[t.var];
          row.mag += std::abs(t.coeff * lo[t.var]);
          continue;
        }
        row.expr.add(t.var, t.coeff);
      }
      if (row.expr.terms().empty()) continue;
      for (const Term& t : row.expr.terms()) {
        col_rows[t.var].push_back(static_cast<int>(rows.size()));
      }
      rows.push_back(std::move(row));
    }
    offset_ = relaxation.objective().constant();
    LinearExpr objective;
    for (const Term& t : relaxation.objective().terms()) {
      if (open[t.var]) {
        objective.add(t.var, t.coeff);
      } else {
        offset_ += t.coeff * lo[t.var];
      }
    }

    auto activity = [&](const LinearExpr& e, VarId skip, double& lo_act,
                        double& hi_act) {
      lo_act = hi_act = 0.0;
      for (const Term& t : e.terms()) {
        if (t.var == skip) continue;
        const double a = t.coeff * lo[t.var];
        const double b = t.coeff * hi[t.var];
        lo_act += std::min(a, b);
        hi_act += std::max(a, b);
      }
    };
    auto substitute = [](LinearExpr& e, VarId z, const LinearExpr& def) {
      double coeff = 0.0;
      LinearExpr out(e.constant());
      for (const Term& t : e.terms()) {
        if (t.var == z) {
          coeff += t.coeff;
        } else {
          out.add(t.var, t.coeff);
        }
      }
      out.add_constant(coeff * def.constant());
      for (const Term& t : def.terms()) out.add(t.var, coeff * t.coeff);
      out.normalize();
      e = std::move(out);
    };

    std::vector<char> dropped(rows.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].sense != Sense::kEqual) continue;
      VarId z = -1;
      double a = 0.0;
      double reach = -1.0;
      for (const Term& t : rows[i].expr.terms()) {
        if (!open[t.var] || relaxation.variable(t.var).domain.type != VarType::kContinuous ||
            std::abs(t.coeff) != 1.0) {
          continue;
        }
        const double r = std::max(std::abs(lo[t.var]), std::abs(hi[t.var]));
        if (r > reach) {
          z = t.var;
          a = t.coeff;
          reach = r;
        }
      }
      if (z < 0) continue;
      double lo_act = 0.0;
      double hi_act = 0.0;
      activity(rows[i].expr, z, lo_act, hi_act);
      // z = (rhs - rest) / a
      const double rhs = rows[i].rhs;
      const double zmin = a > 0 ? rhs - hi_act : lo_act - rhs;
      const double zmax = a > 0 ? rhs - lo_act : hi_act - rhs;
      const double tol =
          1e-9 * (1.0 + std::max({std::abs(zmin), std::abs(zmax),
                                  std::abs(lo[z]), std::abs(hi[z])}));

      LinearExpr def(rhs / a);
      for (const Term& t : rows[i].expr.terms()) {
        if (t.var != z) def.add(t.var, -t.coeff / a);
      }
      dropped[i] = 1;
      open[z] = 0;
      to_reduced_[z] = kEliminated;
      for (int r : col_rows[z]) {
        if (dropped[r]) continue;
        substitute(rows[r].expr, z, def);
        rows[r].rhs -= rows[r].expr.constant();
        rows[r].expr.add_constant(-rows[r].expr.constant());
        for (const Term& t : def.terms()) col_rows[t.var].push_back(r);
      }
      substitute(objective, z, def);
      // Bounds of z that the definition does not imply become rows.
      for (int side = 0; side < 2; ++side) {
        const bool needed = side == 0 ? zmin < lo[z] - tol : zmax > hi[z] + tol;
        if (!needed || def.terms().empty()) continue;
        Row bound{def, side == 0 ? Sense::kGreaterEqual : Sense::kLessEqual,
                  (side == 0 ? lo[z] : hi[z]) - def.constant(),
                  std::abs(side == 0 ? lo[z] : hi[z]), rows[i].name};
        bound.expr.add_constant(-def.constant());
        for (const Term& t : bound.expr.terms()) {
          col_rows[t.var].push_back(static_cast<int>(rows.size()));
        }
        rows.push_back(std::move(bound));
        dropped.push_back(0);
      }
      eliminated_.push_back({z, std::move(def)});
    }
    offset_ += objective.constant();

    MilpProblem reduced;
    for (VarId v = 0; v < n; ++v) {
      if (!open[v]) continue;
      const Variable& var = relaxation.variable(v);
      to_reduced_[v] = reduced.add_variable(
          var.name, Domain{var.domain.type, lo[v], hi[v]});
      to_full_.push_back(v);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (dropped[i]) continue;
      const Row& row = rows[i];
      LinearExpr expr;
      double min_act = 0.0;
      double max_act = 0.0;
      double mag = row.mag;
      for (const Term& t : row.expr.terms()) {
        const double a = t.coeff * lo[t.var];
        const double b = t.coeff * hi[t.var];
        min_act += std::min(a, b);
        max_act += std::max(a, b);
        mag += std::max(std::abs(a), std::abs(b));
        expr.add(to_reduced_[t.var], t.coeff);
      }
      if (expr.terms().empty()) continue;
      const double tol = 1e-9 * (1.0 + mag);
      const bool slack_le = max_act <= row.rhs - tol;
      const bool slack_ge = min_act >= row.rhs + tol;
      if ((row.sense == Sense::kLessEqual && slack_le) ||
          (row.sense == Sense::kGreaterEqual && slack_ge)) {
        continue;
      }
      reduced.add_constraint(std::move(expr), row.sense, row.rhs, *row.name);
    }
    LinearExpr reduced_objective;
    for (const Term& t : objective.terms()) {
      reduced_objective.add(to_reduced_[t.var], t.coeff);
    }
    reduced.set_objective(std::move(reduced_objective));
    lp_ = std::make_unique<DualSimplex>(reduced);
  }

  DualSimplex::Status solve(const std::vector<double>& lo,
                            const std::vector<double>& hi, double cutoff,
                            Clock::time_point deadline) {
    const std::size_t k = to_full_.size();
    rlo_.resize(k);
    rhi_.resize(k);
    for (VarId v = 0; v < static_cast<VarId>(lo.size()); ++v) {
      const int r = to_reduced_[v];
      if (r == kEliminated) continue;
      if (r < 0) {
        if (lo[v] > fixed_[v] || hi[v] < fixed_[v]) {
          return DualSimplex::Status::kInfeasible;
        }
        continue;
      }
      rlo_[r] = lo[v];
      rhi_[r] = hi[v];
    }
    return lp_->solve(rlo_, rhi_, cutoff - offset_, deadline);
  }

  double objective() const { return lp_->objective() + offset_; }

  void values(std::vector<double>& x) const {
    lp_->structural_values(reduced_values_);
    x = fixed_;
    for (std::size_t r = 0; r < to_full_.size(); ++r) {
      x[to_full_[r]] = reduced_values_[r];
    }
    for (auto it = eliminated_.rbegin(); it != eliminated_.rend(); ++it) {
      x[it->first] = it->second.evaluate(x);
    }
  }

  std::int64_t iterations() const { return lp_->iterations(); }
  int num_columns() const { return static_cast<int>(to_full_.size()); }

 private:
  static constexpr int kEliminated = -2;

  std::vector<int> to_reduced_;
  std::vector<VarId> to_full_;
  std::vector<std::pair<VarId, LinearExpr>> eliminated_;
  std::vector<double> fixed_;
  double offset_ = 0.0;
  std::unique_ptr<DualSimplex> lp_;
  std::vector<double> rlo_;
  std::vector<double> rhi_;
  mutable std::vector<double> reduced_values_;
};

struct Node {
  int parent = -1;
  VarId var = -1;
  double value = 0.0;
  double bound = -kInf;
  double fraction = 0.0;  // value of `var` in the parent relaxation
  int depth = 0;
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpProblem& problem, const MilpProblem& relaxation,
                 const SolverConfig& config, const IncumbentCallback& callback)
      : problem_(problem),
        relaxation_(relaxation),
        config_(config),
        callback_(callback),
        start_(Clock::now()),
        deadline_(start_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(config.time_limit))),
        propagator_(relaxation) {
    for (int v = 0; v < problem.num_variables(); ++v) {
      if (problem.variable(v).is_binary()) binaries_.push_back(v);
    }
    for (int dir = 0; dir < 2; ++dir) {
      pc_sum_[dir].assign(problem.num_variables(), 0.0);
      pc_count_[dir].assign(problem.num_variables(), 0);
    }
    global_lo_.resize(problem.num_variables());
    global_hi_.resize(problem.num_variables());
    for (int v = 0; v < problem.num_variables(); ++v) {
      global_lo_[v] = problem.variable(v).domain.lower;
      global_hi_[v] = problem.variable(v).domain.upper;
    }
  }

  SolveReport run();

 private:
  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }
  bool out_of_time() const { return Clock::now() >= deadline_; }

  double abs_gap_tol(double value) const {
    return std::max(config_.gap_tolerance * std::max(std::abs(value), 1.0),
                    1e-9 * std::max(std::abs(value), 1.0));
  }
  double cutoff() const {
    return std::isfinite(incumbent_value_)
               ? incumbent_value_ - abs_gap_tol(incumbent_value_)
               : kInf;
  }

  void record() {
    report_.trace.push_back({elapsed(), incumbent_value_, lower_bound_});
  }
  void raise_lower_bound(double bound) {
    bound = std::min(bound, incumbent_value_);
    if (bound > lower_bound_) {
      lower_bound_ = bound;
      record();
    }
  }

  bool try_incumbent(std::vector<double> x, const std::vector<double>& lo,
                     const std::vector<double>& hi);
  bool dive(const Fixings& fixings);
  void maybe_run_heuristic(std::span<const double> point);
  int select_branch_var(const std::vector<double>& x) const;
  double pseudo_cost(int dir, VarId v) const;
  void learn(const Node& node, double child_bound);
  bool fractional(double v) const {
    return std::abs(v - std::round(v)) > kIntTol;
  }

  void rebuild_lp_if_shrunk();
  DualSimplex::Status solve_lp(const std::vector<double>& lo,
                               const std::vector<double>& hi, double cutoff) {
    return lp_->solve(lo, hi, cutoff, deadline_);
  }

  const MilpProblem& problem_;
  const MilpProblem& relaxation_;
  const SolverConfig& config_;
  const IncumbentCallback& callback_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  std::unique_ptr<ReducedLp> lp_;
  std::vector<double> pc_sum_[2];
  std::vector<int> pc_count_[2];
  double pc_total_[2] = {0.0, 0.0};
  int pc_total_count_[2] = {0, 0};
  std::int64_t retired_iterations_ = 0;
  Propagator propagator_;
  std::vector<VarId> binaries_;
  std::vector<double> global_lo_;
  std::vector<double> global_hi_;

  std::vector<double> incumbent_;
  double incumbent_value_ = kInf;
  double lower_bound_ = -kInf;
  bool proven_by_cutoff_ = false;
  SolveReport report_;
};

bool BranchAndBound::try_incumbent(std::vector<double> x,
                                   const std::vector<double>& lo,
                                   const std::vector<double>& hi) {
  for (VarId v : binaries_) x[v] = std::round(x[v]);
  // Pin the binaries and let propagation settle the continuous values; the
  // LP is only consulted for variables propagation leaves open.
  std::vector<double> flo = lo;
  std::vector<double> fhi = hi;
  for (VarId v : binaries_) flo[v] = fhi[v] = x[v];
  if (!propagator_.run(flo, fhi, kInf)) return false;
  bool settled = true;
  for (VarId v = 0; v < problem_.num_variables(); ++v) {
    if (fhi[v] - flo[v] > 1e-12 * (1.0 + std::abs(flo[v]))) {
      settled = false;
      break;
    }
  }
  if (settled) {
    for (VarId v = 0; v < problem_.num_variables(); ++v) x[v] = flo[v];
  } else {
    for (VarId v = 0; v < problem_.num_variables(); ++v) {
      x[v] = std::clamp(x[v], flo[v], fhi[v]);
    }
    if (!problem_.is_feasible(x)) {
      if (solve_lp(flo, fhi, kInf) != DualSimplex::Status::kOptimal) {
        return false;
      }
      lp_->values(x);
      for (VarId v : binaries_) x[v] = std::round(x[v]);
    }
  }
  if (!problem_.is_feasible(x)) return false;
  const double value = problem_.objective_value(x);
  if (!(value < incumbent_value_ - 1e-12 * std::max(1.0, std::abs(value)))) {
    return false;
  }
  incumbent_ = std::move(x);
  incumbent_value_ = value;
  record();
  if (callback_) callback_(report_.trace.back(), incumbent_);
  // Improving solutions must beat the new incumbent; tighten globally.
  std::vector<double> lo2 = global_lo_;
  std::vector<double> hi2 = global_hi_;
  if (propagator_.run(lo2, hi2, cutoff())) {
    global_lo_ = std::move(lo2);
    global_hi_ = std::move(hi2);
  } else {
    proven_by_cutoff_ = true;
  }
  return true;
}

void BranchAndBound::rebuild_lp_if_shrunk() {
  int open = 0;
  for (VarId v = 0; v < problem_.num_variables(); ++v) {
    if (global_lo_[v] < global_hi_[v]) ++open;
  }
  if (open >= lp_->num_columns() - lp_->num_columns() / 10) return;
  retired_iterations_ += lp_->iterations();
  lp_ = std::make_unique<ReducedLp>(relaxation_, global_lo_, global_hi_);
}

bool BranchAndBound::dive(const Fixings& fixings) {
  std::vector<double> lo = global_lo_;
  std::vector<double> hi = global_hi_;
  for (auto [var, value] : fixings) {
    if (var < 0 || var >= problem_.num_variables()) continue;
    const double v = problem_.variable(var).is_binary() ? std::round(value)
                                                         : value;
    if (v < lo[var] || v > hi[var]) return false;
    lo[var] = hi[var] = v;
  }
  std::vector<double> x;
  for (std::size_t depth = 0; depth <= binaries_.size(); ++depth) {
    if (out_of_time()) return false;
    if (!propagator_.run(lo, hi, cutoff())) return false;
    if (solve_lp(lo, hi, cutoff()) != DualSimplex::Status::kOptimal) {
      return false;
    }
    lp_->values(x);
    VarId pick = -1;
    double closest = kInf;
    for (VarId v : binaries_) {
      if (!fractional(x[v])) continue;
      const double dist = std::abs(x[v] - std::round(x[v]));
      if (dist < closest) {
        closest = dist;
        pick = v;
      }
    }
    if (pick < 0) return try_incumbent(x, lo, hi);
    lo[pick] = hi[pick] = std::round(x[pick]);
  }
  return false;
}

void BranchAndBound::maybe_run_heuristic(std::span<const double> point) {
  if (!config_.heuristic) return;
  std::optional<Fixings> fixings = config_.heuristic(point);
  if (fixings) dive(*fixings);
}

double BranchAndBound::pseudo_cost(int dir, VarId v) const {
  if (pc_count_[dir][v] > 0) return pc_sum_[dir][v] / pc_count_[dir][v];
  if (pc_total_count_[dir] > 0) return pc_total_[dir] / pc_total_count_[dir];
  return 1.0;
}

void BranchAndBound::learn(const Node& node, double child_bound) {
  if (node.var < 0 || !std::isfinite(node.bound) || !std::isfinite(child_bound)) {
    return;
  }
  const int dir = node.value > 0.5 ? 1 : 0;
  const double dist = dir == 1 ? 1.0 - node.fraction : node.fraction;
  if (dist < 1e-6) return;
  const double gain = std::max(child_bound - node.bound, 0.0) / dist;
  pc_sum_[dir][node.var] += gain;
  pc_count_[dir][node.var] += 1;
  pc_total_[dir] += gain;
  pc_total_count_[dir] += 1;
}

int BranchAndBound::select_branch_var(const std::vector<double>& x) const {
  int best = -1;
  int best_priority = std::numeric_limits<int>::min();
  double best_score = -1.0;
  std::uint64_t best_tie = 0;
  for (VarId v : binaries_) {
    if (!fractional(x[v])) continue;
    const int priority = problem_.variable(v).branch_priority;
    if (priority < best_priority) continue;
    const double f = x[v] - std::floor(x[v]);
    double score = 0.0;
    if (config_.branch_rule == BranchRule::kMostFractional) {
      score = std::min(f, 1.0 - f);
    } else if (config_.branch_rule == BranchRule::kPseudoCost) {
      const double down = std::max(f * pseudo_cost(0, v), 1e-6);
      const double up = std::max((1.0 - f) * pseudo_cost(1, v), 1e-6);
      score = down * up;
    }
    const std::uint64_t tie =
        config_.branch_rule == BranchRule::kFirstFractional
            ? 0
            : mix(config_.seed ^ static_cast<std::uint64_t>(v));
    bool better = false;
    if (priority > best_priority) {
      better = true;
    } else if (config_.branch_rule == BranchRule::kFirstFractional) {
      better = false;  // lowest index within the class wins
    } else if (score > best_score * (1.0 + 1e-12)) {
      better = true;
    } else if (score >= best_score * (1.0 - 1e-12) && tie < best_tie) {
      better = true;
    }
    if (better) {
      best = v;
      best_priority = priority;
      best_score = score;
      best_tie = tie;
    }
  }
  return best;
}

SolveReport BranchAndBound::run() {
  report_.trace.clear();
  record();
  Solution& final = report_.final;
  bool timed_out = false;
  bool node_limited = false;

  if (!propagator_.run(global_lo_, global_hi_, kInf)) {
    final.status = SolveStatus::kInfeasible;
    final.gap = kInf;
    report_.elapsed = elapsed();
    return report_;
  }
  lp_ = std::make_unique<ReducedLp>(relaxation_, global_lo_, global_hi_);
  if (config_.heuristic) maybe_run_heuristic({});

  std::vector<Node> nodes;
  nodes.push_back(Node{});
  using Key = std::tuple<double, int, int>;  // bound, -depth, id
  std::priority_queue<Key, std::vector<Key>, std::greater<>> best_first;
  std::vector<int> stack;
  std::multiset<double> open_bounds;
  auto push = [&](int id) {
    open_bounds.insert(nodes[id].bound);
    if (config_.node_selection == NodeSelection::kBestBound) {
      best_first.emplace(nodes[id].bound, -nodes[id].depth, id);
    } else {
      stack.push_back(id);
    }
  };
  // Best-bound search plunges into the preferred child of the last branching
  // and returns to the best open node once that path is pruned.
  int plunge = -1;
  auto pop = [&]() {
    int id;
    if (plunge >= 0) {
      id = plunge;
      plunge = -1;
    } else if (config_.node_selection == NodeSelection::kBestBound) {
      id = std::get<2>(best_first.top());
      best_first.pop();
    } else {
      id = stack.back();
      stack.pop_back();
    }
    open_bounds.erase(open_bounds.find(nodes[id].bound));
    return id;
  };
  push(0);

  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> x;
  while (!open_bounds.empty() && !proven_by_cutoff_) {
    if (out_of_time()) {
      timed_out = true;
      break;
    }
    if (config_.node_limit >= 0 && report_.nodes_explored >= config_.node_limit) {
      node_limited = true;
      break;
    }
    if (std::isfinite(incumbent_value_) &&
        (incumbent_value_ - lower_bound_) /
                std::max(std::abs(incumbent_value_), 1.0) <=
            config_.gap_tolerance) {
      break;
    }
    const int id = pop();
    const Node node = nodes[id];
    const double in_progress =
        open_bounds.empty() ? node.bound : std::min(node.bound, *open_bounds.begin());
    raise_lower_bound(in_progress);
    if (node.bound >= cutoff()) continue;

    lo = global_lo_;
    hi = global_hi_;
    bool consistent = true;
    for (int k = id; k > 0; k = nodes[k].parent) {
      const VarId v = nodes[k].var;
      if (nodes[k].value < lo[v] || nodes[k].value > hi[v]) consistent = false;
      lo[v] = hi[v] = nodes[k].value;
    }
    ++report_.nodes_explored;
    if (!consistent || !propagator_.run(lo, hi, cutoff())) continue;
    rebuild_lp_if_shrunk();
    const DualSimplex::Status status = solve_lp(lo, hi, cutoff());
    if (status == DualSimplex::Status::kTimeLimit) {
      push(id);
      timed_out = true;
      break;
    }
    double node_bound = node.bound;
    int var = -1;
    if (status == DualSimplex::Status::kIterationLimit) {
      // No usable relaxation: split on an open binary and keep the parent
      // bound, or evaluate the leaf directly.
      x.assign(lo.size(), 0.0);
      for (std::size_t v = 0; v < lo.size(); ++v) x[v] = 0.5 * (lo[v] + hi[v]);
      int best_priority = -1;
      for (VarId v : binaries_) {
        if (lo[v] == hi[v]) continue;
        const int p = problem_.variable(v).branch_priority;
        if (p > best_priority) {
          best_priority = p;
          var = v;
        }
      }
      if (var < 0) {
        try_incumbent(x, lo, hi);
        continue;
      }
    } else {
      if (status == DualSimplex::Status::kCutoff) learn(node, cutoff());
      if (status != DualSimplex::Status::kOptimal) continue;
      lp_->values(x);
      node_bound = std::max(node.bound, lp_->objective());
      learn(node, node_bound);
      if (node_bound >= cutoff()) continue;
      var = select_branch_var(x);
    }

    if (id == 0) {
      raise_lower_bound(open_bounds.empty() ? node_bound : std::min(node_bound, *open_bounds.begin()));
    }
    if (var < 0) {
      try_incumbent(x, lo, hi);
      continue;
    }
    if (id == 0 || (config_.heuristic_frequency > 0 &&
                    report_.nodes_explored % config_.heuristic_frequency == 0)) {
      const std::vector<double> point = x;
      maybe_run_heuristic(point);
      if (node_bound >= cutoff()) continue;
    }
    const bool prefer_up = x[var] >= 0.5;
    for (int k = 0; k < 2; ++k) {
      // The preferred child is pushed last so depth-first pops it first.
      const bool up = (k == 1) == prefer_up;
      Node child;
      child.parent = id;
      child.var = var;
      child.value = up ? 1.0 : 0.0;
      child.bound = node_bound;
      child.fraction = x[var] - std::floor(x[var]);
      child.depth = node.depth + 1;
      nodes.push_back(child);
      const int child_id = static_cast<int>(nodes.size()) - 1;
      if (k == 1 && config_.node_selection == NodeSelection::kBestBound) {
        open_bounds.insert(child.bound);
        plunge = child_id;
      } else {
        push(child_id);
      }
    }
  }

  report_.lp_iterations = retired_iterations_ + lp_->iterations();
  const bool exhausted = open_bounds.empty() || proven_by_cutoff_;
  if (exhausted && !timed_out && !node_limited) {
    if (std::isfinite(incumbent_value_)) raise_lower_bound(incumbent_value_);
  } else if (!open_bounds.empty()) {
    raise_lower_bound(*open_bounds.begin());
  }
  final.values = incumbent_;
  final.objective = incumbent_value_;
  report_.lower_bound = lower_bound_;
  if (!std::isfinite(incumbent_value_)) {
    final.gap = kInf;
    final.status = (timed_out || node_limited) ? SolveStatus::kTimedOut
                                               : SolveStatus::kInfeasible;
  } else {
    final.gap = std::max(0.0, (incumbent_value_ - lower_bound_) /
                                  std::max(std::abs(incumbent_value_), 1.0));
    if (final.gap <= config_.gap_tolerance) {
      final.status = SolveStatus::kOptimal;
    } else if (timed_out) {
      final.status = SolveStatus::kTimedOut;
    } else {
      final.status = SolveStatus::kFeasible;
    }
  }
  record();
  report_.elapsed = elapsed();
  return report_;
}

}  // namespace

LpRelaxation lp_relax(const MilpProblem& problem) {
  std::vector<double> lo(problem.num_variables());
  std::vector<double> hi(problem.num_variables());
  for (int v = 0; v < problem.num_variables(); ++v) {
    lo[v] = problem.variable(v).domain.lower;
    hi[v] = problem.variable(v).domain.upper;
    if (!std::isfinite(lo[v]) || !std::isfinite(hi[v])) {
      throw InvalidInput("LP relaxation needs finite bounds; variable '" +
                         problem.variable(v).name + "' is unbounded");
    }
  }
  ReducedLp lp(problem, lo, hi);
  const auto status = lp.solve(lo, hi, kInf, Clock::time_point::max());
  LpRelaxation out;
  if (status == DualSimplex::Status::kIterationLimit) {
    throw InternalError("LP relaxation failed to converge");
  }
  out.feasible = status == DualSimplex::Status::kOptimal;
  if (out.feasible) {
    lp.values(out.values);
    out.objective = problem.objective_value(out.values);
  }
  return out;
}

SolveReport solve(const MilpProblem& problem, const SolverConfig& config,
                  const IncumbentCallback& on_incumbent) {
  if (!(config.time_limit > 0.0)) {
    throw InvalidInput("solver time limit must be positive");
  }
  if (!(config.gap_tolerance >= 0.0)) {
    throw InvalidInput("gap tolerance must be non-negative");
  }
  for (const Variable& v : problem.variables()) {
    if (!std::isfinite(v.domain.lower) || !std::isfinite(v.domain.upper)) {
      throw InvalidInput("variable '" + v.name +
                         "' is unbounded; the solver needs finite bounds");
    }
  }
  if (config.cuts.empty()) {
    BranchAndBound bnb(problem, problem, config, on_incumbent);
    return bnb.run();
  }
  MilpProblem relaxation = problem;
  for (const Constraint& cut : config.cuts) {
    for (const Term& t : cut.expr.terms()) {
      if (t.var < 0 || t.var >= problem.num_variables()) {
        throw InvalidInput("cut '" + cut.name + "' references an unknown variable");
      }
    }
    relaxation.add_constraint(cut.expr, cut.sense, cut.rhs, cut.name);
  }
  BranchAndBound bnb(problem, relaxation, config, on_incumbent);
  return bnb.run();
}

}  // namespace joinmilp
