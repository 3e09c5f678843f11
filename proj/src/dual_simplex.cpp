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

#include "dual_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "joinmilp/error.hpp"

namespace joinmilp::internal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kSingularTol = 1e-11;
constexpr int kRefactorInterval = 800;
constexpr int kStallLimit = 300;
constexpr double kPerturbation = 1e-7;

double primal_tol(double bound) {
  return kPrimalTol * (1.0 + std::abs(bound));
}

double power_of_two(double s) {
  const double e = std::clamp(std::round(std::log2(s)), -900.0, 900.0);
  return std::exp2(e);
}

}  // namespace

DualSimplex::DualSimplex(const MilpProblem& problem)
    : n_(problem.num_variables()),
      m_(problem.num_constraints()),
      cols_(n_ + m_) {
  for (int j = 0; j < n_; ++j) {
    const Domain& d = problem.variable(j).domain;
    if (!std::isfinite(d.lower) || !std::isfinite(d.upper)) {
      throw InvalidInput("LP relaxation needs finite bounds; variable '" +
                         problem.variable(j).name + "' is unbounded");
    }
  }
  compute_scaling(problem);
  base_cost_.assign(cols_, 0.0);
  lower_.assign(cols_, 0.0);
  upper_.assign(cols_, 0.0);
  for (const Term& t : problem.objective().terms()) {
    base_cost_[t.var] += t.coeff * col_scale_[t.var];
  }
  cost_ = base_cost_;
  for (int j = 0; j < n_; ++j) {
    const Domain& d = problem.variable(j).domain;
    lower_[j] = d.lower / col_scale_[j];
    upper_[j] = d.upper / col_scale_[j];
  }
  rows_.reserve(m_);
  for (int i = 0; i < m_; ++i) {
    const Constraint& c = problem.constraint(i);
    std::vector<Term> row;
    double min_act = 0.0;
    double max_act = 0.0;
    for (const Term& t : c.expr.terms()) {
      const double a = t.coeff * problem.variable(t.var).domain.lower;
      const double b = t.coeff * problem.variable(t.var).domain.upper;
      min_act += std::min(a, b);
      max_act += std::max(a, b);
      row.push_back({t.var, t.coeff * row_scale_[i] * col_scale_[t.var]});
    }
    rows_.push_back(std::move(row));
    double lo = min_act;
    double hi = max_act;
    switch (c.sense) {
      case Sense::kLessEqual:
        hi = c.rhs;
        break;
      case Sense::kGreaterEqual:
        lo = c.rhs;
        break;
      case Sense::kEqual:
        lo = hi = c.rhs;
        break;
    }
    if (lo > hi) {
      if (lo - hi > 1e-9 * (1.0 + std::abs(c.rhs))) root_infeasible_ = true;
      lo = hi = c.rhs;
    }
    lower_[n_ + i] = lo * row_scale_[i];
    upper_[n_ + i] = hi * row_scale_[i];
  }
  value_.assign(cols_, 0.0);
  reduced_.assign(cols_, 0.0);
  at_upper_.assign(cols_, 0);
  reset_to_slack_basis();
}

void DualSimplex::compute_scaling(const MilpProblem& problem) {
  // Columns are scaled to unit reach so that absolute tolerances become
  // relative to each variable's range; rows are then scaled to unit
  // largest entry.
  col_scale_.assign(n_, 1.0);
  row_scale_.assign(m_, 1.0);
  for (int j = 0; j < n_; ++j) {
    const Domain& d = problem.variable(j).domain;
    const double reach = std::max(std::abs(d.lower), std::abs(d.upper));
    if (reach > 1.0) col_scale_[j] = power_of_two(reach);
  }
  for (int i = 0; i < m_; ++i) {
    double hi = 0.0;
    for (const Term& t : problem.constraint(i).expr.terms()) {
      hi = std::max(hi, std::abs(t.coeff) * col_scale_[t.var]);
    }
    if (hi > 0.0) row_scale_[i] = power_of_two(1.0 / hi);
  }
}

void DualSimplex::reset_to_slack_basis() {
  tableau_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
  head_.assign(m_, 0);
  row_of_.assign(cols_, -1);
  for (int i = 0; i < m_; ++i) {
    double* row = row_ptr(i);
    for (const Term& t : rows_[i]) row[t.var] = -t.coeff;
    row[n_ + i] = 1.0;
    head_[i] = n_ + i;
    row_of_[n_ + i] = i;
  }
  weight_.assign(m_, 1.0);
  pivots_since_refactor_ = 0;
  stale_values_ = true;
  recompute_reduced_costs();
}

bool DualSimplex::refactorize() {
  ++refactorizations_;
  pivots_since_refactor_ = 0;
  stale_values_ = true;
  std::vector<double> mat(static_cast<std::size_t>(m_) * cols_, 0.0);
  auto at = [&](int r, int c) -> double& {
    return mat[static_cast<std::size_t>(r) * cols_ + c];
  };
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : rows_[i]) at(i, t.var) = -t.coeff;
    at(i, n_ + i) = 1.0;
  }
  std::vector<int> order(head_.begin(), head_.end());
  std::stable_partition(order.begin(), order.end(),
                        [&](int c) { return c >= n_; });
  std::vector<char> pivoted(m_, 0);
  std::vector<int> new_head(m_, -1);
  std::vector<int> nz;
  for (int c : order) {
    int best = -1;
    double best_abs = kSingularTol;
    for (int r = 0; r < m_; ++r) {
      if (pivoted[r]) continue;
      const double v = std::abs(at(r, c));
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (best < 0) {
      reset_to_slack_basis();
      return false;
    }
    double* prow = &at(best, 0);
    const double inv = 1.0 / prow[c];
    nz.clear();
    for (int k = 0; k < cols_; ++k) {
      if (prow[k] != 0.0) {
        prow[k] *= inv;
        nz.push_back(k);
      }
    }
    prow[c] = 1.0;
    for (int r = 0; r < m_; ++r) {
      if (r == best) continue;
      double* row = &at(r, 0);
      const double f = row[c];
      if (f == 0.0) continue;
      for (int k : nz) row[k] -= f * prow[k];
      row[c] = 0.0;
    }
    pivoted[best] = 1;
    new_head[best] = c;
  }
  tableau_ = std::move(mat);
  head_ = std::move(new_head);
  std::fill(row_of_.begin(), row_of_.end(), -1);
  for (int i = 0; i < m_; ++i) row_of_[head_[i]] = i;
  recompute_weights();
  recompute_reduced_costs();
  return true;
}

void DualSimplex::recompute_weights() {
  weight_.assign(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const double* row = row_ptr(i) + n_;
    double w = 0.0;
    for (int k = 0; k < m_; ++k) w += row[k] * row[k];
    weight_[i] = std::max(w, 1e-12);
  }
}

void DualSimplex::recompute_reduced_costs() {
  reduced_ = cost_;
  for (int i = 0; i < m_; ++i) {
    const double cb = cost_[head_[i]];
    if (cb == 0.0) continue;
    const double* row = row_ptr(i);
    for (int j = 0; j < cols_; ++j) reduced_[j] -= cb * row[j];
  }
  for (int i = 0; i < m_; ++i) reduced_[head_[i]] = 0.0;
}

void DualSimplex::place_nonbasics() {
  const bool full = stale_values_;
  for (int j = 0; j < cols_; ++j) {
    if (row_of_[j] >= 0) continue;
    if (lower_[j] == upper_[j]) {
      at_upper_[j] = 0;
    } else if (reduced_[j] > kDualTol) {
      at_upper_[j] = 0;
    } else if (reduced_[j] < -kDualTol) {
      at_upper_[j] = 1;
    }
    const double target = at_upper_[j] ? upper_[j] : lower_[j];
    const double delta = target - value_[j];
    value_[j] = target;
    if (full || delta == 0.0) continue;
    for (int i = 0; i < m_; ++i) {
      const double f = tableau_[static_cast<std::size_t>(i) * cols_ + j];
      if (f != 0.0) value_[head_[i]] -= f * delta;
    }
  }
  if (full) recompute_basic_values();
}

void DualSimplex::perturb_costs(double magnitude) {
  perturbation_slack_ = 0.0;
  for (int j = 0; j < n_; ++j) {
    if (row_of_[j] >= 0 || lower_[j] == upper_[j]) continue;
    rng_state_ ^= rng_state_ << 13;
    rng_state_ ^= rng_state_ >> 7;
    rng_state_ ^= rng_state_ << 17;
    const double u = static_cast<double>(rng_state_ >> 11) * 0x1.0p-53;
    const double reach = std::max({1.0, std::abs(lower_[j]), std::abs(upper_[j])});
    double xi = magnitude * (1.0 + std::abs(base_cost_[j])) * (0.5 + u) / reach;
    if (at_upper_[j]) xi = -xi;
    cost_[j] += xi;
    reduced_[j] += xi;
    perturbation_slack_ +=
        std::abs(xi) * std::max(std::abs(lower_[j]), std::abs(upper_[j]));
  }
}

void DualSimplex::remove_perturbation() {
  perturbation_slack_ = 0.0;
  for (int j = 0; j < n_; ++j) {
    const double delta = base_cost_[j] - cost_[j];
    if (delta == 0.0) continue;
    cost_[j] = base_cost_[j];
    const int r = row_of_[j];
    if (r < 0) {
      reduced_[j] += delta;
      continue;
    }
    const double* row = row_ptr(r);
    for (int k = 0; k < cols_; ++k) reduced_[k] -= delta * row[k];
  }
  for (int i = 0; i < m_; ++i) reduced_[head_[i]] = 0.0;
}

void DualSimplex::recompute_basic_values() {
  stale_values_ = false;
  for (int i = 0; i < m_; ++i) {
    const double* row = row_ptr(i);
    double sum = 0.0;
    for (int j = 0; j < cols_; ++j) {
      if (row_of_[j] < 0 && row[j] != 0.0) sum -= row[j] * value_[j];
    }
    value_[head_[i]] = sum;
  }
}

double DualSimplex::current_objective() const {
  double z = 0.0;
  for (int j = 0; j < n_; ++j) z += cost_[j] * value_[j];
  return z;
}

double DualSimplex::lagrangian_bound() const {
  // For any row multipliers the box minimum of the Lagrangian is a lower
  // bound; the logical reduced costs are used as multipliers and the
  // structural ones are rebuilt from the original rows.
  std::vector<double>& d = bound_work_;
  d.assign(base_cost_.begin(), base_cost_.begin() + n_);
  double bound = 0.0;
  double mag = 0.0;
  for (int i = 0; i < m_; ++i) {
    const double lambda = reduced_[n_ + i];
    if (lambda == 0.0) continue;
    for (const Term& t : rows_[i]) d[t.var] -= lambda * t.coeff;
    const double a = lambda * lower_[n_ + i];
    const double b = lambda * upper_[n_ + i];
    bound += std::min(a, b);
    mag += std::abs(std::min(a, b));
  }
  for (int j = 0; j < n_; ++j) {
    const double a = d[j] * lower_[j];
    const double b = d[j] * upper_[j];
    bound += std::min(a, b);
    mag += std::abs(std::min(a, b));
  }
  return bound - 1e-13 * mag;
}

double DualSimplex::objective() const {
  return using_fallback_ ? fallback_bound_ : last_bound_;
}

void DualSimplex::structural_values(std::vector<double>& out) const {
  out.resize(n_);
  const std::vector<double>& v = using_fallback_ ? fallback_values_ : value_;
  for (int j = 0; j < n_; ++j) {
    out[j] = std::clamp(v[j], lower_[j], upper_[j]) * col_scale_[j];
  }
}

double DualSimplex::primal_residual() const {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    double act = 0.0;
    double mag = 1.0 + std::abs(value_[n_ + i]);
    for (const Term& t : rows_[i]) {
      act += t.coeff * value_[t.var];
      mag += std::abs(t.coeff * value_[t.var]);
    }
    worst = std::max(worst, std::abs(act - value_[n_ + i]) / mag);
  }
  return worst;
}

void DualSimplex::pivot(int r, int q) {
  double* prow = row_ptr(r);
  const double inv = 1.0 / prow[q];
  pivot_nz_.clear();
  double wr = 0.0;
  for (int k = 0; k < cols_; ++k) {
    if (prow[k] != 0.0) {
      prow[k] *= inv;
      pivot_nz_.push_back(k);
      if (k >= n_) wr += prow[k] * prow[k];
    }
  }
  prow[q] = 1.0;
  wr = std::max(wr, 1e-12);
  const auto logical_begin =
      std::lower_bound(pivot_nz_.begin(), pivot_nz_.end(), n_);
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* row = row_ptr(i);
    const double f = row[q];
    if (f == 0.0) continue;
    double dot = 0.0;
    for (auto it = logical_begin; it != pivot_nz_.end(); ++it) {
      dot += row[*it] * prow[*it];
    }
    for (int k : pivot_nz_) row[k] -= f * prow[k];
    row[q] = 0.0;
    weight_[i] = std::max(weight_[i] - 2.0 * f * dot + f * f * wr, 1e-12);
  }
  weight_[r] = wr;
  const double dq = reduced_[q];
  if (dq != 0.0) {
    for (int k : pivot_nz_) reduced_[k] -= dq * prow[k];
  }
  reduced_[q] = 0.0;
  const int leaving = head_[r];
  row_of_[leaving] = -1;
  head_[r] = q;
  row_of_[q] = r;
  ++pivots_since_refactor_;
}

void DualSimplex::flip(int col) {
  const double delta =
      at_upper_[col] ? lower_[col] - upper_[col] : upper_[col] - lower_[col];
  at_upper_[col] = at_upper_[col] ? 0 : 1;
  value_[col] = at_upper_[col] ? upper_[col] : lower_[col];
  for (int i = 0; i < m_; ++i) {
    const double f = tableau_[static_cast<std::size_t>(i) * cols_ + col];
    if (f != 0.0) value_[head_[i]] -= f * delta;
  }
}

bool DualSimplex::certify_infeasible(int r) const {
  // Any combination y of the rows gives sum_j t_j x_j = 0 with
  // t = y [-A | I]; if the box keeps that sum away from zero the rows cannot
  // be satisfied. y is the logical part of tableau row r, but t is rebuilt
  // from the original rows so accumulated update errors cannot fake a proof.
  const double* y = row_ptr(r) + n_;
  std::vector<double> t(cols_, 0.0);
  for (int i = 0; i < m_; ++i) {
    if (y[i] == 0.0) continue;
    for (const Term& term : rows_[i]) t[term.var] -= y[i] * term.coeff;
    t[n_ + i] += y[i];
  }
  double lo_sum = 0.0;
  double hi_sum = 0.0;
  double mag = 0.0;
  for (int j = 0; j < cols_; ++j) {
    if (t[j] == 0.0) continue;
    const double a = t[j] * lower_[j];
    const double b = t[j] * upper_[j];
    lo_sum += std::min(a, b);
    hi_sum += std::max(a, b);
    mag += std::max(std::abs(a), std::abs(b));
  }
  const double margin = 1e-9 * mag + 1e-12;
  return hi_sum < -margin || lo_sum > margin;
}

DualSimplex::Outcome DualSimplex::iterate(double cutoff,
                                          Clock::time_point deadline) {
  const std::int64_t max_iter = 20LL * (m_ + cols_) + 10000;
  std::int64_t local = 0;
  double best_obj = -kInf;
  int stall = 0;
  while (true) {
    if (++local > max_iter) return Outcome::kIterationLimit;
    if ((local & 31) == 0 && Clock::now() > deadline) {
      return Outcome::kTimeLimit;
    }
    if (pivots_since_refactor_ >= kRefactorInterval) {
      refactorize();
      place_nonbasics();
    }
    const double obj = current_objective();
    if (obj - perturbation_slack_ >= cutoff && std::isfinite(cutoff)) {
      last_bound_ = lagrangian_bound();
      if (last_bound_ >= cutoff) return Outcome::kCutoff;
    }
    if (obj > best_obj + 1e-12 * (1.0 + std::abs(obj))) {
      best_obj = obj;
      stall = 0;
    } else if (++stall > kStallLimit) {
      return Outcome::kStalled;
    }

    // Leaving row by dual steepest edge.
    int r = -1;
    double best = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int c = head_[i];
      const double x = value_[c];
      double viol;
      if (x < lower_[c] - primal_tol(lower_[c])) {
        viol = lower_[c] - x;
      } else if (x > upper_[c] + primal_tol(upper_[c])) {
        viol = x - upper_[c];
      } else {
        continue;
      }
      const double score = viol * viol / weight_[i];
      if (score > best) {
        best = score;
        r = i;
      }
    }
    if (r < 0) {
      return Outcome::kOptimal;
    }

    const int leaving = head_[r];
    const bool to_lower = value_[leaving] < lower_[leaving];
    const double target = to_lower ? lower_[leaving] : upper_[leaving];
    const double s = to_lower ? 1.0 : -1.0;
    const double* prow = row_ptr(r);

    candidates_.clear();
    for (int j = 0; j < cols_; ++j) {
      if (row_of_[j] >= 0 || lower_[j] == upper_[j]) continue;
      const double a = prow[j];
      if (a == 0.0) continue;
      const bool up = at_upper_[j] != 0;
      if (up ? s * a <= 0.0 : s * a >= 0.0) continue;
      const double dj = up ? -reduced_[j] : reduced_[j];
      candidates_.push_back({j, std::max(dj, 0.0) / std::abs(a), std::abs(a)});
    }
    if (candidates_.empty()) {
      return certify_infeasible(r) ? Outcome::kInfeasible : Outcome::kUnproven;
    }
    std::sort(candidates_.begin(), candidates_.end(),
              [](const Candidate& a, const Candidate& b) {
                return a.ratio < b.ratio || (a.ratio == b.ratio && a.col < b.col);
              });
    const int count = static_cast<int>(candidates_.size());
    harris_suffix_.assign(count + 1, kInf);
    for (int k = count - 1; k >= 0; --k) {
      const Candidate& c = candidates_[k];
      const double bound =
          c.alpha >= kPivotTol ? c.ratio + kDualTol / c.alpha : kInf;
      harris_suffix_[k] = std::min(harris_suffix_[k + 1], bound);
    }

    // Pass breakpoints by flipping boxed columns while the leaving row would
    // remain infeasible, then pick the largest pivot among near-ties.
    double slope = std::abs(value_[leaving] - target);
    int k = 0;
    while (k < count) {
      const Candidate& c = candidates_[k];
      const double drop = c.alpha * (upper_[c.col] - lower_[c.col]);
      if (slope - drop <= 1e-12 * (1.0 + slope)) break;
      slope -= drop;
      ++k;
    }
    int q = -1;
    double q_alpha = 0.0;
    double q_ratio = 0.0;
    for (int i = k; i < count; ++i) {
      const Candidate& c = candidates_[i];
      if (c.alpha < kPivotTol) continue;
      if (q >= 0 && c.ratio > harris_suffix_[k]) break;
      if (c.alpha > q_alpha) {
        q_alpha = c.alpha;
        q = c.col;
        q_ratio = c.ratio;
      }
    }
    if (q < 0) {
      return certify_infeasible(r) ? Outcome::kInfeasible : Outcome::kUnproven;
    }
    for (int i = 0; i < k; ++i) flip(candidates_[i].col);
    // Breakpoints skipped by the pivot choice whose reduced cost would change
    // sign by more than the tolerance are passed as well.
    for (int i = k; i < count && candidates_[i].ratio < q_ratio; ++i) {
      const Candidate& c = candidates_[i];
      if (c.col != q && (q_ratio - c.ratio) * c.alpha > kDualTol) flip(c.col);
    }
    // A slightly wrong-signed entering reduced cost would move the duals
    // backwards; treat it as zero.
    if ((at_upper_[q] ? -reduced_[q] : reduced_[q]) < 0.0) reduced_[q] = 0.0;

    const double delta = (value_[leaving] - target) / prow[q];
    for (int i = 0; i < m_; ++i) {
      const double f = tableau_[static_cast<std::size_t>(i) * cols_ + q];
      if (f != 0.0) value_[head_[i]] -= f * delta;
    }
    value_[q] += delta;
    pivot(r, q);
    value_[leaving] = target;
    at_upper_[leaving] = to_lower ? 0 : 1;
    ++iterations_;
  }
}

DualSimplex::Outcome DualSimplex::run_phase(double cutoff,
                                            Clock::time_point deadline) {
  Outcome out = Outcome::kStalled;
  double magnitude = kPerturbation;
  for (int attempt = 0; attempt < 3 && out == Outcome::kStalled; ++attempt) {
    remove_perturbation();
    perturb_costs(magnitude);
    place_nonbasics();
    out = iterate(cutoff, deadline);
    magnitude *= 10.0;
  }
  if (out != Outcome::kOptimal) {
    remove_perturbation();
    return out == Outcome::kStalled ? Outcome::kIterationLimit : out;
  }
  // The perturbed optimum is primal feasible and its dual objective minus the
  // perturbation slack bounds the true optimum; keep it in case the clean-up
  // pass does not finish.
  fallback_bound_ = lagrangian_bound();
  fallback_values_.assign(value_.begin(), value_.begin() + n_);
  remove_perturbation();
  place_nonbasics();
  const Outcome clean = iterate(cutoff, deadline);
  switch (clean) {
    case Outcome::kOptimal:
      last_bound_ = std::max(lagrangian_bound(), fallback_bound_);
      return clean;
    case Outcome::kCutoff:
    case Outcome::kTimeLimit:
      return clean;
    default:
      using_fallback_ = true;
      last_bound_ = fallback_bound_;
      return fallback_bound_ >= cutoff ? Outcome::kCutoff : Outcome::kOptimal;
  }
}

DualSimplex::Status DualSimplex::solve(std::span<const double> lower,
                                       std::span<const double> upper,
                                       double cutoff,
                                       Clock::time_point deadline) {
  using_fallback_ = false;
  if (root_infeasible_) return Status::kInfeasible;
  for (int j = 0; j < n_; ++j) {
    if (lower[j] > upper[j]) return Status::kInfeasible;
    lower_[j] = lower[j] / col_scale_[j];
    upper_[j] = upper[j] / col_scale_[j];
  }
  for (int retries = 0;; ++retries) {
    using_fallback_ = false;
    switch (run_phase(cutoff, deadline)) {
      case Outcome::kOptimal:
        if (using_fallback_ || retries >= 2 || primal_residual() <= 1e-8) {
          return Status::kOptimal;
        }
        refactorize();
        break;
      case Outcome::kInfeasible:
        return Status::kInfeasible;
      case Outcome::kCutoff:
        return Status::kCutoff;
      case Outcome::kTimeLimit:
        return Status::kTimeLimit;
      case Outcome::kUnproven:
        if (retries >= 2) return Status::kIterationLimit;
        refactorize();
        break;
      default:
        if (retries >= 2) return Status::kIterationLimit;
        reset_to_slack_basis();
        break;
    }
  }
}

}  // namespace joinmilp::internal
