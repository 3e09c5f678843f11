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

// Bounded dual simplex on a dense tableau. Internal to the solver.
//
// The LP is kept in the form  A x - r = 0,  l <= (x, r) <= u  where r holds
// one logical variable per row. Every column is boxed (structural bounds are
// required to be finite and logical bounds come from row activity ranges), so
// any basis can be made dual feasible by parking each nonbasic column at the
// bound matching the sign of its reduced cost. That lets the branch-and-bound
// reuse whatever basis the previous node left behind.
//
// Rows and columns are equilibrated by powers of two. Pricing uses exact
// dual steepest-edge weights, the ratio test flips boxed columns past their
// breakpoints while the leaving row stays infeasible, and costs are perturbed
// during the main phase and restored for a final clean-up pass. Claims of
// infeasibility are checked against a certificate built from the original
// rows.

#ifndef JOINMILP_SRC_DUAL_SIMPLEX_HPP_
#define JOINMILP_SRC_DUAL_SIMPLEX_HPP_

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "joinmilp/milp.hpp"

namespace joinmilp::internal {

using Clock = std::chrono::steady_clock;

class DualSimplex {
 public:
  enum class Status {
    kOptimal,
    kInfeasible,
    kCutoff,  // dual bound reached the cutoff; the LP optimum is not smaller
    kIterationLimit,
    kTimeLimit,
  };

  explicit DualSimplex(const MilpProblem& problem);

  // Solves min c x over the structural bounds given. Returns kInfeasible also
  // when some row can never be satisfied under the root bounds.
  Status solve(std::span<const double> lower, std::span<const double> upper,
               double cutoff, Clock::time_point deadline);

  // After kOptimal: a lower bound on the LP optimum derived from the final
  // duals and the original data, so it stays valid when the basis is
  // inaccurate. Equals the optimum up to rounding on well-conditioned LPs.
  double objective() const;
  void structural_values(std::vector<double>& out) const;

  std::int64_t iterations() const { return iterations_; }
  std::int64_t refactorizations() const { return refactorizations_; }
  int num_rows() const { return m_; }
  int num_columns() const { return cols_; }

 private:
  double* row_ptr(int row) {
    return &tableau_[static_cast<std::size_t>(row) * cols_];
  }
  const double* row_ptr(int row) const {
    return &tableau_[static_cast<std::size_t>(row) * cols_];
  }

  void compute_scaling(const MilpProblem& problem);
  void reset_to_slack_basis();
  bool refactorize();  // false when the basis was singular and got reset
  void recompute_weights();
  void recompute_reduced_costs();
  void recompute_basic_values();
  void place_nonbasics();
  void perturb_costs(double magnitude);
  void remove_perturbation();
  void pivot(int row, int col);
  void flip(int col);
  double primal_residual() const;
  double current_objective() const;
  double lagrangian_bound() const;
  enum class Outcome {
    kOptimal,
    kInfeasible,  // certified by a row combination
    kUnproven,    // the ratio test found no pivot but no certificate either
    kCutoff,
    kStalled,
    kIterationLimit,
    kTimeLimit,
  };
  bool certify_infeasible(int row) const;
  Outcome iterate(double cutoff, Clock::time_point deadline);
  Outcome run_phase(double cutoff, Clock::time_point deadline);

  int n_ = 0;     // structural columns
  int m_ = 0;     // rows
  int cols_ = 0;  // n_ + m_
  bool root_infeasible_ = false;

  // Scaled data: x_scaled = x / col_scale, row i multiplied by row_scale.
  std::vector<double> col_scale_;
  std::vector<double> row_scale_;
  std::vector<std::vector<Term>> rows_;
  std::vector<double> base_cost_;
  std::vector<double> cost_;  // base_cost_ plus the current perturbation
  bool stale_values_ = true;
  double perturbation_slack_ = 0.0;
  std::vector<double> lower_;
  std::vector<double> upper_;

  std::vector<double> tableau_;  // m_ x cols_, B^-1 [-A | I]
  std::vector<double> weight_;   // squared norms of the rows of B^-1
  std::vector<double> reduced_;
  std::vector<double> value_;
  std::vector<int> head_;    // basic column of each row
  std::vector<int> row_of_;  // row of a basic column, -1 when nonbasic
  std::vector<char> at_upper_;

  std::int64_t iterations_ = 0;
  std::int64_t refactorizations_ = 0;
  std::int64_t pivots_since_refactor_ = 0;
  std::uint64_t rng_state_ = 0x2545f4914f6cdd1dULL;
  double last_bound_ = 0.0;
  bool using_fallback_ = false;
  double fallback_bound_ = 0.0;
  std::vector<double> fallback_values_;
  mutable std::vector<double> bound_work_;
  std::vector<int> pivot_nz_;

  struct Candidate {
    int col;
    double ratio;
    double alpha;  // |tableau entry|
  };
  std::vector<Candidate> candidates_;
  std::vector<double> harris_suffix_;
};

}  // namespace joinmilp::internal

#endif  // JOINMILP_SRC_DUAL_SIMPLEX_HPP_
