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

// Exact reference optimizers over left-deep plans and the exact cost
// evaluator they share.

#ifndef JOINMILP_BASELINE_HPP_
#define JOINMILP_BASELINE_HPP_

#include <vector>

#include "joinmilp/formulation.hpp"
#include "joinmilp/plan.hpp"
#include "joinmilp/query.hpp"

namespace joinmilp {

struct CostModelExact {
  CostModel model = CostModel::kCout;
  std::vector<JoinImpl> implementations = {
      JoinImpl::kHashJoin, JoinImpl::kSortMerge, JoinImpl::kBlockNestedLoop};
  double tup_size = 100.0;
  double page_size = 8192.0;
  double buffer = 64.0;
  // Adds eval_cost * (outer cardinality) at the join evaluating a predicate.
  bool include_evaluation_cost = false;

  static CostModelExact from(const FormulationConfig& config);

  double pages(double cardinality) const;
  double join_cost(JoinImpl impl, double outer_card, double inner_card) const;
};

struct PlanCost {
  double total = 0.0;
  std::vector<double> per_join;
};

PlanCost exact_plan_cost(const Query& query, const LeftDeepPlan& plan,
                         const CostModelExact& model);

inline constexpr int kMaxDpTables = 30;
inline constexpr int kMaxBruteForceTables = 8;

// Selinger-style dynamic programming over table subsets. Among optimal plans
// the lexicographically smallest order is returned.
LeftDeepPlan optimize_dp(const Query& query, const CostModelExact& model);

// Enumerates every permutation; same tie-breaking as optimize_dp.
LeftDeepPlan optimize_bruteforce(const Query& query, const CostModelExact& model);

}  // namespace joinmilp

#endif  // JOINMILP_BASELINE_HPP_
