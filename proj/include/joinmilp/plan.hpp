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

// Left-deep plans and the cost-model selectors shared by the MILP encoding
// and the exact baseline.

#ifndef JOINMILP_PLAN_HPP_
#define JOINMILP_PLAN_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "joinmilp/query.hpp"

namespace joinmilp {

enum class CostModel {
  kCout,
  kHashJoin,
  kSortMerge,
  kBlockNestedLoop,
  kOperatorChoice,
};

enum class JoinImpl { kHashJoin, kSortMerge, kBlockNestedLoop };

std::string_view to_string(CostModel model);
std::string_view to_string(JoinImpl impl);
// Accepts the CLI spellings: cout, hash, sortmerge, bnl, choice.
CostModel parse_cost_model(std::string_view text);
JoinImpl parse_join_impl(std::string_view text);

struct LeftDeepPlan {
  // order[0] is the first outer operand, order[j + 1] the inner operand of
  // join j.
  std::vector<TableId> order;
  std::vector<JoinImpl> operators;  // empty, or one entry per join
  // Join at which each predicate is evaluated; empty when not tracked.
  std::vector<int> evaluated_at;
  // Columns present in the operands of each join; empty when not tracked.
  std::vector<std::vector<ColumnId>> retained_columns;

  int num_joins() const { return static_cast<int>(order.size()) - 1; }
};

// First join whose operands together contain every table of predicate p.
int earliest_evaluation(const Query& query, const std::vector<TableId>& order,
                        PredicateId p);

// Empty when the plan is valid for the query.
std::vector<std::string> validate(const Query& query, const LeftDeepPlan& plan);

std::string plan_to_json(const Query& query, const LeftDeepPlan& plan,
                         int indent = 2);
LeftDeepPlan plan_from_json(const Query& query, std::string_view text);

}  // namespace joinmilp

#endif  // JOINMILP_PLAN_HPP_
