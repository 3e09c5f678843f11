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

#include "joinmilp/baseline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <new>
#include <numeric>

#include "joinmilp/error.hpp"

namespace joinmilp {
namespace {

double sort_merge_pass(double pages) {
  const double log_term = pages <= 1.0 ? 0.0 : std::ceil(std::log2(pages) - 1e-12);
  return 2.0 * pages * log_term + pages;
}

void check_model(const CostModelExact& model) {
  if (!(model.tup_size > 0.0) || !(model.page_size > 0.0) ||
      !(model.buffer > 0.0)) {
    throw InvalidInput("tup_size, page_size and buffer must be positive");
  }
  if (model.model == CostModel::kOperatorChoice &&
      model.implementations.empty()) {
    throw InvalidInput("operator choice needs at least one implementation");
  }
}

// Cardinality of a table subset, multiplied in the same order as
// Query::true_cardinality so both agree bit for bit.
class SubsetCardinality {
 public:
  explicit SubsetCardinality(const Query& query) : query_(query) {
    for (PredicateId p = 0; p < query.num_predicates(); ++p) {
      pred_masks_.push_back(query.predicate_tables(p));
    }
  }

  double operator()(TableSet set) const {
    double card = 1.0;
    for (TableSet rest = set; rest != 0; rest &= rest - 1) {
      card *= query_.tables()[std::countr_zero(rest)].cardinality;
    }
    for (std::size_t p = 0; p < pred_masks_.size(); ++p) {
      if ((pred_masks_[p] & set) == pred_masks_[p]) {
        card *= query_.predicates()[p].selectivity;
      }
    }
    for (const CorrelatedGroup& g : query_.groups()) {
      bool all = true;
      for (PredicateId p : g.members) {
        all = all && (pred_masks_[p] & set) == pred_masks_[p];
      }
      if (all) card *= g.correction;
    }
    return card;
  }

  // Predicates whose tables are all in `after` but not all in `before`.
  double evaluation_cost(TableSet before, TableSet after, double outer) const {
    double cost = 0.0;
    for (std::size_t p = 0; p < pred_masks_.size(); ++p) {
      const TableSet m = pred_masks_[p];
      if ((m & after) == m && (m & before) != m) {
        cost += query_.predicates()[p].eval_cost * outer;
      }
    }
    return cost;
  }

 private:
  const Query& query_;
  std::vector<TableSet> pred_masks_;
};

// Cost of joining table t to the outer operand S (|S| >= 1).
double step_cost(const Query& query, const CostModelExact& model,
                 const SubsetCardinality& card, TableSet outer, TableId t,
                 double outer_card) {
  const double inner_card = query.tables()[t].cardinality;
  double cost = 0.0;
  switch (model.model) {
    case CostModel::kCout:
      cost = std::popcount(outer) >= 2 ? outer_card : 0.0;
      break;
    case CostModel::kHashJoin:
      cost = model.join_cost(JoinImpl::kHashJoin, outer_card, inner_card);
      break;
    case CostModel::kSortMerge:
      cost = model.join_cost(JoinImpl::kSortMerge, outer_card, inner_card);
      break;
    case CostModel::kBlockNestedLoop:
      cost = model.join_cost(JoinImpl::kBlockNestedLoop, outer_card, inner_card);
      break;
    case CostModel::kOperatorChoice: {
      cost = std::numeric_limits<double>::infinity();
      for (JoinImpl impl : model.implementations) {
        cost = std::min(cost, model.join_cost(impl, outer_card, inner_card));
      }
      break;
    }
  }
  if (model.include_evaluation_cost) {
    cost += card.evaluation_cost(outer, outer | (TableSet{1} << t), outer_card);
  }
  return cost;
}

}  // namespace

CostModelExact CostModelExact::from(const FormulationConfig& config) {
  CostModelExact model;
  model.model = config.cost_model;
  model.implementations = config.implementations;
  model.tup_size = config.tup_size;
  model.page_size = config.page_size;
  model.buffer = config.buffer;
  model.include_evaluation_cost = config.extensions.expensive_predicates;
  return model;
}

double CostModelExact::pages(double cardinality) const {
  if (cardinality <= 0.0) return 0.0;
  return std::ceil(cardinality * tup_size / page_size - 1e-9);
}

double CostModelExact::join_cost(JoinImpl impl, double outer_card,
                                 double inner_card) const {
  const double po = pages(outer_card);
  const double pi = pages(inner_card);
  switch (impl) {
    case JoinImpl::kHashJoin:
      return 3.0 * (po + pi);
    case JoinImpl::kSortMerge:
      return sort_merge_pass(po) + sort_merge_pass(pi);
    case JoinImpl::kBlockNestedLoop:
      return std::ceil(po / buffer - 1e-12) * pi;
  }
  return 0.0;
}

PlanCost exact_plan_cost(const Query& query, const LeftDeepPlan& plan,
                         const CostModelExact& model) {
  check_model(model);
  const std::vector<std::string> problems = validate(query, plan);
  if (!problems.empty()) throw InvalidInput("invalid plan: " + problems.front());
  const int joins = plan.num_joins();
  PlanCost out;
  out.per_join.assign(joins, 0.0);
  std::vector<double> outer_cards(joins);
  TableSet outer = 0;
  for (int j = 0; j < joins; ++j) {
    outer |= TableSet{1} << plan.order[j];
    const double outer_card = query.true_cardinality(outer);
    outer_cards[j] = outer_card;
    const double inner_card = query.table(plan.order[j + 1]).cardinality;
    double cost = 0.0;
    if (model.model == CostModel::kCout) {
      cost = j >= 1 ? outer_card : 0.0;
    } else if (model.model == CostModel::kOperatorChoice) {
      if (!plan.operators.empty()) {
        cost = model.join_cost(plan.operators[j], outer_card, inner_card);
      } else {
        cost = std::numeric_limits<double>::infinity();
        for (JoinImpl impl : model.implementations) {
          cost = std::min(cost, model.join_cost(impl, outer_card, inner_card));
        }
      }
    } else {
      const JoinImpl impl = model.model == CostModel::kHashJoin ? JoinImpl::kHashJoin
                            : model.model == CostModel::kSortMerge
                                ? JoinImpl::kSortMerge
                                : JoinImpl::kBlockNestedLoop;
      cost = model.join_cost(impl, outer_card, inner_card);
    }
    out.per_join[j] = cost;
  }
  if (model.include_evaluation_cost) {
    for (PredicateId p = 0; p < query.num_predicates(); ++p) {
      const int at = plan.evaluated_at.empty()
                         ? earliest_evaluation(query, plan.order, p)
                         : plan.evaluated_at[p];
      out.per_join[at] += query.predicate(p).eval_cost * outer_cards[at];
    }
  }
  out.total = std::accumulate(out.per_join.begin(), out.per_join.end(), 0.0);
  return out;
}

LeftDeepPlan optimize_dp(const Query& query, const CostModelExact& model) {
  check_model(model);
  query.validate();
  const int n = query.num_tables();
  if (n < 2) throw InvalidInput("join ordering needs at least two tables");
  if (n > kMaxDpTables) {
    throw CapacityError("dynamic programming supports at most " +
                        std::to_string(kMaxDpTables) + " tables (got " +
                        std::to_string(n) + ")");
  }
  const TableSet all = (TableSet{1} << n) - 1;
  std::vector<double> best;
  try {
    best.assign(static_cast<std::size_t>(all) + 1, 0.0);
  } catch (const std::bad_alloc&) {
    throw CapacityError("not enough memory for the subset table of " +
                        std::to_string(n) + " tables");
  }
  const SubsetCardinality card(query);
  // best[S]: cheapest way to join the remaining tables onto outer operand S.
  for (TableSet s = all - 1; s >= 1; --s) {
    const double outer_card = card(s);
    double value = std::numeric_limits<double>::infinity();
    for (TableId t = 0; t < n; ++t) {
      if ((s >> t) & 1) continue;
      const TableSet next = s | (TableSet{1} << t);
      value = std::min(value, step_cost(query, model, card, s, t, outer_card) +
                                  best[next]);
    }
    best[s] = value;
  }
  LeftDeepPlan plan;
  TableId first = 0;
  for (TableId t = 1; t < n; ++t) {
    if (best[TableSet{1} << t] < best[TableSet{1} << first]) first = t;
  }
  plan.order.push_back(first);
  TableSet s = TableSet{1} << first;
  while (s != all) {
    const double outer_card = card(s);
    TableId pick = -1;
    double value = std::numeric_limits<double>::infinity();
    for (TableId t = 0; t < n; ++t) {
      if ((s >> t) & 1) continue;
      const double v = step_cost(query, model, card, s, t, outer_card) +
                       best[s | (TableSet{1} << t)];
      if (v < value) {
        value = v;
        pick = t;
      }
    }
    plan.order.push_back(pick);
    s |= TableSet{1} << pick;
  }
  return plan;
}

LeftDeepPlan optimize_bruteforce(const Query& query, const CostModelExact& model) {
  check_model(model);
  query.validate();
  const int n = query.num_tables();
  if (n < 2) throw InvalidInput("join ordering needs at least two tables");
  if (n > kMaxBruteForceTables) {
    throw CapacityError("brute force supports at most " +
                        std::to_string(kMaxBruteForceTables) + " tables");
  }
  LeftDeepPlan candidate;
  candidate.order.resize(n);
  std::iota(candidate.order.begin(), candidate.order.end(), 0);
  LeftDeepPlan best = candidate;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    const double cost = exact_plan_cost(query, candidate, model).total;
    if (cost < best_cost) {
      best_cost = cost;
      best.order = candidate.order;
    }
  } while (std::next_permutation(candidate.order.begin(), candidate.order.end()));
  return best;
}

}  // namespace joinmilp
