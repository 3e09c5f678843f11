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

// Reference computations for the tests. They read only the raw query fields
// and never call into the library's cost or cardinality code.

#ifndef JOINMILP_TESTS_ORACLES_HPP_
#define JOINMILP_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "joinmilp/query.hpp"

namespace oracle {

using joinmilp::Query;

inline bool contains_all(const std::vector<int>& set,
                         const std::vector<int>& items) {
  for (int x : items) {
    if (std::find(set.begin(), set.end(), x) == set.end()) return false;
  }
  return true;
}

// Calls f on every permutation of 0..n-1 in lexicographic order.
inline void for_each_permutation(int n,
                                 const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    f(p);
  } while (std::next_permutation(p.begin(), p.end()));
}

// Predicates whose tables all lie in `tables`.
inline std::vector<bool> applicable(const Query& q,
                                    const std::vector<int>& tables) {
  std::vector<bool> out(q.num_predicates());
  for (int p = 0; p < q.num_predicates(); ++p) {
    out[p] = contains_all(tables, q.predicates()[p].refs);
  }
  return out;
}

// Result size of joining `tables` with the predicates flagged in `applied`.
inline double cardinality(const Query& q, const std::vector<int>& tables,
                          const std::vector<bool>& applied) {
  double card = 1.0;
  for (int t : tables) card *= q.tables()[t].cardinality;
  for (int p = 0; p < q.num_predicates(); ++p) {
    if (applied[p]) card *= q.predicates()[p].selectivity;
  }
  for (const auto& g : q.groups()) {
    bool all = true;
    for (int p : g.members) all = all && applied[p];
    if (all) card *= g.correction;
  }
  return card;
}

inline double cardinality(const Query& q, const std::vector<int>& tables) {
  return cardinality(q, tables, applicable(q, tables));
}

// Largest rung not above card, treating card within a relative 1e-6 in log
// space below a rung as reaching it.
inline double ladder_floor(const std::vector<double>& rungs, double card,
                           double eps = 1e-6) {
  double best = 0.0;
  for (double r : rungs) {
    if (std::log10(card) >= std::log10(r) - eps) best = std::max(best, r);
  }
  return best;
}

// Sum of intermediate result sizes of a left-deep order, excluding the final
// result.
inline double cout_cost(const Query& q, const std::vector<int>& order) {
  double total = 0.0;
  for (std::size_t k = 2; k < order.size(); ++k) {
    total += cardinality(q, {order.begin(), order.begin() + k});
  }
  return total;
}

// Same sum with every intermediate size rounded down to the ladder.
inline double cout_cost_floored(const Query& q, const std::vector<int>& order,
                                const std::vector<double>& rungs) {
  double total = 0.0;
  for (std::size_t k = 2; k < order.size(); ++k) {
    total += ladder_floor(rungs, cardinality(q, {order.begin(), order.begin() + k}));
  }
  return total;
}

inline double min_over_orders(int n,
                              const std::function<double(const std::vector<int>&)>& f) {
  double best = std::numeric_limits<double>::infinity();
  for_each_permutation(n, [&](const std::vector<int>& p) { best = std::min(best, f(p)); });
  return best;
}

// Hash-join cost 3 * (outer pages + inner pages) summed over all joins, with
// pages = ceil(cardinality * tup_size / page_size).
inline double hash_cost(const Query& q, const std::vector<int>& order,
                        double tup_size = 100.0, double page_size = 8192.0) {
  auto pages = [&](double card) { return std::ceil(card * tup_size / page_size); };
  double total = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double outer = cardinality(q, {order.begin(), order.begin() + k});
    total += 3.0 * (pages(outer) + pages(q.tables()[order[k]].cardinality));
  }
  return total;
}

// First join (0-based) whose operands contain every table of predicate p.
inline int earliest_join(const Query& q, const std::vector<int>& order, int p) {
  for (std::size_t j = 0; j + 1 < order.size(); ++j) {
    if (contains_all({order.begin(), order.begin() + j + 2}, q.predicates()[p].refs)) {
      return static_cast<int>(j);
    }
  }
  return -1;
}

// C_out plus per-tuple evaluation costs when predicate p is evaluated at join
// at[p] (never before its tables are joined). A predicate evaluated at join j
// filters the result of join j and is charged eval_cost per tuple of the
// outer operand of join j.
inline double cout_with_evaluation(const Query& q, const std::vector<int>& order,
                                   const std::vector<int>& at) {
  const int joins = static_cast<int>(order.size()) - 1;
  std::vector<double> outer(joins);
  for (int j = 0; j < joins; ++j) {
    std::vector<bool> applied(q.num_predicates());
    for (int p = 0; p < q.num_predicates(); ++p) applied[p] = at[p] < j;
    outer[j] = cardinality(q, {order.begin(), order.begin() + j + 1}, applied);
  }
  double total = 0.0;
  for (int j = 1; j < joins; ++j) total += outer[j];
  for (int p = 0; p < q.num_predicates(); ++p) {
    total += q.predicates()[p].eval_cost * outer[at[p]];
  }
  return total;
}

// Cheapest plan over all orders and evaluation points; with `earliest_only`
// every predicate is evaluated as soon as its tables are joined.
inline double best_with_evaluation(const Query& q, bool earliest_only) {
  double best = std::numeric_limits<double>::infinity();
  const int joins = q.num_tables() - 1;
  for_each_permutation(q.num_tables(), [&](const std::vector<int>& order) {
    std::vector<int> lo(q.num_predicates());
    for (int p = 0; p < q.num_predicates(); ++p) lo[p] = earliest_join(q, order, p);
    std::vector<int> at = lo;
    while (true) {
      best = std::min(best, cout_with_evaluation(q, order, at));
      if (earliest_only) break;
      int p = 0;
      while (p < q.num_predicates() && at[p] == joins - 1) {
        at[p] = lo[p];
        ++p;
      }
      if (p == q.num_predicates()) break;
      ++at[p];
    }
  });
  return best;
}

}  // namespace oracle

#endif  // JOINMILP_TESTS_ORACLES_HPP_
