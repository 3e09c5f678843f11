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

#include "joinmilp/plan.hpp"

#include <algorithm>
#include <map>

#include "joinmilp/error.hpp"
#include "json.hpp"

namespace joinmilp {

using nlohmann::json;

std::string_view to_string(CostModel model) {
  switch (model) {
    case CostModel::kCout: return "cout";
    case CostModel::kHashJoin: return "hash";
    case CostModel::kSortMerge: return "sortmerge";
    case CostModel::kBlockNestedLoop: return "bnl";
    case CostModel::kOperatorChoice: return "choice";
  }
  return "?";
}

std::string_view to_string(JoinImpl impl) {
  switch (impl) {
    case JoinImpl::kHashJoin: return "hash";
    case JoinImpl::kSortMerge: return "sortmerge";
    case JoinImpl::kBlockNestedLoop: return "bnl";
  }
  return "?";
}

CostModel parse_cost_model(std::string_view text) {
  if (text == "cout") return CostModel::kCout;
  if (text == "hash") return CostModel::kHashJoin;
  if (text == "sortmerge") return CostModel::kSortMerge;
  if (text == "bnl") return CostModel::kBlockNestedLoop;
  if (text == "choice") return CostModel::kOperatorChoice;
  throw InvalidInput("unknown cost model '" + std::string(text) +
                     "' (expected cout, hash, sortmerge, bnl or choice)");
}

JoinImpl parse_join_impl(std::string_view text) {
  if (text == "hash") return JoinImpl::kHashJoin;
  if (text == "sortmerge") return JoinImpl::kSortMerge;
  if (text == "bnl") return JoinImpl::kBlockNestedLoop;
  throw InvalidInput("unknown join implementation '" + std::string(text) + "'");
}

int earliest_evaluation(const Query& query, const std::vector<TableId>& order,
                        PredicateId p) {
  const TableSet refs = query.predicate_tables(p);
  TableSet seen = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    seen |= TableSet{1} << order[k];
    if ((seen & refs) == refs) return std::max(0, static_cast<int>(k) - 1);
  }
  return static_cast<int>(order.size()) - 2;
}

std::vector<std::string> validate(const Query& query, const LeftDeepPlan& plan) {
  std::vector<std::string> out;
  const int n = query.num_tables();
  std::vector<int> seen(n, 0);
  bool permutation = static_cast<int>(plan.order.size()) == n;
  for (TableId t : plan.order) {
    if (t < 0 || t >= n || seen[t]++) permutation = false;
  }
  if (!permutation) {
    out.push_back("order is not a permutation of the query tables");
    return out;
  }
  const int joins = plan.num_joins();
  if (!plan.operators.empty() &&
      static_cast<int>(plan.operators.size()) != joins) {
    out.push_back("operators must list one implementation per join");
  }
  if (!plan.evaluated_at.empty()) {
    if (static_cast<int>(plan.evaluated_at.size()) != query.num_predicates()) {
      out.push_back("evaluated_at must list one join per predicate");
    } else {
      for (PredicateId p = 0; p < query.num_predicates(); ++p) {
        const int at = plan.evaluated_at[p];
        const int earliest = earliest_evaluation(query, plan.order, p);
        if (at < earliest) {
          out.push_back("predicate " + std::to_string(p) +
                        " evaluated at join " + std::to_string(at) +
                        " before its tables are joined (earliest " +
                        std::to_string(earliest) + ")");
        } else if (at >= joins) {
          out.push_back("predicate " + std::to_string(p) +
                        " evaluated after the last join");
        }
      }
    }
  }
  if (!plan.retained_columns.empty()) {
    if (static_cast<int>(plan.retained_columns.size()) != joins) {
      out.push_back("retained_columns must list one column set per join");
      return out;
    }
    std::vector<int> position(n);
    for (int k = 0; k < n; ++k) position[plan.order[k]] = k;
    auto retained = [&](int j, ColumnId l) {
      const auto& cols = plan.retained_columns[j];
      return std::find(cols.begin(), cols.end(), l) != cols.end();
    };
    for (int j = 0; j < joins; ++j) {
      for (ColumnId l : plan.retained_columns[j]) {
        if (l < 0 || l >= query.num_columns()) {
          out.push_back("unknown column " + std::to_string(l));
          continue;
        }
        const int pos = position[query.columns()[l].table];
        if (pos > j + 1) {
          out.push_back("column " + query.columns()[l].name + " at join " +
                        std::to_string(j) + " before its table is joined");
        } else if (j > 0 && pos <= j && !retained(j - 1, l)) {
          out.push_back("column " + query.columns()[l].name +
                        " reappears at join " + std::to_string(j) +
                        " after being dropped");
        }
      }
    }
    for (ColumnId l : query.output_columns()) {
      if (joins > 0 && !retained(joins - 1, l)) {
        out.push_back("output column " + query.columns()[l].name +
                      " missing from the final join");
      }
    }
    if (!plan.evaluated_at.empty() &&
        static_cast<int>(plan.evaluated_at.size()) == query.num_predicates()) {
      for (PredicateId p = 0; p < query.num_predicates(); ++p) {
        const int at = plan.evaluated_at[p];
        if (at < 0 || at >= joins) continue;
        for (ColumnId l : query.predicate(p).columns) {
          if (!retained(at, l)) {
            out.push_back("predicate " + std::to_string(p) + " needs column " +
                          query.columns()[l].name + " at join " +
                          std::to_string(at));
          }
        }
      }
    }
  }
  return out;
}

std::string plan_to_json(const Query& query, const LeftDeepPlan& plan,
                         int indent) {
  json doc;
  doc["order"] = json::array();
  for (TableId t : plan.order) doc["order"].push_back(query.table(t).name);
  doc["operators"] = json::array();
  for (JoinImpl op : plan.operators) doc["operators"].push_back(to_string(op));
  doc["evaluatedAt"] = json::object();
  for (std::size_t p = 0; p < plan.evaluated_at.size(); ++p) {
    doc["evaluatedAt"][std::to_string(p)] = plan.evaluated_at[p];
  }
  if (!plan.retained_columns.empty()) {
    json cols = json::array();
    for (const auto& set : plan.retained_columns) {
      json names = json::array();
      for (ColumnId l : set) names.push_back(query.columns().at(l).name);
      cols.push_back(std::move(names));
    }
    doc["retainedColumns"] = std::move(cols);
  }
  return doc.dump(indent);
}

LeftDeepPlan plan_from_json(const Query& query, std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan JSON: ") + e.what());
  }
  std::map<std::string, TableId> table_by_name;
  for (TableId t = 0; t < query.num_tables(); ++t) {
    table_by_name[query.table(t).name] = t;
  }
  std::map<std::string, ColumnId> column_by_name;
  for (ColumnId l = 0; l < query.num_columns(); ++l) {
    column_by_name[query.columns()[l].name] = l;
  }
  LeftDeepPlan plan;
  try {
    for (const json& name : doc.at("order")) {
      auto it = table_by_name.find(name.get<std::string>());
      if (it == table_by_name.end()) {
        throw ParseError("plan JSON: unknown table " + name.dump());
      }
      plan.order.push_back(it->second);
    }
    for (const json& op : doc.value("operators", json::array())) {
      plan.operators.push_back(parse_join_impl(op.get<std::string>()));
    }
    const json at = doc.value("evaluatedAt", json::object());
    if (!at.empty()) {
      plan.evaluated_at.assign(query.num_predicates(), -1);
      for (auto it = at.begin(); it != at.end(); ++it) {
        const int p = std::stoi(it.key());
        if (p < 0 || p >= query.num_predicates()) {
          throw ParseError("plan JSON: unknown predicate " + it.key());
        }
        plan.evaluated_at[p] = it.value().get<int>();
      }
    }
    for (const json& set : doc.value("retainedColumns", json::array())) {
      std::vector<ColumnId> cols;
      for (const json& name : set) {
        auto it = column_by_name.find(name.get<std::string>());
        if (it == column_by_name.end()) {
          throw ParseError("plan JSON: unknown column " + name.dump());
        }
        cols.push_back(it->second);
      }
      plan.retained_columns.push_back(std::move(cols));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan JSON: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ParseError("plan JSON: predicate keys must be integers");
  }
  return plan;
}

}  // namespace joinmilp
