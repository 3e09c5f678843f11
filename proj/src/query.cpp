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

#include "joinmilp/query.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "joinmilp/error.hpp"
#include "json.hpp"

namespace joinmilp {

std::string_view to_string(JoinGraphKind kind) {
  switch (kind) {
    case JoinGraphKind::kChain:
      return "chain";
    case JoinGraphKind::kStar:
      return "star";
    case JoinGraphKind::kCycle:
      return "cycle";
  }
  return "chain";
}

JoinGraphKind parse_join_graph_kind(std::string_view text) {
  if (text == "chain") return JoinGraphKind::kChain;
  if (text == "star") return JoinGraphKind::kStar;
  if (text == "cycle") return JoinGraphKind::kCycle;
  throw InvalidInput("unknown join graph kind '" + std::string(text) +
                     "' (expected chain, star or cycle)");
}

TableSet make_table_set(const std::vector<TableId>& tables) {
  TableSet set = 0;
  for (TableId t : tables) {
    if (t < 0 || t >= 64) throw InvalidInput("table id out of range");
    set |= TableSet{1} << t;
  }
  return set;
}

std::vector<TableId> table_set_members(TableSet set) {
  std::vector<TableId> out;
  while (set != 0) {
    out.push_back(std::countr_zero(set));
    set &= set - 1;
  }
  return out;
}

Query::Query(std::vector<Table> tables, std::vector<Predicate> predicates,
             std::vector<CorrelatedGroup> groups, std::vector<Column> columns,
             std::vector<ColumnId> output_columns)
    : tables_(std::move(tables)),
      predicates_(std::move(predicates)),
      groups_(std::move(groups)),
      columns_(std::move(columns)),
      output_columns_(std::move(output_columns)) {
  for (Predicate& p : predicates_) {
    std::sort(p.refs.begin(), p.refs.end());
    p.refs.erase(std::unique(p.refs.begin(), p.refs.end()), p.refs.end());
  }
  validate();
}

void Query::validate() const {
  const int n = num_tables();
  if (n < 1) throw InvalidInput("query needs at least one table");
  for (int t = 0; t < n; ++t) {
    const double card = tables_[t].cardinality;
    if (!std::isfinite(card) || card < 1.0) {
      throw InvalidInput("table " + std::to_string(t) +
                         " has cardinality below 1");
    }
  }
  for (int p = 0; p < num_predicates(); ++p) {
    const Predicate& pred = predicates_[p];
    if (pred.refs.empty()) {
      throw InvalidInput("predicate " + std::to_string(p) + " has no tables");
    }
    for (TableId t : pred.refs) {
      if (t < 0 || t >= n) {
        throw InvalidInput("predicate " + std::to_string(p) +
                           " references unknown table " + std::to_string(t));
      }
    }
    if (!(pred.selectivity > 0.0 && pred.selectivity <= 1.0)) {
      throw InvalidInput("predicate " + std::to_string(p) +
                         " selectivity outside (0, 1]");
    }
    if (!(pred.eval_cost >= 0.0) || !std::isfinite(pred.eval_cost)) {
      throw InvalidInput("predicate " + std::to_string(p) +
                         " has negative evaluation cost");
    }
    for (ColumnId c : pred.columns) {
      if (c < 0 || c >= num_columns()) {
        throw InvalidInput("predicate " + std::to_string(p) +
                           " references unknown column");
      }
    }
  }
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const CorrelatedGroup& group = groups_[g];
    if (group.members.size() < 2) {
      throw InvalidInput("correlated group " + std::to_string(g) +
                         " needs at least two predicates");
    }
    if (!(group.correction > 0.0) || !std::isfinite(group.correction)) {
      throw InvalidInput("correlated group " + std::to_string(g) +
                         " correction must be positive");
    }
    double joint = group.correction;
    for (PredicateId p : group.members) {
      if (p < 0 || p >= num_predicates()) {
        throw InvalidInput("correlated group " + std::to_string(g) +
                           " references unknown predicate");
      }
      joint *= predicates_[p].selectivity;
    }
    if (joint > 1.0 + 1e-12) {
      throw InvalidInput("correlated group " + std::to_string(g) +
                         " yields a joint selectivity above 1");
    }
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].table < 0 || columns_[c].table >= n) {
      throw InvalidInput("column " + std::to_string(c) +
                         " belongs to an unknown table");
    }
    if (columns_[c].byte_size <= 0) {
      throw InvalidInput("column " + std::to_string(c) +
                         " must have a positive byte size");
    }
  }
  for (ColumnId c : output_columns_) {
    if (c < 0 || c >= num_columns()) {
      throw InvalidInput("output column " + std::to_string(c) +
                         " is not a query column");
    }
  }
}

TableSet Query::all_tables() const {
  const int n = num_tables();
  return n >= 64 ? ~TableSet{0} : (TableSet{1} << n) - 1;
}

TableSet Query::predicate_tables(PredicateId p) const {
  return make_table_set(predicates_.at(p).refs);
}

std::vector<PredicateId> Query::applicable_predicates(TableSet tables) const {
  std::vector<PredicateId> out;
  for (int p = 0; p < num_predicates(); ++p) {
    const TableSet refs = predicate_tables(p);
    if ((refs & tables) == refs) out.push_back(p);
  }
  return out;
}

double Query::true_cardinality(TableSet tables) const {
  if (tables == 0) throw InvalidInput("cardinality of an empty table set");
  if ((tables & ~all_tables()) != 0) {
    throw InvalidInput("table set references unknown tables");
  }
  double card = 1.0;
  for (TableId t : table_set_members(tables)) card *= tables_[t].cardinality;
  std::vector<char> applicable(predicates_.size(), 0);
  for (PredicateId p : applicable_predicates(tables)) {
    applicable[p] = 1;
    card *= predicates_[p].selectivity;
  }
  for (const CorrelatedGroup& group : groups_) {
    const bool active =
        std::all_of(group.members.begin(), group.members.end(),
                    [&](PredicateId p) { return applicable[p] != 0; });
    if (active) card *= group.correction;
  }
  return card;
}

double Query::true_cardinality(const std::vector<TableId>& tables) const {
  return true_cardinality(make_table_set(tables));
}

double Query::cardinality_product() const {
  double product = 1.0;
  for (const Table& t : tables_) product *= t.cardinality;
  return product;
}

Query generate_random_query(int n, JoinGraphKind kind, std::uint64_t seed,
                            const GeneratorOptions& options) {
  if (n < 2) throw InvalidInput("random queries need at least two tables");
  if (!(options.card_lo >= 1.0 && options.card_lo <= options.card_hi) ||
      !std::isfinite(options.card_hi)) {
    throw InvalidInput("cardinality range must satisfy 1 <= lo <= hi");
  }
  if (!(options.sel_lo > 0.0 && options.sel_lo <= options.sel_hi &&
        options.sel_hi <= 1.0)) {
    throw InvalidInput("selectivity range must satisfy 0 < lo <= hi <= 1");
  }
  std::mt19937_64 rng(seed);
  auto log_uniform = [&rng](double lo, double hi) {
    if (lo == hi) return lo;
    std::uniform_real_distribution<double> dist(std::log(lo), std::log(hi));
    return std::clamp(std::exp(dist(rng)), lo, hi);
  };

  std::vector<Table> tables(n);
  for (int t = 0; t < n; ++t) {
    tables[t].name = "T" + std::to_string(t);
    tables[t].cardinality = log_uniform(options.card_lo, options.card_hi);
  }
  std::vector<std::pair<TableId, TableId>> edges;
  switch (kind) {
    case JoinGraphKind::kChain:
      for (int t = 0; t + 1 < n; ++t) edges.emplace_back(t, t + 1);
      break;
    case JoinGraphKind::kStar:
      for (int t = 1; t < n; ++t) edges.emplace_back(0, t);
      break;
    case JoinGraphKind::kCycle:
      for (int t = 0; t + 1 < n; ++t) edges.emplace_back(t, t + 1);
      if (n >= 3) edges.emplace_back(n - 1, 0);
      break;
  }
  std::vector<Predicate> predicates;
  predicates.reserve(edges.size());
  for (auto [a, b] : edges) {
    Predicate p;
    p.refs = {a, b};
    p.selectivity = log_uniform(options.sel_lo, options.sel_hi);
    predicates.push_back(std::move(p));
  }
  Query query(std::move(tables), std::move(predicates));
  query.set_kind(kind);
  return query;
}

namespace {

using nlohmann::json;

json query_document(const Query& query) {
  json doc;
  doc["tables"] = json::array();
  for (const Table& t : query.tables()) {
    doc["tables"].push_back({{"name", t.name}, {"cardinality", t.cardinality}});
  }
  doc["predicates"] = json::array();
  for (const Predicate& p : query.predicates()) {
    json entry = {{"refs", p.refs},
                  {"selectivity", p.selectivity},
                  {"evalCost", p.eval_cost}};
    if (!p.columns.empty()) entry["columns"] = p.columns;
    doc["predicates"].push_back(std::move(entry));
  }
  doc["groups"] = json::array();
  for (const CorrelatedGroup& g : query.groups()) {
    doc["groups"].push_back(
        {{"members", g.members}, {"correction", g.correction}});
  }
  doc["columns"] = json::array();
  for (const Column& c : query.columns()) {
    doc["columns"].push_back(
        {{"name", c.name}, {"table", c.table}, {"bytes", c.byte_size}});
  }
  doc["outputColumns"] = query.output_columns();
  if (query.kind()) doc["kind"] = std::string(to_string(*query.kind()));
  return doc;
}

}  // namespace

std::string query_to_json(const Query& query, int indent) {
  return query_document(query).dump(indent);
}

Query query_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("query JSON: ") + e.what());
  }
  try {
    std::vector<Table> tables;
    for (const json& t : doc.at("tables")) {
      Table table;
      table.name = t.value("name", "T" + std::to_string(tables.size()));
      table.cardinality = t.at("cardinality").get<double>();
      tables.push_back(std::move(table));
    }
    std::vector<Predicate> predicates;
    for (const json& p : doc.value("predicates", json::array())) {
      Predicate pred;
      pred.refs = p.at("refs").get<std::vector<TableId>>();
      pred.selectivity = p.at("selectivity").get<double>();
      pred.eval_cost = p.value("evalCost", 0.0);
      pred.columns = p.value("columns", std::vector<ColumnId>{});
      predicates.push_back(std::move(pred));
    }
    std::vector<CorrelatedGroup> groups;
    for (const json& g : doc.value("groups", json::array())) {
      groups.push_back({g.at("members").get<std::vector<PredicateId>>(),
                        g.at("correction").get<double>()});
    }
    std::vector<Column> columns;
    for (const json& c : doc.value("columns", json::array())) {
      Column column;
      column.name = c.value("name", "c" + std::to_string(columns.size()));
      column.table = c.at("table").get<TableId>();
      column.byte_size = c.at("bytes").get<int>();
      columns.push_back(std::move(column));
    }
    auto output = doc.value("outputColumns", std::vector<ColumnId>{});
    Query query(std::move(tables), std::move(predicates), std::move(groups),
                std::move(columns), std::move(output));
    if (doc.contains("kind")) {
      query.set_kind(parse_join_graph_kind(doc.at("kind").get<std::string>()));
    }
    return query;
  } catch (const json::exception& e) {
    throw ParseError(std::string("query JSON: ") + e.what());
  }
}

}  // namespace joinmilp
