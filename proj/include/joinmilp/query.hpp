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

// Query model: tables, predicates, correlated predicate groups and columns,
// plus the random benchmark query generator for chain/star/cycle graphs.

#ifndef JOINMILP_QUERY_HPP_
#define JOINMILP_QUERY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace joinmilp {

using TableId = int;
using PredicateId = int;
using ColumnId = int;

// Bit set over table ids; queries handled by exact methods have n <= 64.
using TableSet = std::uint64_t;

struct Table {
  std::string name;
  double cardinality = 1.0;  // row count, >= 1
};

struct Predicate {
  std::vector<TableId> refs;  // sorted, unique, non-empty
  double selectivity = 1.0;   // in (0, 1]
  double eval_cost = 0.0;     // per-tuple evaluation cost, >= 0
  // Columns the predicate reads; only consulted when projection is modelled.
  std::vector<ColumnId> columns;
};

// A set of predicates whose joint selectivity differs from the product of
// the individual selectivities. The correction multiplies that product.
struct CorrelatedGroup {
  std::vector<PredicateId> members;  // >= 2 entries
  double correction = 1.0;           // > 0, may exceed 1
};

struct Column {
  std::string name;
  TableId table = 0;
  int byte_size = 4;
};

enum class JoinGraphKind { kChain, kStar, kCycle };

std::string_view to_string(JoinGraphKind kind);
JoinGraphKind parse_join_graph_kind(std::string_view text);

class Query {
 public:
  Query() = default;
  Query(std::vector<Table> tables, std::vector<Predicate> predicates,
        std::vector<CorrelatedGroup> groups = {},
        std::vector<Column> columns = {},
        std::vector<ColumnId> output_columns = {});

  int num_tables() const { return static_cast<int>(tables_.size()); }
  int num_predicates() const { return static_cast<int>(predicates_.size()); }
  int num_columns() const { return static_cast<int>(columns_.size()); }

  const std::vector<Table>& tables() const { return tables_; }
  const std::vector<Predicate>& predicates() const { return predicates_; }
  const std::vector<CorrelatedGroup>& groups() const { return groups_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<ColumnId>& output_columns() const {
    return output_columns_;
  }
  const Table& table(TableId t) const { return tables_.at(t); }
  const Predicate& predicate(PredicateId p) const { return predicates_.at(p); }

  // Generator metadata; absent for hand-written queries.
  const std::optional<JoinGraphKind>& kind() const { return kind_; }
  void set_kind(std::optional<JoinGraphKind> kind) { kind_ = kind; }

  TableSet all_tables() const;
  TableSet predicate_tables(PredicateId p) const;

  // Predicates whose referenced tables are all contained in `tables`.
  std::vector<PredicateId> applicable_predicates(TableSet tables) const;

  // Product of table cardinalities, applicable predicate selectivities and the
  // corrections of groups whose members are all applicable.
  double true_cardinality(TableSet tables) const;
  double true_cardinality(const std::vector<TableId>& tables) const;

  // Product of all table cardinalities (the largest possible result size).
  double cardinality_product() const;

  // Throws InvalidInput describing the first violated invariant.
  void validate() const;

 private:
  std::vector<Table> tables_;
  std::vector<Predicate> predicates_;
  std::vector<CorrelatedGroup> groups_;
  std::vector<Column> columns_;
  std::vector<ColumnId> output_columns_;
  std::optional<JoinGraphKind> kind_;
};

TableSet make_table_set(const std::vector<TableId>& tables);
std::vector<TableId> table_set_members(TableSet set);

struct GeneratorOptions {
  double card_lo = 10.0;
  double card_hi = 1e5;
  double sel_lo = 1e-3;
  double sel_hi = 1.0;
};

// Deterministic for a fixed seed. Cardinalities and selectivities are drawn
// log-uniformly from the configured ranges.
Query generate_random_query(int n, JoinGraphKind kind, std::uint64_t seed,
                            const GeneratorOptions& options = {});

// JSON document with fields tables, predicates, groups, columns,
// outputColumns (and an optional kind).
std::string query_to_json(const Query& query, int indent = 2);
Query query_from_json(std::string_view text);

}  // namespace joinmilp

#endif  // JOINMILP_QUERY_HPP_
