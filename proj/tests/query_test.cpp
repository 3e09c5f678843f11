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

#include <cmath>
#include <set>
#include <utility>

#include "doctest.h"
#include "fixtures.hpp"
#include "joinmilp/error.hpp"
#include "joinmilp/query.hpp"
#include "oracles.hpp"

using namespace joinmilp;

namespace {

std::set<std::pair<int, int>> pairs(const Query& q) {
  std::set<std::pair<int, int>> out;
  for (const Predicate& p : q.predicates()) {
    out.insert({p.refs.front(), p.refs.back()});
  }
  return out;
}

}  // namespace

TEST_CASE("generator topology follows the join graph kind") {
  const Query chain = generate_random_query(4, JoinGraphKind::kChain, 7);
  CHECK(pairs(chain) == std::set<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}});
  const Query star = generate_random_query(4, JoinGraphKind::kStar, 7);
  CHECK(pairs(star) == std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}});
  const Query cycle = generate_random_query(4, JoinGraphKind::kCycle, 7);
  CHECK(cycle.num_predicates() == 4);
  CHECK(pairs(cycle) ==
        std::set<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  CHECK(cycle.kind() == JoinGraphKind::kCycle);
}

TEST_CASE("generator is deterministic and respects its ranges") {
  GeneratorOptions options;
  options.card_lo = 50.0;
  options.card_hi = 500.0;
  options.sel_lo = 0.01;
  options.sel_hi = 0.5;
  for (int n = 2; n <= 12; ++n) {
    for (JoinGraphKind kind :
         {JoinGraphKind::kChain, JoinGraphKind::kStar, JoinGraphKind::kCycle}) {
      const Query a = generate_random_query(n, kind, 42 + n, options);
      const Query b = generate_random_query(n, kind, 42 + n, options);
      CHECK(query_to_json(a) == query_to_json(b));
      const int expected_m =
          kind == JoinGraphKind::kCycle && n >= 3 ? n : n - 1;
      CHECK(a.num_predicates() == expected_m);
      for (const Table& t : a.tables()) {
        CHECK(t.cardinality >= 50.0);
        CHECK(t.cardinality <= 500.0);
      }
      for (const Predicate& p : a.predicates()) {
        CHECK(p.selectivity >= 0.01);
        CHECK(p.selectivity <= 0.5);
      }
    }
  }
  CHECK(query_to_json(generate_random_query(6, JoinGraphKind::kChain, 1)) !=
        query_to_json(generate_random_query(6, JoinGraphKind::kChain, 2)));
}

TEST_CASE("generator rejects bad parameters") {
  CHECK_THROWS_AS(generate_random_query(1, JoinGraphKind::kChain, 0),
                  InvalidInput);
  GeneratorOptions bad;
  bad.card_lo = 0.5;
  CHECK_THROWS_AS(generate_random_query(3, JoinGraphKind::kChain, 0, bad),
                  InvalidInput);
  bad = {};
  bad.sel_hi = 1.5;
  CHECK_THROWS_AS(generate_random_query(3, JoinGraphKind::kChain, 0, bad),
                  InvalidInput);
}

TEST_CASE("true cardinality of the three-table example") {
  const Query q = fixtures::three_tables();
  CHECK(q.true_cardinality(std::vector<TableId>{0, 1}) == doctest::Approx(1000));
  CHECK(q.true_cardinality(std::vector<TableId>{0}) == doctest::Approx(10));
  CHECK(q.true_cardinality(std::vector<TableId>{0, 1, 2}) ==
        doctest::Approx(100000));
  CHECK_THROWS_AS(q.true_cardinality(TableSet{0}), InvalidInput);
}

TEST_CASE("applicable predicates need every referenced table") {
  Query q({{"R", 10}, {"S", 10}, {"T", 10}},
          {{{0, 1}, 0.1, 0.0, {}}, {{0, 1, 2}, 0.5, 0.0, {}}});
  CHECK(q.applicable_predicates(make_table_set({0, 1})) ==
        std::vector<PredicateId>{0});
  CHECK(q.applicable_predicates(make_table_set({0, 2})).empty());
  CHECK(q.applicable_predicates(make_table_set({0, 1, 2})) ==
        std::vector<PredicateId>{0, 1});
}

TEST_CASE("true cardinality agrees with the reference on every subset") {
  for (int seed = 0; seed < 20; ++seed) {
    Query q = generate_random_query(6, JoinGraphKind::kCycle, seed);
    std::vector<CorrelatedGroup> groups = {{{0, 1}, 1.7}};
    q = Query(q.tables(), q.predicates(), groups);
    for (TableSet s = 1; s < (TableSet{1} << 6); ++s) {
      const std::vector<TableId> members = table_set_members(s);
      const double expected = oracle::cardinality(q, members);
      CHECK(q.true_cardinality(s) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("cardinality grows multiplicatively one table at a time") {
  const Query q = generate_random_query(6, JoinGraphKind::kStar, 3);
  for (TableSet s = 1; s < (TableSet{1} << 6); ++s) {
    for (TableId t = 0; t < 6; ++t) {
      if (s & (TableSet{1} << t)) continue;
      const TableSet bigger = s | (TableSet{1} << t);
      double factor = q.table(t).cardinality;
      for (PredicateId p : q.applicable_predicates(bigger)) {
        if ((q.predicate_tables(p) & s) != q.predicate_tables(p)) {
          factor *= q.predicate(p).selectivity;
        }
      }
      CHECK(q.true_cardinality(bigger) ==
            doctest::Approx(q.true_cardinality(s) * factor).epsilon(1e-12));
    }
  }
}

TEST_CASE("query validation") {
  CHECK_THROWS_AS(Query({{"R", 0.5}}, {}).validate(), InvalidInput);
  CHECK_THROWS_AS(Query({{"R", 10}, {"S", 10}}, {{{0, 1}, 0.0, 0.0, {}}}).validate(),
                  InvalidInput);
  CHECK_THROWS_AS(Query({{"R", 10}, {"S", 10}}, {{{0, 5}, 0.5, 0.0, {}}}).validate(),
                  InvalidInput);
  CHECK_THROWS_AS(Query({{"R", 10}, {"S", 10}}, {{{0, 1}, 0.5, 0.0, {}}},
                        {{{0}, 2.0}})
                      .validate(),
                  InvalidInput);
  CHECK_THROWS_AS(Query({{"R", 10}}, {}, {}, {{"a", 0, 4}}, {3}).validate(),
                  InvalidInput);
  CHECK_NOTHROW(fixtures::three_tables().validate());
}

TEST_CASE("query JSON round trip") {
  Query q({{"R", 10}, {"S", 1234.5678901234}, {"T", 3}},
          {{{0, 1}, 0.123456789012345, 2.5, {0}}, {{1, 2}, 0.5, 0.0, {}}},
          {{{0, 1}, 1.25}}, {{"r_a", 0, 4}, {"s_b", 1, 8}}, {1});
  q.set_kind(JoinGraphKind::kChain);
  const Query back = query_from_json(query_to_json(q));
  CHECK(query_to_json(back) == query_to_json(q));
  CHECK(back.table(1).cardinality == q.table(1).cardinality);
  CHECK(back.predicate(0).selectivity == q.predicate(0).selectivity);
  CHECK(back.kind() == JoinGraphKind::kChain);
  CHECK_THROWS_AS(query_from_json("{\"tables\": 3}"), ParseError);
  CHECK_THROWS_AS(query_from_json("not json"), ParseError);
}
