# Copyright 2026 The joinmilp Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import itertools
import json
import math

import pytest

joinmilp = pytest.importorskip("joinmilp")

THREE_TABLES = json.dumps({
    "tables": [
        {"name": "R", "cardinality": 10},
        {"name": "S", "cardinality": 100},
        {"name": "T", "cardinality": 1000},
    ],
    "predicates": [
        {"refs": [0, 1], "selectivity": 1.0},
        {"refs": [1, 2], "selectivity": 1.0},
    ],
})


def brute_force_cout(query):
    best = math.inf
    for order in itertools.permutations(range(query.num_tables)):
        best = min(best, joinmilp.plan_cost(query, list(order)))
    return best


def test_count_model_closed_form():
    assert joinmilp.count_model(3, 1, 2) == (24, 26)
    with pytest.raises(ValueError):
        joinmilp.count_model(1, 0, 1)


def test_query_json_round_trip():
    q = joinmilp.Query.from_json(THREE_TABLES)
    assert q.num_tables == 3
    assert q.table_names == ["R", "S", "T"]
    assert q.true_cardinality([0, 1]) == pytest.approx(1000.0)
    again = joinmilp.Query.from_json(q.to_json())
    assert again.to_json() == q.to_json()
    with pytest.raises(ValueError):
        joinmilp.Query.from_json("not json")


def test_solve_three_tables():
    q = joinmilp.Query.from_json(THREE_TABLES)
    result = joinmilp.solve(q, preset="high", time_limit=10.0)
    assert result["status"] == "optimal"
    assert result["order"] == [0, 1, 2]
    assert result["cost"] == pytest.approx(1000.0)
    # The objective counts 1000 at its rung floor 3**6 on the ratio-3 ladder.
    assert result["objective"] == pytest.approx(729.0)
    trace = result["trace"]
    assert trace
    assert all(b[1] <= a[1] for a, b in zip(trace, trace[1:]))


@pytest.mark.parametrize("kind", ["chain", "star", "cycle"])
def test_dp_matches_brute_force(kind):
    for seed in range(5):
        q = joinmilp.generate_random_query(5, kind, seed)
        dp = joinmilp.optimize_dp(q)
        bf = joinmilp.optimize_bruteforce(q)
        expected = brute_force_cout(q)
        assert dp["cost"] == pytest.approx(expected, rel=1e-12)
        assert bf["cost"] == pytest.approx(expected, rel=1e-12)


def test_milp_plan_within_ladder_ratio():
    q = joinmilp.generate_random_query(6, "star", 4)
    result = joinmilp.solve(q, preset="high", time_limit=30.0)
    assert result["status"] == "optimal"
    assert sorted(result["order"]) == list(range(6))
    assert result["cost"] <= 3.0 * brute_force_cout(q) * (1 + 1e-9)
    assert result["lower_bound"] <= result["objective"] + 1e-6


def test_compile_stats_and_mps():
    q = joinmilp.generate_random_query(4, "chain", 1)
    stats = joinmilp.compile_stats(q, "hash", 10.0)
    assert stats["variables"] > 0
    assert stats["constraints"] > 0
    assert stats["thresholds"][0] == 1.0
    mps = joinmilp.export_mps(q)
    assert "ROWS" in mps and "ENDATA" in mps


def test_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        joinmilp.generate_random_query(1)
    with pytest.raises(ValueError):
        joinmilp.generate_random_query(4, "tree")
    big = joinmilp.generate_random_query(9, "chain", 0)
    with pytest.raises(RuntimeError):
        joinmilp.optimize_bruteforce(big)
