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

"""Join ordering for relational queries as a mixed integer linear program."""

from joinmilp._core import (
    CapacityError,
    Error,
    InvalidInput,
    ParseError,
    Query,
    compile_stats,
    count_model,
    export_mps,
    generate_random_query,
    optimize_bruteforce,
    optimize_dp,
    plan_cost,
    solve,
)

__all__ = [
    "CapacityError",
    "Error",
    "InvalidInput",
    "ParseError",
    "Query",
    "compile_stats",
    "count_model",
    "export_mps",
    "generate_random_query",
    "optimize_bruteforce",
    "optimize_dp",
    "plan_cost",
    "solve",
]
