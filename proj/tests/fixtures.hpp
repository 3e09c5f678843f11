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

#ifndef JOINMILP_TESTS_FIXTURES_HPP_
#define JOINMILP_TESTS_FIXTURES_HPP_

#include "joinmilp/query.hpp"

namespace fixtures {

// R(10), S(1000), T(100) with one predicate between R and S of selectivity
// 0.1.
inline joinmilp::Query three_tables() {
  return joinmilp::Query({{"R", 10.0}, {"S", 1000.0}, {"T", 100.0}},
                         {{{0, 1}, 0.1, 0.0, {}}});
}

}  // namespace fixtures

#endif  // JOINMILP_TESTS_FIXTURES_HPP_
