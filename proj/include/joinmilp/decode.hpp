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

// Reading plans back out of MILP solutions.

#ifndef JOINMILP_DECODE_HPP_
#define JOINMILP_DECODE_HPP_

#include <span>
#include <vector>

#include "joinmilp/formulation.hpp"
#include "joinmilp/plan.hpp"

namespace joinmilp {

// Binaries must lie within 1e-6 of 0 or 1; they are read with threshold 0.5.
LeftDeepPlan decode(const JoinOrderMilp& milp, std::span<const double> values);

struct JoinApproximation {
  int join = 0;
  double true_cardinality = 0.0;
  double approximate = 0.0;  // value of co
  double ratio = 1.0;        // true / approximate
};

struct ApproximationReport {
  std::vector<JoinApproximation> joins;  // joins 1..J-1
  double true_cost = 0.0;                // exact cost of the decoded plan
  double milp_objective = 0.0;
  double max_ratio = 1.0;
  // co <= true card < co * ladder ratio for every join with true card >= 1.
  bool within_bracket = true;
};

ApproximationReport approximation_report(const JoinOrderMilp& milp,
                                         std::span<const double> values);

}  // namespace joinmilp

#endif  // JOINMILP_DECODE_HPP_
