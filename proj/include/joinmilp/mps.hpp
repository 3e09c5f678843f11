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

// Free-format MPS reader/writer and a CPLEX-LP style debug writer.
//
// MPS conventions used here:
//   * the objective is the first N row, named OBJ;
//   * binaries sit between INTORG/INTEND markers and carry explicit bounds
//     LO 0 / UP 1;
//   * a constant objective term c is written as RHS of the objective row with
//     value -c (the usual "objective = row - rhs" convention);
//   * numbers are printed with 12 significant digits.
// The reader accepts this subset plus the standard bound types
// LO/UP/FX/BV/MI/PL/FR; RANGES and negative-objective-sense are rejected.

#ifndef JOINMILP_MPS_HPP_
#define JOINMILP_MPS_HPP_

#include <string>
#include <string_view>

#include "joinmilp/milp.hpp"

namespace joinmilp {

std::string export_mps(const MilpProblem& problem,
                       std::string_view name = "JOINMILP");
MilpProblem import_mps(std::string_view text);

std::string export_lp(const MilpProblem& problem);

}  // namespace joinmilp

#endif  // JOINMILP_MPS_HPP_
