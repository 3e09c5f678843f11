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

// Anytime branch-and-bound MILP solver with LP-relaxation bounding, and an
// adapter for external solvers that read MPS files.

#ifndef JOINMILP_SOLVER_HPP_
#define JOINMILP_SOLVER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "joinmilp/milp.hpp"

namespace joinmilp {

enum class NodeSelection { kBestBound, kDepthFirst };
// Pseudo-cost branching learns the bound change per unit of fractionality
// from solved children and falls back to most-fractional until it has data.
enum class BranchRule { kPseudoCost, kMostFractional, kFirstFractional };

// Binary variable fixings proposed by a primal heuristic. The solver applies
// them, propagates, and dives to an integral point.
using Fixings = std::vector<std::pair<VarId, double>>;

// Called once before the root LP with an empty point, then with LP points of
// the root and of every `heuristic_frequency`-th node.
using PrimalHeuristic =
    std::function<std::optional<Fixings>(std::span<const double> lp_point)>;

struct SolverConfig {
  double time_limit = 60.0;  // seconds, > 0
  // Stop when (incumbent - bound) / max(|incumbent|, 1) <= gap_tolerance.
  double gap_tolerance = 1e-6;
  NodeSelection node_selection = NodeSelection::kBestBound;
  BranchRule branch_rule = BranchRule::kPseudoCost;
  std::uint64_t seed = 0;  // breaks ties between equally fractional variables
  std::int64_t node_limit = -1;
  PrimalHeuristic heuristic;
  int heuristic_frequency = 25;
  // Valid inequalities added to the relaxation and to propagation only;
  // incumbents are checked against the original problem.
  std::vector<Constraint> cuts;
};

struct TracePoint {
  double elapsed = 0.0;  // seconds since solve start
  double incumbent = 0.0;  // +inf before the first incumbent
  double lower_bound = 0.0;  // -inf before the root LP
};

struct SolveReport {
  Solution final;
  std::vector<TracePoint> trace;
  std::int64_t nodes_explored = 0;
  std::int64_t lp_iterations = 0;
  double elapsed = 0.0;
  double lower_bound = 0.0;
};

// Receives the trace point recorded for a new incumbent and its values.
using IncumbentCallback = std::function<void(
    const TracePoint& point, std::span<const double> values)>;

struct LpRelaxation {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> values;
};

// Continuous relaxation (binaries relaxed to [0, 1]) solved to optimality.
LpRelaxation lp_relax(const MilpProblem& problem);

// Exact within gap_tolerance when it terminates before the time limit.
// Deterministic for a fixed configuration; the callback runs on the calling
// thread for each new incumbent.
SolveReport solve(const MilpProblem& problem, const SolverConfig& config = {},
                  const IncumbentCallback& on_incumbent = {});

// Writes `problem` as MPS into `workdir`, substitutes {in} and {out} in
// `command_template`, runs it, and reads back a "name value" solution file.
// The returned point is validated against `problem`; infeasible output and
// solver failures raise Error.
Solution external_solve(const MilpProblem& problem,
                        const std::string& command_template,
                        const std::string& workdir);

// Parses "name value" lines ('#' starts a comment). Missing variables are 0.
std::vector<double> parse_solution_file(const MilpProblem& problem,
                                        const std::string& text);
std::string format_solution_file(const MilpProblem& problem,
                                 const Solution& solution);

// Environment variable consulted for a default external solver command.
inline constexpr const char* kExternalSolverEnv = "JOINMILP_EXTERNAL_SOLVER";

}  // namespace joinmilp

#endif  // JOINMILP_SOLVER_HPP_
