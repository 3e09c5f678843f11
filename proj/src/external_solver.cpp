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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "joinmilp/error.hpp"
#include "joinmilp/mps.hpp"
#include "joinmilp/solver.hpp"

namespace joinmilp {
namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string replace_all(std::string text, const std::string& from,
                        const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string tail(const std::string& text, std::size_t max_chars) {
  return text.size() <= max_chars ? text : text.substr(text.size() - max_chars);
}

struct ParsedSolution {
  std::vector<double> values;
  std::optional<SolveStatus> status;
};

ParsedSolution parse(const MilpProblem& problem, const std::string& text) {
  ParsedSolution out;
  out.values.assign(problem.num_variables(), 0.0);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    if (name[0] == '#') {
      std::string key;
      std::string value;
      if (name == "#") fields >> key; else key = name.substr(1);
      if (key == "status" && (fields >> value)) {
        if (value == "optimal") out.status = SolveStatus::kOptimal;
        else if (value == "feasible") out.status = SolveStatus::kFeasible;
        else if (value == "infeasible") out.status = SolveStatus::kInfeasible;
        else if (value == "timed_out") out.status = SolveStatus::kTimedOut;
      }
      continue;
    }
    double value = 0.0;
    if (!(fields >> value)) {
      throw ParseError("solution line " + std::to_string(line_no) +
                       ": expected '<name> <value>'");
    }
    const std::optional<VarId> var = problem.find_variable(name);
    if (!var) {
      throw ParseError("solution line " + std::to_string(line_no) +
                       ": unknown variable '" + name + "'");
    }
    out.values[*var] = value;
  }
  return out;
}

}  // namespace

std::vector<double> parse_solution_file(const MilpProblem& problem,
                                        const std::string& text) {
  return parse(problem, text).values;
}

std::string format_solution_file(const MilpProblem& problem,
                                 const Solution& solution) {
  std::ostringstream out;
  out.precision(17);
  out << "# status " << to_string(solution.status) << "\n";
  if (solution.values.empty()) return out.str();
  out << "# objective " << solution.objective << "\n";
  for (int v = 0; v < problem.num_variables(); ++v) {
    out << problem.variable(v).name << " " << solution.values.at(v) << "\n";
  }
  return out.str();
}

Solution external_solve(const MilpProblem& problem,
                        const std::string& command_template,
                        const std::string& workdir) {
  if (command_template.find("{in}") == std::string::npos ||
      command_template.find("{out}") == std::string::npos) {
    throw InvalidInput(
        "external solver command must contain {in} and {out} placeholders");
  }
  namespace fs = std::filesystem;
  const fs::path dir(workdir);
  fs::create_directories(dir);
  const fs::path model = dir / "model.mps";
  const fs::path result = dir / "solution.txt";
  const fs::path log = dir / "solver.log";
  fs::remove(result);
  {
    std::ofstream out(model);
    if (!out) throw Error("cannot write " + model.string());
    out << export_mps(problem, "joinorder");
  }
  std::string command = replace_all(command_template, "{in}", shell_quote(model.string()));
  command = replace_all(command, "{out}", shell_quote(result.string()));
  command += " > " + shell_quote(log.string()) + " 2>&1";
  const int rc = std::system(command.c_str());
  if (rc != 0) {
    std::string log_text;
    if (fs::exists(log)) log_text = read_file(log);
    throw Error("external solver exited with status " + std::to_string(rc) +
                "; log tail:\n" + tail(log_text, 2000));
  }
  if (!fs::exists(result)) {
    throw Error("external solver did not write " + result.string());
  }
  ParsedSolution parsed = parse(problem, read_file(result));
  Solution solution;
  if (parsed.status == SolveStatus::kInfeasible) {
    solution.status = SolveStatus::kInfeasible;
    solution.objective = std::numeric_limits<double>::infinity();
    solution.gap = std::numeric_limits<double>::infinity();
    return solution;
  }
  const std::vector<std::string> bad = problem.violations(parsed.values);
  if (!bad.empty()) {
    throw Error("external solution is infeasible: " + bad.front());
  }
  solution.values = std::move(parsed.values);
  solution.objective = problem.objective_value(solution.values);
  solution.status = parsed.status.value_or(SolveStatus::kFeasible);
  solution.gap = solution.status == SolveStatus::kOptimal
                     ? 0.0
                     : std::numeric_limits<double>::quiet_NaN();
  return solution;
}

}  // namespace joinmilp
