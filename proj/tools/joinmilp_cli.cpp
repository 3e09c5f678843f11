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

// joinmilp: generate benchmark queries, compile them to MILPs, solve them
// with the internal or an external solver and compare against the DP
// baseline.
//
// Exit codes: 0 optimal, 3 feasible but not proven optimal, 4 timed out,
// 5 infeasible, 1 runtime error, CLI11 codes for usage errors.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "joinmilp/baseline.hpp"
#include "joinmilp/bench.hpp"
#include "joinmilp/error.hpp"
#include "joinmilp/formulation.hpp"
#include "joinmilp/mps.hpp"
#include "joinmilp/plan.hpp"
#include "joinmilp/query.hpp"
#include "joinmilp/solver.hpp"

namespace fs = std::filesystem;
using namespace joinmilp;

namespace {

constexpr int kExitError = 1;

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return 0;
    case SolveStatus::kFeasible:
      return 3;
    case SolveStatus::kTimedOut:
      return 4;
    case SolveStatus::kInfeasible:
      return 5;
  }
  return kExitError;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

// Writes to `path`, or to stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    write_text(path, text);
  }
}

Query load_query(const std::string& path) {
  Query q = query_from_json(read_text(path));
  q.validate();
  return q;
}

struct ModelFlags {
  std::string preset = "medium";
  std::string cost = "cout";
  std::vector<double> thresholds;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "Precision preset")
        ->check(CLI::IsMember({"high", "medium", "low"}))
        ->capture_default_str();
    cmd->add_option("--cost", cost, "Cost model")
        ->check(CLI::IsMember({"cout", "hash", "sortmerge", "bnl", "choice"}))
        ->capture_default_str();
    cmd->add_option("--thresholds", thresholds,
                    "Explicit threshold ladder (overrides the preset)")
        ->delimiter(',');
  }

  MilpRunOptions options() const {
    MilpRunOptions o;
    o.preset = precision_preset(preset);
    o.cost_model = parse_cost_model(cost);
    if (!thresholds.empty()) {
      o.ladder = ThresholdLadder::from_thresholds(thresholds);
    }
    return o;
  }
};

std::vector<std::string> query_files(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_generate(int n, const std::string& kind, int count,
                 std::uint64_t seed, const std::string& out_dir) {
  const JoinGraphKind k = parse_join_graph_kind(kind);
  fs::create_directories(out_dir);
  for (int i = 0; i < count; ++i) {
    const Query q = generate_random_query(n, k, seed + i);
    char name[96];
    std::snprintf(name, sizeof(name), "%s_n%d_s%llu.json", kind.c_str(), n,
                  static_cast<unsigned long long>(seed + i));
    write_text((fs::path(out_dir) / name).string(), query_to_json(q) + "\n");
  }
  std::cout << "wrote " << count << " queries to " << out_dir << "\n";
  return 0;
}

int cmd_formulate(const std::string& query_path, const ModelFlags& flags,
                  const std::string& out_mps) {
  const Query q = load_query(query_path);
  const JoinOrderMilp milp = compile(q, formulation_config(flags.options()));
  write_text(out_mps, export_mps(milp.problem, "joinorder"));
  write_text(out_mps + ".registry.json", registry_to_json(milp) + "\n");
  std::cout << "variables " << milp.problem.num_variables() << "\n"
            << "constraints " << milp.problem.num_constraints() << "\n"
            << "binaries " << milp.problem.num_binaries() << "\n"
            << "thresholds " << milp.ladder().size() << "\n";
  for (const std::string& w : milp.warnings()) {
    std::cerr << "warning: " << w << "\n";
  }
  return 0;
}

int cmd_solve(const std::string& query_path, const ModelFlags& flags,
              double time_limit, double interval, const std::string& trace,
              const std::string& out, const std::string& external) {
  const Query q = load_query(query_path);
  MilpRunOptions options = flags.options();
  options.time_limit = time_limit;
  options.sample_interval = interval;
  options.external_solver = external;
  if (!external.empty()) {
    options.workdir = (fs::temp_directory_path() /
                       ("joinmilp_" + query_id_from_path(query_path)))
                          .string();
  }
  const MilpRun run = run_milp(q, query_id_from_path(query_path), options);
  if (!trace.empty()) {
    std::string csv = csv_header() + "\n";
    for (const BenchRow& row : run.rows) csv += to_csv(row) + "\n";
    emit(trace, csv);
  }
  if (run.status == SolveStatus::kInfeasible) {
    std::cerr << "error: the model is infeasible; every query with at least "
                 "two tables has a plan, so this indicates a formulation "
                 "defect\n";
  } else if (!run.plan.order.empty()) {
    emit(out, plan_to_json(q, run.plan));
  }
  std::cerr << "status " << to_string(run.status) << "  objective "
            << run.objective << "  bound " << run.lower_bound
            << "  true cost " << run.true_cost << "  elapsed " << run.elapsed
            << " s\n";
  return exit_code(run.status);
}

int cmd_dp(const std::string& query_path, const std::string& cost,
           const std::string& out) {
  const Query q = load_query(query_path);
  LeftDeepPlan plan;
  const BenchRow row =
      run_dp(q, query_id_from_path(query_path), parse_cost_model(cost),
             std::numeric_limits<double>::infinity(), &plan);
  if (row.status == "no_plan") {
    std::cerr << "error: " << q.num_tables() << " tables exceed the DP limit of "
              << kMaxDpTables << "\n";
    return kExitError;
  }
  emit(out, plan_to_json(q, plan));
  std::cerr << "cost " << row.true_cost << "  elapsed " << row.elapsed_s
            << " s\n";
  return 0;
}

int cmd_compare(const std::string& dir, const std::vector<std::string>& presets,
                const std::string& cost, double time_limit, int jobs,
                const std::string& out, const std::string& external) {
  const std::vector<std::string> files = query_files(dir);
  std::vector<std::vector<BenchRow>> results(files.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      const std::string id = query_id_from_path(files[i]);
      std::vector<BenchRow>& rows = results[i];
      try {
        const Query q = load_query(files[i]);
        rows.push_back(run_dp(q, id, parse_cost_model(cost), time_limit));
        for (const std::string& name : presets) {
          MilpRunOptions options;
          options.preset = precision_preset(name);
          options.cost_model = parse_cost_model(cost);
          options.time_limit = time_limit;
          options.sample_interval = 0.0;
          options.external_solver = external;
          options.workdir =
              (fs::temp_directory_path() / ("joinmilp_" + id + "_" + name))
                  .string();
          try {
            rows.push_back(run_milp(q, id, options).rows.back());
          } catch (const Error& e) {
            BenchRow row;
            row.query_id = id;
            row.n = q.num_tables();
            row.method = external.empty() ? "milp" : "external";
            row.preset = name;
            row.incumbent = row.lower_bound = row.true_cost =
                std::numeric_limits<double>::quiet_NaN();
            row.status = "error";
            rows.push_back(row);
            std::lock_guard<std::mutex> lock(log_mutex);
            std::cerr << id << " " << name << ": " << e.what() << "\n";
          }
        }
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << id << ": " << e.what() << "\n";
      }
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "done " << id << "\n";
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::max(jobs, 1); ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::string csv = csv_header() + "\n";
  for (const auto& rows : results) {
    for (const BenchRow& row : rows) csv += to_csv(row) + "\n";
  }
  emit(out, csv);

  // Plan quality relative to the DP optimum, per preset.
  for (const std::string& name : presets) {
    int count = 0;
    double worst = 0.0;
    for (const auto& rows : results) {
      if (rows.empty() || rows.front().status != "optimal") continue;
      for (const BenchRow& row : rows) {
        if (row.preset != name || !std::isfinite(row.true_cost)) continue;
        const double dp = rows.front().true_cost;
        const double ratio = dp > 0.0 ? row.true_cost / dp : 1.0;
        worst = std::max(worst, ratio);
        ++count;
      }
    }
    std::cerr << name << ": " << count << " plans, worst true cost / DP "
              << worst << "\n";
  }
  return 0;
}

// Reads an MPS model, solves it with the internal solver and writes a
// solution file; lets the internal solver stand in as an external command.
int cmd_mps_solve(const std::string& in, const std::string& out,
                  double time_limit) {
  const MilpProblem problem = import_mps(read_text(in));
  SolverConfig config;
  config.time_limit = time_limit;
  const SolveReport report = solve(problem, config);
  write_text(out, format_solution_file(problem, report.final));
  return exit_code(report.final.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Join ordering via mixed integer linear programming"};
  app.require_subcommand(1);

  int n = 10;
  std::string kind = "chain";
  int count = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string query_path;
  std::string query_dir;
  double time_limit = 60.0;
  double interval = 1.0;
  std::string trace;
  std::string external;
  std::vector<std::string> presets = {"high", "medium", "low"};
  int jobs = 1;
  std::string mps_in;
  std::string mps_out;
  ModelFlags model;

  CLI::App* gen = app.add_subcommand("generate", "Generate random queries");
  gen->add_option("--n", n, "Number of tables")->required()
      ->check(CLI::Range(2, 64));
  gen->add_option("--kind", kind, "Join graph shape")
      ->check(CLI::IsMember({"chain", "star", "cycle"}))
      ->capture_default_str();
  gen->add_option("--count", count, "Number of queries")
      ->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--seed", seed, "Seed of the first query")
      ->capture_default_str();
  gen->add_option("--out", out, "Output directory")->required();

  CLI::App* form = app.add_subcommand("formulate", "Write the MILP as MPS");
  form->add_option("query", query_path, "Query JSON file")->required()
      ->check(CLI::ExistingFile);
  model.add_to(form);
  form->add_option("--out", out, "Output MPS file")->required();

  CLI::App* sol = app.add_subcommand("solve", "Solve one query");
  sol->add_option("query", query_path, "Query JSON file")->required()
      ->check(CLI::ExistingFile);
  model.add_to(sol);
  sol->add_option("--time-limit", time_limit, "Seconds")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sol->add_option("--interval", interval, "Trace sampling interval (s)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  sol->add_option("--trace", trace, "Anytime trace CSV ('-' for stdout)");
  sol->add_option("--out", out, "Plan JSON (stdout by default)");
  sol->add_option("--external-solver", external,
                  "Command template with {in} and {out}")
      ->envname(kExternalSolverEnv);

  CLI::App* dp = app.add_subcommand("dp", "Optimal left-deep plan by DP");
  dp->add_option("query", query_path, "Query JSON file")->required()
      ->check(CLI::ExistingFile);
  dp->add_option("--cost", model.cost, "Cost model")
      ->check(CLI::IsMember({"cout", "hash", "sortmerge", "bnl", "choice"}))
      ->capture_default_str();
  dp->add_option("--out", out, "Plan JSON (stdout by default)");

  CLI::App* cmp = app.add_subcommand("compare",
                                     "DP and MILP presets on a query suite");
  cmp->add_option("dir", query_dir, "Directory of query JSON files")
      ->required()->check(CLI::ExistingDirectory);
  cmp->add_option("--presets", presets, "Presets to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"high", "medium", "low"}));
  cmp->add_option("--cost", model.cost, "Cost model")
      ->check(CLI::IsMember({"cout", "hash", "sortmerge", "bnl", "choice"}))
      ->capture_default_str();
  cmp->add_option("--time-limit", time_limit, "Seconds per solve")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmp->add_option("--jobs", jobs, "Parallel worker slots")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmp->add_option("--out", out, "Summary CSV (stdout by default)");
  cmp->add_option("--external-solver", external,
                  "Command template with {in} and {out}")
      ->envname(kExternalSolverEnv);

  CLI::App* mps = app.add_subcommand("mps-solve", "");
  mps->group("");  // hidden
  mps->add_option("in", mps_in)->required();
  mps->add_option("out", mps_out)->required();
  mps->add_option("--time-limit", time_limit)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(n, kind, count, seed, out);
    if (*form) return cmd_formulate(query_path, model, out);
    if (*sol) {
      return cmd_solve(query_path, model, time_limit, interval, trace, out,
                       external);
    }
    if (*dp) return cmd_dp(query_path, model.cost, out);
    if (*cmp) {
      return cmd_compare(query_dir, presets, model.cost, time_limit, jobs, out,
                         external);
    }
    if (*mps) return cmd_mps_solve(mps_in, mps_out, time_limit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
