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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "joinmilp/baseline.hpp"
#include "joinmilp/bench.hpp"
#include "joinmilp/error.hpp"
#include "joinmilp/formulation.hpp"
#include "joinmilp/mps.hpp"
#include "joinmilp/query.hpp"

namespace py = pybind11;
using namespace joinmilp;

namespace {

py::dict plan_dict(const Query& q, const LeftDeepPlan& plan, CostModel model) {
  py::dict d;
  d["order"] = plan.order;
  std::vector<std::string> names;
  for (TableId t : plan.order) names.push_back(q.table(t).name);
  d["tables"] = names;
  std::vector<std::string> ops;
  for (JoinImpl op : plan.operators) ops.emplace_back(to_string(op));
  d["operators"] = ops;
  d["evaluated_at"] = plan.evaluated_at;
  d["cost"] = plan.order.empty()
                  ? py::object(py::none())
                  : py::object(py::float_(
                        exact_plan_cost(q, plan, CostModelExact{model}).total));
  return d;
}

FormulationConfig make_config(const std::string& cost_model, double ratio) {
  FormulationConfig config;
  config.cost_model = parse_cost_model(cost_model);
  config.ladder_ratio = ratio;
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Join ordering as a mixed integer linear program.";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);

  py::class_<Query>(m, "Query")
      .def_static("from_json", &query_from_json, py::arg("text"))
      .def("to_json", &query_to_json, py::arg("indent") = 2)
      .def_property_readonly("num_tables", &Query::num_tables)
      .def_property_readonly("num_predicates", &Query::num_predicates)
      .def_property_readonly("table_names",
                             [](const Query& q) {
                               std::vector<std::string> out;
                               for (const Table& t : q.tables()) out.push_back(t.name);
                               return out;
                             })
      .def("true_cardinality",
           [](const Query& q, const std::vector<TableId>& tables) {
             return q.true_cardinality(tables);
           },
           py::arg("tables"));

  m.def("generate_random_query",
        [](int n, const std::string& kind, std::uint64_t seed) {
          return generate_random_query(n, parse_join_graph_kind(kind), seed);
        },
        py::arg("n"), py::arg("kind") = "chain", py::arg("seed") = 0);

  m.def("count_model",
        [](int n, int m, int l) {
          const ModelCounts c = count_model(n, m, l);
          return std::make_pair(c.variables, c.constraints);
        },
        py::arg("n"), py::arg("m"), py::arg("l"));

  m.def("compile_stats",
        [](const Query& q, const std::string& cost_model, double ratio) {
          const JoinOrderMilp milp = compile(q, make_config(cost_model, ratio));
          py::dict d;
          d["variables"] = milp.problem.num_variables();
          d["constraints"] = milp.problem.num_constraints();
          d["binaries"] = milp.problem.num_binaries();
          d["thresholds"] = milp.ladder().thresholds();
          return d;
        },
        py::arg("query"), py::arg("cost_model") = "cout", py::arg("ratio") = 10.0);

  m.def("export_mps",
        [](const Query& q, const std::string& cost_model, double ratio) {
          return export_mps(compile(q, make_config(cost_model, ratio)).problem);
        },
        py::arg("query"), py::arg("cost_model") = "cout", py::arg("ratio") = 10.0);

  m.def("solve",
        [](const Query& q, const std::string& preset, const std::string& cost_model,
           double time_limit) {
          MilpRunOptions options;
          options.preset = precision_preset(preset);
          options.cost_model = parse_cost_model(cost_model);
          options.time_limit = time_limit;
          MilpRun run;
          {
            py::gil_scoped_release release;
            run = run_milp(q, "python", options);
          }
          py::dict d = plan_dict(q, run.plan, options.cost_model);
          d["status"] = std::string(to_string(run.status));
          d["objective"] = run.objective;
          d["lower_bound"] = run.lower_bound;
          d["elapsed"] = run.elapsed;
          std::vector<std::tuple<double, double, double>> trace;
          for (const TracePoint& t : run.trace) {
            trace.emplace_back(t.elapsed, t.incumbent, t.lower_bound);
          }
          d["trace"] = trace;
          return d;
        },
        py::arg("query"), py::arg("preset") = "medium", py::arg("cost_model") = "cout",
        py::arg("time_limit") = 60.0);

  m.def("optimize_dp",
        [](const Query& q, const std::string& cost_model) {
          const CostModel model = parse_cost_model(cost_model);
          return plan_dict(q, optimize_dp(q, CostModelExact{model}), model);
        },
        py::arg("query"), py::arg("cost_model") = "cout");

  m.def("optimize_bruteforce",
        [](const Query& q, const std::string& cost_model) {
          const CostModel model = parse_cost_model(cost_model);
          return plan_dict(q, optimize_bruteforce(q, CostModelExact{model}), model);
        },
        py::arg("query"), py::arg("cost_model") = "cout");

  m.def("plan_cost",
        [](const Query& q, const std::vector<TableId>& order,
           const std::string& cost_model) {
          LeftDeepPlan plan;
          plan.order = order;
          return exact_plan_cost(q, plan, CostModelExact{parse_cost_model(cost_model)})
              .total;
        },
        py::arg("query"), py::arg("order"), py::arg("cost_model") = "cout");
}
