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

#include "joinmilp/mps.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "joinmilp/error.hpp"

namespace joinmilp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_num(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

// Row names as written to files; falls back to positional names when the
// model's names are not unique or not representable.
std::vector<std::string> row_names(const MilpProblem& problem,
                                   const std::string& objective_name) {
  std::vector<std::string> names;
  std::unordered_set<std::string> seen{objective_name};
  bool usable = true;
  for (const Constraint& c : problem.constraints()) {
    const bool has_space = c.name.find_first_of(" \t\r\n") != std::string::npos;
    if (c.name.empty() || has_space || !seen.insert(c.name).second) {
      usable = false;
      break;
    }
    names.push_back(c.name);
  }
  if (usable) return names;
  names.clear();
  for (int i = 0; i < problem.num_constraints(); ++i) {
    names.push_back("R" + std::to_string(i));
  }
  return names;
}

std::string objective_row_name(const MilpProblem& problem) {
  std::string name = "OBJ";
  while (std::any_of(problem.constraints().begin(), problem.constraints().end(),
                     [&](const Constraint& c) { return c.name == name; })) {
    name += "_";
  }
  return name;
}

}  // namespace

std::string export_mps(const MilpProblem& problem, std::string_view name) {
  const std::string obj = objective_row_name(problem);
  const std::vector<std::string> rows = row_names(problem, obj);

  // Column-major view of the constraint matrix.
  std::vector<std::vector<std::pair<int, double>>> columns(
      problem.num_variables());
  for (int r = 0; r < problem.num_constraints(); ++r) {
    for (const Term& t : problem.constraint(r).expr.terms()) {
      columns[t.var].emplace_back(r, t.coeff);
    }
  }
  std::vector<double> cost(problem.num_variables(), 0.0);
  for (const Term& t : problem.objective().terms()) cost[t.var] += t.coeff;

  std::ostringstream out;
  out << "* joinmilp free-format MPS\n"
      << "* objective constant c is stored as RHS of row " << obj
      << " with value -c\n"
      << "NAME " << name << "\n"
      << "ROWS\n"
      << " N  " << obj << "\n";
  for (int r = 0; r < problem.num_constraints(); ++r) {
    const char* tag = "L";
    switch (problem.constraint(r).sense) {
      case Sense::kLessEqual:
        tag = "L";
        break;
      case Sense::kEqual:
        tag = "E";
        break;
      case Sense::kGreaterEqual:
        tag = "G";
        break;
    }
    out << " " << tag << "  " << rows[r] << "\n";
  }
  out << "COLUMNS\n";
  bool in_integer_block = false;
  int marker = 0;
  for (int v = 0; v < problem.num_variables(); ++v) {
    const Variable& var = problem.variable(v);
    if (var.is_binary() != in_integer_block) {
      out << "    MARKER" << marker++ << "  'MARKER'  "
          << (var.is_binary() ? "'INTORG'" : "'INTEND'") << "\n";
      in_integer_block = var.is_binary();
    }
    bool wrote = false;
    if (cost[v] != 0.0) {
      out << "    " << var.name << "  " << obj << "  " << fmt_num(cost[v])
          << "\n";
      wrote = true;
    }
    for (auto [r, coeff] : columns[v]) {
      out << "    " << var.name << "  " << rows[r] << "  " << fmt_num(coeff)
          << "\n";
      wrote = true;
    }
    if (!wrote) out << "    " << var.name << "  " << obj << "  0\n";
  }
  if (in_integer_block) {
    out << "    MARKER" << marker++ << "  'MARKER'  'INTEND'\n";
  }
  out << "RHS\n";
  if (problem.objective().constant() != 0.0) {
    out << "    RHS  " << obj << "  " << fmt_num(-problem.objective().constant())
        << "\n";
  }
  for (int r = 0; r < problem.num_constraints(); ++r) {
    if (problem.constraint(r).rhs != 0.0) {
      out << "    RHS  " << rows[r] << "  "
          << fmt_num(problem.constraint(r).rhs) << "\n";
    }
  }
  out << "BOUNDS\n";
  for (const Variable& var : problem.variables()) {
    const double lo = var.domain.lower;
    const double hi = var.domain.upper;
    if (lo == hi) {
      out << " FX BND  " << var.name << "  " << fmt_num(lo) << "\n";
      continue;
    }
    if (std::isinf(lo) && std::isinf(hi)) {
      out << " FR BND  " << var.name << "\n";
      continue;
    }
    if (std::isinf(lo)) {
      out << " MI BND  " << var.name << "\n";
    } else {
      out << " LO BND  " << var.name << "  " << fmt_num(lo) << "\n";
    }
    if (std::isinf(hi)) {
      out << " PL BND  " << var.name << "\n";
    } else {
      out << " UP BND  " << var.name << "  " << fmt_num(hi) << "\n";
    }
  }
  out << "ENDATA\n";
  return out.str();
}

namespace {

enum class Section { kNone, kName, kRows, kColumns, kRhs, kBounds, kEnd };

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_number(const std::string& text, int line_no) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ParseError("MPS line " + std::to_string(line_no) +
                     ": invalid number '" + text + "'");
  }
}

struct PendingColumn {
  std::string name;
  bool integer = false;
  double cost = 0.0;
  std::vector<std::pair<int, double>> entries;
};

}  // namespace

MilpProblem import_mps(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  Section section = Section::kNone;
  bool saw_rows = false;

  std::string objective_row;
  std::unordered_map<std::string, int> row_index;  // -1 = objective
  std::vector<std::string> row_name;
  std::vector<Sense> row_sense;
  std::vector<double> row_rhs;
  double objective_constant = 0.0;

  std::vector<PendingColumn> columns;
  std::unordered_map<std::string, int> column_index;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<char> binary_flag;
  bool integer_block = false;

  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError("MPS line " + std::to_string(line_no) + ": " + what);
  };
  auto advance = [&](Section next) {
    if (static_cast<int>(next) <= static_cast<int>(section)) {
      throw fail("section out of order");
    }
    if (next == Section::kColumns && !saw_rows) {
      throw fail("COLUMNS before ROWS");
    }
    if ((next == Section::kRhs || next == Section::kBounds) &&
        static_cast<int>(section) < static_cast<int>(Section::kColumns)) {
      throw fail("section before COLUMNS");
    }
    section = next;
  };
  auto find_row = [&](const std::string& name) {
    auto it = row_index.find(name);
    if (it == row_index.end()) throw fail("unknown row '" + name + "'");
    return it->second;
  };
  auto find_column = [&](const std::string& name) {
    auto it = column_index.find(name);
    if (it == column_index.end()) throw fail("unknown column '" + name + "'");
    return it->second;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    const std::vector<std::string> tok = tokenize(line);
    if (tok.empty()) continue;
    const bool header = !std::isspace(static_cast<unsigned char>(line[0]));
    if (header) {
      const std::string& key = tok[0];
      if (key == "NAME") {
        advance(Section::kName);
      } else if (key == "ROWS") {
        advance(Section::kRows);
        saw_rows = true;
      } else if (key == "COLUMNS") {
        advance(Section::kColumns);
      } else if (key == "RHS") {
        advance(Section::kRhs);
      } else if (key == "BOUNDS") {
        advance(Section::kBounds);
      } else if (key == "ENDATA") {
        advance(Section::kEnd);
        break;
      } else {
        throw fail("unsupported section '" + key + "'");
      }
      continue;
    }
    switch (section) {
      case Section::kRows: {
        if (tok.size() != 2) throw fail("malformed ROWS entry");
        const std::string& type = tok[0];
        if (row_index.contains(tok[1])) throw fail("duplicate row " + tok[1]);
        if (type == "N") {
          if (!objective_row.empty()) throw fail("multiple objective rows");
          objective_row = tok[1];
          row_index[tok[1]] = -1;
          break;
        }
        Sense sense;
        if (type == "L") {
          sense = Sense::kLessEqual;
        } else if (type == "G") {
          sense = Sense::kGreaterEqual;
        } else if (type == "E") {
          sense = Sense::kEqual;
        } else {
          throw fail("unknown row type '" + type + "'");
        }
        row_index[tok[1]] = static_cast<int>(row_name.size());
        row_name.push_back(tok[1]);
        row_sense.push_back(sense);
        row_rhs.push_back(0.0);
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") {
            integer_block = true;
          } else if (tok[2] == "'INTEND'") {
            integer_block = false;
          } else {
            throw fail("unknown marker " + tok[2]);
          }
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) {
          throw fail("malformed COLUMNS entry");
        }
        int col;
        auto it = column_index.find(tok[0]);
        if (it == column_index.end()) {
          col = static_cast<int>(columns.size());
          column_index[tok[0]] = col;
          columns.push_back({tok[0], integer_block, 0.0, {}});
          lower.push_back(0.0);
          upper.push_back(integer_block ? 1.0 : kInf);
          binary_flag.push_back(integer_block ? 1 : 0);
        } else {
          col = it->second;
          if (col != static_cast<int>(columns.size()) - 1) {
            throw fail("column '" + tok[0] + "' is not contiguous");
          }
        }
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const int row = find_row(tok[k]);
          const double value = parse_number(tok[k + 1], line_no);
          if (row < 0) {
            columns[col].cost += value;
          } else {
            columns[col].entries.emplace_back(row, value);
          }
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() != 3 && tok.size() != 5) throw fail("malformed RHS entry");
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const int row = find_row(tok[k]);
          const double value = parse_number(tok[k + 1], line_no);
          if (row < 0) {
            objective_constant = -value;
          } else {
            row_rhs[row] = value;
          }
        }
        break;
      }
      case Section::kBounds: {
        if (tok.size() < 3) throw fail("malformed BOUNDS entry");
        const std::string& type = tok[0];
        const int col = find_column(tok[2]);
        auto value = [&]() {
          if (tok.size() != 4) throw fail("bound needs a value");
          return parse_number(tok[3], line_no);
        };
        if (type == "LO") {
          lower[col] = value();
        } else if (type == "UP") {
          upper[col] = value();
        } else if (type == "FX") {
          lower[col] = upper[col] = value();
        } else if (type == "BV") {
          lower[col] = 0.0;
          upper[col] = 1.0;
          binary_flag[col] = 1;
        } else if (type == "MI") {
          lower[col] = -kInf;
        } else if (type == "PL") {
          upper[col] = kInf;
        } else if (type == "FR") {
          lower[col] = -kInf;
          upper[col] = kInf;
        } else {
          throw fail("unsupported bound type '" + type + "'");
        }
        break;
      }
      default:
        throw fail("data outside of a section");
    }
  }
  if (section == Section::kNone) throw ParseError("MPS: empty input");
  if (section != Section::kEnd) throw ParseError("MPS: missing ENDATA");
  if (objective_row.empty()) throw ParseError("MPS: no objective row");

  MilpProblem problem;
  LinearExpr objective(objective_constant);
  std::vector<LinearExpr> rows(row_name.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    VarId id;
    if (binary_flag[c]) {
      if (lower[c] < 0.0 || upper[c] > 1.0 || lower[c] > upper[c]) {
        throw ParseError("MPS: integer column '" + columns[c].name +
                         "' is not binary");
      }
      id = problem.add_binary(columns[c].name);
      if (lower[c] != 0.0 || upper[c] != 1.0) {
        problem.set_bounds(id, lower[c], upper[c]);
      }
    } else {
      id = problem.add_continuous(columns[c].name, lower[c], upper[c]);
    }
    if (columns[c].cost != 0.0) objective.add(id, columns[c].cost);
    for (auto [row, coeff] : columns[c].entries) rows[row].add(id, coeff);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    problem.add_constraint(std::move(rows[r]), row_sense[r], row_rhs[r],
                           row_name[r]);
  }
  problem.set_objective(std::move(objective));
  return problem;
}

std::string export_lp(const MilpProblem& problem) {
  std::ostringstream out;
  auto write_expr = [&](const LinearExpr& expr) {
    if (expr.terms().empty()) out << " 0 " << problem.variable(0).name;
    for (const Term& t : expr.terms()) {
      out << (t.coeff < 0 ? " - " : " + ") << fmt_num(std::abs(t.coeff))
          << " " << problem.variable(t.var).name;
    }
  };
  out << "\\ joinmilp LP export\n";
  if (problem.objective().constant() != 0.0) {
    out << "\\ objective constant " << fmt_num(problem.objective().constant())
        << " omitted\n";
  }
  out << "Minimize\n obj:";
  if (problem.num_variables() > 0) write_expr(problem.objective());
  out << "\nSubject To\n";
  const std::vector<std::string> rows = row_names(problem, "obj");
  for (int r = 0; r < problem.num_constraints(); ++r) {
    const Constraint& c = problem.constraint(r);
    out << " " << rows[r] << ":";
    write_expr(c.expr);
    out << " " << to_string(c.sense) << " " << fmt_num(c.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const Variable& v : problem.variables()) {
    if (v.is_binary()) continue;
    const double lo = v.domain.lower;
    const double hi = v.domain.upper;
    if (std::isinf(lo) && std::isinf(hi)) {
      out << " " << v.name << " free\n";
    } else {
      out << " " << (std::isinf(lo) ? "-inf" : fmt_num(lo)) << " <= " << v.name
          << " <= " << (std::isinf(hi) ? "+inf" : fmt_num(hi)) << "\n";
    }
  }
  out << "Binaries\n";
  for (const Variable& v : problem.variables()) {
    if (v.is_binary()) out << " " << v.name << "\n";
  }
  out << "End\n";
  return out.str();
}

}  // namespace joinmilp
