#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsvie/expr.hpp"
#include "wsvie/svie_solver.hpp"

namespace wsvie {

struct RegistryOptions {
  // example1 only: scale the closed form by 1/12 instead of 1.
  bool twelfth_prefactor = false;
};

// Built-in problems: example1, example2, stock, bond.
std::vector<std::string> registry_names();
SVIEProblem registry_lookup(std::string_view name, const RegistryOptions& options = {});

// Text form of a problem: UTF-8 key=value lines with keys name, T, f, k1, k2
// and optional exact. Blank lines and lines starting with '#' are ignored.
struct ProblemFile {
  std::string name;
  double horizon = 1.0;
  std::string f;
  std::string k1;
  std::string k2;
  std::optional<std::string> exact;
};

ProblemFile parse_problem_file(std::string_view text);
ProblemFile read_problem_file(const std::string& path);

// Parses every expression and checks its bindings: f and exact may use t,
// B(...) and ito(...); kernels may use s and t but no path.
SVIEProblem bind_problem(const ProblemFile& file);

} // namespace wsvie
