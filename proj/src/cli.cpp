#include "wsvie/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wsvie/error.hpp"
#include "wsvie/monte_carlo.hpp"
#include "wsvie/operational_matrices.hpp"
#include "wsvie/problems.hpp"
#include "wsvie/svie_solver.hpp"

namespace wsvie::cli {

namespace {

using nlohmann::json;

// Raised for bad option values; maps to exit code 2.
class UsageError : public Error {
public:
  using Error::Error;
};

struct RunConfig {
  std::string problem;
  std::string file;
  std::vector<unsigned> levels{3};
  std::vector<std::size_t> trials{50};
  std::uint64_t seed = 1;
  std::size_t refine = 16;
  std::string output;
  std::string format = "csv";
  bool zero_noise = false;
  bool twelfth_prefactor = false;
  unsigned workers = 1;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void add_common_options(CLI::App& cmd, RunConfig& cfg) {
  auto* problem = cmd.add_option("--problem", cfg.problem, "built-in problem: example1, example2, stock, bond");
  auto* file = cmd.add_option("--file", cfg.file, "problem file (key=value lines)");
  problem->excludes(file);
  cmd.add_option("--k", cfg.levels, "dyadic level(s), m = 2^k")->delimiter(',');
  cmd.add_option("--n", cfg.trials, "trial count(s)")->delimiter(',');
  cmd.add_option("--seed", cfg.seed, "base RNG seed");
  cmd.add_option("--refine", cfg.refine, "Brownian grid refinement R (N = 2 m R)");
  cmd.add_option("--out", cfg.output, "output path, '-' for stdout")->required();
  cmd.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd.add_flag("--zero-noise", cfg.zero_noise, "use B = 0 paths");
  cmd.add_flag("--twelfth-prefactor", cfg.twelfth_prefactor, "example1 exact solution with prefactor 1/12");
  cmd.add_option("--workers", cfg.workers, "threads for independent trials");
}

void validate(const RunConfig& cfg) {
  if (cfg.levels.empty()) throw UsageError("--k needs at least one level");
  if (cfg.trials.empty()) throw UsageError("--n needs at least one value");
  for (auto n : cfg.trials)
    if (n < 1) throw UsageError("--n must be at least 1");
  if (cfg.refine < 1) throw UsageError("--refine must be at least 1");
  if (cfg.workers < 1) throw UsageError("--workers must be at least 1");
}

SVIEProblem load_problem(const RunConfig& cfg) {
  if (!cfg.file.empty()) return bind_problem(read_problem_file(cfg.file));
  if (cfg.problem.empty()) throw UsageError("one of --problem or --file is required");
  try {
    return registry_lookup(cfg.problem, RegistryOptions{cfg.twelfth_prefactor});
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

Noise noise_of(const RunConfig& cfg) { return cfg.zero_noise ? Noise::zero : Noise::brownian; }

unsigned single_level(const RunConfig& cfg, const char* cmd) {
  if (cfg.levels.size() != 1) throw UsageError(std::string(cmd) + " takes a single --k");
  return cfg.levels.front();
}

void write_output(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output == "-") {
    out << text;
    out.flush();
    if (!out) throw UsageError("failed writing to stdout");
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot open output file '" + cfg.output + "'");
  f << text;
  f.close();
  if (!f) throw UsageError("failed writing output file '" + cfg.output + "'");
}

std::string cmd_solve(const RunConfig& cfg) {
  const SVIEProblem problem = load_problem(cfg);
  const WalshBasis basis(single_level(cfg, "solve"), problem.horizon);
  const RngSpec rng{cfg.seed, 0};
  const BrownianPath path = sample_path(rng, basis.size(), cfg.refine, basis.horizon(), noise_of(cfg));
  const SolveResult result = solve(problem, basis, path, rng);

  struct Row {
    double t, approx;
    std::optional<double> exact;
  };
  std::vector<Row> rows;
  auto add = [&](double t, double approx) {
    Row r{t, approx, std::nullopt};
    if (problem.has_exact()) r.exact = problem.exact(t, &path);
    rows.push_back(r);
  };
  for (std::size_t i = 0; i < basis.size(); ++i) add(basis.midpoint(i), result.cell_values[i]);
  for (double t : probe_points(problem.horizon)) add(t, reconstruct(result.cell_values, basis, t));

  if (cfg.format == "json") {
    json doc;
    doc["problem"] = problem.name;
    doc["m"] = basis.size();
    doc["seed"] = cfg.seed;
    doc["residual"] = result.residual;
    doc["walsh_coeffs"] = result.walsh_coeffs;
    json& arr = doc["rows"] = json::array();
    for (const auto& r : rows) {
      json row{{"t", r.t}, {"x_approx", r.approx}, {"x_exact", nullptr}, {"abs_err", nullptr}};
      if (r.exact) {
        row["x_exact"] = *r.exact;
        row["abs_err"] = std::abs(*r.exact - r.approx);
      }
      arr.push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
  }
  std::string csv = "t,x_approx,x_exact,abs_err\n";
  for (const auto& r : rows) {
    csv += num(r.t) + "," + num(r.approx) + ",";
    if (r.exact) csv += num(*r.exact) + "," + num(std::abs(*r.exact - r.approx));
    else csv += ",";
    csv += "\n";
  }
  return csv;
}

std::string statistics_table(const std::vector<TrialStatistics>& rows, const RunConfig& cfg) {
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& s : rows) {
      arr.push_back({{"problem", s.problem},
                     {"m", s.m},
                     {"n", s.n},
                     {"mean_error", s.mean_error},
                     {"std_error", s.std_error},
                     {"ci_lower", s.ci_lower},
                     {"ci_upper", s.ci_upper},
                     {"seed", s.seed.seed}});
    }
    return arr.dump(2) + "\n";
  }
  std::string csv = "m,n,mean_error,std_error,ci_lower,ci_upper,seed\n";
  for (const auto& s : rows) {
    csv += std::to_string(s.m) + "," + std::to_string(s.n) + "," + num(s.mean_error) + "," +
           num(s.std_error) + "," + num(s.ci_lower) + "," + num(s.ci_upper) + "," +
           std::to_string(s.seed.seed) + "\n";
  }
  return csv;
}

TrialConfig trial_config(const RunConfig& cfg, unsigned level, std::size_t n) {
  TrialConfig tc;
  tc.level = level;
  tc.trials = n;
  tc.base = RngSpec{cfg.seed, 0};
  tc.refine = cfg.refine;
  tc.noise = noise_of(cfg);
  tc.workers = cfg.workers;
  return tc;
}

std::string cmd_montecarlo(const RunConfig& cfg) {
  const SVIEProblem problem = load_problem(cfg);
  if (!problem.has_exact()) {
    throw UsageError("problem '" + problem.name + "' has no exact solution; use convergence");
  }
  for (auto n : cfg.trials)
    if (n < 2) throw UsageError("--n must be at least 2 (standard deviation undefined)");
  std::vector<TrialStatistics> rows;
  for (unsigned k : cfg.levels)
    for (std::size_t n : cfg.trials) rows.push_back(run_trials(problem, trial_config(cfg, k, n)));
  return statistics_table(rows, cfg);
}

std::string cmd_convergence(const RunConfig& cfg) {
  const SVIEProblem problem = load_problem(cfg);
  if (cfg.trials.size() != 1) throw UsageError("convergence takes a single --n");
  const std::size_t n = cfg.trials.front();
  if (problem.has_exact() && n < 2) throw UsageError("--n must be at least 2 for error statistics");
  const auto sweep = convergence_sweep(problem, cfg.levels, trial_config(cfg, cfg.levels.front(), n));

  if (problem.has_exact()) {
    std::vector<TrialStatistics> rows;
    for (const auto& level : sweep) rows.push_back(*level.stats);
    return statistics_table(rows, cfg);
  }
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& level : sweep) {
      json probes = json::array();
      for (const auto& p : level.probes) probes.push_back({{"t", p.t}, {"mean_x", p.mean_value}});
      arr.push_back({{"problem", problem.name},
                     {"m", level.m},
                     {"n", level.trials},
                     {"seed", cfg.seed},
                     {"probes", probes}});
    }
    return arr.dump(2) + "\n";
  }
  std::string csv = "m,n,t,mean_x,seed\n";
  for (const auto& level : sweep) {
    for (const auto& p : level.probes) {
      csv += std::to_string(level.m) + "," + std::to_string(level.trials) + "," + num(p.t) + "," +
             num(p.mean_value) + "," + std::to_string(cfg.seed) + "\n";
    }
  }
  return csv;
}

template <class M>
json matrix_json(const M& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class M>
void matrix_csv(std::string& out, const char* label, const M& a) {
  out += "# ";
  out += label;
  out += "\n";
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out += ",";
      if constexpr (std::is_same_v<M, SignMatrix>) out += std::to_string(a(i, j));
      else out += num(a(i, j));
    }
    out += "\n";
  }
}

std::string cmd_matrices(const RunConfig& cfg) {
  const unsigned k = single_level(cfg, "matrices");
  double horizon = 1.0;
  if (!cfg.problem.empty() || !cfg.file.empty()) horizon = load_problem(cfg).horizon;
  const WalshBasis basis(k, horizon);
  const RngSpec rng{cfg.seed, 0};
  const BrownianPath path = sample_path(rng, basis.size(), cfg.refine, horizon, noise_of(cfg));
  const OperationalSet ops = build_operational_set(basis, path);

  if (cfg.format == "json") {
    json doc{{"m", basis.size()},
             {"T", horizon},
             {"seed", cfg.seed},
             {"T_W", matrix_json(basis.transform())},
             {"P", matrix_json(ops.P)},
             {"P_S", matrix_json(ops.P_S)},
             {"Lambda", matrix_json(ops.lambda)},
             {"Lambda_S", matrix_json(ops.lambda_S)}};
    return doc.dump(2) + "\n";
  }
  std::string csv;
  matrix_csv(csv, "T_W", basis.transform());
  matrix_csv(csv, "P", ops.P);
  matrix_csv(csv, "P_S", ops.P_S);
  matrix_csv(csv, "Lambda", ops.lambda);
  matrix_csv(csv, "Lambda_S", ops.lambda_S);
  return csv;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Walsh operational-matrix solver for linear stochastic Volterra integral equations", "svie"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* solve_cmd = app.add_subcommand("solve", "solve one path and write the solution table");
  auto* mc_cmd = app.add_subcommand("montecarlo", "error statistics over independent trials");
  auto* conv_cmd = app.add_subcommand("convergence", "statistics or probe means across levels");
  auto* mat_cmd = app.add_subcommand("matrices", "dump T_W, P, P_S, Lambda, Lambda_S");
  for (auto* cmd : {solve_cmd, mc_cmd, conv_cmd, mat_cmd}) add_common_options(*cmd, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "svie: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    validate(cfg);
    std::string text;
    if (solve_cmd->parsed()) text = cmd_solve(cfg);
    else if (mc_cmd->parsed()) text = cmd_montecarlo(cfg);
    else if (conv_cmd->parsed()) text = cmd_convergence(cfg);
    else text = cmd_matrices(cfg);
    write_output(cfg, text, out);
  } catch (const UsageError& e) {
    err << "svie: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "svie: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "svie: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

} // namespace wsvie::cli
