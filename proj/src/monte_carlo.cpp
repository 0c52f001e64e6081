#include "wsvie/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "wsvie/error.hpp"
#include "wsvie/linalg.hpp"
#include "wsvie/walsh_basis.hpp"

namespace wsvie {

namespace {

RngSpec trial_rng(const RngSpec& base, std::size_t index) {
  return RngSpec{base.seed, base.stream + index};
}

// Runs body(i) for i in [0, count) on up to `workers` threads. The first
// failing index (lowest) is rethrown with its index in the message.
template <class Body>
void for_each_trial(std::size_t count, unsigned workers, Body body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<std::exception_ptr> failures(count);
  auto run = [&](unsigned w) {
    for (std::size_t i = w; i < count; i += workers) {
      try {
        body(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      throw Error("trial " + std::to_string(i) + ": " + e.what());
    }
  }
}

} // namespace

double error_metric(std::span<const double> exact_coeffs, std::span<const double> approx_coeffs) {
  if (exact_coeffs.size() != approx_coeffs.size()) {
    throw DimensionError("error_metric: " + std::to_string(exact_coeffs.size()) + " vs " +
                         std::to_string(approx_coeffs.size()) + " coefficients");
  }
  return max_abs_diff(exact_coeffs, approx_coeffs);
}

TrialStatistics summarize(std::span<const double> errors) {
  if (errors.size() < 2) throw ConfigError("statistics need at least 2 trials");
  const auto n = static_cast<double>(errors.size());
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= n;
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double half = kNormalQuantile95 * sd / std::sqrt(n);

  TrialStatistics out;
  out.n = errors.size();
  out.mean_error = mean;
  out.std_error = sd;
  out.ci_lower = mean - half;
  out.ci_upper = mean + half;
  return out;
}

double trial_error(const SVIEProblem& problem, const WalshBasis& basis, const BrownianPath& path,
                   const RngSpec& rng) {
  const SolveResult result = solve(problem, basis, path, rng);
  const RealVector exact = cell_to_walsh(project_scalar(problem.exact, basis, &path), basis);
  return error_metric(exact, result.walsh_coeffs);
}

std::vector<ErrorSample> sample_errors(const SVIEProblem& problem, const TrialConfig& config) {
  if (!problem.has_exact()) {
    throw ConfigError("problem '" + problem.name + "' has no exact solution");
  }
  const WalshBasis basis(config.level, problem.horizon);
  std::vector<ErrorSample> samples(config.trials);
  for_each_trial(config.trials, config.workers, [&](std::size_t i) {
    const RngSpec rng = trial_rng(config.base, i);
    const BrownianPath path =
        sample_path(rng, basis.size(), config.refine, basis.horizon(), config.noise);
    samples[i] = ErrorSample{i, trial_error(problem, basis, path, rng)};
  });
  return samples;
}

TrialStatistics run_trials(const SVIEProblem& problem, const TrialConfig& config) {
  if (config.trials < 2) throw ConfigError("run_trials needs n >= 2 (standard deviation undefined)");
  const auto samples = sample_errors(problem, config);
  std::vector<double> errors;
  errors.reserve(samples.size());
  for (const auto& s : samples) errors.push_back(s.error);

  TrialStatistics stats = summarize(errors);
  stats.m = std::size_t{1} << config.level;
  stats.problem = problem.name;
  stats.seed = config.base;
  return stats;
}

std::vector<double> probe_points(double horizon) {
  std::vector<double> out;
  for (std::size_t j = 1; j <= kProbeCount; ++j) {
    const double t = 0.1 * static_cast<double>(j);
    if (t < horizon) out.push_back(t);
  }
  return out;
}

std::vector<SweepLevel> convergence_sweep(const SVIEProblem& problem,
                                          std::span<const unsigned> levels,
                                          const TrialConfig& config, LevelCoupling coupling) {
  if (levels.empty()) throw ConfigError("convergence_sweep: no levels given");
  if (config.trials < 1) throw ConfigError("convergence_sweep: need at least one trial");
  if (problem.has_exact() && config.trials < 2) {
    throw ConfigError("convergence_sweep: error statistics need n >= 2");
  }

  const std::size_t count = levels.size();
  const std::size_t n = config.trials;
  std::vector<WalshBasis> bases;
  for (unsigned k : levels) bases.emplace_back(k, problem.horizon);
  const auto probes = probe_points(problem.horizon);
  const std::size_t finest =
      std::max_element(bases.begin(), bases.end(),
                       [](const auto& a, const auto& b) { return a.size() < b.size(); })
          ->size();

  // errors[l][i] or values[l][i][p]
  std::vector<std::vector<double>> errors(count, std::vector<double>(n));
  std::vector<std::vector<std::vector<double>>> values(
      count, std::vector<std::vector<double>>(n, std::vector<double>(probes.size())));

  auto run_level = [&](std::size_t l, std::size_t i, const BrownianPath& path, const RngSpec& rng) {
    if (problem.has_exact()) {
      errors[l][i] = trial_error(problem, bases[l], path, rng);
      return;
    }
    const SolveResult result = solve(problem, bases[l], path, rng);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      values[l][i][p] = reconstruct(result.cell_values, bases[l], probes[p]);
    }
  };

  if (coupling == LevelCoupling::shared_paths) {
    // N = 2 * finest * R is a multiple of 2 * m * R for every coarser m.
    for_each_trial(n, config.workers, [&](std::size_t i) {
      const RngSpec rng = trial_rng(config.base, i);
      const BrownianPath path = sample_path(rng, finest, config.refine, problem.horizon, config.noise);
      for (std::size_t l = 0; l < count; ++l) run_level(l, i, path, rng);
    });
  } else {
    for (std::size_t l = 0; l < count; ++l) {
      for_each_trial(n, config.workers, [&](std::size_t i) {
        const RngSpec rng = trial_rng(config.base, l * n + i);
        const BrownianPath path =
            sample_path(rng, bases[l].size(), config.refine, problem.horizon, config.noise);
        run_level(l, i, path, rng);
      });
    }
  }

  std::vector<SweepLevel> out;
  for (std::size_t l = 0; l < count; ++l) {
    SweepLevel row;
    row.level = levels[l];
    row.m = bases[l].size();
    row.trials = n;
    if (problem.has_exact()) {
      TrialStatistics stats = summarize(errors[l]);
      stats.m = row.m;
      stats.problem = problem.name;
      stats.seed = config.base;
      row.stats = std::move(stats);
    } else {
      for (std::size_t p = 0; p < probes.size(); ++p) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += values[l][i][p];
        row.probes.push_back({probes[p], acc / static_cast<double>(n)});
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

} // namespace wsvie
