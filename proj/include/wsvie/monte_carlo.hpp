#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsvie/brownian_path.hpp"
#include "wsvie/svie_solver.hpp"

namespace wsvie {

// 97.5% standard normal quantile used for the two-sided 95% interval.
inline constexpr double kNormalQuantile95 = 1.96;

struct ErrorSample {
  std::size_t trial_index = 0;
  double error = 0.0;
};

struct TrialStatistics {
  std::size_t n = 0;
  double mean_error = 0.0;
  double std_error = 0.0;  // sample standard deviation, n - 1 divisor
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  std::size_t m = 0;
  std::string problem;
  RngSpec seed;
};

// max_i |X_i - Y_i| over Walsh coefficients.
double error_metric(std::span<const double> exact_coeffs, std::span<const double> approx_coeffs);

// One trial: solve on `path`, sample the exact solution on the same path at the
// cell midpoints and compare Walsh coefficients.
double trial_error(const SVIEProblem& problem, const WalshBasis& basis, const BrownianPath& path,
                   const RngSpec& rng = {});

// Mean, sample standard deviation and mean +- 1.96 s / sqrt(n). Needs n >= 2.
TrialStatistics summarize(std::span<const double> errors);

struct TrialConfig {
  unsigned level = 3;
  std::size_t trials = 50;
  RngSpec base;
  std::size_t refine = 16;
  Noise noise = Noise::brownian;
  unsigned workers = 1;
};

// Trial i uses stream base.stream + i. Results are ordered by trial index
// regardless of the worker count.
std::vector<ErrorSample> sample_errors(const SVIEProblem& problem, const TrialConfig& config);

TrialStatistics run_trials(const SVIEProblem& problem, const TrialConfig& config);

inline constexpr std::size_t kProbeCount = 9;

struct ProbeMean {
  double t = 0.0;
  double mean_value = 0.0;
};

struct SweepLevel {
  unsigned level = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  std::optional<TrialStatistics> stats;  // when the problem has an exact solution
  std::vector<ProbeMean> probes;         // otherwise: trial mean at t = 0.1, ..., 0.9
};

enum class LevelCoupling {
  // Trial i samples one path (stream base.stream + i) on the grid of the
  // finest level and every level solves on that same path.
  shared_paths,
  // Level l (position in `levels`) uses streams base.stream + l * trials + i.
  independent_streams,
};

std::vector<SweepLevel> convergence_sweep(const SVIEProblem& problem,
                                          std::span<const unsigned> levels,
                                          const TrialConfig& config,
                                          LevelCoupling coupling = LevelCoupling::shared_paths);

std::vector<double> probe_points(double horizon);

} // namespace wsvie
