#include "wsvie/brownian_path.hpp"

#include <cmath>
#include <random>
#include <string>

#include "wsvie/error.hpp"

namespace wsvie {

namespace {

constexpr double kGridTolerance = 1e-9;

std::mt19937_64 make_engine(const RngSpec& rng) {
  std::seed_seq seq{static_cast<std::uint32_t>(rng.seed), static_cast<std::uint32_t>(rng.seed >> 32),
                    static_cast<std::uint32_t>(rng.stream),
                    static_cast<std::uint32_t>(rng.stream >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

} // namespace

BrownianPath::BrownianPath(double horizon, std::vector<double> values)
    : horizon_(horizon), values_(std::move(values)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw ConfigError("Brownian path horizon must be positive");
  }
  if (values_.size() < 2) throw ConfigError("Brownian path needs at least one step");
  if (values_.front() != 0.0) throw ConfigError("Brownian path must start at 0");
  step_ = horizon_ / static_cast<double>(values_.size() - 1);
}

std::optional<std::size_t> BrownianPath::grid_index(double t) const {
  if (!(t >= -kGridTolerance * step_) || t > horizon_ + kGridTolerance * step_) return std::nullopt;
  const double u = t / step_;
  const double j = std::round(u);
  if (std::abs(u - j) > kGridTolerance * std::max(1.0, j)) return std::nullopt;
  return static_cast<std::size_t>(j);
}

double BrownianPath::value_at(double t) const {
  if (!(t >= 0.0) || t > horizon_) {
    throw DomainError("B(t): t = " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) +
                      "]");
  }
  if (auto j = grid_index(t)) return values_[*j];
  const double u = t / step_;
  auto j = static_cast<std::size_t>(u);
  if (j >= steps()) j = steps() - 1;
  const double frac = u - static_cast<double>(j);
  return values_[j] + frac * (values_[j + 1] - values_[j]);
}

BrownianPath sample_path(const RngSpec& rng, std::size_t m, std::size_t refine, double horizon,
                         Noise noise) {
  if (m == 0 || refine == 0) throw ConfigError("sample_path: m and refine must be positive");
  const std::size_t n = 2 * m * refine;
  std::vector<double> values(n + 1, 0.0);
  if (noise == Noise::brownian) {
    auto engine = make_engine(rng);
    std::normal_distribution<double> normal(0.0, std::sqrt(horizon / static_cast<double>(n)));
    for (std::size_t j = 1; j <= n; ++j) values[j] = values[j - 1] + normal(engine);
  }
  return BrownianPath(horizon, std::move(values));
}

double ito_integral(const BrownianPath& path, const PathIntegrand& g, double t_end) {
  const auto end = path.grid_index(t_end);
  if (!end) {
    throw DomainError("ito_integral: t_end = " + std::to_string(t_end) + " is not a grid point");
  }
  const auto b = path.values();
  double acc = 0.0;
  for (std::size_t j = 0; j < *end; ++j) {
    acc += g(static_cast<double>(j) * path.step()) * (b[j + 1] - b[j]);
  }
  return acc;
}

double ito_integral_at(const BrownianPath& path, const PathIntegrand& g, double t) {
  if (path.grid_index(t)) return ito_integral(path, g, t);
  if (!(t >= 0.0) || t > path.horizon()) {
    throw DomainError("ito_integral: t = " + std::to_string(t) + " outside the path horizon");
  }
  const auto last = static_cast<std::size_t>(t / path.step());
  const double left = static_cast<double>(last) * path.step();
  return ito_integral(path, g, left) + g(left) * (path.value_at(t) - path.values()[last]);
}

} // namespace wsvie
