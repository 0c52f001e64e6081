#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wsvie {

// Identifies one reproducible random stream: a base seed plus a per-trial substream.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  bool operator==(const RngSpec&) const = default;
};

enum class Noise { brownian, zero };

// One sampled Brownian trajectory on the uniform grid t_j = j * step, j = 0..N.
class BrownianPath {
public:
  // values[0] must be 0; the grid spans [0, horizon] in values.size() - 1 steps.
  BrownianPath(double horizon, std::vector<double> values);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return values_.size() - 1; }
  double step() const noexcept { return step_; }
  std::span<const double> values() const noexcept { return values_; }

  // Index j with j * step == t (to round-off), if t lies on the grid.
  std::optional<std::size_t> grid_index(double t) const;

  // Exact grid value on grid points, linear interpolation in between.
  double value_at(double t) const;

private:
  double horizon_;
  double step_;
  std::vector<double> values_;
};

// Samples a path with N = 2 * m * refine steps on [0, horizon]. Every half-cell
// point of an m-cell partition is then a grid point.
BrownianPath sample_path(const RngSpec& rng, std::size_t m, std::size_t refine, double horizon,
                         Noise noise = Noise::brownian);

using PathIntegrand = std::function<double(double s)>;

// Left-endpoint Ito sum  sum_{j : j*step < t_end} g(j*step) (B_{j+1} - B_j).
// t_end must be a grid point.
double ito_integral(const BrownianPath& path, const PathIntegrand& g, double t_end);

// Same sum for arbitrary t in [0, horizon]: the final partial step uses the
// interpolated value B(t). Agrees with ito_integral on grid points.
double ito_integral_at(const BrownianPath& path, const PathIntegrand& g, double t);

} // namespace wsvie
