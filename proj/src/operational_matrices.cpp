#include "wsvie/operational_matrices.hpp"

#include <cmath>
#include <string>

#include "wsvie/error.hpp"

namespace wsvie {

RealMatrix build_P(const WalshBasis& basis) {
  const std::size_t m = basis.size();
  const double h = basis.width();
  RealMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    out(i, i) = 0.5 * h;
    for (std::size_t j = i + 1; j < m; ++j) out(i, j) = h;
  }
  return out;
}

RealMatrix build_PS(const WalshBasis& basis, const BrownianPath& path) {
  if (std::abs(path.horizon() - basis.horizon()) > 1e-12 * basis.horizon()) {
    throw ConfigError("build_PS: path horizon " + std::to_string(path.horizon()) +
                      " differs from basis horizon " + std::to_string(basis.horizon()));
  }
  const std::size_t m = basis.size();
  const double half = 0.5 * basis.width();
  auto b = [&](std::size_t half_steps) {
    const auto j = path.grid_index(static_cast<double>(half_steps) * half);
    if (!j) {
      throw ConfigError("build_PS: path grid lacks the point " + std::to_string(half_steps) +
                        " * h/2 (need steps divisible by 2m)");
    }
    return path.values()[*j];
  };

  RealMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const double left = b(2 * i);
    out(i, i) = b(2 * i + 1) - left;
    const double full = b(2 * i + 2) - left;
    for (std::size_t j = i + 1; j < m; ++j) out(i, j) = full;
  }
  return out;
}

RealMatrix to_walsh_domain(const RealMatrix& M, const WalshBasis& basis) {
  if (M.rows() != basis.size() || M.cols() != basis.size()) {
    throw DimensionError("to_walsh_domain: matrix is " + std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()) + ", basis size " + std::to_string(basis.size()));
  }
  const RealMatrix& tw = basis.transform_real();
  return scaled(multiply(multiply(tw, M), tw), 1.0 / static_cast<double>(basis.size()));
}

OperationalSet build_operational_set(const WalshBasis& basis, const BrownianPath& path) {
  OperationalSet ops;
  ops.P = build_P(basis);
  ops.P_S = build_PS(basis, path);
  ops.lambda = to_walsh_domain(ops.P, basis);
  ops.lambda_S = to_walsh_domain(ops.P_S, basis);
  ops.level = basis.level();
  ops.horizon = basis.horizon();
  return ops;
}

} // namespace wsvie
