#pragma once

#include "wsvie/brownian_path.hpp"
#include "wsvie/linalg.hpp"
#include "wsvie/walsh_basis.hpp"

namespace wsvie {

// Deterministic integration matrix of the block pulse functions:
// P(i, j) = integral of phi_i from 0 to the midpoint of cell j,
// i.e. (h/2) on the diagonal, h above it, 0 below.
RealMatrix build_P(const WalshBasis& basis);

// Ito counterpart built from Brownian increments:
// P_S(i, i) = B((2i+1)h/2) - B(ih),  P_S(i, j > i) = B((i+1)h) - B(ih).
// Throws ConfigError when the path grid misses a half-cell point.
RealMatrix build_PS(const WalshBasis& basis, const BrownianPath& path);

// (1/m) T_W M T_W. The map is its own inverse.
RealMatrix to_walsh_domain(const RealMatrix& M, const WalshBasis& basis);

struct OperationalSet {
  RealMatrix P;
  RealMatrix P_S;
  RealMatrix lambda;
  RealMatrix lambda_S;
  unsigned level = 0;
  double horizon = 1.0;
};

OperationalSet build_operational_set(const WalshBasis& basis, const BrownianPath& path);

} // namespace wsvie
