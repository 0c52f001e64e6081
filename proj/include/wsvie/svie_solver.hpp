#pragma once

#include <cstddef>
#include <string>

#include "wsvie/brownian_path.hpp"
#include "wsvie/linalg.hpp"
#include "wsvie/operational_matrices.hpp"
#include "wsvie/walsh_basis.hpp"

namespace wsvie {

// x(t) = f(t) + int_0^t k1(s,t) x(s) ds + int_0^t k2(s,t) x(s) dB(s)  on [0, horizon).
struct SVIEProblem {
  std::string name;
  double horizon = 1.0;
  ScalarField forcing;
  KernelField drift_kernel;
  KernelField diffusion_kernel;
  // Closed-form solution on the same path; empty when unknown.
  ScalarField exact;

  bool has_exact() const noexcept { return static_cast<bool>(exact); }
};

struct LinearSystem {
  RealMatrix matrix;
  RealVector rhs;
};

struct SolveResult {
  CellVector cell_values;
  RealVector walsh_coeffs;
  WalshBasis basis;
  RngSpec rng;
  double residual = 0.0;
};

// Cell-average form of the reduced system:
//   A = I - (K1 o P)^T - (K2 o P_S)^T,  b = F
// with o the entrywise product and K1, K2, F midpoint projections.
LinearSystem assemble_system(const SVIEProblem& problem, const WalshBasis& basis,
                             const OperationalSet& ops, const BrownianPath& path);

// Same system expressed on Walsh coefficients: unknown Y with x = T_W Y,
// kernels as Walsh coefficient matrices, P and P_S recovered from Lambda and
// Lambda_S, and the convolution terms taken through the diagonal-extraction
// (hat) operator. Used to cross-check the cell-domain assembly.
LinearSystem assemble_walsh_system(const SVIEProblem& problem, const WalshBasis& basis,
                                   const OperationalSet& ops, const BrownianPath& path);

SolveResult solve(const SVIEProblem& problem, const WalshBasis& basis, const BrownianPath& path,
                  const RngSpec& rng = {});
SolveResult solve(const SVIEProblem& problem, const WalshBasis& basis, const RngSpec& rng,
                  std::size_t refine = 16, Noise noise = Noise::brownian);

// Cell values from the Walsh-domain route.
CellVector solve_walsh_domain(const SVIEProblem& problem, const WalshBasis& basis,
                              const OperationalSet& ops, const BrownianPath& path);

// Fixed-point iteration x <- F + (K1 o P)^T x + (K2 o P_S)^T x starting at F,
// stopped when the max-norm update drops below tol.
RealVector picard_oracle(const SVIEProblem& problem, const WalshBasis& basis,
                         const OperationalSet& ops, const BrownianPath& path,
                         std::size_t max_iter = 10000, double tol = 1e-14);

} // namespace wsvie
