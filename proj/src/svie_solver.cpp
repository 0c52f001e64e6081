#include "wsvie/svie_solver.hpp"

#include <cmath>
#include <string>

#include "wsvie/error.hpp"

namespace wsvie {

namespace {

void check_compatible(const SVIEProblem& problem, const WalshBasis& basis,
                      const OperationalSet& ops) {
  if (!problem.forcing || !problem.drift_kernel || !problem.diffusion_kernel) {
    throw ConfigError("problem '" + problem.name + "' is missing f, k1 or k2");
  }
  if (!(problem.horizon > 0.0)) throw ConfigError("problem horizon must be positive");
  if (std::abs(problem.horizon - basis.horizon()) > 1e-12 * problem.horizon) {
    throw ConfigError("problem horizon " + std::to_string(problem.horizon) +
                      " differs from basis horizon " + std::to_string(basis.horizon()));
  }
  if (ops.level != basis.level() || ops.P.rows() != basis.size() ||
      ops.P_S.rows() != basis.size()) {
    throw DimensionError("operational matrices were built for a different basis");
  }
}

// (K o M)^T as a dense matrix: entry (i, j) = K(j, i) * M(j, i).
RealMatrix convolution_operator(const KernelMatrix& kernel, const RealMatrix& M) {
  return transpose(hadamard(kernel.values, M));
}

} // namespace

LinearSystem assemble_system(const SVIEProblem& problem, const WalshBasis& basis,
                             const OperationalSet& ops, const BrownianPath& path) {
  check_compatible(problem, basis, ops);
  const std::size_t m = basis.size();
  const KernelMatrix k1 = project_kernel(problem.drift_kernel, basis);
  const KernelMatrix k2 = project_kernel(problem.diffusion_kernel, basis);
  const RealMatrix drift = convolution_operator(k1, ops.P);
  const RealMatrix diffusion = convolution_operator(k2, ops.P_S);

  LinearSystem sys{RealMatrix::identity(m), project_scalar(problem.forcing, basis, &path).values};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) sys.matrix(i, j) -= drift(i, j) + diffusion(i, j);
  return sys;
}

LinearSystem assemble_walsh_system(const SVIEProblem& problem, const WalshBasis& basis,
                                   const OperationalSet& ops, const BrownianPath& path) {
  check_compatible(problem, basis, ops);
  const std::size_t m = basis.size();
  const double inv_m = 1.0 / static_cast<double>(m);
  const RealMatrix& tw = basis.transform_real();

  // Walsh coefficients of forcing and kernels: k(s,t) = W(s)^T C W(t), C = T_W K T_W / m^2.
  const RealVector forcing_coeffs =
      cell_to_walsh(project_scalar(problem.forcing, basis, &path), basis);
  auto kernel_coeffs = [&](const KernelField& g) {
    return scaled(multiply(multiply(tw, project_kernel(g, basis).values), tw), inv_m * inv_m);
  };
  const RealMatrix c1 = kernel_coeffs(problem.drift_kernel);
  const RealMatrix c2 = kernel_coeffs(problem.diffusion_kernel);

  // Back to block-pulse form: K^T = T_W C^T T_W, P = (1/m) T_W Lambda T_W.
  const RealMatrix k1t = multiply(multiply(tw, transpose(c1)), tw);
  const RealMatrix k2t = multiply(multiply(tw, transpose(c2)), tw);
  const RealMatrix p = to_walsh_domain(ops.lambda, basis);
  const RealMatrix ps = to_walsh_domain(ops.lambda_S, basis);

  // Column l: image of the Walsh unit vector e_l, whose cell values are
  // column l of T_W. hat(K^T diag(x) P) gives the cell values of the
  // convolution term; (1/m) T_W maps them back to Walsh coefficients.
  LinearSystem sys{RealMatrix::identity(m), forcing_coeffs};
  RealVector hat(m);
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double x = tw(j, l);
        acc += k1t(i, j) * x * p(j, i) + k2t(i, j) * x * ps(j, i);
      }
      hat[i] = acc;
    }
    const RealVector image = cell_to_walsh(hat, basis);
    for (std::size_t r = 0; r < m; ++r) sys.matrix(r, l) -= image[r];
  }
  return sys;
}

SolveResult solve(const SVIEProblem& problem, const WalshBasis& basis, const BrownianPath& path,
                  const RngSpec& rng) {
  const OperationalSet ops = build_operational_set(basis, path);
  const LinearSystem sys = assemble_system(problem, basis, ops, path);
  RealVector x = solve_linear(sys.matrix, sys.rhs);

  const double residual = residual_inf(sys.matrix, x, sys.rhs);
  if (!(residual <= 1e-9 * (1.0 + max_abs(sys.rhs)))) {
    throw SingularSystemError(0, "problem '" + problem.name + "': linear residual " +
                                     std::to_string(residual) + " exceeds tolerance");
  }
  SolveResult out{CellVector{std::move(x)}, {}, basis, rng, residual};
  out.walsh_coeffs = cell_to_walsh(out.cell_values, basis);
  return out;
}

SolveResult solve(const SVIEProblem& problem, const WalshBasis& basis, const RngSpec& rng,
                  std::size_t refine, Noise noise) {
  const BrownianPath path = sample_path(rng, basis.size(), refine, basis.horizon(), noise);
  return solve(problem, basis, path, rng);
}

CellVector solve_walsh_domain(const SVIEProblem& problem, const WalshBasis& basis,
                              const OperationalSet& ops, const BrownianPath& path) {
  const LinearSystem sys = assemble_walsh_system(problem, basis, ops, path);
  return walsh_to_cell(solve_linear(sys.matrix, sys.rhs), basis);
}

RealVector picard_oracle(const SVIEProblem& problem, const WalshBasis& basis,
                         const OperationalSet& ops, const BrownianPath& path,
                         std::size_t max_iter, double tol) {
  check_compatible(problem, basis, ops);
  const std::size_t m = basis.size();
  const CellVector forcing = project_scalar(problem.forcing, basis, &path);
  const KernelMatrix k1 = project_kernel(problem.drift_kernel, basis);
  const KernelMatrix k2 = project_kernel(problem.diffusion_kernel, basis);

  RealVector x = forcing.values;
  RealVector next(m);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < m; ++i) {
      double acc = forcing[i];
      for (std::size_t j = 0; j <= i; ++j) {
        acc += (k1.values(j, i) * ops.P(j, i) + k2.values(j, i) * ops.P_S(j, i)) * x[j];
      }
      next[i] = acc;
    }
    const double change = max_abs_diff(next, x);
    x.swap(next);
    if (!std::isfinite(change)) break;
    if (change < tol * (1.0 + max_abs(x))) return x;
  }
  throw ConvergenceError("picard_oracle: no convergence for '" + problem.name + "' after " +
                         std::to_string(max_iter) + " iterations");
}

} // namespace wsvie
