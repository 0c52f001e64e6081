#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "wsvie/error.hpp"
#include "wsvie/problems.hpp"
#include "wsvie/svie_solver.hpp"

using namespace wsvie;
using wsvie::test::bond_problem;
using wsvie::test::forcing_only;

namespace {

BrownianPath path_for(const WalshBasis& b, std::uint64_t seed, Noise noise = Noise::brownian) {
  return sample_path({seed, 0}, b.size(), 16, b.horizon(), noise);
}

} // namespace

TEST_CASE("assemble_system: zero kernels give the identity") {
  const WalshBasis b(3);
  const auto problem = forcing_only([](double t, const BrownianPath*) { return 3 * t; });
  const BrownianPath path = path_for(b, 1);
  const LinearSystem sys = assemble_system(problem, b, build_operational_set(b, path), path);
  CHECK(sys.matrix == RealMatrix::identity(8));
  CHECK(sys.rhs == project_scalar(problem.forcing, b).values);
}

TEST_CASE("assemble_system: bond problem at m = 2 against the componentwise formula") {
  const WalshBasis b(1);
  const BrownianPath path = path_for(b, 0, Noise::zero);
  const OperationalSet ops = build_operational_set(b, path);
  const LinearSystem sys = assemble_system(bond_problem(), b, ops, path);

  // A(i, j) = delta_ij - K(j, i) P(j, i), K(i, j) = sin((2i + 1)/4)
  const double h = 0.5;
  const double k0 = std::sin(0.25), k1 = std::sin(0.75);
  const RealMatrix expected{{1.0 - k0 * h / 2, 0.0}, {-k0 * h, 1.0 - k1 * h / 2}};
  CHECK(max_abs_diff(sys.matrix, expected) <= 1e-15);
  CHECK(sys.rhs == RealVector{1.0, 1.0});

  const RealVector direct = solve_linear(sys.matrix, sys.rhs);
  const RealVector fixed = picard_oracle(bond_problem(), b, ops, path);
  CHECK(max_abs_diff(direct, fixed) <= 1e-10);
}

TEST_CASE("assemble_system: example1 coefficients match the componentwise formula") {
  const SVIEProblem p = registry_lookup("example1");
  const WalshBasis b(2, p.horizon);
  const BrownianPath path = path_for(b, 4);
  const OperationalSet ops = build_operational_set(b, path);
  const LinearSystem sys = assemble_system(p, b, ops, path);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(sys.rhs[i] == 1.0);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double sj = b.midpoint(j);
      const double expected = (i == j ? 1.0 : 0.0) - std::cos(sj) * ops.P(j, i) -
                              std::sin(sj) * ops.P_S(j, i);
      CHECK(sys.matrix(i, j) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
}

TEST_CASE("assemble_system: incompatible inputs") {
  const WalshBasis b(2), b3(3), half(2, 0.5);
  const BrownianPath path = path_for(b, 1);
  const OperationalSet ops = build_operational_set(b, path);
  CHECK_THROWS_AS(assemble_system(bond_problem(), b3, ops, path), DimensionError);
  CHECK_THROWS_AS(assemble_system(bond_problem(), half, ops, path), ConfigError);
  SVIEProblem broken = bond_problem();
  broken.drift_kernel = nullptr;
  CHECK_THROWS_AS(assemble_system(broken, b, ops, path), ConfigError);
}

TEST_CASE("solve: bond problem converges to e^{1 - cos t} at the midpoints") {
  const WalshBasis b(6);
  const SolveResult r = solve(bond_problem(), b, RngSpec{}, 16, Noise::zero);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i)
    worst = std::max(worst, std::abs(r.cell_values[i] - std::exp(1.0 - std::cos(b.midpoint(i)))));
  CHECK(worst <= 0.02);
  CHECK(r.walsh_coeffs == cell_to_walsh(r.cell_values, b));
}

TEST_CASE("solve: example1 at m = 8 is finite with a small residual") {
  const SVIEProblem p = registry_lookup("example1");
  const WalshBasis b(3, p.horizon);
  const SolveResult r = solve(p, b, RngSpec{123, 4});
  for (double v : r.cell_values.values) CHECK(std::isfinite(v));
  CHECK(r.residual <= 1e-9);
  CHECK(r.rng == RngSpec{123, 4});
}

TEST_CASE("solve: forcing only returns the projected forcing") {
  const WalshBasis b(4);
  const SolveResult r =
      solve(forcing_only([](double t, const BrownianPath*) { return t; }), b, RngSpec{1, 1});
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(r.cell_values[i] == b.midpoint(i));
}

TEST_CASE("solve: single cell is a scalar equation") {
  SVIEProblem p = bond_problem();
  p.horizon = 2.0;
  p.diffusion_kernel = [](double s, double t) { return s + t; };
  const WalshBasis b(0, 2.0);
  const BrownianPath path = path_for(b, 9);
  const SolveResult r = solve(p, b, path);
  const double bh = path.value_at(1.0);
  const double expected = 1.0 / (1.0 - std::sin(1.0) * 1.0 - 2.0 * bh);
  CHECK(r.cell_values[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("solve: singular system surfaces as an error") {
  SVIEProblem p = bond_problem();
  p.drift_kernel = [](double, double) { return 2.0; };  // 1 - 2 * h/2 = 0 for m = 1, T = 1
  CHECK_THROWS_AS(solve(p, WalshBasis(0), RngSpec{}, 1, Noise::zero), SingularSystemError);
}

TEST_CASE("solve: deterministic given its inputs") {
  const SVIEProblem p = registry_lookup("example2");
  const WalshBasis b(4);
  const SolveResult a = solve(p, b, RngSpec{7, 3});
  const SolveResult c = solve(p, b, RngSpec{7, 3});
  CHECK(a.cell_values == c.cell_values);
}

TEST_CASE("picard_oracle: listed cases") {
  const WalshBasis b(3);
  const BrownianPath path = path_for(b, 2);
  const OperationalSet ops = build_operational_set(b, path);

  const auto f_only = forcing_only([](double t, const BrownianPath*) { return std::cos(t); });
  CHECK(picard_oracle(f_only, b, ops, path, 1) == project_scalar(f_only.forcing, b).values);

  const BrownianPath flat = path_for(b, 0, Noise::zero);
  const OperationalSet flat_ops = build_operational_set(b, flat);
  CHECK(max_abs_diff(picard_oracle(bond_problem(), b, flat_ops, flat),
                     solve(bond_problem(), b, flat).cell_values.values) <= 1e-10);

  const SVIEProblem ex1 = registry_lookup("example1");
  const WalshBasis b1(3, ex1.horizon);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BrownianPath p = path_for(b1, seed);
    const OperationalSet o = build_operational_set(b1, p);
    CHECK(max_abs_diff(picard_oracle(ex1, b1, o, p), solve(ex1, b1, p).cell_values.values) <= 1e-8);
  }
}

TEST_CASE("picard_oracle: non-convergence is reported") {
  SVIEProblem p = bond_problem();
  p.drift_kernel = [](double, double) { return 6.0; };  // diagonal factor 1.5 per sweep
  const WalshBasis b(0);
  const BrownianPath path = path_for(b, 0, Noise::zero);
  CHECK_THROWS_AS(picard_oracle(p, b, build_operational_set(b, path), path, 50), ConvergenceError);
}

TEST_CASE("oracle equivalence and Walsh-domain equivalence over the registry") {
  for (const auto& name : registry_names()) {
    const SVIEProblem p = registry_lookup(name);
    for (unsigned k = 1; k <= 5; ++k) {
      const WalshBasis b(k, p.horizon);
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CAPTURE(name);
        CAPTURE(k);
        CAPTURE(seed);
        const BrownianPath path = path_for(b, 1000 + seed);
        const OperationalSet ops = build_operational_set(b, path);
        const SolveResult direct = solve(p, b, path);
        const double scale = 1.0 + max_abs(direct.cell_values.values);
        CHECK(max_abs_diff(direct.cell_values.values, picard_oracle(p, b, ops, path)) <= 1e-8 * scale);
        CHECK(max_abs_diff(direct.cell_values.values, solve_walsh_domain(p, b, ops, path).values) <=
              1e-10 * scale);
      }
    }
  }
}

TEST_CASE("zero-noise solutions do not depend on the seed") {
  const SVIEProblem p = registry_lookup("stock");
  const WalshBasis b(4);
  const SolveResult a = solve(p, b, RngSpec{1, 0}, 16, Noise::zero);
  const SolveResult c = solve(p, b, RngSpec{999, 5}, 16, Noise::zero);
  CHECK(a.cell_values == c.cell_values);
}

TEST_CASE("solution is linear in the forcing term on a fixed path") {
  const SVIEProblem base = registry_lookup("example2");
  const WalshBasis b(5);
  const BrownianPath path = path_for(b, 31);
  auto with_forcing = [&](ScalarField f) {
    SVIEProblem p = base;
    p.forcing = std::move(f);
    return solve(p, b, path).cell_values.values;
  };
  auto f1 = [](double t, const BrownianPath*) { return std::sin(3 * t) + 1.0; };
  auto f2 = [](double t, const BrownianPath* path) { return t * t + path->value_at(t); };
  const double a = 1.75, c = -0.5;
  const RealVector x1 = with_forcing(f1), x2 = with_forcing(f2);
  const RealVector mix =
      with_forcing([&](double t, const BrownianPath* path) { return a * f1(t, path) + c * f2(t, path); });
  for (std::size_t i = 0; i < mix.size(); ++i) CHECK(std::abs(mix[i] - (a * x1[i] + c * x2[i])) <= 1e-10);
}
