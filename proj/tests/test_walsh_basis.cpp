#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wsvie/error.hpp"
#include "wsvie/walsh_basis.hpp"

using namespace wsvie;

namespace {

// Independent oracle: sign of sin(2^i pi t) in floating point. Only valid
// away from the zeros of the sine.
int float_rademacher(unsigned i, double t) {
  if (i == 0) return 1;
  const double v = std::sin(std::ldexp(std::numbers::pi, static_cast<int>(i)) * t);
  return v > 0 ? 1 : -1;
}

int float_walsh(std::uint64_t n, double t) {
  int sign = 1;
  for (unsigned bit = 0; n; ++bit, n >>= 1)
    if (n & 1u) sign *= float_rademacher(bit + 1, t);
  return sign;
}

} // namespace

TEST_CASE("rademacher: listed values") {
  CHECK(rademacher(0, 0.7) == 1);
  CHECK(rademacher(1, 0.25) == 1);
  CHECK(rademacher(1, 0.75) == -1);
  CHECK(rademacher(2, 0.3) == -1);
}

TEST_CASE("rademacher: zeros of the sine give 0") {
  CHECK(rademacher(1, 0.0) == 0);
  CHECK(rademacher(1, 0.5) == 0);
  CHECK(rademacher(2, 0.25) == 0);
  CHECK(rademacher(3, 0.625) == 0);
  CHECK(rademacher(0, 0.0) == 1);
}

TEST_CASE("rademacher: domain") {
  CHECK_THROWS_AS(rademacher(1, 1.0), DomainError);
  CHECK_THROWS_AS(rademacher(1, -0.1), DomainError);
  CHECK_THROWS_AS(walsh_eval(3, 1.5), DomainError);
  CHECK_THROWS_AS(rademacher(2, std::nan("")), DomainError);
}

TEST_CASE("rademacher: matches the floating sine away from zeros") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double t = u(gen);
    for (unsigned i = 0; i <= 10; ++i) {
      // skip points within round-off of a zero of sin(2^i pi t)
      const double x = std::ldexp(t, static_cast<int>(i));
      if (std::abs(x - std::round(x)) < 1e-9) continue;
      CHECK(rademacher(i, t) == float_rademacher(i, t));
    }
  }
}

TEST_CASE("walsh_eval: listed values") {
  CHECK(walsh_eval(0, 0.0) == 1);
  CHECK(walsh_eval(0, 0.99) == 1);
  CHECK(walsh_eval(1, 0.75) == -1);
  CHECK(walsh_eval(3, 0.1) == 1);
  CHECK(walsh_eval(3, 0.1) == float_rademacher(2, 0.1) * float_rademacher(1, 0.1));
}

TEST_CASE("walsh_eval: right-continuous at breakpoints") {
  // just right of 0.5, r_1 is negative
  CHECK(walsh_eval(1, 0.5) == -1);
  CHECK(walsh_eval(1, 0.0) == 1);
  CHECK(walsh_eval(2, 0.25) == -1);
}

TEST_CASE("build_transform: small levels") {
  CHECK(build_transform(0) == SignMatrix{{1}});
  CHECK(build_transform(1) == SignMatrix{{1, 1}, {1, -1}});
  const SignMatrix k2{{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
  CHECK(build_transform(2) == k2);

  // oracle: products of floating-sine Rademacher values at 1/8, 3/8, 5/8, 7/8
  for (std::uint64_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(k2(i, j) == float_walsh(i, (2.0 * j + 1.0) / 8.0));
}

TEST_CASE("build_transform: capacity guard") {
  CHECK_THROWS_AS(build_transform(17), CapacityError);
  CHECK_THROWS_AS(WalshBasis(17), CapacityError);
}

TEST_CASE("build_transform: matches the floating oracle, orthogonality and symmetry up to k = 7") {
  for (unsigned k = 0; k <= 7; ++k) {
    const SignMatrix tw = build_transform(k);
    const std::size_t m = tw.rows();
    CAPTURE(k);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        REQUIRE(tw(i, j) == float_walsh(i, (2.0 * j + 1.0) / (2.0 * m)));

    const SignMatrix sq = multiply(tw, tw);
    SignMatrix expected(m, m);
    for (std::size_t i = 0; i < m; ++i) expected(i, i) = static_cast<int>(m);
    CHECK(sq == expected);

    for (std::size_t i = 0; i < m; ++i) {
      int row_sum = 0;
      for (std::size_t j = 0; j < m; ++j) {
        CHECK(tw(i, j) == tw(j, i));
        row_sum += tw(i, j);
      }
      CHECK(row_sum == (i == 0 ? static_cast<int>(m) : 0));
    }
  }
}

TEST_CASE("WalshBasis geometry") {
  const WalshBasis b(3, 0.5);
  CHECK(b.size() == 8);
  CHECK(b.width() == 0.0625);
  CHECK(b.width() * static_cast<double>(b.size()) == 0.5);
  CHECK(b.midpoint(0) == 0.03125);
  CHECK(b.cell_of(0.0625) == 1);
  CHECK(b.cell_of(0.4999999) == 7);
  CHECK_THROWS_AS(b.cell_of(0.5), DomainError);
  CHECK_THROWS_AS(WalshBasis(2, 0.0), ConfigError);
}

TEST_CASE("project_scalar") {
  const WalshBasis b1(1, 1.0);
  CHECK(project_scalar([](double, const BrownianPath*) { return 1.0; }, WalshBasis(4)).values ==
        RealVector(16, 1.0));
  CHECK(project_scalar([](double t, const BrownianPath*) { return t; }, b1).values ==
        RealVector{0.25, 0.75});
  CHECK(project_scalar([](double, const BrownianPath*) { return -2.5; }, b1).values ==
        RealVector{-2.5, -2.5});
}

TEST_CASE("project_scalar: evaluation failures name the cell") {
  const WalshBasis b(2);
  auto f = [](double t, const BrownianPath*) -> double {
    if (t > 0.5) throw DomainError("log of negative argument");
    return t;
  };
  try {
    project_scalar(f, b);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("cell 2") != std::string::npos);
  }
}

TEST_CASE("project_kernel") {
  const WalshBasis b(1);
  const auto zero = project_kernel([](double, double) { return 0.0; }, b);
  CHECK(max_abs(zero.values) == 0.0);
  const auto sum = project_kernel([](double s, double t) { return s + t; }, b);
  CHECK(sum.values == RealMatrix{{0.5, 1.0}, {1.0, 1.5}});
  const auto ex = project_kernel([](double s, double t) { return std::exp(-3.0 * (s + t)); }, b);
  CHECK(ex.values(0, 0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
  // first index is the s-cell
  const auto asym = project_kernel([](double s, double) { return s; }, b);
  CHECK(asym.values(1, 0) == 0.75);
}

TEST_CASE("cell_to_walsh") {
  const WalshBasis b(1);
  CHECK(cell_to_walsh(RealVector{1.0, 1.0}, b) == RealVector{1.0, 0.0});
  CHECK(cell_to_walsh(RealVector{1.0, -1.0}, b) == RealVector{0.0, 1.0});
  CHECK(cell_to_walsh(RealVector{0.25, 0.75}, b) == RealVector{0.5, -0.25});
  CHECK_THROWS_AS(cell_to_walsh(RealVector{1.0}, b), DimensionError);
}

TEST_CASE("cell_to_walsh: walsh_to_cell inverts it; applying it twice scales by 1/m") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (unsigned k = 0; k <= 7; ++k) {
    const WalshBasis b(k);
    RealVector v(b.size());
    for (double& x : v) x = u(gen);
    const RealVector y = cell_to_walsh(v, b);
    CHECK(max_abs_diff(walsh_to_cell(y, b).values, v) <= 1e-12);
    const RealVector twice = cell_to_walsh(y, b);
    for (std::size_t i = 0; i < v.size(); ++i)
      CHECK(twice[i] == doctest::Approx(v[i] / static_cast<double>(b.size())).epsilon(1e-12));
  }
}

TEST_CASE("reconstruct") {
  const WalshBasis b1(1, 1.0);
  const CellVector v{{2.0, 5.0}};
  CHECK(reconstruct(v, b1, 0.3) == 2.0);
  CHECK(reconstruct(v, b1, 0.5) == 5.0);
  CHECK(reconstruct(CellVector{{7.0}}, WalshBasis(0, 3.0), 2.9) == 7.0);
  CHECK_THROWS_AS(reconstruct(v, b1, 1.0), DomainError);
  CHECK_THROWS_AS(reconstruct(v, b1, -0.1), DomainError);
}

TEST_CASE("reconstruct(project_scalar(f)) is exact for cell-constant f") {
  const WalshBasis b(4, 2.0);
  auto step = [&](double t, const BrownianPath*) { return std::floor(t / b.width()) * 1.5 - 3.0; };
  const CellVector v = project_scalar(step, b);
  for (double t = 0.0; t < 2.0; t += 0.013) CHECK(reconstruct(v, b, t) == step(t, nullptr));
}

TEST_CASE("Walsh expansion reproduces the midpoint projection") {
  // sum_i Y_i w_i(t) equals the cell value of the cell containing t
  const WalshBasis b(3);
  const CellVector v = project_scalar([](double t, const BrownianPath*) { return std::sin(5 * t); }, b);
  const RealVector y = cell_to_walsh(v, b);
  for (double t = 0.01; t < 1.0; t += 0.037) {
    double acc = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) acc += y[i] * walsh_eval(i, t);
    CHECK(acc == doctest::Approx(reconstruct(v, b, t)).epsilon(1e-12));
  }
}
