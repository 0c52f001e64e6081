#include "wsvie/walsh_basis.hpp"

#include <cmath>
#include <string>

#include "wsvie/error.hpp"

namespace wsvie {

namespace {

void require_unit_interval(double t) {
  if (!(t >= 0.0 && t < 1.0)) {
    throw DomainError("t = " + std::to_string(t) + " outside [0, 1)");
  }
}

// Fractional part of 2^(i-1) t, computed exactly.
double shifted_fraction(unsigned i, double t) {
  if (t == 0.0) return 0.0;
  // 2^(i-1) t is an integer once its exponent passes the 53-bit mantissa.
  if (static_cast<long>(i) - 1 + std::ilogb(t) >= 53) return 0.0;
  const double x = std::ldexp(t, static_cast<int>(i) - 1);
  return x - std::floor(x);
}

// Sign of the i-th square wave just to the right of t.
int right_sign(unsigned i, double t) { return shifted_fraction(i, t) < 0.5 ? 1 : -1; }

} // namespace

int rademacher(unsigned i, double t) {
  require_unit_interval(t);
  if (i == 0) return 1;
  const double x = shifted_fraction(i, t);
  if (x == 0.0 || x == 0.5) return 0;
  return x < 0.5 ? 1 : -1;
}

int walsh_eval(std::uint64_t n, double t) {
  require_unit_interval(t);
  int sign = 1;
  for (unsigned bit = 0; n != 0; ++bit, n >>= 1) {
    if (n & 1u) sign *= right_sign(bit + 1, t);
  }
  return sign;
}

SignMatrix build_transform(unsigned k) {
  if (k > kMaxLevel) {
    throw CapacityError("level k = " + std::to_string(k) + " exceeds the limit " +
                        std::to_string(kMaxLevel));
  }
  const std::size_t m = std::size_t{1} << k;
  SignMatrix out(m, m);
  const double two_m = 2.0 * static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out(i, j) = walsh_eval(i, static_cast<double>(2 * j + 1) / two_m);
    }
  }
  return out;
}

WalshBasis::WalshBasis(unsigned k, double horizon) : k_(k), horizon_(horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("basis horizon must be positive and finite");
  }
  auto t = std::make_shared<SignMatrix>(build_transform(k));
  m_ = std::size_t{1} << k;
  h_ = horizon_ / static_cast<double>(m_);
  transform_real_ = std::make_shared<const RealMatrix>(to_real(*t));
  transform_ = std::move(t);
}

std::size_t WalshBasis::cell_of(double t) const {
  if (!(t >= 0.0 && t < horizon_)) {
    throw DomainError("t = " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) + ")");
  }
  const auto cell = static_cast<std::size_t>(std::floor(t / h_));
  return cell < m_ ? cell : m_ - 1;
}

CellVector project_scalar(const ScalarField& f, const WalshBasis& basis, const BrownianPath* path) {
  CellVector out{RealVector(basis.size())};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    try {
      out.values[i] = f(basis.midpoint(i), path);
    } catch (const Error& e) {
      throw EvaluationError("cell " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

KernelMatrix project_kernel(const KernelField& g, const WalshBasis& basis) {
  const std::size_t m = basis.size();
  KernelMatrix out{RealMatrix(m, m)};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      try {
        out.values(i, j) = g(basis.midpoint(i), basis.midpoint(j));
      } catch (const Error& e) {
        throw EvaluationError("cell (" + std::to_string(i) + ", " + std::to_string(j) +
                              "): " + e.what());
      }
    }
  }
  return out;
}

RealVector cell_to_walsh(std::span<const double> v, const WalshBasis& basis) {
  if (v.size() != basis.size()) throw DimensionError("cell_to_walsh: length mismatch");
  RealVector out = multiply(basis.transform_real(), v);
  const double inv_m = 1.0 / static_cast<double>(basis.size());
  for (double& x : out) x *= inv_m;
  return out;
}

CellVector walsh_to_cell(std::span<const double> y, const WalshBasis& basis) {
  if (y.size() != basis.size()) throw DimensionError("walsh_to_cell: length mismatch");
  return CellVector{multiply(basis.transform_real(), y)};
}

double reconstruct(const CellVector& v, const WalshBasis& basis, double t) {
  if (v.size() != basis.size()) throw DimensionError("reconstruct: length mismatch");
  return v.values[basis.cell_of(t)];
}

} // namespace wsvie
