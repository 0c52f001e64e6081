#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>

#include "wsvie/brownian_path.hpp"
#include "wsvie/linalg.hpp"

namespace wsvie {

// Largest supported dyadic level; m = 2^16 already means a 4G-entry transform.
inline constexpr unsigned kMaxLevel = 16;

// r_i(t) = sgn(sin(2^i pi t)) for i >= 1, r_0 = 1. Evaluated from the binary
// digits of t, so the result is exact for every double, including the zeros
// of the sine (which return 0). Throws DomainError unless 0 <= t < 1.
int rademacher(unsigned i, double t);

// Walsh function w_n(t) = prod over set bits b of n of r_{b+1}(t), with each
// factor taken right-continuous so the result is always +1 or -1.
int walsh_eval(std::uint64_t n, double t);

// m x m matrix with entry (i, j) = w_i((2j + 1) / (2m)), m = 2^k.
SignMatrix build_transform(unsigned k);

// Piecewise-constant basis on [0, T) with m = 2^k cells of width h = T / m.
class WalshBasis {
public:
  WalshBasis(unsigned k, double horizon = 1.0);

  unsigned level() const noexcept { return k_; }
  std::size_t size() const noexcept { return m_; }
  double horizon() const noexcept { return horizon_; }
  double width() const noexcept { return h_; }
  double midpoint(std::size_t cell) const noexcept {
    return (static_cast<double>(cell) + 0.5) * h_;
  }
  // Cell containing t; cells are right-open.
  std::size_t cell_of(double t) const;

  const SignMatrix& transform() const noexcept { return *transform_; }
  const RealMatrix& transform_real() const noexcept { return *transform_real_; }

private:
  unsigned k_;
  std::size_t m_;
  double horizon_;
  double h_;
  std::shared_ptr<const SignMatrix> transform_;
  std::shared_ptr<const RealMatrix> transform_real_;
};

// Entry i holds the midpoint value of a function on cell i.
struct CellVector {
  RealVector values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const CellVector&) const = default;
};

// Entry (i, j) holds the kernel at (s_i, t_j), both cell midpoints.
struct KernelMatrix {
  RealMatrix values;
};

// f(t, path): path may be null when no Brownian path is bound.
using ScalarField = std::function<double(double t, const BrownianPath* path)>;
using KernelField = std::function<double(double s, double t)>;

CellVector project_scalar(const ScalarField& f, const WalshBasis& basis,
                          const BrownianPath* path = nullptr);
KernelMatrix project_kernel(const KernelField& g, const WalshBasis& basis);

// Walsh coefficients (1/m) T_W v of the piecewise-constant function with cell values v.
RealVector cell_to_walsh(std::span<const double> v, const WalshBasis& basis);
inline RealVector cell_to_walsh(const CellVector& v, const WalshBasis& basis) {
  return cell_to_walsh(v.values, basis);
}
// Inverse of cell_to_walsh: cell values T_W y.
CellVector walsh_to_cell(std::span<const double> y, const WalshBasis& basis);

double reconstruct(const CellVector& v, const WalshBasis& basis, double t);

} // namespace wsvie
