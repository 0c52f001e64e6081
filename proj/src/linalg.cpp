#include "wsvie/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wsvie/error.hpp"

namespace wsvie {

namespace {

template <class T>
Matrix<T> multiply_impl(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matrix product: " + std::to_string(a.cols()) + " columns vs " +
                         std::to_string(b.rows()) + " rows");
  }
  Matrix<T> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const T ail = a(i, l);
      if (ail == T{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ail * b(l, j);
    }
  }
  return out;
}

void require_same_shape(const RealMatrix& a, const RealMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch");
  }
}

} // namespace

RealMatrix to_real(const SignMatrix& m) {
  RealMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

RealMatrix multiply(const RealMatrix& a, const RealMatrix& b) { return multiply_impl(a, b); }
SignMatrix multiply(const SignMatrix& a, const SignMatrix& b) { return multiply_impl(a, b); }

RealVector multiply(const RealMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector product: size mismatch");
  RealVector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

RealMatrix transpose(const RealMatrix& a) {
  RealMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

RealMatrix hadamard(const RealMatrix& a, const RealMatrix& b) {
  require_same_shape(a, b, "hadamard");
  RealMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) * b(i, j);
  return out;
}

RealMatrix scaled(const RealMatrix& a, double factor) {
  RealMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (double& v : out.row(i)) v *= factor;
  return out;
}

double max_abs(std::span<const double> v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

double max_abs(const RealMatrix& a) { return max_abs(a.data()); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("max_abs_diff: length mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  return max_abs_diff(a.data(), b.data());
}

double trace(const RealMatrix& a) {
  double out = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) out += a(i, i);
  return out;
}

LuFactorization::LuFactorization(RealMatrix a) : lu_(std::move(a)) {
  if (!lu_.square()) throw DimensionError("LU: matrix is not square");
  const std::size_t n = lu_.rows();
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  const double scale = max_abs(lu_);
  const double tiny = 1e-12 * (scale > 0.0 ? scale : 1.0);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(lu_(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(lu_(r, col)) > best) {
        best = std::abs(lu_(r, col));
        pivot = r;
      }
    }
    if (!(best >= tiny)) {
      throw SingularSystemError(col, "singular system: pivot " + std::to_string(col) +
                                         " has magnitude " + std::to_string(best));
    }
    if (pivot != col) {
      std::swap_ranges(lu_.row(col).begin(), lu_.row(col).end(), lu_.row(pivot).begin());
      std::swap(perm_[col], perm_[pivot]);
      sign_ = -sign_;
    }
    const double diag = lu_(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = lu_(r, col) / diag;
      lu_(r, col) = factor;
      if (factor == 0.0) continue;
      for (std::size_t c = col + 1; c < n; ++c) lu_(r, c) -= factor * lu_(col, c);
    }
  }
}

RealVector LuFactorization::solve(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw DimensionError("LU solve: right-hand side length mismatch");
  RealVector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
    x[i] = acc;
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = x[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= lu_(i, j) * x[j];
    x[i] = acc / lu_(i, i);
  }
  return x;
}

double LuFactorization::determinant() const {
  double det = sign_;
  for (std::size_t i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
  return det;
}

RealVector solve_linear(const RealMatrix& a, std::span<const double> b) {
  if (a.rows() != b.size()) throw DimensionError("solve_linear: right-hand side length mismatch");
  return LuFactorization(a).solve(b);
}

double residual_inf(const RealMatrix& a, std::span<const double> x, std::span<const double> b) {
  const RealVector ax = multiply(a, x);
  return max_abs_diff(ax, b);
}

} // namespace wsvie
