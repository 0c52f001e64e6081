#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace wsvie {

// Dense row-major matrix. Sizes in this library stay below a few hundred,
// so plain loops are all we need.
template <class T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init);

  static Matrix identity(std::size_t n) {
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = T{1};
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const T> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Matrix<T>::Matrix(std::initializer_list<std::initializer_list<T>> init)
    : rows_(init.size()), cols_(init.size() ? init.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : init) {
    for (const auto& v : r) data_.push_back(v);
  }
}

using RealMatrix = Matrix<double>;
using SignMatrix = Matrix<int>;
using RealVector = std::vector<double>;

RealMatrix to_real(const SignMatrix& m);
RealMatrix multiply(const RealMatrix& a, const RealMatrix& b);
SignMatrix multiply(const SignMatrix& a, const SignMatrix& b);
RealVector multiply(const RealMatrix& a, std::span<const double> x);
RealMatrix transpose(const RealMatrix& a);
RealMatrix hadamard(const RealMatrix& a, const RealMatrix& b);
RealMatrix scaled(const RealMatrix& a, double factor);

double max_abs(std::span<const double> v);
double max_abs(const RealMatrix& a);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double max_abs_diff(const RealMatrix& a, const RealMatrix& b);
double trace(const RealMatrix& a);

// LU factorization with partial pivoting. Throws SingularSystemError when a
// pivot falls below 1e-12 times the largest entry of the matrix.
class LuFactorization {
public:
  explicit LuFactorization(RealMatrix a);

  RealVector solve(std::span<const double> b) const;
  double determinant() const;

private:
  RealMatrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
};

RealVector solve_linear(const RealMatrix& a, std::span<const double> b);

// max_i |(A x - b)_i|
double residual_inf(const RealMatrix& a, std::span<const double> x, std::span<const double> b);

} // namespace wsvie
