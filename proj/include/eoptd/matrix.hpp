#ifndef EOPTD_MATRIX_HPP
#define EOPTD_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eoptd/numeric.hpp"

namespace eoptd {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix. Sizes here stay in the hundreds, so no blocking.
template <Scalar T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::vector<T> column(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <class Fn>
  auto map(Fn&& fn) const -> Matrix<std::decay_t<decltype(fn(std::declval<T>()))>> {
    Matrix<std::decay_t<decltype(fn(std::declval<T>()))>> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = fn((*this)(i, j));
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <Scalar T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const T& ail = a(i, l);
      if (sign_of(ail) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += ail * b(l, j);
    }
  return c;
}

/// Matrix-vector product skipping zero entries (the information matrices
/// here are block sparse).
template <Scalar T>
std::vector<T> multiply(const Matrix<T>& a, std::span<const T> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector product: shape mismatch");
  std::vector<T> y(a.rows(), T(0));
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (sign_of(x[j]) == 0) continue;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const T& aij = a(i, j);
      if (sign_of(aij) != 0) y[i] += aij * x[j];
    }
  }
  return y;
}

template <Scalar T>
T dot(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (sign_of(a[i]) != 0 && sign_of(b[i]) != 0) s += a[i] * b[i];
  return s;
}

inline double frobenius_norm(const Matrix<double>& a) {
  double s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (double v : a.row(i)) s += v * v;
  return std::sqrt(s);
}

template <Scalar T>
Matrix<double> to_double_matrix(const Matrix<T>& a) {
  return a.map([](const T& v) { return to_double(v); });
}

/// Rational copy of a surd matrix, if every entry is rational.
inline std::optional<Matrix<Rational>> to_rational_matrix(const Matrix<QuadraticSurd>& a) {
  Matrix<Rational> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (!a(i, j).is_rational()) return std::nullopt;
      out(i, j) = a(i, j).rational_part();
    }
  return out;
}

namespace detail {

// Pivot row for column `col` at or below `from`: first nonzero for exact
// types, largest magnitude otherwise. Returns rows() when none qualifies.
template <Scalar T>
std::size_t pivot_row(const Matrix<T>& a, std::size_t col, std::size_t from,
                      double abs_tol) {
  std::size_t best = a.rows();
  if constexpr (is_exact_v<T>) {
    for (std::size_t i = from; i < a.rows(); ++i)
      if (sign_of(a(i, col)) != 0) return i;
  } else {
    double best_mag = abs_tol;
    for (std::size_t i = from; i < a.rows(); ++i) {
      double mag = std::abs(a(i, col));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
  }
  return best;
}

template <Scalar T>
void swap_rows(Matrix<T>& a, std::size_t r1, std::size_t r2) {
  if (r1 == r2) return;
  for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(r1, j), a(r2, j));
}

}  // namespace detail

/// Determinant by Gaussian elimination (exact for rational input).
template <Scalar T>
T determinant(Matrix<T> a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  const std::size_t n = a.rows();
  T det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = detail::pivot_row(a, col, col, 0.0);
    if (p == n) return T(0);
    if (p != col) {
      detail::swap_rows(a, p, col);
      det = -det;
    }
    const T pivot = a(col, col);
    det *= pivot;
    for (std::size_t i = col + 1; i < n; ++i) {
      if (sign_of(a(i, col)) == 0) continue;
      const T factor = a(i, col) / pivot;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= factor * a(col, j);
    }
  }
  return det;
}

/// Solves a x = b by Gauss-Jordan elimination. Throws SingularMatrixError.
template <Scalar T>
std::vector<T> solve(Matrix<T> a, std::vector<T> b, double abs_tol = 1e-300) {
  if (a.rows() != a.cols() || b.size() != a.rows())
    throw std::invalid_argument("solve: shape mismatch");
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = detail::pivot_row(a, col, col, abs_tol);
    if (p == n) throw SingularMatrixError("solve: singular system");
    detail::swap_rows(a, p, col);
    std::swap(b[p], b[col]);
    const T pivot = a(col, col);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || sign_of(a(i, col)) == 0) continue;
      const T factor = a(i, col) / pivot;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= factor * a(col, j);
      b[i] -= factor * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] = b[i] / a(i, i);
  return b;
}

/// Inverse by Gauss-Jordan elimination. Throws SingularMatrixError.
template <Scalar T>
Matrix<T> inverse(Matrix<T> a, double abs_tol = 1e-300) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix not square");
  const std::size_t n = a.rows();
  Matrix<T> inv = Matrix<T>::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = detail::pivot_row(a, col, col, abs_tol);
    if (p == n) throw SingularMatrixError("inverse: singular matrix");
    detail::swap_rows(a, p, col);
    detail::swap_rows(inv, p, col);
    const T pivot = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) = a(col, j) / pivot;
      inv(col, j) = inv(col, j) / pivot;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || sign_of(a(i, col)) == 0) continue;
      const T factor = a(i, col);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= factor * a(col, j);
        inv(i, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace eoptd

#endif  // EOPTD_MATRIX_HPP
