#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "ewfkit/errors.hpp"

namespace ewfkit {

using cdouble = std::complex<double>;
using cvector = std::vector<cdouble>;

/// Dense row-major complex matrix. The single carrier type for covariances,
/// filters, channel matrices and factorization outputs.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  /// Zero matrix of the given shape.
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  /// From row-major entries; rejects wrong length and non-finite values.
  ComplexMatrix(std::size_t rows, std::size_t cols, cvector entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
      throw DimensionMismatch("ComplexMatrix: entry count does not match shape");
    for (const cdouble& z : entries_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error("ComplexMatrix: non-finite entry");
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cdouble& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const cdouble& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  const cvector& entries() const { return entries_; }

  bool operator==(const ComplexMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  cvector entries_;
};

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrix sum: shapes differ");
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrix difference: shapes differ");
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

inline ComplexMatrix operator*(cdouble s, const ComplexMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cdouble aik = a(i, k);
      if (aik == cdouble{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline cvector matvec(const ComplexMatrix& a, const cvector& x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: dimensions differ");
  cvector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cdouble acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

inline ComplexMatrix conj_transpose(const ComplexMatrix& a) {
  ComplexMatrix c(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
  return c;
}

inline cdouble trace(const ComplexMatrix& a) {
  if (!a.square()) throw DimensionMismatch("trace: matrix not square");
  cdouble t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

inline double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const cdouble& z : a.entries()) s += std::norm(z);
  return std::sqrt(s);
}

inline double max_abs_entry(const ComplexMatrix& a) {
  double m = 0.0;
  for (const cdouble& z : a.entries()) m = std::max(m, std::abs(z));
  return m;
}

/// ‖A − I‖_max without forming the difference.
inline double max_abs_deviation_from_identity(const ComplexMatrix& a) {
  if (!a.square()) throw DimensionMismatch("deviation from identity: matrix not square");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cdouble want = (i == j) ? cdouble{1.0} : cdouble{};
      m = std::max(m, std::abs(a(i, j) - want));
    }
  return m;
}

/// Inverse of a lower-triangular matrix by forward substitution, one
/// column of the identity at a time.
inline ComplexMatrix tri_lower_inverse(const ComplexMatrix& l) {
  if (!l.square()) throw DimensionMismatch("tri_lower_inverse: matrix not square");
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i)
    if (l(i, i) == cdouble{}) throw SingularTriangular("tri_lower_inverse: zero diagonal entry");
  ComplexMatrix x(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i < n; ++i) {
      cdouble rhs = (i == j) ? cdouble{1.0} : cdouble{};
      for (std::size_t k = j; k < i; ++k) rhs -= l(i, k) * x(k, j);
      x(i, j) = rhs / l(i, i);
    }
  }
  return x;
}

inline double vector_norm(const cvector& x) {
  double s = 0.0;
  for (const cdouble& z : x) s += std::norm(z);
  return std::sqrt(s);
}

inline double vector_norm_sq(const cvector& x) {
  double s = 0.0;
  for (const cdouble& z : x) s += std::norm(z);
  return s;
}

/// Hermitian part (A + A^H)/2 with the diagonal forced exactly real.
inline ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  if (!a.square()) throw DimensionMismatch("hermitian_part: matrix not square");
  ComplexMatrix h(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j)
      h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    h(i, i) = h(i, i).real();
  }
  return h;
}

/// ‖A − A^H‖_max.
inline double hermitian_deviation(const ComplexMatrix& a) {
  if (!a.square()) throw DimensionMismatch("hermitian_deviation: matrix not square");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

}  // namespace ewfkit
