#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

#include "ewfkit/complex_matrix.hpp"
#include "ewfkit/decomp.hpp"
#include "ewfkit/random_matrices.hpp"
#include "ewfkit/tolerances.hpp"

namespace ewfkit {

/// A validated Hermitian positive-definite covariance with optional mean.
/// Positive definiteness is certified by Cholesky at construction; the
/// factor is kept since every filter builder needs it.
class CovarianceModel {
 public:
  explicit CovarianceModel(const ComplexMatrix& sigma, std::optional<cvector> mean = std::nullopt)
      : sigma_(hermitian_part(sigma)), chol_(cholesky(sigma)), mean_(std::move(mean)) {
    if (mean_ && mean_->size() != sigma_.rows())
      throw DimensionMismatch("CovarianceModel: mean length does not match dimension");
  }

  std::size_t dim() const { return sigma_.rows(); }
  const ComplexMatrix& sigma() const { return sigma_; }
  const ComplexMatrix& chol_l() const { return chol_.l; }
  bool has_mean() const { return mean_.has_value(); }
  const cvector& mean() const {
    static const cvector empty;
    return mean_ ? *mean_ : empty;
  }

 private:
  ComplexMatrix sigma_;
  CholeskyFactors chol_;
  std::optional<cvector> mean_;
};

enum class FilterKind { CholeskySwf, EigenSwf, RotatedSwf, ExtendedWf };

/// A whitening filter F with F Sigma F^H = scale_c^2 I against its source
/// covariance. scale_c is 1 for every standard whitening filter. For the
/// extended filters built from a thin QR, f may be rectangular (rows <=
/// cols) and whitens onto a lower-dimensional subspace.
struct WhiteningFilter {
  ComplexMatrix f;
  FilterKind kind = FilterKind::CholeskySwf;
  double scale_c = 1.0;
};

struct SwfCheck {
  bool is_swf = false;
  double residual = 0.0;
};

struct WfCheck {
  bool is_wf = false;
  double c = 0.0;
  double residual = 0.0;
};

namespace detail {

/// ‖F Sigma F^H − I‖_max; accepts thin (rows <= cols) filters.
inline double whitening_residual(const ComplexMatrix& f, const CovarianceModel& cov) {
  if (f.cols() != cov.dim() || f.rows() > f.cols())
    throw DimensionMismatch("whitening check: filter shape does not match covariance");
  return max_abs_deviation_from_identity(matmul(f, matmul(cov.sigma(), conj_transpose(f))));
}

inline WhiteningFilter certify(ComplexMatrix f, FilterKind kind, const CovarianceModel& cov) {
  if (whitening_residual(f, cov) > tol::whitening(cov.dim()))
    throw InternalInvariantViolation("whitening builder produced a filter that fails its own check");
  return {std::move(f), kind, 1.0};
}

}  // namespace detail

/// Cholesky-based SWF: F_c = L^{-1}, lower triangular.
inline WhiteningFilter swf_cholesky(const CovarianceModel& cov) {
  return detail::certify(tri_lower_inverse(cov.chol_l()), FilterKind::CholeskySwf, cov);
}

/// Eigendecomposition-based SWF: F_v = diag(lambda)^{-1/2} Q^H. The
/// descending eigenvalue sort and the eigenvector phase convention make the
/// result deterministic.
inline WhiteningFilter swf_eigen(const CovarianceModel& cov) {
  const EigenFactors ef = eig_hermitian(cov.sigma());
  const std::size_t m = cov.dim();
  if (m > 0 && ef.lambda.back() <= 0.0)
    throw NotPositiveDefinite("swf_eigen: nonpositive eigenvalue");
  ComplexMatrix f(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const double inv_sqrt = 1.0 / std::sqrt(ef.lambda[i]);
    for (std::size_t j = 0; j < m; ++j) f(i, j) = inv_sqrt * std::conj(ef.q(j, i));
  }
  return detail::certify(std::move(f), FilterKind::EigenSwf, cov);
}

/// Is f a standard whitening filter of cov? residual = ‖F Sigma F^H − I‖_max.
inline SwfCheck check_swf(const ComplexMatrix& f, const CovarianceModel& cov) {
  const double residual = detail::whitening_residual(f, cov);
  return {residual <= tol::whitening(cov.dim()), residual};
}

/// Is f a whitening filter of cov for some c > 0? c is estimated from the
/// trace of F Sigma F^H rather than a single diagonal entry.
inline WfCheck check_wf(const ComplexMatrix& f, const CovarianceModel& cov) {
  if (f.cols() != cov.dim() || f.rows() > f.cols())
    throw DimensionMismatch("check_wf: filter shape does not match covariance");
  const ComplexMatrix g = matmul(f, matmul(cov.sigma(), conj_transpose(f)));
  const std::size_t m = g.rows();
  const double c_sq = m == 0 ? 0.0 : trace(g).real() / static_cast<double>(m);
  if (!(c_sq > 0.0)) return {false, 0.0, max_abs_entry(g)};
  double residual = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const cdouble want = (i == j) ? cdouble{c_sq} : cdouble{};
      residual = std::max(residual, std::abs(g(i, j) - want));
    }
  return {residual <= tol::whitening(cov.dim()) * c_sq, std::sqrt(c_sq), residual};
}

/// Compose an SWF with an orthonormal matrix: W = Q F is again an SWF.
/// The result is re-validated against cov.
inline WhiteningFilter rotate_swf(const WhiteningFilter& f, const ComplexMatrix& q,
                                  const CovarianceModel& cov) {
  if (q.rows() != f.f.rows() || q.cols() != f.f.rows())
    throw DimensionMismatch("rotate_swf: rotation shape does not match filter");
  if (max_abs_deviation_from_identity(matmul(conj_transpose(q), q)) > tol::ortho)
    throw NotOrthonormal("rotate_swf: matrix is not orthonormal within tolerance");
  return detail::certify(matmul(q, f.f), FilterKind::RotatedSwf, cov);
}

/// The orthonormal matrix relating an SWF to the Cholesky SWF: every SWF F
/// factors as F = Q F_c, and Q = F L is that factor.
inline ComplexMatrix orthonormal_factor(const WhiteningFilter& f, const CovarianceModel& cov) {
  if (!check_swf(f.f, cov).is_swf)
    throw NotAnSwf("orthonormal_factor: filter fails the SWF check against this covariance");
  ComplexMatrix q = matmul(f.f, cov.chol_l());
  if (max_abs_deviation_from_identity(matmul(conj_transpose(q), q)) > tol::ortho)
    throw InternalInvariantViolation("orthonormal_factor: recovered factor is not orthonormal");
  return q;
}

/// How F_v and F_c are linked. F_v = q F_c holds with q taken from the QR
/// factorization of (F_v^{-1})^H, whose triangular factor satisfies
/// R^{-H} = F_c; that lower-triangular reading is the one that vanishes.
/// Reading "F_v = QR with R = F_c" literally (QR of F_v itself, upper
/// triangular R) does not hold; its residual is reported alongside so the
/// discrepancy stays visible.
struct EigenCholeskyRelation {
  ComplexMatrix q;               // orthonormal, F_v = q F_c
  double max_residual = 0.0;     // matched-orientation reading (validated)
  double upper_qr_residual = 0.0;  // literal upper-triangular reading
};

inline EigenCholeskyRelation eigen_cholesky_relation(const CovarianceModel& cov) {
  const std::size_t m = cov.dim();
  const ComplexMatrix f_c = swf_cholesky(cov).f;
  const EigenFactors ef = eig_hermitian(cov.sigma());

  ComplexMatrix f_v(m, m), f_v_invh(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const double root = std::sqrt(ef.lambda[i]);
    for (std::size_t j = 0; j < m; ++j) {
      f_v(i, j) = std::conj(ef.q(j, i)) / root;
      f_v_invh(i, j) = std::conj(ef.q(j, i)) * root;  // (F_v^{-1})^H = Lambda^{1/2} Q^H
    }
  }

  const QRFactors matched = qr_posdiag(f_v_invh);
  const ComplexMatrix lower = tri_lower_inverse(conj_transpose(matched.r));  // R^{-H}
  const double res_factor = max_abs_entry(lower - f_c);
  const double res_product = max_abs_entry(f_v - matmul(matched.q, f_c));

  const QRFactors literal = qr_posdiag(f_v);
  const double res_literal = std::max(max_abs_entry(literal.r - f_c),
                                      max_abs_entry(f_v - matmul(literal.q, f_c)));

  return {matched.q, std::max(res_factor, res_product), res_literal};
}

/// A fresh SWF per seed: the Cholesky SWF rotated by a seeded random
/// unitary. Deterministic per (cov, seed).
inline WhiteningFilter random_swf(const CovarianceModel& cov, std::uint64_t seed) {
  return rotate_swf(swf_cholesky(cov), random_unitary(cov.dim(), seed), cov);
}

/// F mu: the mean of the filtered vector. Nonzero whenever mu is, since
/// whitening filters are full rank.
inline cvector transformed_mean(const WhiteningFilter& f, const cvector& mean) {
  return matvec(f.f, mean);
}

}  // namespace ewfkit
