#pragma once

#include <utility>

#include "ewfkit/complex_matrix.hpp"
#include "ewfkit/decomp.hpp"
#include "ewfkit/whitening.hpp"

namespace ewfkit {

enum class EwfConstruction { Decorrelate, Triangularize, Polar };

/// An extended whitening filter: an SWF of the primary covariance chosen,
/// through an orthonormal corrective factor, to also impose structure on a
/// secondary object. Each construction follows the same recipe: take an
/// SWF, apply it to the secondary object, factor out the orthonormal part,
/// fold that part back into the filter.
struct EwfResult {
  WhiteningFilter w;          // kind == ExtendedWf; rectangular for thin QR
  ComplexMatrix byproduct;    // diag(Lambda), R, or P
  ComplexMatrix corrective_q; // the orthonormal matrix absorbed into w
  EwfConstruction construction = EwfConstruction::Decorrelate;
};

namespace detail {

inline const WhiteningFilter& validate_base(const WhiteningFilter& base,
                                            const CovarianceModel& primary) {
  if (!check_swf(base.f, primary).is_swf)
    throw NotAnSwf("ewf: base filter fails the SWF check against the primary covariance");
  return base;
}

inline EwfResult finish_ewf(ComplexMatrix w, ComplexMatrix byproduct, ComplexMatrix corrective_q,
                            EwfConstruction construction, const CovarianceModel& primary) {
  if (max_abs_deviation_from_identity(matmul(conj_transpose(corrective_q), corrective_q)) >
      tol::ortho)
    throw InternalInvariantViolation("ewf: corrective factor is not orthonormal");
  const double residual = whitening_residual(w, primary);
  if (residual > tol::whitening(primary.dim()))
    throw InternalInvariantViolation("ewf: result fails the whitening check");
  return {{std::move(w), FilterKind::ExtendedWf, 1.0}, std::move(byproduct),
          std::move(corrective_q), construction};
}

}  // namespace detail

/// EWF that whitens the primary vector and de-correlates the secondary one:
/// W Sigma W^H = I and W Delta W^H = Lambda (diagonal).
inline EwfResult ewf_decorrelate(const CovarianceModel& primary, const CovarianceModel& secondary,
                                 const WhiteningFilter& base) {
  if (secondary.dim() != primary.dim())
    throw DimensionMismatch("ewf_decorrelate: covariance dimensions differ");
  const ComplexMatrix& f = detail::validate_base(base, primary).f;
  const EigenFactors ef =
      eig_hermitian(hermitian_part(matmul(f, matmul(secondary.sigma(), conj_transpose(f)))));
  ComplexMatrix lam(primary.dim(), primary.dim());
  for (std::size_t i = 0; i < primary.dim(); ++i) lam(i, i) = ef.lambda[i];
  ComplexMatrix w = matmul(conj_transpose(ef.q), f);
  return detail::finish_ewf(std::move(w), std::move(lam), ef.q, EwfConstruction::Decorrelate,
                            primary);
}

inline EwfResult ewf_decorrelate(const CovarianceModel& primary, const CovarianceModel& secondary) {
  return ewf_decorrelate(primary, secondary, swf_cholesky(primary));
}

/// EWF that whitens the primary vector and triangularizes a full-column-rank
/// M x N matrix (M >= N): W H = R, upper triangular with positive real
/// diagonal. For M > N the thin-QR corrective factor makes W an N x M
/// projection filter with W Sigma W^H = I_N.
inline EwfResult ewf_triangularize(const CovarianceModel& primary, const ComplexMatrix& h,
                                   const WhiteningFilter& base) {
  if (h.rows() != primary.dim())
    throw DimensionMismatch("ewf_triangularize: row count does not match covariance");
  if (h.cols() > h.rows())
    throw DimensionMismatch("ewf_triangularize: more columns than rows");
  const ComplexMatrix& f = detail::validate_base(base, primary).f;
  QRFactors qr = qr_posdiag(matmul(f, h));
  ComplexMatrix w = matmul(conj_transpose(qr.q), f);
  return detail::finish_ewf(std::move(w), std::move(qr.r), std::move(qr.q),
                            EwfConstruction::Triangularize, primary);
}

inline EwfResult ewf_triangularize(const CovarianceModel& primary, const ComplexMatrix& h) {
  return ewf_triangularize(primary, h, swf_cholesky(primary));
}

/// EWF that whitens the primary vector and maps a square matrix to its
/// Hermitian PSD polar factor: W S = P.
inline EwfResult ewf_polar(const CovarianceModel& primary, const ComplexMatrix& s,
                           const WhiteningFilter& base) {
  if (s.rows() != primary.dim() || !s.square())
    throw DimensionMismatch("ewf_polar: secondary matrix must be square and match the covariance");
  const ComplexMatrix& f = detail::validate_base(base, primary).f;
  PolarFactors pf = polar(matmul(f, s));
  ComplexMatrix w = matmul(conj_transpose(pf.q), f);
  return detail::finish_ewf(std::move(w), std::move(pf.p), std::move(pf.q), EwfConstruction::Polar,
                            primary);
}

inline EwfResult ewf_polar(const CovarianceModel& primary, const ComplexMatrix& s) {
  return ewf_polar(primary, s, swf_cholesky(primary));
}

}  // namespace ewfkit
