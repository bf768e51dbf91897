#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "ewfkit/complex_matrix.hpp"
#include "ewfkit/errors.hpp"
#include "ewfkit/tolerances.hpp"

namespace ewfkit {

struct CholeskyFactors {
  ComplexMatrix l;  // lower triangular, positive real diagonal
};

struct EigenFactors {
  ComplexMatrix q;             // orthonormal columns, deterministic phase
  std::vector<double> lambda;  // real eigenvalues, descending
};

struct QRFactors {
  ComplexMatrix q;  // M x N, orthonormal columns (thin)
  ComplexMatrix r;  // N x N upper triangular, positive real diagonal
};

struct PolarFactors {
  ComplexMatrix q;  // orthonormal
  ComplexMatrix p;  // Hermitian positive semi-definite
};

namespace detail {

inline void require_square(const ComplexMatrix& a, const char* who) {
  if (!a.square()) throw DimensionMismatch(std::string(who) + ": matrix not square");
}

inline void require_hermitian(const ComplexMatrix& a, const char* who) {
  require_square(a, who);
  const double scale = max_abs_entry(a);
  if (hermitian_deviation(a) > tol::hermitian_rel * std::max(scale, 1e-300))
    throw NotHermitian(std::string(who) + ": matrix not Hermitian within tolerance");
}

}  // namespace detail

/// Cholesky factorization Sigma = L L^H of a Hermitian positive-definite
/// matrix; the unique L with positive real diagonal. Classical right-looking
/// algorithm; the input is symmetrized before factorization so that file
/// round-trip asymmetry cannot leak into the factor.
inline CholeskyFactors cholesky(const ComplexMatrix& sigma) {
  detail::require_hermitian(sigma, "cholesky");
  const ComplexMatrix a = hermitian_part(sigma);
  const std::size_t n = a.rows();

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i).real());
  const double pivot_floor = tol::pivot_rel * max_diag;

  ComplexMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > pivot_floor))
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " is not positive");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cdouble acc = a(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
      l(i, j) = acc / ljj;
    }
  }
  return {l};
}

/// Hermitian eigendecomposition Sigma = Q diag(lambda) Q^H by cyclic complex
/// Jacobi rotations. Eigenvalues are returned in descending order; each
/// eigenvector's largest-magnitude component is made real positive so the
/// output is fully deterministic.
inline EigenFactors eig_hermitian(const ComplexMatrix& sigma) {
  detail::require_hermitian(sigma, "eig_hermitian");
  ComplexMatrix a = hermitian_part(sigma);
  const std::size_t n = a.rows();
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double off_target = tol::jacobi_off_rel * frobenius_norm(a);
  auto off_norm = [&a, n]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  bool converged = off_norm() <= off_target;
  for (int sweep = 0; sweep < tol::jacobi_max_sweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cdouble apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const cdouble phase = apq / mag;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double sgn = theta >= 0.0 ? 1.0 : -1.0;
        const double t = sgn / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // A <- G^H A G with G(p,p)=c, G(p,q)=s*phase, G(q,p)=-s*conj(phase), G(q,q)=c
        for (std::size_t k = 0; k < n; ++k) {
          const cdouble akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(phase) * akq;
          a(k, q) = s * phase * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cdouble apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * std::conj(phase) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (std::size_t k = 0; k < n; ++k) {
          const cdouble vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * std::conj(phase) * vkq;
          v(k, q) = s * phase * vkp + c * vkq;
        }
      }
    }
    converged = off_norm() <= off_target;
  }
  if (!converged) throw NoConvergence("eig_hermitian: Jacobi sweep budget exhausted");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  EigenFactors out;
  out.lambda.resize(n);
  out.q = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.lambda[j] = a(src, src).real();
    // fix the free per-column phase: largest-magnitude component real positive
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::abs(v(i, src));
      if (m > best) {
        best = m;
        imax = i;
      }
    }
    cdouble d = 1.0;
    if (best > 0.0) d = std::conj(v(imax, src)) / best;
    for (std::size_t i = 0; i < n; ++i) out.q(i, j) = v(i, src) * d;
    out.q(imax, j) = out.q(imax, j).real();
  }
  return out;
}

/// Thin Householder QR of an M x N matrix (M >= N) normalized so that R has
/// positive real diagonal, which makes the factorization unique for
/// full-column-rank input. Trefethen & Bau, Algorithm 10.1, complex form.
inline QRFactors qr_posdiag(const ComplexMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m < n) throw DimensionMismatch("qr_posdiag: more columns than rows");

  ComplexMatrix r = a;
  const double rank_floor = tol::rank_rel * frobenius_norm(a);
  std::vector<cvector> reflectors(n);

  for (std::size_t k = 0; k < n; ++k) {
    double norm_x_sq = 0.0;
    for (std::size_t i = k; i < m; ++i) norm_x_sq += std::norm(r(i, k));
    const double norm_x = std::sqrt(norm_x_sq);
    if (norm_x == 0.0) continue;  // rank check below reports the column

    const cdouble x0 = r(k, k);
    const cdouble sgn = (x0 == cdouble{}) ? cdouble{1.0} : x0 / std::abs(x0);
    cvector v(m - k);
    for (std::size_t i = k; i < m; ++i) v[i - k] = r(i, k);
    v[0] += sgn * norm_x;
    double norm_v = 0.0;
    for (const cdouble& z : v) norm_v += std::norm(z);
    norm_v = std::sqrt(norm_v);
    if (norm_v == 0.0) continue;
    for (cdouble& z : v) z /= norm_v;

    for (std::size_t j = k; j < n; ++j) {
      cdouble dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += std::conj(v[i - k]) * r(i, j);
      dot *= 2.0;
      for (std::size_t i = k; i < m; ++i) r(i, j) -= dot * v[i - k];
    }
    for (std::size_t i = k + 1; i < m; ++i) r(i, k) = 0.0;
    reflectors[k] = std::move(v);
  }

  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(r(k, k)) <= rank_floor)
      throw RankDeficient("qr_posdiag: column " + std::to_string(k) + " numerically dependent");

  // thin Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I
  ComplexMatrix q(m, n);
  for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
  for (std::size_t kk = n; kk-- > 0;) {
    const cvector& v = reflectors[kk];
    if (v.empty()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      cdouble dot = 0.0;
      for (std::size_t i = kk; i < m; ++i) dot += std::conj(v[i - kk]) * q(i, j);
      dot *= 2.0;
      for (std::size_t i = kk; i < m; ++i) q(i, j) -= dot * v[i - kk];
    }
  }

  // phase normalization: R <- D R, Q <- Q D^H with D = conj(diag R)/|diag R|
  ComplexMatrix rr(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) rr(i, j) = r(i, j);
  for (std::size_t k = 0; k < n; ++k) {
    const cdouble rkk = rr(k, k);
    const cdouble d = std::conj(rkk) / std::abs(rkk);
    for (std::size_t j = k; j < n; ++j) rr(k, j) *= d;
    rr(k, k) = std::abs(rkk);
    for (std::size_t i = 0; i < m; ++i) q(i, k) *= std::conj(d);
  }
  return {q, rr};
}

/// Polar decomposition S = Q P of a square matrix, with Q orthonormal and
/// P = (S^H S)^{1/2} Hermitian PSD, computed through the Hermitian
/// eigendecomposition of S^H S. When S is singular the missing columns of Q
/// are completed orthonormally, so Q is unitary in every case.
inline PolarFactors polar(const ComplexMatrix& s) {
  detail::require_square(s, "polar");
  const std::size_t m = s.rows();
  const EigenFactors ef = eig_hermitian(hermitian_part(matmul(conj_transpose(s), s)));

  std::vector<double> sv(m);
  for (std::size_t i = 0; i < m; ++i) sv[i] = std::sqrt(std::max(ef.lambda[i], 0.0));
  const double sv_floor = sv.empty() ? 0.0 : tol::singular_rel * sv[0];

  const ComplexMatrix b = matmul(s, ef.q);
  ComplexMatrix u(m, m);
  std::size_t filled = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (sv[j] > sv_floor) {
      for (std::size_t i = 0; i < m; ++i) u(i, j) = b(i, j) / sv[j];
      ++filled;
    }
  }
  // complete the null-direction columns; trying the matching eigenvector
  // first makes polar(P0) return Q = I for Hermitian PSD inputs
  for (std::size_t j = filled; j < m; ++j) {
    bool done = false;
    for (std::size_t cand = 0; cand <= m && !done; ++cand) {
      cvector w(m);
      for (std::size_t i = 0; i < m; ++i) w[i] = (cand == 0) ? ef.q(i, j) : cdouble{i == cand - 1 ? 1.0 : 0.0};
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t jj = 0; jj < j; ++jj) {
          cdouble dot = 0.0;
          for (std::size_t i = 0; i < m; ++i) dot += std::conj(u(i, jj)) * w[i];
          for (std::size_t i = 0; i < m; ++i) w[i] -= dot * u(i, jj);
        }
      }
      const double norm_w = vector_norm(w);
      if (norm_w > 0.25) {
        for (std::size_t i = 0; i < m; ++i) u(i, j) = w[i] / norm_w;
        done = true;
      }
    }
    if (!done) throw InternalInvariantViolation("polar: failed to complete orthonormal basis");
  }

  ComplexMatrix p_core(m, m);
  for (std::size_t i = 0; i < m; ++i) p_core(i, i) = sv[i];
  PolarFactors out;
  out.q = matmul(u, conj_transpose(ef.q));
  out.p = hermitian_part(matmul(ef.q, matmul(p_core, conj_transpose(ef.q))));
  return out;
}

/// Singular values of an arbitrary matrix, descending, via the eigenvalues
/// of A^H A.
inline std::vector<double> singular_values(const ComplexMatrix& a) {
  const EigenFactors ef = eig_hermitian(hermitian_part(matmul(conj_transpose(a), a)));
  std::vector<double> sv(ef.lambda.size());
  for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = std::sqrt(std::max(ef.lambda[i], 0.0));
  return sv;
}

}  // namespace ewfkit
