#pragma once

#include <cmath>
#include <cstdint>

#include "ewfkit/complex_matrix.hpp"
#include "ewfkit/decomp.hpp"
#include "ewfkit/rng.hpp"

namespace ewfkit {

/// M x N matrix of i.i.d. circularly-symmetric standard complex Gaussians.
/// Entry (i, j) depends only on (seed, i*cols + j).
inline ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  CounterRng rng(seed);
  ComplexMatrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.gaussian(i * cols + j);
  return g;
}

/// Seeded Haar-like random unitary: the Q factor of a Gaussian matrix.
inline ComplexMatrix random_unitary(std::size_t m, std::uint64_t seed) {
  return qr_posdiag(gaussian_matrix(m, m, seed)).q;
}

/// Random Hermitian positive-definite matrix with eigenvalues log-spaced
/// over [1/condition_number, 1], conjugated by a seeded random unitary.
inline ComplexMatrix random_hermitian_pd(std::size_t m, std::uint64_t seed,
                                         double condition_number = 10.0) {
  if (m == 0) throw DimensionMismatch("random_hermitian_pd: dimension must be >= 1");
  if (!(condition_number >= 1.0))
    throw Error("random_hermitian_pd: condition number must be >= 1");
  ComplexMatrix lam(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    const double frac = (m == 1) ? 0.0 : static_cast<double>(k) / static_cast<double>(m - 1);
    lam(k, k) = std::pow(condition_number, -frac);
  }
  const ComplexMatrix q = random_unitary(m, seed);
  return hermitian_part(matmul(q, matmul(lam, conj_transpose(q))));
}

}  // namespace ewfkit
