#pragma once

#include <cstddef>

namespace ewfkit::tol {

// Hermitian symmetry check, relative to the largest entry magnitude.
inline constexpr double hermitian_rel = 1e-10;

// Cholesky pivot floor, relative to the largest diagonal entry.
inline constexpr double pivot_rel = 1e-12;

// QR rank floor, relative to the Frobenius norm of the input.
inline constexpr double rank_rel = 1e-12;

// Orthonormality: max-entry bound on Q^H Q - I.
inline constexpr double ortho = 1e-10;

// Jacobi eigensolver: off-diagonal Frobenius norm target, relative to the
// Frobenius norm of the input, and the sweep budget.
inline constexpr double jacobi_off_rel = 1e-12;
inline constexpr int jacobi_max_sweeps = 100;

// Singular values below this fraction of the largest count as zero.
inline constexpr double singular_rel = 1e-12;

// Whitening identity bound scales with the accumulation length M.
inline constexpr double whitening_rel = 1e-9;

inline double whitening(std::size_t m) {
  return whitening_rel * static_cast<double>(m);
}

}  // namespace ewfkit::tol
