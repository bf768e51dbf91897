#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ewfkit/complex_matrix.hpp"
#include "ewfkit/rng.hpp"
#include "ewfkit/whitening.hpp"

namespace ewfkit {

/// A batch of realizations of a length-M complex random vector.
struct SampleBatch {
  std::size_t dim = 0;
  std::size_t n = 0;
  std::vector<cvector> samples;
  std::uint64_t seed = 0;
};

/// Colored Gaussian samples v_i = mean + L z_i with z_i i.i.d. standard
/// circularly-symmetric complex Gaussian, so Cov(v) = L L^H = Sigma.
/// Sample i is a pure function of (seed, i); coordinate k of sample i draws
/// from counters (2k, 2k+1) of the stream derive(seed, i).
inline SampleBatch sample_colored(const CovarianceModel& cov, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw TooFewSamples("sample_colored: need at least one sample");
  const std::size_t m = cov.dim();
  const ComplexMatrix& l = cov.chol_l();
  const CounterRng root(seed);

  SampleBatch batch{m, n, {}, seed};
  batch.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CounterRng stream = root.derive(i);
    cvector z(m);
    for (std::size_t k = 0; k < m; ++k) z[k] = stream.gaussian(k);
    cvector v(m);
    for (std::size_t r = 0; r < m; ++r) {
      cdouble acc = cov.has_mean() ? cov.mean()[r] : cdouble{};
      for (std::size_t k = 0; k <= r; ++k) acc += l(r, k) * z[k];
      v[r] = acc;
    }
    batch.samples[i] = std::move(v);
  }
  return batch;
}

enum class MeanMode { KnownZero, Estimate };

/// (1/n) sum (v_i - m)(v_i - m)^H with m either zero or the sample mean.
/// The result is symmetrized so it is Hermitian by construction.
inline ComplexMatrix sample_covariance(const SampleBatch& batch, MeanMode mode) {
  const std::size_t m = batch.dim, n = batch.n;
  if (mode == MeanMode::Estimate && n < 2)
    throw TooFewSamples("sample_covariance: mean estimation needs n >= 2");
  if (n < 1) throw TooFewSamples("sample_covariance: empty batch");

  cvector center(m);
  if (mode == MeanMode::Estimate) {
    for (const cvector& v : batch.samples)
      for (std::size_t k = 0; k < m; ++k) center[k] += v[k];
    for (std::size_t k = 0; k < m; ++k) center[k] /= static_cast<double>(n);
  }

  ComplexMatrix acc(m, m);
  for (const cvector& v : batch.samples)
    for (std::size_t i = 0; i < m; ++i) {
      const cdouble di = v[i] - center[i];
      for (std::size_t j = 0; j < m; ++j) acc(i, j) += di * std::conj(v[j] - center[j]);
    }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) acc(i, j) *= inv_n;
  return hermitian_part(acc);
}

struct WhitenessResult {
  bool pass = false;
  double max_dev = 0.0;
};

/// Monte Carlo whiteness check: sample n colored vectors, filter them, and
/// compare the sample covariance against the identity. The 8/sqrt(n)
/// threshold is an ~8 sigma bound on each entry, so a failure on a correct
/// filter is vanishingly unlikely.
inline WhitenessResult whiteness_test(const WhiteningFilter& f, const CovarianceModel& cov,
                                      std::size_t n, std::uint64_t seed) {
  const SampleBatch batch = sample_colored(cov, n, seed);
  SampleBatch filtered{f.f.rows(), batch.n, {}, seed};
  filtered.samples.resize(batch.n);
  for (std::size_t i = 0; i < batch.n; ++i) filtered.samples[i] = matvec(f.f, batch.samples[i]);
  const MeanMode mode = cov.has_mean() ? MeanMode::Estimate : MeanMode::KnownZero;
  const ComplexMatrix c = sample_covariance(filtered, mode);
  const double max_dev = max_abs_deviation_from_identity(c);
  return {max_dev <= 8.0 / std::sqrt(static_cast<double>(n)), max_dev};
}

/// Batch as an n x M matrix (one sample per row), for export.
inline ComplexMatrix as_matrix(const SampleBatch& batch) {
  ComplexMatrix out(batch.n, batch.dim);
  for (std::size_t i = 0; i < batch.n; ++i)
    for (std::size_t k = 0; k < batch.dim; ++k) out(i, k) = batch.samples[i][k];
  return out;
}

}  // namespace ewfkit
