#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <ewfkit/random_matrices.hpp>
#include <ewfkit/stats.hpp>
#include <ewfkit/whitening.hpp>

using namespace ewfkit;

namespace {

ComplexMatrix mat2(cdouble a, cdouble b, cdouble c, cdouble d) {
  return ComplexMatrix(2, 2, {a, b, c, d});
}

const ComplexMatrix kSigma21 = mat2(2.0, 1.0, 1.0, 2.0);

}  // namespace

TEST_CASE("swf_cholesky on simple covariances") {
  REQUIRE(max_abs_entry(swf_cholesky(CovarianceModel(ComplexMatrix::identity(3))).f -
                        ComplexMatrix::identity(3)) == 0.0);

  const WhiteningFilter diag = swf_cholesky(CovarianceModel(mat2(4.0, 0.0, 0.0, 9.0)));
  REQUIRE(max_abs_entry(diag.f - mat2(0.5, 0.0, 0.0, 1.0 / 3.0)) < 1e-15);
  REQUIRE(diag.kind == FilterKind::CholeskySwf);
  REQUIRE(diag.scale_c == 1.0);
}

TEST_CASE("swf_cholesky of [[2,1],[1,2]]") {
  const CovarianceModel cov(kSigma21);
  const WhiteningFilter f = swf_cholesky(cov);
  const ComplexMatrix expect = mat2(1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(6.0),
                                    std::sqrt(2.0 / 3.0));
  REQUIRE(max_abs_entry(f.f - expect) < 1e-14);
  // multiply-back oracle
  REQUIRE(max_abs_deviation_from_identity(
              matmul(f.f, matmul(cov.sigma(), conj_transpose(f.f)))) < 1e-14);
}

TEST_CASE("swf_eigen identities and the sort convention") {
  const CovarianceModel eye(ComplexMatrix::identity(2));
  REQUIRE(check_swf(swf_eigen(eye).f, eye).is_swf);

  // descending eigenvalues [9,4] put the 1/3 row first
  const CovarianceModel diag(mat2(4.0, 0.0, 0.0, 9.0));
  const WhiteningFilter fv = swf_eigen(diag);
  REQUIRE(max_abs_entry(fv.f - mat2(0.0, 1.0 / 3.0, 0.5, 0.0)) < 1e-14);

  const CovarianceModel cov(kSigma21);
  const WhiteningFilter f = swf_eigen(cov);
  const double r2 = 1.0 / std::sqrt(2.0);
  const ComplexMatrix expect =
      mat2(r2 / std::sqrt(3.0), r2 / std::sqrt(3.0), r2, -r2);
  REQUIRE(max_abs_entry(f.f - expect) < 1e-12);
  REQUIRE(check_swf(f.f, cov).is_swf);
}

TEST_CASE("check_swf accepts SWFs and rejects scaled filters") {
  const CovarianceModel eye(ComplexMatrix::identity(2));
  const SwfCheck trivial = check_swf(ComplexMatrix::identity(2), eye);
  REQUIRE(trivial.is_swf);
  REQUIRE(trivial.residual == 0.0);

  const CovarianceModel cov(kSigma21);
  const WhiteningFilter fc = swf_cholesky(cov);
  const SwfCheck doubled = check_swf(2.0 * fc.f, cov);
  REQUIRE_FALSE(doubled.is_swf);  // a WF with c = 2, not an SWF

  REQUIRE_THROWS_AS(check_swf(ComplexMatrix::identity(3), cov), DimensionMismatch);
}

TEST_CASE("check_wf estimates the whitening constant") {
  const CovarianceModel four(2.0 * 2.0 * ComplexMatrix::identity(2));
  const WfCheck wf = check_wf(ComplexMatrix::identity(2), four);
  REQUIRE(wf.is_wf);
  REQUIRE(wf.c == Catch::Approx(2.0).margin(1e-14));

  const CovarianceModel cov(kSigma21);
  const WfCheck swf_as_wf = check_wf(swf_cholesky(cov).f, cov);
  REQUIRE(swf_as_wf.is_wf);
  REQUIRE(swf_as_wf.c == Catch::Approx(1.0).margin(1e-12));

  ComplexMatrix broken = swf_cholesky(cov).f;
  broken(1, 0) = 0.0;
  broken(1, 1) = 0.0;  // rank-deficient filters cannot whiten
  REQUIRE_FALSE(check_wf(broken, cov).is_wf);
  REQUIRE_FALSE(check_swf(broken, cov).is_swf);
}

TEST_CASE("rotate_swf composes with orthonormal matrices") {
  const CovarianceModel cov(mat2(4.0, 0.0, 0.0, 9.0));
  const WhiteningFilter fc = swf_cholesky(cov);

  const WhiteningFilter same = rotate_swf(fc, ComplexMatrix::identity(2), cov);
  REQUIRE(same.f == fc.f);
  REQUIRE(same.kind == FilterKind::RotatedSwf);

  const ComplexMatrix perm = mat2(0.0, 1.0, 1.0, 0.0);
  const WhiteningFilter permuted = rotate_swf(fc, perm, cov);
  REQUIRE(max_abs_entry(permuted.f - mat2(0.0, 1.0 / 3.0, 0.5, 0.0)) < 1e-15);
  REQUIRE(check_swf(permuted.f, cov).is_swf);

  REQUIRE_THROWS_AS(rotate_swf(fc, 2.0 * ComplexMatrix::identity(2), cov), NotOrthonormal);
}

TEST_CASE("orthonormal closure: rotated SWFs stay SWFs") {
  // closure property: 100 random (Sigma, Q) pairs at each M
  for (std::size_t m : {2, 4, 8}) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      const CovarianceModel cov(random_hermitian_pd(m, derive_seed(42, i * 8 + m)));
      const ComplexMatrix q = random_unitary(m, derive_seed(43, i * 8 + m));
      const WhiteningFilter w = rotate_swf(swf_cholesky(cov), q, cov);
      REQUIRE(check_swf(w.f, cov).is_swf);
    }
  }
}

TEST_CASE("orthonormal_factor relates SWFs back to the Cholesky filter") {
  const CovarianceModel cov(kSigma21);
  const WhiteningFilter fc = swf_cholesky(cov);
  REQUIRE(max_abs_deviation_from_identity(orthonormal_factor(fc, cov)) < 1e-14);

  // round trip through a known rotation
  const ComplexMatrix q0 = random_unitary(2, 5);
  const WhiteningFilter rotated = rotate_swf(fc, q0, cov);
  REQUIRE(max_abs_entry(orthonormal_factor(rotated, cov) - q0) < 1e-12);

  // the eigen filter's factor equals the one from the QR-based relation
  const ComplexMatrix q_fv = orthonormal_factor(swf_eigen(cov), cov);
  const EigenCholeskyRelation rel = eigen_cholesky_relation(cov);
  REQUIRE(max_abs_entry(q_fv - rel.q) < 1e-12);

  WhiteningFilter bogus = fc;
  bogus.f = 2.0 * bogus.f;
  REQUIRE_THROWS_AS(orthonormal_factor(bogus, cov), NotAnSwf);
}

TEST_CASE("eigen_cholesky_relation: matched orientation vanishes, literal does not") {
  const CovarianceModel eye(ComplexMatrix::identity(2));
  const EigenCholeskyRelation trivial = eigen_cholesky_relation(eye);
  REQUIRE(max_abs_deviation_from_identity(trivial.q) < 1e-14);
  REQUIRE(trivial.max_residual < 1e-14);

  // descending sort turns diag(4,9) into an exchange permutation
  const EigenCholeskyRelation diag = eigen_cholesky_relation(CovarianceModel(mat2(4.0, 0.0, 0.0, 9.0)));
  REQUIRE(max_abs_entry(diag.q - mat2(0.0, 1.0, 1.0, 0.0)) < 1e-12);
  REQUIRE(diag.max_residual <= 1e-9);

  // generic case: the lower-triangular reading holds, the upper one fails
  const EigenCholeskyRelation generic = eigen_cholesky_relation(CovarianceModel(kSigma21));
  REQUIRE(generic.max_residual <= 1e-12);
  REQUIRE(generic.upper_qr_residual > 0.1);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CovarianceModel cov(random_hermitian_pd(4, derive_seed(77, seed)));
    const EigenCholeskyRelation rel = eigen_cholesky_relation(cov);
    REQUIRE(rel.max_residual <= 1e-8);
    const WhiteningFilter fv = swf_eigen(cov);
    const WhiteningFilter fc = swf_cholesky(cov);
    REQUIRE(max_abs_entry(fv.f - matmul(rel.q, fc.f)) <= 1e-10);
  }
}

TEST_CASE("random_swf is deterministic and always an SWF") {
  const CovarianceModel cov(kSigma21);
  const WhiteningFilter a = random_swf(cov, 123);
  const WhiteningFilter b = random_swf(cov, 123);
  REQUIRE(a.f == b.f);

  const WhiteningFilter c = random_swf(cov, 124);
  REQUIRE(max_abs_entry(a.f - c.f) > 1e-3);
  REQUIRE(check_swf(a.f, cov).is_swf);
  REQUIRE(check_swf(c.f, cov).is_swf);

  for (std::uint64_t seed = 0; seed < 25; ++seed)
    REQUIRE(check_swf(random_swf(cov, seed).f, cov).is_swf);
}

TEST_CASE("transformed_mean") {
  const CovarianceModel cov(mat2(4.0, 0.0, 0.0, 9.0));
  const WhiteningFilter f = swf_cholesky(cov);  // diag(1/2, 1/3)

  const cvector zero = transformed_mean(f, cvector{0.0, 0.0});
  REQUIRE(vector_norm(zero) == 0.0);

  const cvector unit = transformed_mean(f, cvector{2.0, 3.0});
  REQUIRE(std::abs(unit[0] - cdouble{1.0}) < 1e-15);
  REQUIRE(std::abs(unit[1] - cdouble{1.0}) < 1e-15);

  REQUIRE_THROWS_AS(transformed_mean(f, cvector{1.0}), DimensionMismatch);
}

TEST_CASE("no SWF can zero a nonzero mean") {
  // ‖F mu‖ >= sigma_min(F) > 0 for unit mu
  const CovarianceModel cov(kSigma21);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const WhiteningFilter f = random_swf(cov, seed);
    const std::vector<double> sv = singular_values(f.f);
    REQUIRE(sv.back() > 1e-12 * sv.front());  // full rank
    cvector mu = {cdouble{0.6, 0.0}, cdouble{0.0, 0.8}};  // unit norm
    REQUIRE(vector_norm(transformed_mean(f, mu)) >= sv.back() - 1e-12);
  }
}

TEST_CASE("generated covariances always validate") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    REQUIRE_NOTHROW(CovarianceModel(random_hermitian_pd(3, seed, 10.0)));
    REQUIRE_NOTHROW(CovarianceModel(random_hermitian_pd(5, seed, 100.0)));
  }
}

TEST_CASE("CovarianceModel validation") {
  REQUIRE_THROWS_AS(CovarianceModel(mat2(1.0, 2.0, 2.0, 1.0)), NotPositiveDefinite);
  REQUIRE_THROWS_AS(CovarianceModel(mat2(1.0, 1.0, 0.0, 1.0)), NotHermitian);
  REQUIRE_THROWS_AS(CovarianceModel(ComplexMatrix::identity(2), cvector{1.0}), DimensionMismatch);

  const CovarianceModel with_mean(ComplexMatrix::identity(2), cvector{cdouble{1.0}, cdouble{2.0}});
  REQUIRE(with_mean.has_mean());
  REQUIRE(with_mean.mean()[1] == cdouble{2.0});
}

TEST_CASE("Monte Carlo whiteness of analytic filters") {
  const CovarianceModel cov(kSigma21);
  const std::size_t n = 100000;

  REQUIRE(whiteness_test(swf_cholesky(cov), cov, n, 2).pass);
  REQUIRE(whiteness_test(swf_eigen(cov), cov, n, 3).pass);

  // the identity does not whiten a correlated covariance
  const WhiteningFilter unfiltered{ComplexMatrix::identity(2), FilterKind::RotatedSwf, 1.0};
  const WhitenessResult bad = whiteness_test(unfiltered, cov, n, 4);
  REQUIRE_FALSE(bad.pass);
  REQUIRE(bad.max_dev > 0.5);  // the off-diagonal 1 and diagonal excess survive
}
