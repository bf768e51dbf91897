#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <ewfkit/ewf.hpp>
#include <ewfkit/random_matrices.hpp>

using namespace ewfkit;

namespace {

ComplexMatrix mat2(cdouble a, cdouble b, cdouble c, cdouble d) {
  return ComplexMatrix(2, 2, {a, b, c, d});
}

const ComplexMatrix kSigma21 = mat2(2.0, 1.0, 1.0, 2.0);

double off_diagonal_max(const ComplexMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

double strict_lower_max(const ComplexMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < std::min(i, a.cols()); ++j)
      m = std::max(m, std::abs(a(i, j)));
  return m;
}

ComplexMatrix apply_both_sides(const ComplexMatrix& w, const ComplexMatrix& x) {
  return matmul(w, matmul(x, conj_transpose(w)));
}

}  // namespace

TEST_CASE("ewf_decorrelate trivial cases") {
  const CovarianceModel eye(ComplexMatrix::identity(2));
  const EwfResult already = ewf_decorrelate(eye, CovarianceModel(mat2(5.0, 0.0, 0.0, 2.0)));
  REQUIRE(max_abs_deviation_from_identity(already.w.f) < 1e-14);
  REQUIRE(max_abs_entry(already.byproduct - mat2(5.0, 0.0, 0.0, 2.0)) < 1e-14);

  // whitening the primary also whitens an identical secondary
  const CovarianceModel cov(kSigma21);
  const EwfResult coincident = ewf_decorrelate(cov, cov);
  REQUIRE(max_abs_deviation_from_identity(coincident.byproduct) < 1e-12);
}

TEST_CASE("ewf_decorrelate spectrum matches eig of Delta Sigma^{-1}") {
  const ComplexMatrix delta = mat2(1.0, 0.5, 0.5, 2.0);
  const CovarianceModel cov(kSigma21);
  const EwfResult r = ewf_decorrelate(cov, CovarianceModel(delta));

  // oracle: 2x2 closed-form inverse and characteristic polynomial
  const cdouble det_s = kSigma21(0, 0) * kSigma21(1, 1) - kSigma21(0, 1) * kSigma21(1, 0);
  const ComplexMatrix sigma_inv =
      (1.0 / det_s) * mat2(kSigma21(1, 1), -kSigma21(0, 1), -kSigma21(1, 0), kSigma21(0, 0));
  const ComplexMatrix prod = matmul(delta, sigma_inv);
  const double tr = trace(prod).real();
  const double det = (prod(0, 0) * prod(1, 1) - prod(0, 1) * prod(1, 0)).real();
  const double disc = std::sqrt(tr * tr - 4.0 * det);
  const double hi = 0.5 * (tr + disc), lo = 0.5 * (tr - disc);

  REQUIRE(r.byproduct(0, 0).real() == Catch::Approx(hi).epsilon(1e-10));
  REQUIRE(r.byproduct(1, 1).real() == Catch::Approx(lo).epsilon(1e-10));
  // and the hand-derived values for this instance
  REQUIRE(hi == Catch::Approx(7.0 / 6.0).margin(1e-12));
  REQUIRE(lo == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("ewf_decorrelate dual contract on random instances") {
  for (std::size_t m : {2, 4, 8}) {
    for (std::uint64_t i = 0; i < 20; ++i) {
      const CovarianceModel primary(random_hermitian_pd(m, derive_seed(100, i * 8 + m)));
      const CovarianceModel secondary(random_hermitian_pd(m, derive_seed(101, i * 8 + m)));
      const EwfResult r = ewf_decorrelate(primary, secondary);
      REQUIRE(max_abs_deviation_from_identity(apply_both_sides(r.w.f, primary.sigma())) <= 1e-9);
      REQUIRE(off_diagonal_max(apply_both_sides(r.w.f, secondary.sigma())) <= 1e-9);
    }
  }
}

TEST_CASE("ewf_decorrelate dimension check") {
  REQUIRE_THROWS_AS(ewf_decorrelate(CovarianceModel(ComplexMatrix::identity(2)),
                                    CovarianceModel(ComplexMatrix::identity(3))),
                    DimensionMismatch);
}

TEST_CASE("ewf_triangularize trivial cases") {
  const CovarianceModel eye(ComplexMatrix::identity(2));
  const ComplexMatrix upper = mat2(2.0, 1.0, 0.0, 3.0);
  const EwfResult fixed = ewf_triangularize(eye, upper);
  REQUIRE(max_abs_deviation_from_identity(fixed.w.f) < 1e-14);
  REQUIRE(max_abs_entry(fixed.byproduct - upper) < 1e-14);

  // with Sigma = I the construction reduces to plain QR
  const ComplexMatrix h = gaussian_matrix(2, 2, 31);
  const EwfResult plain = ewf_triangularize(eye, h);
  const QRFactors qr = qr_posdiag(h);
  REQUIRE(max_abs_entry(plain.byproduct - qr.r) < 1e-12);
  REQUIRE(max_abs_entry(plain.w.f - conj_transpose(qr.q)) < 1e-12);
}

TEST_CASE("ewf_triangularize on a correlated covariance") {
  const CovarianceModel cov(kSigma21);
  const EwfResult r = ewf_triangularize(cov, ComplexMatrix::identity(2));
  const QRFactors of_fc = qr_posdiag(swf_cholesky(cov).f);
  REQUIRE(max_abs_entry(r.byproduct - of_fc.r) < 1e-12);
  REQUIRE(strict_lower_max(matmul(r.w.f, ComplexMatrix::identity(2))) <= 1e-10);
  REQUIRE(max_abs_deviation_from_identity(apply_both_sides(r.w.f, cov.sigma())) <= 1e-10);
}

TEST_CASE("ewf_triangularize byproduct does not depend on the base SWF") {
  for (std::uint64_t i = 0; i < 5; ++i) {
    const CovarianceModel cov(random_hermitian_pd(4, derive_seed(200, i)));
    const ComplexMatrix h = gaussian_matrix(4, 4, derive_seed(201, i));
    const ComplexMatrix r_ref = ewf_triangularize(cov, h).byproduct;
    REQUIRE(max_abs_entry(ewf_triangularize(cov, h, swf_eigen(cov)).byproduct - r_ref) <= 1e-8);
    for (std::uint64_t s = 0; s < 4; ++s) {
      const EwfResult r = ewf_triangularize(cov, h, random_swf(cov, s));
      REQUIRE(max_abs_entry(r.byproduct - r_ref) <= 1e-8);
      REQUIRE(check_swf(r.w.f, cov).is_swf);
    }
  }
}

TEST_CASE("ewf_triangularize with a tall channel whitens the projection") {
  const CovarianceModel cov(random_hermitian_pd(4, 9));
  const ComplexMatrix h = gaussian_matrix(4, 2, 10);
  const EwfResult r = ewf_triangularize(cov, h);
  REQUIRE(r.w.f.rows() == 2);
  REQUIRE(r.w.f.cols() == 4);
  REQUIRE(r.byproduct.rows() == 2);
  REQUIRE(max_abs_deviation_from_identity(apply_both_sides(r.w.f, cov.sigma())) <= 1e-10);
  REQUIRE(strict_lower_max(matmul(r.w.f, h)) <= 1e-10);
  REQUIRE(max_abs_entry(matmul(r.w.f, h) - r.byproduct) <= 1e-10);
}

TEST_CASE("ewf_triangularize input validation") {
  const CovarianceModel cov(ComplexMatrix::identity(2));
  REQUIRE_THROWS_AS(ewf_triangularize(cov, mat2(1.0, 2.0, 2.0, 4.0)), RankDeficient);
  REQUIRE_THROWS_AS(ewf_triangularize(cov, ComplexMatrix(3, 2)), DimensionMismatch);
  REQUIRE_THROWS_AS(ewf_triangularize(cov, ComplexMatrix(2, 3)), DimensionMismatch);

  WhiteningFilter bogus{2.0 * ComplexMatrix::identity(2), FilterKind::RotatedSwf, 1.0};
  REQUIRE_THROWS_AS(ewf_triangularize(cov, ComplexMatrix::identity(2), bogus), NotAnSwf);
}

TEST_CASE("ewf_polar trivial cases") {
  const CovarianceModel eye(ComplexMatrix::identity(2));
  const ComplexMatrix psd = mat2(2.0, 1.0, 1.0, 2.0);
  const EwfResult herm = ewf_polar(eye, psd);
  REQUIRE(max_abs_deviation_from_identity(herm.w.f) < 1e-12);
  REQUIRE(max_abs_entry(herm.byproduct - psd) < 1e-12);

  const ComplexMatrix u = random_unitary(2, 77);
  const EwfResult unit = ewf_polar(eye, u);
  REQUIRE(max_abs_entry(unit.w.f - conj_transpose(u)) < 1e-12);
  REQUIRE(max_abs_deviation_from_identity(unit.byproduct) < 1e-12);
}

TEST_CASE("ewf_polar byproduct spectrum equals the singular values of F_c S") {
  const CovarianceModel cov(kSigma21);
  const ComplexMatrix s = mat2(0.0, -1.0, 1.0, 0.0);
  const EwfResult r = ewf_polar(cov, s);

  REQUIRE(hermitian_deviation(r.byproduct) < 1e-10);
  const EigenFactors pe = eig_hermitian(r.byproduct);
  const std::vector<double> sv = singular_values(matmul(swf_cholesky(cov).f, s));
  for (std::size_t i = 0; i < 2; ++i)
    REQUIRE(pe.lambda[i] == Catch::Approx(sv[i]).margin(1e-10));
  REQUIRE(max_abs_entry(matmul(r.w.f, s) - r.byproduct) < 1e-10);
  REQUIRE(check_swf(r.w.f, cov).is_swf);
}

TEST_CASE("ewf_polar accepts singular secondaries") {
  const CovarianceModel cov(kSigma21);
  ComplexMatrix s(2, 2);
  s(0, 0) = 1.0;  // rank 1
  const EwfResult r = ewf_polar(cov, s);
  REQUIRE(check_swf(r.w.f, cov).is_swf);
  REQUIRE(hermitian_deviation(matmul(r.w.f, s)) < 1e-10);
  const EigenFactors pe = eig_hermitian(r.byproduct);
  REQUIRE(pe.lambda.back() >= -1e-9);
}

TEST_CASE("ewf dual contract over random instances, all three constructions") {
  for (std::size_t m : {2, 4, 8}) {
    for (std::uint64_t i = 0; i < 10; ++i) {
      const CovarianceModel primary(random_hermitian_pd(m, derive_seed(300, i * 8 + m)));

      const EwfResult tri =
          ewf_triangularize(primary, gaussian_matrix(m, m, derive_seed(301, i * 8 + m)));
      REQUIRE(max_abs_deviation_from_identity(apply_both_sides(tri.w.f, primary.sigma())) <= 1e-9);
      REQUIRE(max_abs_deviation_from_identity(
                  matmul(conj_transpose(tri.corrective_q), tri.corrective_q)) <= tol::ortho);

      const EwfResult pol =
          ewf_polar(primary, gaussian_matrix(m, m, derive_seed(302, i * 8 + m)));
      REQUIRE(max_abs_deviation_from_identity(apply_both_sides(pol.w.f, primary.sigma())) <= 1e-9);
      const EigenFactors pe = eig_hermitian(pol.byproduct);
      REQUIRE(pe.lambda.back() >= -1e-9);
    }
  }
}
