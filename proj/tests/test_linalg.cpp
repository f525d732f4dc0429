#include "doctest.h"
#include "nce/entropy.hpp"
#include "nce/linalg.hpp"

using namespace nce;

namespace {

Matrix psd_pair_smaller(Rng& rng, int dim, Matrix& larger) {
  // 0 < x <= y: x = g*g + eps, y = x + h*h.
  Matrix x = random_psd(dim, rng) + 0.05 * Matrix::Identity(dim, dim);
  larger = x + random_psd(dim, rng);
  return x;
}

}  // namespace

TEST_CASE("eigh: identity and Pauli-X spectra") {
  const Matrix id3 = Matrix::Identity(3, 3);
  SpectralDecomposition d = eigh(HermitianOperator::make(id3));
  for (int i = 0; i < 3; ++i) CHECK(d.eigenvalues(i) == doctest::Approx(1.0));

  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  SpectralDecomposition dx = eigh(HermitianOperator::make(x));
  CHECK(dx.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(dx.eigenvalues(1) == doctest::Approx(1.0));
}

TEST_CASE("eigh: reconstruction residual on random Hermitian input") {
  Rng rng(42);
  const Matrix m = random_hermitian(8, rng);
  SpectralDecomposition d = eigh(HermitianOperator::make(m, 1e-8));
  CHECK(max_abs(d.reconstruct() - hermitian_part(m)) <=
        1e-9 * std::max(1.0, max_abs(m)));
}

TEST_CASE("eigh: round-trip up to dimension 64") {
  Rng rng(5);
  for (int dim : {2, 5, 17, 64}) {
    const Matrix m = random_hermitian(dim, rng);
    SpectralDecomposition d = eigh(HermitianOperator::make(m, 1e-8));
    CHECK(max_abs(d.reconstruct() - hermitian_part(m)) <=
          1e-9 * std::max(1.0, max_abs(m)));
    CHECK(max_abs(d.vectors.adjoint() * d.vectors - Matrix::Identity(dim, dim)) <=
          1e-10);
  }
}

TEST_CASE("eigh: non-Hermitian input is rejected with the defect") {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS((void)HermitianOperator::make(m), schema_error);
}

TEST_CASE("matrix_function: eta fixed points") {
  const Matrix id2 = Matrix::Identity(2, 2);
  CHECK(max_abs(matrix_function(HermitianOperator::make(id2), ScalarFn::Eta).mat) <=
        1e-14);

  const Matrix half = 0.5 * id2;
  const Matrix out = matrix_function(HermitianOperator::make(half), ScalarFn::Eta).mat;
  CHECK(max_abs(out - 0.5 * std::log(2.0) * id2) <= 1e-14);
}

TEST_CASE("matrix_function: log then exp recovers positive operators") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix p = random_psd(4, rng) + 0.1 * Matrix::Identity(4, 4);
    const HermitianOperator lg =
        matrix_function(HermitianOperator::trusted(p), ScalarFn::Log);
    const Matrix back = matrix_function(lg, ScalarFn::Exp).mat;
    CHECK(max_abs(back - p) <= 1e-8 * std::max(1.0, max_abs(p)));
  }
}

TEST_CASE("matrix_function: domain rejection reports the eigenvalue") {
  Matrix m(2, 2);
  m << -1.0, 0, 0, 1.0;
  CHECK_THROWS_AS(
      (void)matrix_function(HermitianOperator::make(m), ScalarFn::Log),
      guard_error);
  CHECK_THROWS_AS(
      (void)matrix_function(HermitianOperator::make(m), ScalarFn::Sqrt),
      guard_error);
  // log of an exact zero eigenvalue needs supported-subspace mode.
  Matrix z(2, 2);
  z << 0.0, 0, 0, 1.0;
  CHECK_THROWS_AS(
      (void)matrix_function(HermitianOperator::make(z), ScalarFn::Log),
      guard_error);
  CHECK_NOTHROW(
      (void)matrix_function(HermitianOperator::make(z), ScalarFn::Log, true));
}

TEST_CASE("operator concavity of eta on random PSD pairs") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + static_cast<int>(rng.integer(5));
    const Matrix x = random_psd(dim, rng);
    const Matrix y = random_psd(dim, rng);
    const Matrix lhs =
        matrix_function(HermitianOperator::trusted(0.5 * (x + y)), ScalarFn::Eta).mat -
        0.5 * matrix_function(HermitianOperator::trusted(x), ScalarFn::Eta).mat -
        0.5 * matrix_function(HermitianOperator::trusted(y), ScalarFn::Eta).mat;
    Eigen::SelfAdjointEigenSolver<Matrix> es(lhs, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-9);
  }
}

TEST_CASE("operator monotonicity of log on ordered pairs") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + static_cast<int>(rng.integer(5));
    Matrix y;
    const Matrix x = psd_pair_smaller(rng, dim, y);
    const Matrix diff =
        matrix_function(HermitianOperator::trusted(y), ScalarFn::Log).mat -
        matrix_function(HermitianOperator::trusted(x), ScalarFn::Log).mat;
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-9);
  }
}

TEST_CASE("tau_two_norm examples") {
  const TraceFunctional tau = TraceFunctional::uniform(2);
  CHECK(tau_two_norm(Matrix::Zero(2, 2), tau) == 0.0);
  CHECK(tau_two_norm(Matrix::Identity(2, 2), tau) == doctest::Approx(1.0));
  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  CHECK(tau_two_norm(e11, tau) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("orthonormalize: duplicates collapse, random sets become orthonormal") {
  const TraceFunctional tau2 = TraceFunctional::uniform(2);
  const Matrix id2 = Matrix::Identity(2, 2);
  CHECK(orthonormalize({id2, id2}, tau2).size() == 1);

  Matrix e11 = Matrix::Zero(2, 2), e22 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  e22(1, 1) = 1.0;
  CHECK(orthonormalize({e11, e22}, tau2).size() == 2);

  const TraceFunctional tau3 = TraceFunctional::uniform(3);
  Rng rng(3);
  std::vector<Matrix> vecs;
  for (int i = 0; i < 5; ++i) {
    Matrix m(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = rng.complex_normal();
    vecs.push_back(m);
  }
  auto basis = orthonormalize(vecs, tau3);
  REQUIRE(basis.size() == 5);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const Complex g = tau3.inner(basis[i], basis[j]);
      CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
  }
}

TEST_CASE("trace functional: tracial check distinguishes weights") {
  const TraceFunctional uni = TraceFunctional::uniform(2);
  Rng rng(9);
  std::vector<Matrix> ops = {random_hermitian(2, rng), random_hermitian(2, rng)};
  CHECK(uni.tracial_on(ops));
  TraceFunctional skew;
  skew.weights = RVector(2);
  skew.weights << 0.9, 0.1;
  CHECK_FALSE(skew.tracial_on(ops));
}

TEST_CASE("support projection isolates the positive part") {
  Matrix m(3, 3);
  m.setZero();
  m(0, 0) = 2.0;
  m(1, 1) = 1e-14;
  const Matrix p = support_projection(HermitianOperator::make(m));
  CHECK(p(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(p(1, 1)) <= 1e-12);
  CHECK(std::abs(p(2, 2)) <= 1e-12);
}
