#include <cmath>

#include "doctest.h"
#include "nce/car.hpp"
#include "nce/entropy.hpp"

using namespace nce;

TEST_CASE("single mode: lowering operator convention") {
  CARSystem sys = build_car(1);
  Matrix want(2, 2);
  want << 0, 1, 0, 0;
  CHECK(max_abs(sys.annihilators[0] - want) <= 1e-14);
  const Matrix a = sys.annihilators[0];
  CHECK(max_abs(a * a.adjoint() + a.adjoint() * a - Matrix::Identity(2, 2)) <=
        1e-14);
}

TEST_CASE("four modes: all defining relations within 1e-12") {
  CARSystem sys = build_car(4);
  const long long d = sys.dim();
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Matrix& ai = sys.annihilators[i];
      const Matrix& aj = sys.annihilators[j];
      worst = std::max(worst, max_abs(ai * aj + aj * ai));
      const double delta = i == j ? 1.0 : 0.0;
      worst = std::max(worst, max_abs(ai * aj.adjoint() + aj.adjoint() * ai -
                                      delta * Matrix::Identity(d, d)));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("bilinearity: combined mode vectors satisfy the relations") {
  CARSystem sys = build_car(3);
  CVector f(3);
  f.setZero();
  f(0) = 1.0 / std::sqrt(2.0);
  f(1) = 1.0 / std::sqrt(2.0);
  const Matrix af = sys.annihilator(f);
  CHECK(max_abs(af * af.adjoint() + af.adjoint() * af -
                Matrix::Identity(sys.dim(), sys.dim())) <= 1e-12);
  CHECK(max_abs(af * af) <= 1e-12);
}

TEST_CASE("mode guard") {
  CHECK_THROWS_AS((void)build_car(13), guard_error);
  CHECK_THROWS_AS((void)build_car(0), guard_error);
}

TEST_CASE("matrix units: algebra relations and cross-mode commutation") {
  CARSystem sys = build_car(3);
  MatrixUnitSystem mu = matrix_units(sys);
  const long long d = sys.dim();
  const Matrix id = Matrix::Identity(d, d);
  for (int n = 1; n <= 3; ++n) {
    CHECK(max_abs(mu.e(n, 1, 1) + mu.e(n, 2, 2) - id) <= 1e-12);
    CHECK(max_abs(mu.e(n, 1, 2) * mu.e(n, 2, 1) - mu.e(n, 1, 1)) <= 1e-12);
    CHECK(max_abs(mu.e(n, 1, 2).adjoint() - mu.e(n, 2, 1)) <= 1e-12);
    CHECK(max_abs(mu.v[n] - mu.v[n].adjoint()) <= 1e-12);  // V_n self-adjoint
  }
  for (int i = 1; i <= 2; ++i) {
    for (int j = 1; j <= 2; ++j) {
      for (int p = 1; p <= 2; ++p) {
        for (int q = 1; q <= 2; ++q) {
          const Matrix a = mu.e(1, i, j);
          const Matrix b = mu.e(2, p, q);
          CHECK(max_abs(a * b - b * a) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("matrix units factorize the full algebra (dimension 4^m)") {
  CARSystem sys = build_car(2);
  MatrixUnitSystem mu = matrix_units(sys);
  const TraceFunctional tau = TraceFunctional::uniform(4);
  std::vector<Matrix> gens;
  for (int n = 1; n <= 2; ++n) {
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) gens.push_back(mu.e(n, i, j));
  }
  const StarSubalgebra joint = generated_algebra(gens, tau);
  CHECK(joint.dim() == 16);  // 4^2
  CHECK(joint.rank() == 4);
}

TEST_CASE("quasifree evaluation: one-pair formula and unbalanced monomials") {
  CARSystem sys = build_car(3);
  Rng rng(3);
  RVector lam(3);
  lam << 0.2, 0.5, 0.9;
  const Matrix a_op = lam.cast<Complex>().asDiagonal();
  const HermitianOperator a_h = HermitianOperator::trusted(a_op);
  const Matrix rho = quasifree_density(sys, lam);

  for (int trial = 0; trial < 20; ++trial) {
    CVector f(3), g(3);
    for (int i = 0; i < 3; ++i) {
      f(i) = rng.complex_normal();
      g(i) = rng.complex_normal();
    }
    WickMonomial mono;
    mono.creators = {f};
    mono.annihilators = {g};
    const Complex det = quasifree_eval(sys, a_h, mono);
    const Complex want = f.dot(a_op * g);  // (A g, f)
    CHECK(std::abs(det - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    const Complex dens = (rho * monomial_operator(sys, mono)).trace();
    CHECK(std::abs(det - dens) <= 1e-10 * std::max(1.0, std::abs(det)));
  }

  WickMonomial unbalanced;
  unbalanced.annihilators = {CVector::Ones(3)};
  CHECK(quasifree_eval(sys, a_h, unbalanced) == Complex(0.0, 0.0));
}

TEST_CASE("quasifree product state: matrix-unit entries") {
  CARSystem sys = build_car(3);
  MatrixUnitSystem mu = matrix_units(sys);
  RVector lam(3);
  lam << 0.1, 0.6, 0.8;
  const Matrix rho = quasifree_density(sys, lam);
  for (int n = 1; n <= 3; ++n) {
    CHECK((rho * mu.e(n, 2, 2)).trace().real() ==
          doctest::Approx(lam(n - 1)).epsilon(1e-12));
    CHECK((rho * mu.e(n, 1, 1)).trace().real() ==
          doctest::Approx(1.0 - lam(n - 1)).epsilon(1e-12));
    CHECK(std::abs((rho * mu.e(n, 1, 2)).trace()) <= 1e-12);
  }
}

TEST_CASE("one-particle operators outside [0,1] are rejected") {
  CARSystem sys = build_car(2);
  Matrix bad(2, 2);
  bad << 1.5, 0, 0, 0.5;
  WickMonomial mono;
  mono.creators = {CVector::Ones(2)};
  mono.annihilators = {CVector::Ones(2)};
  CHECK_THROWS_AS(
      (void)quasifree_eval(sys, HermitianOperator::trusted(bad), mono),
      schema_error);
}

TEST_CASE("Wick ordering is enforced") {
  CVector f = CVector::Ones(2);
  CHECK_THROWS_AS(
      (void)WickMonomial::from_operator_list({{false, f}, {true, f}}),
      schema_error);
  WickMonomial ok = WickMonomial::from_operator_list({{true, f}, {false, f}});
  CHECK(ok.creators.size() == 1);
  CHECK(ok.annihilators.size() == 1);
}

TEST_CASE("bogoliubov entropy: constant symbols and the log 2 density") {
  for (double lam : {0.0, 0.25, 0.5, 1.0}) {
    const double want = eta_scalar(lam) + eta_scalar(1.0 - lam);
    const double got = bogoliubov_entropy(SpectralSymbol::constant(lam, 1), 256);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
  for (int p = 1; p <= 3; ++p) {
    CHECK(bogoliubov_entropy(SpectralSymbol::constant(0.5, p), 1024) ==
          doctest::Approx(p * std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("bogoliubov entropy: zero multiplicity integrates to zero") {
  SpectralSymbol s;
  s.theta = RVector::LinSpaced(4, 0.0, 1.5 * M_PI);
  s.eigenvalues.assign(4, RVector());
  CHECK(bogoliubov_entropy(s, 64) == 0.0);
}

TEST_CASE("bogoliubov entropy: additivity over disjoint theta supports") {
  auto two_piece = [](double a, double b) {
    SpectralSymbol s;
    s.theta = RVector(2);
    s.theta << 0.0, M_PI;
    s.eigenvalues.clear();
    s.eigenvalues.push_back(a < 0 ? RVector() : RVector::Constant(1, a));
    s.eigenvalues.push_back(b < 0 ? RVector() : RVector::Constant(1, b));
    return s;
  };
  const double ea = bogoliubov_entropy(two_piece(0.3, -1), 512);
  const double eb = bogoliubov_entropy(two_piece(-1, 0.7), 512);
  const double eab = bogoliubov_entropy(two_piece(0.3, 0.7), 512);
  CHECK(std::abs(eab - (ea + eb)) <= 1e-10);
}

TEST_CASE("bogoliubov entropy: grid doubling leaves piecewise symbols fixed") {
  SpectralSymbol s;
  s.theta = RVector(3);
  s.theta << 0.0, 1.0, 4.0;
  s.eigenvalues = {RVector::Constant(1, 0.2), RVector::Constant(2, 0.6),
                   RVector()};
  const double coarse = bogoliubov_entropy(s, 128);
  const double fine = bogoliubov_entropy(s, 256);
  CHECK(std::abs(coarse - fine) <= 1e-8);
}

TEST_CASE("bogoliubov entropy: odd panel counts are rejected") {
  CHECK_THROWS_AS((void)bogoliubov_entropy(SpectralSymbol::constant(0.5, 1), 511),
                  schema_error);
}

TEST_CASE("symbol validation") {
  SpectralSymbol s;
  s.theta = RVector(2);
  s.theta << 1.0, 0.5;  // not ascending
  s.eigenvalues = {RVector(), RVector()};
  CHECK_THROWS_AS(s.validate(), schema_error);
}
