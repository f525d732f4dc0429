#include <cmath>

#include "doctest.h"
#include "nce/chain.hpp"
#include "nce/entropy.hpp"
#include "nce/pressure.hpp"

using namespace nce;

namespace {

LocalHamiltonian single_site(const Matrix& h) {
  LocalHamiltonian lh;
  lh.site_dim = static_cast<int>(h.rows());
  lh.support = 1;
  lh.term = HermitianOperator::trusted(hermitian_part(h));
  return lh;
}

// Independent dense route: assemble H_k on the open chain and take the
// spectrum (test-side oracle for the factorized/diagonal paths).
double dense_pressure_oracle(const LocalHamiltonian& lh, int k) {
  const ChainSpace chain{lh.site_dim, k + lh.support};
  Matrix hk = Matrix::Zero(chain.dim(), chain.dim());
  for (int j = 0; j <= k; ++j) {
    hk += embed_interval_operator(chain, lh.term.mat, j);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hk, Eigen::EigenvaluesOnly);
  const RVector ev = es.eigenvalues();
  const double lo = ev(0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) acc += std::exp(lo - ev(i));
  return (-lo + std::log(acc)) / double(k + 1);
}

}  // namespace

TEST_CASE("pressure_fd: flat, shifted and two-level spectra") {
  for (int r : {2, 5, 9}) {
    CHECK(pressure_fd(HermitianOperator::trusted(Matrix::Zero(r, r))) ==
          doctest::Approx(std::log(double(r))).epsilon(1e-14));
    CHECK(pressure_fd(HermitianOperator::trusted(
              3.2 * Matrix::Identity(r, r))) ==
          doctest::Approx(std::log(double(r)) - 3.2).epsilon(1e-12));
  }
  for (double e : {0.5, 2.0, 50.0}) {
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = e;
    CHECK(pressure_fd(HermitianOperator::trusted(h)) ==
          doctest::Approx(std::log(1.0 + std::exp(-e))).epsilon(1e-12));
  }
  // Overflow safety via the max-shift.
  Matrix big = Matrix::Zero(2, 2);
  big(0, 0) = -1000.0;
  big(1, 1) = 1000.0;
  CHECK(std::isfinite(pressure_fd(HermitianOperator::trusted(big))));
  CHECK(pressure_fd(HermitianOperator::trusted(big)) ==
        doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("gibbs_state: mixing, ground-state limit, stationarity") {
  GibbsState flat = gibbs_state(HermitianOperator::trusted(Matrix::Zero(3, 3)));
  CHECK(max_abs(flat.density - Matrix::Identity(3, 3) / 3.0) <= 1e-12);

  Matrix steep = Matrix::Zero(2, 2);
  steep(1, 1) = 50.0;
  GibbsState g = gibbs_state(HermitianOperator::trusted(steep));
  CHECK(g.density(1, 1).real() <= 1e-20);
  CHECK(g.density(0, 0).real() == doctest::Approx(1.0));

  Rng rng(3);
  const HermitianOperator h = HermitianOperator::trusted(random_hermitian(8, rng));
  GibbsState gr = gibbs_state(h);
  CHECK(std::abs(gr.density.trace().real() - 1.0) <= 1e-12);
  CHECK(max_abs(gr.density * h.mat - h.mat * gr.density) <= 1e-9);
  CHECK(variational_gap(HermitianOperator::trusted(gr.density), h) <= 1e-8);
}

TEST_CASE("variational gap equals the relative entropy to the Gibbs state") {
  Rng rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    const int dim = 2 + static_cast<int>(rng.integer(5));
    const HermitianOperator h =
        HermitianOperator::trusted(random_hermitian(dim, rng));
    const Matrix rho = random_density(dim, rng);
    const double gap = variational_gap(HermitianOperator::trusted(rho), h);
    GibbsState g = gibbs_state(h);
    const TraceFunctional tau = TraceFunctional::uniform(dim);
    const double rel = relative_entropy(
        HermitianOperator::trusted(double(dim) * rho),
        HermitianOperator::trusted(double(dim) * g.density), tau);
    CHECK(std::abs(gap - rel) <= 1e-8);
  }
}

TEST_CASE("variational gap at h = 0 is the entropy deficit") {
  Rng rng(7);
  const Matrix rho = random_density(5, rng);
  const double gap = variational_gap(HermitianOperator::trusted(rho),
                                     HermitianOperator::trusted(Matrix::Zero(5, 5)));
  const double want =
      std::log(5.0) - von_neumann_entropy(HermitianOperator::trusted(rho));
  CHECK(gap == doctest::Approx(want).epsilon(1e-10));
  CHECK(gap >= -1e-12);
}

TEST_CASE("Peierls-Bogoliubov: equality, strict growth, precondition") {
  Rng rng(9);
  const Matrix h = random_hermitian(4, rng);
  CHECK(peierls_bogoliubov_check(HermitianOperator::trusted(h),
                                 HermitianOperator::trusted(h)));
  Matrix p = Matrix::Zero(4, 4);
  p(0, 0) = 1.0;
  // Strict inequality for a strictly monotone perturbation: check via the
  // raw values.
  const double left = pressure_fd(HermitianOperator::trusted(-h));
  const double right = pressure_fd(HermitianOperator::trusted(-(h + 0.3 * p)));
  CHECK(right > left);
  CHECK(peierls_bogoliubov_check(HermitianOperator::trusted(h),
                                 HermitianOperator::trusted(h + 0.3 * p)));
  CHECK_THROWS_AS(
      (void)peierls_bogoliubov_check(HermitianOperator::trusted(h + 0.3 * p),
                                     HermitianOperator::trusted(h)),
      schema_error);
}

TEST_CASE("tangent inequality at the Gibbs functional") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + static_cast<int>(rng.integer(7));
    const Matrix h = random_hermitian(dim, rng);
    const Matrix k = random_hermitian(dim, rng);
    GibbsState g = gibbs_state(HermitianOperator::trusted(h));
    const double lhs = pressure_fd(HermitianOperator::trusted(h + k)) -
                       pressure_fd(HermitianOperator::trusted(h));
    const double rhs = -(g.density * k).trace().real();
    CHECK(lhs >= rhs - 1e-9);
  }
}

TEST_CASE("shift pressure: flat chain and single-site factorization") {
  LocalHamiltonian zero = single_site(Matrix::Zero(2, 2));
  PressureSequence seq0 = shift_pressure_estimate(zero, 12);
  for (double v : seq0.values) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(seq0.aitken == doctest::Approx(std::log(2.0)));

  Matrix h(2, 2);
  h << 0.0, 0.0, 0.0, 1.0;
  PressureSequence seq1 = shift_pressure_estimate(single_site(h), 12);
  const double want = std::log(1.0 + std::exp(-1.0));
  for (double v : seq1.values) CHECK(std::abs(v - want) <= 1e-12);
}

TEST_CASE("shift pressure: factorized path agrees with the dense oracle") {
  Rng rng(13);
  LocalHamiltonian lh = single_site(random_hermitian(2, rng));
  PressureSequence seq = shift_pressure_estimate(lh, 4);
  for (int k = 1; k <= 4; ++k) {
    CHECK(seq.values[k - 1] == doctest::Approx(dense_pressure_oracle(lh, k))
                                   .epsilon(1e-10));
  }
}

TEST_CASE("shift pressure: diagonal path agrees with the dense oracle") {
  LocalHamiltonian ising;
  ising.site_dim = 2;
  ising.support = 2;
  Matrix e = Matrix::Zero(4, 4);
  e(0, 0) = -1.0;
  e(1, 1) = 1.0;
  e(2, 2) = 1.0;
  e(3, 3) = -1.0;
  ising.term = HermitianOperator::trusted(e);
  PressureSequence seq = shift_pressure_estimate(ising, 6);
  for (int k = 1; k <= 6; ++k) {
    CHECK(seq.values[k - 1] == doctest::Approx(dense_pressure_oracle(ising, k))
                                   .epsilon(1e-10));
  }
  // And with the independent transfer-matrix route.
  TransferOracle oracle = ising_transfer_oracle(ising, 6);
  for (int k = 1; k <= 6; ++k) {
    CHECK(seq.values[k - 1] == doctest::Approx(oracle.values[k - 1]).epsilon(1e-12));
  }
}

TEST_CASE("shift pressure: generic dense term at small horizons") {
  Rng rng(17);
  LocalHamiltonian lh;
  lh.site_dim = 2;
  lh.support = 2;
  lh.term = HermitianOperator::trusted(random_hermitian(4, rng));
  PressureSequence seq = shift_pressure_estimate(lh, 4);
  for (int k = 1; k <= 4; ++k) {
    CHECK(seq.values[k - 1] == doctest::Approx(dense_pressure_oracle(lh, k))
                                   .epsilon(1e-10));
  }
}

TEST_CASE("dimension guard on the horizon") {
  LocalHamiltonian lh = single_site(Matrix::Zero(2, 2));
  CHECK_THROWS_AS((void)shift_pressure_estimate(lh, 14), guard_error);
  CHECK_NOTHROW((void)shift_pressure_estimate(lh, 13));
}

TEST_CASE("transfer oracle needs a diagonal two-site term") {
  Rng rng(19);
  LocalHamiltonian lh;
  lh.site_dim = 2;
  lh.support = 2;
  lh.term = HermitianOperator::trusted(random_hermitian(4, rng));
  CHECK_THROWS_AS((void)ising_transfer_oracle(lh, 4), schema_error);
}

TEST_CASE("property suite: single-site at k = 10 and dense two-site at k = 4") {
  Rng rng(21);
  PressureSuiteReport fast =
      pressure_property_suite(single_site(random_hermitian(2, rng)), 10, 3);
  CHECK(fast.all_pass());

  LocalHamiltonian lh;
  lh.site_dim = 2;
  lh.support = 2;
  lh.term = HermitianOperator::trusted(0.5 * random_hermitian(4, rng));
  PressureSuiteReport dense = pressure_property_suite(lh, 4, 3);
  CHECK(dense.all_pass());
}

TEST_CASE("variational principle: random densities never beat the pressure") {
  Rng rng(23);
  const HermitianOperator h = HermitianOperator::trusted(random_hermitian(6, rng));
  const double pressure = pressure_fd(h);
  double best = -1e18;
  for (int probe = 0; probe < 200; ++probe) {
    const Matrix rho = random_density(6, rng);
    best = std::max(best, von_neumann_entropy(HermitianOperator::trusted(rho)) -
                              (rho * h.mat).trace().real());
  }
  CHECK(best <= pressure + 1e-9);
  GibbsState g = gibbs_state(h);
  const double at_gibbs =
      von_neumann_entropy(HermitianOperator::trusted(g.density)) -
      (g.density * h.mat).trace().real();
  CHECK(at_gibbs == doctest::Approx(pressure).epsilon(1e-8));
}
