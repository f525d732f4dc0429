#include "doctest.h"
#include "nce/chain.hpp"
#include "nce/entropy.hpp"

using namespace nce;

namespace {

StarSubalgebra m2_plus_c(const TraceFunctional& tau) {
  AlgebraBlockSpec spec;
  spec.ambient_dim = 3;
  spec.blocks = {BlockInfo{2, 1, 0.5}, BlockInfo{1, 1, 0.5}};
  return build_block_algebra(spec, tau);
}

}  // namespace

TEST_CASE("build_block_algebra: canonical examples") {
  const TraceFunctional tau2 = TraceFunctional::uniform(2);
  const StarSubalgebra m2 = full_matrix_algebra(2, tau2);
  CHECK(m2.dim() == 4);
  CHECK(m2.rank() == 2);
  CHECK(m2.central_projections.size() == 1);

  const StarSubalgebra d2 = diagonal_masa_algebra(2, tau2);
  CHECK(d2.dim() == 2);
  CHECK(d2.rank() == 2);
  CHECK(d2.central_projections.size() == 2);

  AlgebraBlockSpec spec;
  spec.ambient_dim = 4;
  spec.blocks = {BlockInfo{2, 1, 0.5}, BlockInfo{1, 2, 0.5}};
  const StarSubalgebra a = build_block_algebra(spec, TraceFunctional::uniform(4));
  CHECK(a.dim() == 5);   // sum n_j^2
  CHECK(a.rank() == 3);  // sum n_j
}

TEST_CASE("build_block_algebra: inconsistent dims rejected") {
  AlgebraBlockSpec spec;
  spec.ambient_dim = 3;
  spec.blocks = {BlockInfo{2, 1, 1.0}};
  CHECK_THROWS_AS((void)build_block_algebra(spec, TraceFunctional::uniform(3)),
                  schema_error);
}

TEST_CASE("conditional expectation: fixed points, scalars, diagonal oracle") {
  const TraceFunctional tau = TraceFunctional::uniform(2);
  const StarSubalgebra m2 = full_matrix_algebra(2, tau);
  Rng rng(1);
  const Matrix x = random_hermitian(2, rng);
  CHECK(max_abs(conditional_expectation(m2, x, tau) - x) <= 1e-10);

  const StarSubalgebra c1 = scalar_algebra(2, tau);
  CHECK(max_abs(conditional_expectation(c1, x, tau) -
                tau.apply(x) * Matrix::Identity(2, 2)) <= 1e-10);

  // Defining relations solved by hand in dim 2: E onto the diagonal keeps
  // the diagonal.
  const StarSubalgebra d2 = diagonal_masa_algebra(2, tau);
  Matrix y(2, 2);
  y << Complex(1.0, 0.0), Complex(2.0, 0.5), Complex(0.5, -1.0), Complex(-3.0, 0.0);
  const Matrix e = conditional_expectation(d2, y, tau);
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = y(0, 0);
  want(1, 1) = y(1, 1);
  CHECK(max_abs(e - want) <= 1e-10);
}

TEST_CASE("conditional expectation: projection, positivity, trace preservation") {
  const int dim = 4;
  const TraceFunctional tau = TraceFunctional::uniform(dim);
  AlgebraBlockSpec spec;
  spec.ambient_dim = dim;
  spec.blocks = {BlockInfo{2, 2, 1.0}};
  const StarSubalgebra n = build_block_algebra(spec, tau);
  Rng rng(2);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix x = random_hermitian(dim, rng);
    const Matrix ex = conditional_expectation(n, x, tau);
    // tau-orthogonality of the residual against the algebra.
    for (const Matrix& b : n.basis) {
      CHECK(std::abs(tau.inner(b, x - ex)) <= 1e-9);
    }
    // Idempotent and unital.
    CHECK(max_abs(conditional_expectation(n, ex, tau) - ex) <= 1e-9);
    CHECK(std::abs(tau.apply(ex) - tau.apply(x)) <= 1e-10);

    const Matrix p = random_psd(dim, rng);
    const Matrix ep = hermitian_part(conditional_expectation(n, p, tau));
    Eigen::SelfAdjointEigenSolver<Matrix> es(ep, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) >= -1e-9);
  }
  CHECK(max_abs(conditional_expectation(n, Matrix::Identity(dim, dim), tau) -
                Matrix::Identity(dim, dim)) <= 1e-9);
}

TEST_CASE("Jensen inequality under nested expectations") {
  const int dim = 4;
  const TraceFunctional tau = TraceFunctional::uniform(dim);
  const StarSubalgebra n = full_matrix_algebra(dim, tau);
  AlgebraBlockSpec spec;
  spec.ambient_dim = dim;
  spec.blocks = {BlockInfo{2, 2, 1.0}};
  const StarSubalgebra p = build_block_algebra(spec, tau);  // P inside N
  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix x = random_psd(dim, rng);
    const double big = tau_eta(
        HermitianOperator::trusted(hermitian_part(conditional_expectation(p, x, tau))),
        tau);
    const double small = tau_eta(
        HermitianOperator::trusted(hermitian_part(conditional_expectation(n, x, tau))),
        tau);
    CHECK(big >= small - 1e-9);
  }
}

TEST_CASE("rank_center_masa on standard algebras") {
  const TraceFunctional tau3 = TraceFunctional::uniform(3);
  const StarSubalgebra m3 = full_matrix_algebra(3, tau3);
  auto rcm = rank_center_masa(m3, tau3);
  CHECK(rcm.rank == 3);
  CHECK(rcm.center.dim() == 1);
  CHECK(rcm.masa.size() == 3);

  const StarSubalgebra d3 = diagonal_masa_algebra(3, tau3);
  auto rcm_d = rank_center_masa(d3, tau3);
  CHECK(rcm_d.rank == 3);
  CHECK(rcm_d.center.dim() == 3);

  const StarSubalgebra mix = m2_plus_c(TraceFunctional::uniform(3));
  auto rcm_m = rank_center_masa(mix, TraceFunctional::uniform(3));
  CHECK(rcm_m.rank == 3);
  CHECK(rcm_m.center.dim() == 2);
}

TEST_CASE("algebra entropy: factors, coins, mixed blocks") {
  for (int n = 2; n <= 4; ++n) {
    const TraceFunctional tau = TraceFunctional::uniform(n);
    CHECK(algebra_entropy(full_matrix_algebra(n, tau), tau) ==
          doctest::Approx(std::log(double(n))).epsilon(1e-12));
  }
  const TraceFunctional tau2 = TraceFunctional::uniform(2);
  CHECK(algebra_entropy(diagonal_masa_algebra(2, tau2), tau2) ==
        doctest::Approx(std::log(2.0)));

  // M_2 + C with central traces (1/2, 1/2) under the paired trace.
  AlgebraBlockSpec spec;
  spec.ambient_dim = 3;
  spec.blocks = {BlockInfo{2, 1, 0.5}, BlockInfo{1, 1, 0.5}};
  const TraceFunctional paired = paired_trace(spec);
  const StarSubalgebra a = build_block_algebra(spec, paired);
  const double want = 2.0 * eta_scalar(0.25) + eta_scalar(0.5);
  CHECK(algebra_entropy(a, paired) == doctest::Approx(want).epsilon(1e-12));
  // Equals the masa enumeration sum eta(tau(e)).
  double masa_sum = 0.0;
  for (const Matrix& e : a.masa.projections) {
    masa_sum += eta_scalar(paired.apply(e).real());
  }
  CHECK(masa_sum == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("algebra entropy rejects non-tracial functionals") {
  const TraceFunctional tau = TraceFunctional::uniform(2);
  const StarSubalgebra m2 = full_matrix_algebra(2, tau);
  TraceFunctional skew;
  skew.weights = RVector(2);
  skew.weights << 0.8, 0.2;
  CHECK_THROWS_AS((void)algebra_entropy(m2, skew), schema_error);
}

TEST_CASE("rank squared bounds the dimension; equality on factors") {
  const TraceFunctional tau4 = TraceFunctional::uniform(4);
  const StarSubalgebra m4 = full_matrix_algebra(4, tau4);
  CHECK(m4.rank() * m4.rank() == m4.dim());
  AlgebraBlockSpec spec;
  spec.ambient_dim = 4;
  spec.blocks = {BlockInfo{2, 1, 0.5}, BlockInfo{1, 2, 0.5}};
  const StarSubalgebra a = build_block_algebra(spec, tau4);
  CHECK(a.rank() * a.rank() >= a.dim());
  CHECK(a.rank() * a.rank() > a.dim());  // not a factor
}

TEST_CASE("masa projections of M_n carry trace 1/n") {
  for (int n = 2; n <= 4; ++n) {
    const TraceFunctional tau = TraceFunctional::uniform(n);
    const StarSubalgebra mn = full_matrix_algebra(n, tau);
    REQUIRE(mn.masa.size() == n);
    for (const Matrix& e : mn.masa.projections) {
      CHECK(tau.apply(e).real() == doctest::Approx(1.0 / n));
    }
  }
}

TEST_CASE("generated_algebra: closure and structure recovery") {
  const TraceFunctional tau = TraceFunctional::uniform(2);
  Matrix e12 = Matrix::Zero(2, 2);
  e12(0, 1) = 1.0;
  const StarSubalgebra full = generated_algebra({e12}, tau);
  CHECK(full.dim() == 4);
  CHECK(full.rank() == 2);
  CHECK(full.block_spec.blocks.size() == 1);
}

TEST_CASE("generated_algebra: conjugated block structure is recovered") {
  const int dim = 4;
  const TraceFunctional tau = TraceFunctional::uniform(dim);
  AlgebraBlockSpec spec;
  spec.ambient_dim = dim;
  spec.blocks = {BlockInfo{2, 1, 0.5}, BlockInfo{1, 2, 0.5}};
  const StarSubalgebra a = build_block_algebra(spec, tau);
  Rng rng(17);
  const Matrix u = random_unitary(dim, rng);
  std::vector<Matrix> gens;
  for (const Matrix& b : a.basis) gens.push_back(u * b * u.adjoint());
  const StarSubalgebra rec = generated_algebra(gens, tau);
  CHECK(rec.dim() == 5);
  CHECK(rec.rank() == 3);
  REQUIRE(rec.block_spec.blocks.size() == 2);
  int n_big = std::max(rec.block_spec.blocks[0].block_dim,
                       rec.block_spec.blocks[1].block_dim);
  CHECK(n_big == 2);
  // Masa: 3 pairwise-orthogonal projections summing to 1.
  REQUIRE(rec.masa.size() == 3);
  Matrix sum = Matrix::Zero(dim, dim);
  for (const Matrix& p : rec.masa.projections) {
    CHECK(max_abs(p * p - p) <= 1e-9);
    CHECK(max_abs(p - p.adjoint()) <= 1e-9);
    sum += p;
  }
  CHECK(max_abs(sum - Matrix::Identity(dim, dim)) <= 1e-8);
}

TEST_CASE("join and commutation checks") {
  const TraceFunctional tau = TraceFunctional::uniform(4);
  const ChainSpace chain{2, 2};
  const StarSubalgebra left = site_interval_algebra(chain, 0, 1, tau);
  const StarSubalgebra right = site_interval_algebra(chain, 1, 1, tau);
  CHECK(algebras_commute(left, right));
  const StarSubalgebra join = join_algebra(left, right, tau);
  CHECK(join.dim() == 16);
  CHECK(join.rank() == 4);
  CHECK_FALSE(algebras_commute(left, left));
}

TEST_CASE("conditional expectation under a different weighting re-orthonormalizes") {
  // The algebra was orthonormalized under the uniform trace; querying with a
  // weighted faithful state must still satisfy the defining relations.
  const TraceFunctional uni = TraceFunctional::uniform(2);
  const StarSubalgebra d2 = diagonal_masa_algebra(2, uni);
  TraceFunctional weighted;
  weighted.weights = RVector(2);
  weighted.weights << 0.3, 0.7;
  Matrix y(2, 2);
  y << Complex(2.0, 0.0), Complex(1.0, 1.0), Complex(1.0, -1.0), Complex(-1.0, 0.0);
  const Matrix e = conditional_expectation(d2, y, weighted);
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = y(0, 0);
  want(1, 1) = y(1, 1);
  CHECK(max_abs(e - want) <= 1e-10);
  // Defining relation tau(E(x) y) = tau(x y) for y in the algebra.
  for (const Matrix& b : d2.basis) {
    CHECK(std::abs(weighted.apply(e * b) - weighted.apply(y * b)) <= 1e-10);
  }
}

TEST_CASE("rank_center_masa rejects a basis that is not closed") {
  const TraceFunctional tau = TraceFunctional::uniform(2);
  StarSubalgebra broken = diagonal_masa_algebra(2, tau);
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  broken.basis.push_back(x);  // span is not an algebra any more
  CHECK_THROWS_AS((void)rank_center_masa(broken, tau), schema_error);
}

TEST_CASE("span membership and subalgebra checks") {
  const TraceFunctional tau = TraceFunctional::uniform(4);
  const ChainSpace chain{2, 2};
  const StarSubalgebra left = site_interval_algebra(chain, 0, 1, tau);
  const StarSubalgebra full = full_matrix_algebra(4, tau);
  CHECK(is_subalgebra_of(left, full, tau));
  CHECK_FALSE(is_subalgebra_of(full, left, tau));
  Rng rng(23);
  CHECK(contains(full, random_hermitian(4, rng), tau));
}
