#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "nce/errors.hpp"
#include "nce/rng.hpp"

namespace nce {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Largest entrywise modulus; the norm used in structural tolerances.
double max_abs(const Matrix& m);

/// Operator norm (largest singular value) for Hermitian inputs: max |eigenvalue|.
double hermitian_op_norm(const Matrix& m);

/// (m + m*)/2
Matrix hermitian_part(const Matrix& m);

/// Dense self-adjoint operator. Stored form is symmetrized (m + m*)/2; inputs
/// whose Hermitian defect exceeds rel_tol * max(1, ||m||_max) are rejected.
struct HermitianOperator {
  Matrix mat;

  int dim() const { return static_cast<int>(mat.rows()); }

  static HermitianOperator make(const Matrix& m, double rel_tol = 1e-10);

  /// Wraps without a defect check (for matrices Hermitian by construction).
  static HermitianOperator trusted(Matrix m) { return HermitianOperator{std::move(m)}; }
};

struct SpectralDecomposition {
  RVector eigenvalues;  // ascending
  Matrix vectors;       // orthonormal columns, column i pairs with eigenvalue i

  Matrix reconstruct() const;

  /// V f(diag) V* for a scalar map applied to the eigenvalues.
  Matrix map_eigenvalues(const std::function<double(double)>& f) const;
};

/// Spectral decomposition of a Hermitian operator.
/// Postconditions (checked): ||V diag V* - M||_max <= 1e-9 max(1, ||M||_max),
/// ||V*V - I||_max <= 1e-10.
SpectralDecomposition eigh(const HermitianOperator& h);

/// Diagonal density of a trace-like positive functional in the ambient basis:
/// tau(x) = sum_a weights[a] * x(a,a).
struct TraceFunctional {
  RVector weights;
  bool is_normalized = true;

  int dim() const { return static_cast<int>(weights.size()); }

  static TraceFunctional uniform(int dim);

  Complex apply(const Matrix& x) const;
  double apply_real(const Matrix& x) const { return apply(x).real(); }

  /// tau(a* b), the tau-weighted Hilbert-Schmidt pairing.
  Complex inner(const Matrix& a, const Matrix& b) const;

  /// tau(ab) == tau(ba) on all pairs from the list, within tol.
  bool tracial_on(const std::vector<Matrix>& ops, double tol = 1e-9) const;
};

enum class ScalarFn { Eta, Log, Exp, Sqrt };

/// Applies a named scalar function through the spectral calculus. Domain
/// handling: eigenvalues in [-1e-12, 0) are clamped to 0; anything below
/// -1e-12 is rejected for the domain-restricted functions (eta, log, sqrt).
/// log of an exact-0 eigenvalue is only permitted with on_support = true,
/// in which case the null space is left untouched (log restricted to the
/// support, zero elsewhere).
HermitianOperator matrix_function(const HermitianOperator& h, ScalarFn f,
                                  bool on_support = false);

/// sqrt(tau(x* x)); zero iff x vanishes on the support of tau.
double tau_two_norm(const Matrix& x, const TraceFunctional& tau);

/// Modified Gram-Schmidt in the tau-weighted inner product <a,b> = tau(a* b).
/// Vectors whose residual norm falls below drop_tol are dropped, so degenerate
/// input yields a shorter basis.
std::vector<Matrix> orthonormalize(const std::vector<Matrix>& vectors,
                                   const TraceFunctional& tau,
                                   double drop_tol = 1e-9);

/// Spectral projection onto eigenvalues > tol.
Matrix support_projection(const HermitianOperator& h, double tol = 1e-10);

/// Random GUE-type Hermitian matrix, entries O(1).
Matrix random_hermitian(int dim, Rng& rng);

/// Random PSD matrix g* g with Gaussian g (full rank a.s.).
Matrix random_psd(int dim, Rng& rng);

/// Random density operator: random PSD scaled to unit (unnormalized) trace.
Matrix random_density(int dim, Rng& rng);

/// Random unitary (QR of a Ginibre matrix with phase fix).
Matrix random_unitary(int dim, Rng& rng);

}  // namespace nce
