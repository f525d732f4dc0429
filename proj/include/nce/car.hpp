#pragma once

#include <array>
#include <vector>

#include "nce/linalg.hpp"

namespace nce {

using CVector = Eigen::VectorXcd;

/// Concrete CAR algebra on m modes realized on 2^m dimensions via the
/// lowering-operator-with-sign-string construction. a(f) is linear in f and
/// the defining relations use the inner product (x,y) = sum x_a conj(y_a):
///   a(f) a(g)* + a(g)* a(f) = (f,g) 1,   a(f) a(g) + a(g) a(f) = 0.
struct CARSystem {
  int modes = 0;
  std::vector<Matrix> annihilators;

  long long dim() const { return 1LL << modes; }

  Matrix annihilator(const CVector& f) const;  // a(f) = sum f_i a_i
  Matrix creator(const CVector& f) const { return annihilator(f).adjoint(); }
};

/// Builds the CAR system; relations are verified at construction (all basis
/// pairs up to 6 modes, sampled pairs plus random combinations beyond).
/// Guard: modes <= 12.
CARSystem build_car(int modes);

/// The recursive matrix-unit systems: V_n = prod(1 - 2 a_i* a_i) and
///   e11 = a_n a_n*, e12 = a_n V_{n-1}, e21 = V_{n-1} a_n*, e22 = a_n* a_n.
/// Index i,j in {1,2} maps to units[n-1][(i-1)*2 + (j-1)].
struct MatrixUnitSystem {
  int modes = 0;
  std::vector<std::array<Matrix, 4>> units;  // per mode n = 1..modes
  std::vector<Matrix> v;                     // V_0..V_modes

  const Matrix& e(int n, int i, int j) const { return units[n - 1][(i - 1) * 2 + (j - 1)]; }
};

MatrixUnitSystem matrix_units(const CARSystem& sys);

/// Wick-ordered monomial a*(f_n)...a*(f_1) a(g_1)...a(g_m).
struct WickMonomial {
  std::vector<CVector> creators;      // f_1,...,f_n
  std::vector<CVector> annihilators;  // g_1,...,g_m

  /// Parses a left-to-right (dagger, vector) operator list; rejects input
  /// that is not Wick ordered.
  static WickMonomial from_operator_list(
      const std::vector<std::pair<bool, CVector>>& ops);
};

/// Quasifree state value via the determinant formula
///   omega_A(a*(f_n)...a*(f_1) a(g_1)...a(g_m)) = delta_nm det((A g_i, f_j)).
/// Preconditions: 0 <= A <= 1 on mode space. Unbalanced monomials give 0.
Complex quasifree_eval(const CARSystem& sys, const HermitianOperator& a_op,
                       const WickMonomial& mono);

/// Dense operator of the monomial, for cross-checks against the explicit
/// density of the product state.
Matrix monomial_operator(const CARSystem& sys, const WickMonomial& mono);

/// Density of omega_A for diagonal A = diag(lambda): product of
/// diag(1-lambda_i, lambda_i) in the matrix-unit factorization.
Matrix quasifree_density(const CARSystem& sys, const RVector& lambdas);

/// Sampled spectral data of A(theta): theta grid ascending in [0, 2pi) with a
/// per-theta eigenvalue list (piecewise-constant in theta, wrapping at 2pi).
/// An empty list means multiplicity zero there.
struct SpectralSymbol {
  RVector theta;
  std::vector<RVector> eigenvalues;
  bool infinite_flag = false;  // echoed: symbol declared non-pure-point

  void validate() const;  // grid ascending, eigenvalues in [0,1] after clamp
  static SpectralSymbol constant(double lambda, int multiplicity, int samples = 8);
};

/// (1/2pi) integral of sum_l [eta(lambda_l) + eta(1 - lambda_l)] d theta,
/// composite Simpson per grid segment (exact for the piecewise-constant
/// interpolant). panels is the total subdivision count and must be even.
double bogoliubov_entropy(const SpectralSymbol& symbol, int panels = 1024);

}  // namespace nce
