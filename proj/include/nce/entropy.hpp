#pragma once

#include <limits>
#include <vector>

#include "nce/algebra.hpp"
#include "nce/linalg.hpp"

namespace nce {

/// eta(t) = -t log t with eta(0) = 0. Rejects t < 0.
double eta_scalar(double t);

/// tau(eta(x)) through the spectral calculus.
double tau_eta(const HermitianOperator& x, const TraceFunctional& tau);

/// S(rho) = sum eta(lambda_i) over the (unnormalized-trace) spectrum.
/// Preconditions: PSD within clamp, trace 1 within 1e-8.
double von_neumann_entropy(const HermitianOperator& rho);

/// S(x,y) = tau(x(log x - log y)) computed on the support of y. Returns
/// +infinity when supp(x) leaks outside supp(y) (detected via
/// tau(x (1 - supp y)) > 1e-9).
double relative_entropy(const HermitianOperator& x, const HermitianOperator& y,
                        const TraceFunctional& tau);

inline constexpr double kInfiniteEntropy = std::numeric_limits<double>::infinity();

/// Multi-indexed family of positive operators summing to the identity.
/// Elements are stored flat with the last slot fastest.
struct PartitionOfUnity {
  int arity = 0;
  std::vector<int> index_ranges;
  std::vector<Matrix> elements;

  int flat_size() const;
  int flat_index(const std::vector<int>& multi) const;
  std::vector<int> multi_index(int flat) const;

  static PartitionOfUnity trivial(int dim);

  /// PSD within psd_tol, sum to identity within sum_tol.
  void validate(double psd_tol = 1e-9, double sum_tol = 1e-8) const;
};

/// x^j_{i_j} = sum over the other slots; the returned list sums to 1.
std::vector<Matrix> marginal_family(const PartitionOfUnity& p, int slot);

/// The multivariate subalgebra entropy functional
///   sum_I eta tau(x_I) - sum_j sum_{i_j} tau eta(E_{N_j} x^j_{i_j})
/// evaluated exactly at the given partition.
double cs_objective(const PartitionOfUnity& p,
                    const std::vector<StarSubalgebra>& algebras,
                    const TraceFunctional& tau);

/// Decomposition of a state into positive functionals, stored as densities
/// with respect to tau: sum of densities = state density.
struct StateDecomposition {
  int arity = 0;
  std::vector<int> index_ranges;
  std::vector<Matrix> densities;

  int flat_size() const;
  void validate(const Matrix& state_density, double sum_tol = 1e-8) const;
};

/// The functional-decomposition entropy objective
///   sum_I eta(phi_I(1)) + sum_j sum_{i_j} S(phi^j_{i_j}|_{N_j}, phi|_{N_j}),
/// restrictions realized by conditional expectation onto each N_j.
double cnt_objective(const StateDecomposition& dec, const Matrix& state_density,
                     const std::vector<StarSubalgebra>& algebras,
                     const TraceFunctional& tau);

/// H of the algebra generated by pairwise commuting algebras.
/// Rejects non-commuting inputs.
double commuting_join_entropy(const std::vector<StarSubalgebra>& algebras,
                              const TraceFunctional& tau, int dim_cap = 512);

}  // namespace nce
