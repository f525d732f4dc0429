#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nce/linalg.hpp"

namespace nce {

/// One direct summand M_n tensor 1_m with central trace t = tau(central projection).
struct BlockInfo {
  int block_dim = 0;     // n
  int multiplicity = 0;  // m
  double central_trace = 0.0;
};

struct AlgebraBlockSpec {
  std::vector<BlockInfo> blocks;
  int ambient_dim = 0;

  int algebra_dim() const;  // sum n^2
  int rank() const;         // sum n
  void validate() const;
};

/// Maximal abelian subalgebra, stored as its minimal projections.
struct Masa {
  std::vector<Matrix> projections;

  int size() const { return static_cast<int>(projections.size()); }
};

/// Unital *-subalgebra of the ambient matrix algebra, stored as a
/// tau-orthonormal basis plus derived block structure.
struct StarSubalgebra {
  int ambient_dim = 0;
  std::vector<Matrix> basis;  // tau-orthonormal
  Matrix unit;
  RVector tau_weights;  // weights the basis was orthonormalized under
  AlgebraBlockSpec block_spec;
  std::vector<Matrix> central_projections;
  Masa masa;

  int dim() const { return static_cast<int>(basis.size()); }
  int rank() const { return block_spec.rank(); }
};

// Structural tolerances, centralized: closure 1e-8, orthogonality 1e-9,
// spectral gap 1e-6.
inline constexpr double kClosureTol = 1e-8;
inline constexpr double kOrthoTol = 1e-9;
inline constexpr double kSpectralGapTol = 1e-6;

/// The TraceFunctional matching a block spec: weight t_j/(n_j m_j) on each
/// diagonal slot of block j. Uniform exactly when t_j = n_j m_j / ambient.
TraceFunctional paired_trace(const AlgebraBlockSpec& spec);

/// Canonical block-diagonal embedding: each M_{n_j} repeated m_j times along
/// the diagonal, in the order given.
StarSubalgebra build_block_algebra(const AlgebraBlockSpec& spec,
                                   const TraceFunctional& tau);

/// Full matrix algebra M_dim as a subalgebra of itself.
StarSubalgebra full_matrix_algebra(int dim, const TraceFunctional& tau);

/// Diagonal masa of M_dim as an abelian subalgebra.
StarSubalgebra diagonal_masa_algebra(int dim, const TraceFunctional& tau);

/// C*1 inside M_dim.
StarSubalgebra scalar_algebra(int dim, const TraceFunctional& tau);

/// U A U* with the structure carried along.
StarSubalgebra conjugated_algebra(const StarSubalgebra& a, const Matrix& u,
                                  const TraceFunctional& tau);

/// Unital *-algebra generated by the given matrices: closure under products
/// with tau-orthonormal basis maintenance. Rejects (guard) when the basis
/// would exceed dim_cap. Block structure is derived afterwards.
StarSubalgebra generated_algebra(const std::vector<Matrix>& generators,
                                 const TraceFunctional& tau, int dim_cap = 512);

/// Algebra generated by the union of two bases.
StarSubalgebra join_algebra(const StarSubalgebra& a, const StarSubalgebra& b,
                            const TraceFunctional& tau, int dim_cap = 512);

/// Derives center, minimal central projections, block dims, multiplicities
/// and a masa from a multiplicatively closed orthonormal basis. Generic
/// elements are drawn from the given seed; retried (new seed) when spectral
/// gaps fall below kSpectralGapTol.
void derive_structure(StarSubalgebra& alg, const TraceFunctional& tau,
                      std::uint64_t seed = 0);

/// Trace-preserving conditional expectation onto the algebra:
/// tau(E(x) y) = tau(x y) for all y in the algebra.
Matrix conditional_expectation(const StarSubalgebra& n, const Matrix& x,
                               const TraceFunctional& tau);

struct RankCenterMasa {
  int rank = 0;
  StarSubalgebra center;
  Masa masa;
};

RankCenterMasa rank_center_masa(const StarSubalgebra& n, const TraceFunctional& tau);

/// H(N) = sum over blocks of n_j eta(t_j / n_j); equals the sum of eta(tau(e))
/// over the minimal projections of any masa. Rejects non-tracial tau.
double algebra_entropy(const StarSubalgebra& n, const TraceFunctional& tau);

/// Membership: residual of x after projection onto span(basis).
double span_residual(const StarSubalgebra& n, const Matrix& x,
                     const TraceFunctional& tau);
bool contains(const StarSubalgebra& n, const Matrix& x, const TraceFunctional& tau,
              double tol = kClosureTol);
bool is_subalgebra_of(const StarSubalgebra& p, const StarSubalgebra& n,
                      const TraceFunctional& tau, double tol = kClosureTol);

/// Pairwise commutation of two algebras, checked on basis pairs.
bool algebras_commute(const StarSubalgebra& a, const StarSubalgebra& b,
                      double tol = kOrthoTol);

}  // namespace nce
