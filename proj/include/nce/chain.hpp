#pragma once

#include <vector>

#include "nce/algebra.hpp"
#include "nce/linalg.hpp"

namespace nce {

/// Finite materialized window of a tensor chain: `sites` copies of M_d.
/// Chain indices are mixed-radix with site 0 slowest (leftmost).
struct ChainSpace {
  int site_dim = 2;
  int sites = 1;

  long long dim() const;
  long long stride(int site) const;  // d^(sites-1-site)

  void require_dense(long long cap = 4096) const;
  void require_diag(long long cap = (1 << 24)) const;
};

Matrix kron(const Matrix& a, const Matrix& b);

/// op acts on the contiguous sites [first, first+w); returns the dense
/// embedding 1 (x) op (x) 1 on the whole window.
Matrix embed_interval_operator(const ChainSpace& chain, const Matrix& op, int first);

/// Full matrix algebra over the contiguous sites [first, first+width) as a
/// subalgebra of the window algebra, with its diagonal masa.
StarSubalgebra site_interval_algebra(const ChainSpace& chain, int first, int width,
                                     const TraceFunctional& tau);

/// Partial trace keeping the listed sites (ascending); result is indexed by
/// the kept sites in chain order.
Matrix partial_trace(const ChainSpace& chain, const Matrix& x,
                     const std::vector<int>& keep);

/// Conditional expectation onto the full algebra over the contiguous sites
/// [first, first+w) with respect to the uniform trace: normalized partial
/// trace re-embedded.
Matrix interval_expectation(const ChainSpace& chain, const Matrix& x, int first,
                            int width);

// --- diagonal fast path -----------------------------------------------------

/// Diagonal of the product density with the given per-site diagonal.
RVector product_diag(const ChainSpace& chain, const RVector& site_diag);

/// Diagonal embedding of a diagonal operator over [first, first+w).
RVector embed_interval_diag(const ChainSpace& chain, const RVector& diag, int first);

/// E onto the full algebra over the kept sites, applied to a diagonal
/// operator: average over the complement coordinates and broadcast back.
RVector partial_average_diag(const ChainSpace& chain, const RVector& v,
                             const std::vector<int>& keep);

/// Indicator diagonal of the cylinder set fixing the given digit pattern on
/// the listed sites.
RVector cylinder_indicator(const ChainSpace& chain, const std::vector<int>& sites,
                           const std::vector<int>& pattern);

/// mean of eta over the entries: tau(eta(diag v)) for the uniform trace.
double mean_eta(const RVector& v);

/// Classical relative entropy of diagonal densities w.r.t. the uniform trace:
/// (1/D) sum a_i (log a_i - log b_i) on the support, +inf on support leak.
double diag_relative_entropy(const RVector& a, const RVector& b);

}  // namespace nce
