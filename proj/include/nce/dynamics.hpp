#pragma once

#include <string>
#include <vector>

#include "nce/chain.hpp"
#include "nce/optimizer.hpp"

namespace nce {

enum class ShiftKind { TraceShift, Bernoulli };
enum class HorizonMethod { Auto, Diagonal, CentralizerMasa, Optimizer };

/// Finite materialized window of a shift system on a tensor chain. The chain
/// state is the tensor power of the site state; non-diagonal site densities
/// are rotated into their eigenbasis at construction (everything downstream
/// is covariant under that rotation).
struct ShiftSystem {
  int site_dim = 2;
  RVector site_density;  // diagonal site density, entries sum to 1
  int window_sites = 7;
  int origin = 0;  // chain coordinate of the shift's site 0
  ShiftKind kind = ShiftKind::TraceShift;

  ChainSpace chain() const { return ChainSpace{site_dim, window_sites}; }

  static ShiftSystem make(int site_dim, const HermitianOperator& site_state,
                          int window_sites, ShiftKind kind);
  static ShiftSystem trace_shift(int site_dim, int window_sites);
};

/// Full site algebra over the contiguous sites [first, first+width).
struct BlockRef {
  int first = 0;
  int width = 1;
};

struct HorizonReport {
  int k = 0;
  BlockRef block;
  int step = 1;
  std::vector<double> per_step;        // (1/kk) H-estimate, kk = 1..k
  std::vector<double> upper_per_step;  // matching upper bounds
  std::vector<double> per_site;        // total / (number of joined sites)
  std::vector<int> join_sites;         // |U(kk)|
  double lower = 0.0;                  // per-step value at horizon k
  double upper_bound = 0.0;            // per-step upper bound at horizon k
  std::string lower_witness;           // construction tag
};

/// Finite-horizon dynamical entropy report. Lower bounds come from
/// (a) the diagonal product partition for trace shifts,
/// (b) centralizer-masa state decompositions for Bernoulli shifts,
/// (c) the generic optimizer (small windows only).
/// Upper bounds come from the entropy of the joined site algebra.
/// step is the shift power per slot (0 reproduces identity dynamics).
HorizonReport horizon_entropy(const ShiftSystem& sys, BlockRef block, int k,
                              int step = 1,
                              HorizonMethod method = HorizonMethod::Auto,
                              const OptimizerBudget* budget = nullptr);

/// Kolmogoroff-Sinai style truncation report over an ascending block family.
/// Postcondition (checked): reports are monotone nondecreasing within 2e-3.
std::vector<HorizonReport> ks_truncation_report(const ShiftSystem& sys,
                                                const std::vector<BlockRef>& blocks,
                                                int k);

struct SubsetCheckResult {
  bool inside = false;
  std::vector<double> distances;  // ||x - E_A(x)||_2 per element
};

/// omega subset^delta A test: uses E_A(x) as the approximating witness
/// (operator-norm contractive, so the norm constraint is preserved).
SubsetCheckResult subset_delta_check(const std::vector<Matrix>& omega,
                                     const StarSubalgebra& a, double delta,
                                     const TraceFunctional& tau);

struct DeltaRankQuery {
  std::vector<Matrix> omega;  // each of operator norm <= 1
  double delta = 0.1;
  std::vector<StarSubalgebra> candidates;
};

struct DeltaRankResult {
  long long rank = 0;
  double log_rank = 0.0;
  // -2: scalars, -1: full ambient, otherwise index into the candidate list.
  int achieved_by = -1;
  std::vector<double> scalar_distances;
};

/// Minimal rank among candidates (C*1 and the full ambient always included)
/// that delta-contain omega: an upper bound on the delta-rank.
DeltaRankResult delta_rank_upper(const DeltaRankQuery& q, const TraceFunctional& tau);

struct ApproxEntropyReport {
  double delta = 0.1;
  int k_max = 0;
  std::vector<double> log_rank;         // log r_kk, kk = 1..k_max
  std::vector<double> per_step;         // (1/kk) log r_kk
  std::vector<int> achieved_width;      // witness interval width (0 = scalars)
};

/// Upper-bound sequence for the approximation entropy of the shift at the
/// matrix-unit set of the block: per-k (1/k) log of the delta-rank upper
/// bound over interval-join candidates. direction -1 runs the inverse shift
/// (reports agree with +1 by index reflection); step 0 freezes the orbit
/// (identity dynamics).
ApproxEntropyReport approx_entropy_report(const ShiftSystem& sys, BlockRef block,
                                          double delta, int k_max,
                                          int direction = 1, int step = 1);

}  // namespace nce
