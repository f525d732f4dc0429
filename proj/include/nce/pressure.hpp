#pragma once

#include <cstdint>
#include <vector>

#include "nce/linalg.hpp"

namespace nce {

/// log Tr exp(-H), computed through the spectrum with a max-shift.
double pressure_fd(const HermitianOperator& h);

struct GibbsState {
  Matrix density;        // exp(-H)/Tr exp(-H)
  double log_partition;  // pressure_fd(H)
};

GibbsState gibbs_state(const HermitianOperator& h);

/// pressure_fd(h) - (S(rho) - Tr(rho h)) >= 0; equals the relative entropy
/// S(rho, Gibbs(h)) (algebraic identity, used as an internal cross-check).
double variational_gap(const HermitianOperator& rho, const HermitianOperator& h);

/// Peierls-Bogoliubov: log Tr e^H <= log Tr e^K when H <= K.
/// Rejects pairs violating the PSD-order precondition.
bool peierls_bogoliubov_check(const HermitianOperator& h, const HermitianOperator& k,
                              double tol = 1e-9);

/// Translation-covariant local interaction: `term` acts on `support`
/// consecutive sites of a d-dimensional chain.
struct LocalHamiltonian {
  int site_dim = 2;
  int support = 1;
  HermitianOperator term;

  double term_norm() const;  // operator norm, recorded for Lipschitz checks
  void validate() const;
};

struct PressureSequence {
  std::vector<int> horizons;   // k = 1..k_max
  std::vector<double> values;  // p_k = (1/(k+1)) log Tr exp(-H_k)
  double last = 0.0;
  double aitken = 0.0;  // Aitken delta-squared of the last three values
};

/// Finite-horizon pressure p_k with H_k = sum_{j=0..k} (term shifted to j),
/// open boundary, ambient = k + support sites, canonical (unnormalized) trace.
/// Guard: (k_max + support) log2(d) <= 14; non-diagonal multi-site terms are
/// additionally capped at dense dimension 4096.
PressureSequence shift_pressure_estimate(const LocalHamiltonian& lh, int k_max);

/// Independent transfer-matrix route for a classical (diagonal) two-site
/// term: p_k = (1/(k+1)) log(1^T T^{k+1} 1) with T(a,b) = exp(-E(a,b)).
struct TransferOracle {
  std::vector<double> values;  // same horizons as shift_pressure_estimate
  double log_lambda_max = 0.0;
};

TransferOracle ising_transfer_oracle(const LocalHamiltonian& lh, int k_max);

struct PressureCheck {
  std::string name;
  bool pass = false;
  double defect = 0.0;  // measured violation / deviation
  double bound = 0.0;   // allowed bound for the defect
};

struct PressureSuiteReport {
  int k = 0;
  std::vector<PressureCheck> checks;
  bool all_pass() const;
};

/// Fixed-horizon property suite: monotone decrease under H <= K, the exact
/// c-shift identity, the operator-norm Lipschitz bound, the telescoping
/// defect of H + alpha(K) - K (compared in a common window), and 5-point
/// midpoint convexity.
PressureSuiteReport pressure_property_suite(const LocalHamiltonian& lh, int k,
                                            std::uint64_t seed = 0);

}  // namespace nce
