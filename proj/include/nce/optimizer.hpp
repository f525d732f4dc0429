#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nce/entropy.hpp"

namespace nce {

struct OptimizerBudget {
  int restarts = 32;
  int iterations = 500;
  std::vector<int> index_ranges;  // empty: r_j = rank(N_j)
  std::uint64_t seed_base = 0;
  bool grow_index_ranges = true;
  // Restart 0 starts from the masa-product witness; the rest are random.
  bool structured_start = true;

  static OptimizerBudget defaults() { return OptimizerBudget{}; }
};

/// A certified lower bound: value is the objective evaluated at the witness.
struct EntropyEstimate {
  double value = 0.0;
  double upper_bound = 0.0;
  PartitionOfUnity witness;
  std::optional<StateDecomposition> witness_decomposition;
  std::vector<int> index_ranges;
  int restarts_used = 0;
  bool converged = false;
};

/// Lower bound on H(N_1,...,N_k) via ascent over partitions of unity in the
/// parametrization x_I = S^{-1/2} c_I* c_I S^{-1/2}, S = sum c_I* c_I.
/// Deterministic for a given budget seed. Requires tracial (uniform) tau.
EntropyEstimate maximize_cs_entropy(const std::vector<StarSubalgebra>& algebras,
                                    const TraceFunctional& tau,
                                    const OptimizerBudget& budget =
                                        OptimizerBudget::defaults());

/// Lower bound on H(N|P); exact 0 short-circuit when N is contained in P.
EntropyEstimate relative_algebra_entropy(const StarSubalgebra& n,
                                         const StarSubalgebra& p,
                                         const TraceFunctional& tau,
                                         const OptimizerBudget& budget =
                                             OptimizerBudget::defaults());

/// Lower bound on the functional-decomposition entropy of the state with
/// density rho (unit trace) with respect to the algebras. Reduces to the
/// tracial optimizer when rho is maximally mixed.
EntropyEstimate cnt_entropy(const HermitianOperator& rho,
                            const std::vector<StarSubalgebra>& algebras,
                            const TraceFunctional& tau,
                            const OptimizerBudget& budget =
                                OptimizerBudget::defaults());

/// S(phi|_N) with respect to the canonical trace of N, for phi given by the
/// ambient density k (normalized so tau(k) = 1).
double state_restriction_entropy(const StarSubalgebra& n, const Matrix& k,
                                 const TraceFunctional& tau);

namespace detail {

/// Objective interface for the partition ascent engine. Gradients are the
/// Hermitian Frechet derivatives dF = sum_I tr(G_I dx_I).
class PartitionObjective {
 public:
  virtual ~PartitionObjective() = default;
  virtual double value(const std::vector<Matrix>& x) const = 0;
  virtual std::vector<Matrix> gradient(const std::vector<Matrix>& x) const = 0;
};

struct EngineResult {
  double value = 0.0;
  std::vector<Matrix> witness;
  bool converged = false;
};

/// One ascent run from the given free matrices c_I.
EngineResult ascend(const PartitionObjective& obj, std::vector<Matrix> c,
                    int iterations);

/// Feasible partition from free matrices.
std::vector<Matrix> partition_from_free(const std::vector<Matrix>& c);

}  // namespace detail

}  // namespace nce
