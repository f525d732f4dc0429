#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nce/linalg.hpp"

namespace nce {

/// Finite window x_1..x_m of a bitstream X, indices beyond the window treated
/// as 0. Nonperiodicity of -X u {0} u X cannot be certified from a window;
/// the smallest window-consistent period is reported instead.
struct Bitstream {
  std::vector<int> bits;  // bits[i] = x_{i+1}

  int window() const { return static_cast<int>(bits.size()); }
  int bit(int distance) const;  // x_distance, 0 beyond the window
  bool all_zero() const;

  /// Smallest p <= window/2 consistent with periodicity of -X u {0} u X.
  std::optional<int> smallest_consistent_period() const;

  static Bitstream parse(const std::string& s);
};

/// GF(2) alternating Toeplitz form T_{ij} = x_{|i-j|}, zero diagonal, as
/// 64-bit row masks (n <= 64).
struct ToeplitzForm {
  int n = 0;
  std::vector<std::uint64_t> rows;

  static ToeplitzForm build(const Bitstream& b, int n);
};

/// Nullity over GF(2) by Gaussian elimination on row bitsets.
int gf2_nullity(const ToeplitzForm& t);

struct StructureRow {
  int n = 0;
  int c = 0;       // GF(2) nullity of T_n = log2 dim of the center
  int d = 0;       // (n - c)/2
  double h = 0.0;  // (c + d) log 2
  double mean = 0.0;
  double min_mean_so_far = 0.0;  // liminf tracker
};

struct StructureSequence {
  std::vector<StructureRow> rows;
  std::vector<int> c_sequence() const;
};

/// c_n, d_n, H(A_n) and the mean-entropy sequence for n = 1..max_n.
/// Precondition: max_n <= window + 1 (bits beyond the window would change T).
StructureSequence structure_sequence(const Bitstream& b, int max_n);

struct ConcatenationParse {
  std::vector<int> m_values;      // completed tent strings (1..m..1,0)
  std::vector<int> residual_tail; // trailing partial string
};

/// Greedy parse of a c-sequence into maximal tent-shaped strings
/// (1,...,m-1,m,m-1,...,1,0). Failure throws: the parse is a structural
/// theorem, so a mismatch signals a violated precondition or a bug.
ConcatenationParse concatenation_decomposition(const std::vector<int>& c_seq);

/// Symmetries s_0..s_{n-1} realized as Pauli strings on `qubits` qubits:
/// generator i is i^{phase_i} X^{x_mask} Z^{z_mask}. Exponent vectors are
/// GF(2)-independent so every nonempty product is a non-identity Pauli word
/// (the canonical trace vanishes on it).
struct SignStringRealization {
  int n = 0;
  int qubits = 0;
  std::vector<std::uint64_t> x_mask;
  std::vector<std::uint64_t> z_mask;
  std::vector<int> phase;  // power of i making the generator self-adjoint
  std::vector<Matrix> dense;  // populated in dense mode

  /// Symplectic product <u_i, u_j> over GF(2): 1 = anticommute.
  int symplectic(int i, int j) const;

  Matrix dense_generator(int i) const;
};

/// Finds a realization with commutation pattern x_{|i-j|}. The GF(2) systems
/// are solved greedily with q = ceil(n/2) qubits, growing q on infeasibility
/// (the explicit X_i-with-Z-couplings construction at q = n always works).
/// Dense mode materializes 2^q matrices and verifies the +/- relations and
/// the trace property numerically; guarded to n <= 10.
SignStringRealization sign_string_realization(const Bitstream& b, int n,
                                              bool dense = false);

/// log2 of the number of products s_J (J subset of {0..n-1}) commuting with
/// every generator, by GF(2) enumeration of all 2^n exponent vectors.
/// Must equal c_n from structure_sequence. Guard: n <= 20.
int center_dimension_oracle(const SignStringRealization& r);

/// dense * g for a generalized permutation matrix g (exactly one nonzero per
/// column, as every Pauli word is). Exact dense arithmetic in O(D^2).
Matrix genperm_multiply(const Matrix& dense, const Matrix& g);

}  // namespace nce
