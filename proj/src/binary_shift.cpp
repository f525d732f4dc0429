#include "nce/binary_shift.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "nce/chain.hpp"

namespace nce {

int Bitstream::bit(int distance) const {
  if (distance < 1) throw schema_error("Bitstream: distance must be >= 1");
  if (distance > window()) return 0;
  return bits[distance - 1];
}

bool Bitstream::all_zero() const {
  for (int b : bits)
    if (b) return false;
  return true;
}

std::optional<int> Bitstream::smallest_consistent_period() const {
  const int m = window();
  for (int p = 1; 2 * p <= m; ++p) {
    bool ok = true;
    for (int k = 1; k <= m && ok; ++k) {
      int shifted;  // membership of k - p in -X u {0} u X
      if (k == p) {
        shifted = 1;
      } else if (k > p) {
        shifted = bit(k - p);
      } else {
        shifted = bit(p - k);
      }
      if (bit(k) != shifted) ok = false;
    }
    if (ok) return p;
  }
  return std::nullopt;
}

Bitstream Bitstream::parse(const std::string& s) {
  Bitstream b;
  for (char ch : s) {
    if (ch == '0') {
      b.bits.push_back(0);
    } else if (ch == '1') {
      b.bits.push_back(1);
    } else {
      throw schema_error("Bitstream: characters must be 0 or 1");
    }
  }
  if (b.bits.empty()) throw schema_error("Bitstream: empty");
  return b;
}

ToeplitzForm ToeplitzForm::build(const Bitstream& b, int n) {
  if (n < 1 || n > 64) throw guard_error("ToeplitzForm: n outside [1,64]");
  ToeplitzForm t;
  t.n = n;
  t.rows.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (b.bit(std::abs(i - j))) t.rows[i] |= (1ULL << j);
    }
  }
  return t;
}

int gf2_nullity(const ToeplitzForm& t) {
  std::vector<std::uint64_t> rows = t.rows;
  int rank = 0;
  for (int col = 0; col < t.n; ++col) {
    const std::uint64_t mask = 1ULL << col;
    int pivot = -1;
    for (int r = rank; r < t.n; ++r) {
      if (rows[r] & mask) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = 0; r < t.n; ++r) {
      if (r != rank && (rows[r] & mask)) rows[r] ^= rows[rank];
    }
    ++rank;
  }
  return t.n - rank;
}

StructureSequence structure_sequence(const Bitstream& b, int max_n) {
  if (max_n < 1) throw schema_error("structure_sequence: max_n must be >= 1");
  if (max_n > b.window() + 1) {
    std::ostringstream os;
    os << "structure_sequence: n = " << max_n << " exceeds the trustworthy window "
       << b.window() + 1 << " (bits beyond the window would change T)";
    throw guard_error(os.str());
  }
  StructureSequence seq;
  double min_mean = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= max_n; ++n) {
    StructureRow row;
    row.n = n;
    row.c = gf2_nullity(ToeplitzForm::build(b, n));
    if ((n - row.c) % 2 != 0) {
      throw invariant_error("structure_sequence: alternating form with odd rank");
    }
    row.d = (n - row.c) / 2;
    row.h = (row.c + row.d) * std::log(2.0);
    row.mean = (double(row.c + row.d) / n) * std::log(2.0);
    min_mean = std::min(min_mean, row.mean);
    row.min_mean_so_far = min_mean;
    if (!seq.rows.empty() && std::abs(row.c - seq.rows.back().c) != 1) {
      throw invariant_error("structure_sequence: c-sequence step is not +-1");
    }
    seq.rows.push_back(row);
  }
  return seq;
}

std::vector<int> StructureSequence::c_sequence() const {
  std::vector<int> c;
  c.reserve(rows.size());
  for (const auto& r : rows) c.push_back(r.c);
  return c;
}

ConcatenationParse concatenation_decomposition(const std::vector<int>& c_seq) {
  ConcatenationParse parse;
  std::size_t pos = 0;
  while (pos < c_seq.size()) {
    // Each tent string is 1,2,...,m-1,m,m-1,...,1,0.
    std::vector<int> tail;
    int expected = 1;
    std::size_t p = pos;
    // Ascend.
    while (p < c_seq.size() && c_seq[p] == expected) {
      tail.push_back(c_seq[p]);
      ++p;
      ++expected;
    }
    const int peak = expected - 1;
    if (peak < 1) {
      std::ostringstream os;
      os << "concatenation_decomposition: expected 1 at position " << pos;
      throw invariant_error(os.str());
    }
    // Descend through peak-1,...,1,0.
    int down = peak - 1;
    bool complete = false;
    while (p < c_seq.size()) {
      if (c_seq[p] != down) {
        std::ostringstream os;
        os << "concatenation_decomposition: expected " << down << " at position "
           << p << ", found " << c_seq[p];
        throw invariant_error(os.str());
      }
      tail.push_back(c_seq[p]);
      ++p;
      if (down == 0) {
        complete = true;
        break;
      }
      --down;
    }
    if (complete) {
      parse.m_values.push_back(peak);
      pos = p;
    } else {
      parse.residual_tail = tail;
      pos = c_seq.size();
    }
  }
  return parse;
}

namespace {

int dot_gf2(std::uint64_t a, std::uint64_t b) { return std::popcount(a & b) & 1; }

struct Gf2Solver {
  // Rows of the linear system f.v = rhs over 2q-bit vectors (z||x layout).
  int width;
  std::vector<std::uint64_t> rows;
  std::vector<int> rhs;

  // Row-reduces; returns false if inconsistent.
  bool solve(std::uint64_t& particular, std::vector<std::uint64_t>& kernel) const {
    std::vector<std::uint64_t> r = rows;
    std::vector<int> b = rhs;
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < width && rank < static_cast<int>(r.size()); ++col) {
      const std::uint64_t mask = 1ULL << col;
      int piv = -1;
      for (int i = rank; i < static_cast<int>(r.size()); ++i) {
        if (r[i] & mask) {
          piv = i;
          break;
        }
      }
      if (piv < 0) continue;
      std::swap(r[rank], r[piv]);
      std::swap(b[rank], b[piv]);
      for (int i = 0; i < static_cast<int>(r.size()); ++i) {
        if (i != rank && (r[i] & mask)) {
          r[i] ^= r[rank];
          b[i] ^= b[rank];
        }
      }
      pivot_col.push_back(col);
      ++rank;
    }
    for (int i = rank; i < static_cast<int>(r.size()); ++i) {
      if (b[i]) return false;
    }
    particular = 0;
    for (int i = 0; i < rank; ++i) {
      if (b[i]) particular |= 1ULL << pivot_col[i];
    }
    kernel.clear();
    std::vector<bool> is_pivot(width, false);
    for (int c : pivot_col) is_pivot[c] = true;
    for (int col = 0; col < width; ++col) {
      if (is_pivot[col]) continue;
      std::uint64_t v = 1ULL << col;
      for (int i = 0; i < rank; ++i) {
        if (r[i] & (1ULL << col)) v |= 1ULL << pivot_col[i];
      }
      kernel.push_back(v);
    }
    return true;
  }
};

// Incremental GF(2) span with membership tests.
struct Gf2Span {
  std::vector<std::uint64_t> reduced;

  bool contains(std::uint64_t v) const {
    for (std::uint64_t r : reduced) v = std::min(v, v ^ r);
    return v == 0;
  }

  void add(std::uint64_t v) {
    for (std::uint64_t r : reduced) v = std::min(v, v ^ r);
    if (v) {
      reduced.push_back(v);
      std::sort(reduced.rbegin(), reduced.rend());
    }
  }
};

// v is packed as (z << q) | x.
std::uint64_t pack(std::uint64_t x, std::uint64_t z, int q) { return (z << q) | x; }

int symplectic_packed(std::uint64_t a, std::uint64_t b, int q) {
  const std::uint64_t ax = a & ((1ULL << q) - 1), az = a >> q;
  const std::uint64_t bx = b & ((1ULL << q) - 1), bz = b >> q;
  return (dot_gf2(ax, bz) ^ dot_gf2(az, bx));
}

bool try_realize(const Bitstream& b, int n, int q,
                 std::vector<std::uint64_t>& out) {
  out.clear();
  Gf2Span span;
  std::vector<std::uint64_t> u;
  u.push_back(pack(1, 0, q));  // X on qubit 0
  span.add(u[0]);
  for (int i = 1; i < n; ++i) {
    Gf2Solver solver;
    solver.width = 2 * q;
    for (int j = 0; j < i; ++j) {
      // <u_j, v> as a linear functional of v = (z||x): swap halves of u_j.
      const std::uint64_t jx = u[j] & ((1ULL << q) - 1);
      const std::uint64_t jz = u[j] >> q;
      solver.rows.push_back(pack(jz, jx, q));
      solver.rhs.push_back(b.bit(i - j));
    }
    std::uint64_t particular;
    std::vector<std::uint64_t> kernel;
    if (!solver.solve(particular, kernel)) return false;
    std::uint64_t chosen = 0;
    bool found = false;
    if (particular != 0 && !span.contains(particular)) {
      chosen = particular;
      found = true;
    } else {
      for (std::uint64_t k : kernel) {
        const std::uint64_t cand = particular ^ k;
        if (cand != 0 && !span.contains(cand)) {
          chosen = cand;
          found = true;
          break;
        }
      }
    }
    if (!found) return false;  // all solutions inside the span: need more room
    u.push_back(chosen);
    span.add(chosen);
  }
  out = u;
  return true;
}

// Guaranteed construction at q = n: X_i with Z couplings to earlier qubits.
std::vector<std::uint64_t> explicit_realization(const Bitstream& b, int n) {
  std::vector<std::uint64_t> u;
  for (int i = 0; i < n; ++i) {
    std::uint64_t x = 1ULL << i;
    std::uint64_t z = 0;
    for (int j = 0; j < i; ++j) {
      if (b.bit(i - j)) z |= 1ULL << j;
    }
    u.push_back(pack(x, z, n));
  }
  return u;
}

}  // namespace

int SignStringRealization::symplectic(int i, int j) const {
  return dot_gf2(x_mask[i], z_mask[j]) ^ dot_gf2(z_mask[i], x_mask[j]);
}

Matrix SignStringRealization::dense_generator(int i) const {
  const Matrix x_gate = (Matrix(2, 2) << 0, 1, 1, 0).finished();
  const Matrix z_gate = (Matrix(2, 2) << 1, 0, 0, -1).finished();
  const Matrix id2 = Matrix::Identity(2, 2);
  Matrix op = Matrix::Identity(1, 1);
  for (int qb = 0; qb < qubits; ++qb) {
    const bool hx = (x_mask[i] >> qb) & 1;
    const bool hz = (z_mask[i] >> qb) & 1;
    Matrix g = id2;
    if (hx && hz) {
      g = x_gate * z_gate;
    } else if (hx) {
      g = x_gate;
    } else if (hz) {
      g = z_gate;
    }
    op = kron(op, g);
  }
  const Complex phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return phases[phase[i] % 4] * op;
}

SignStringRealization sign_string_realization(const Bitstream& b, int n,
                                              bool dense) {
  if (n < 1 || n > 20) throw guard_error("sign_string_realization: n outside [1,20]");
  if (dense && n > 10) {
    throw guard_error("sign_string_realization: dense mode guarded to n <= 10");
  }
  std::vector<std::uint64_t> u;
  int q = (n + 1) / 2;
  for (; q < n; ++q) {
    if (try_realize(b, n, q, u)) break;
  }
  if (u.empty()) {
    u = explicit_realization(b, n);
    q = n;
  }

  SignStringRealization r;
  r.n = n;
  r.qubits = q;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t x = u[i] & ((1ULL << q) - 1);
    const std::uint64_t z = u[i] >> q;
    r.x_mask.push_back(x);
    r.z_mask.push_back(z);
    r.phase.push_back(dot_gf2(x, z));  // factor i when X and Z overlap oddly
  }

  // Commutation pattern must match the bitstream exactly.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (r.symplectic(i, j) != b.bit(i - j)) {
        throw invariant_error("sign_string_realization: commutation mismatch");
      }
    }
  }
  // Exponent vectors must be independent or some product would be scalar.
  {
    Gf2Span span;
    for (int i = 0; i < n; ++i) {
      const std::uint64_t v = pack(r.x_mask[i], r.z_mask[i], q);
      if (span.contains(v)) {
        throw invariant_error("sign_string_realization: dependent exponent vectors");
      }
      span.add(v);
    }
  }

  if (dense) {
    const long long dim = 1LL << q;
    for (int i = 0; i < n; ++i) r.dense.push_back(r.dense_generator(i));
    for (int i = 0; i < n; ++i) {
      const Matrix& s = r.dense[i];
      if (max_abs(s - s.adjoint()) > 1e-10) {
        throw invariant_error("sign_string_realization: generator not self-adjoint");
      }
      if (max_abs(genperm_multiply(s, s) - Matrix::Identity(dim, dim)) > 1e-10) {
        throw invariant_error("sign_string_realization: generator not a symmetry");
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        const double sign = b.bit(i - j) ? -1.0 : 1.0;
        const Matrix ij = genperm_multiply(r.dense[i], r.dense[j]);
        const Matrix ji = genperm_multiply(r.dense[j], r.dense[i]);
        if (max_abs(ij - sign * ji) > 1e-10) {
          throw invariant_error("sign_string_realization: dense relation failed");
        }
      }
    }
    // Canonical trace: every nonempty ordered product is traceless. Walked in
    // Gray-code order; reordering only changes the sign, not |trace|.
    Matrix p = Matrix::Identity(dim, dim);
    std::uint32_t current = 0;
    for (std::uint32_t g = 1; g < (1u << n); ++g) {
      const std::uint32_t gray = g ^ (g >> 1);
      const int flip = std::countr_zero(static_cast<std::uint32_t>(gray ^ current));
      p = genperm_multiply(p, r.dense[flip]);
      current = gray;
      if (std::abs(p.trace()) / double(dim) > 1e-10) {
        throw invariant_error("sign_string_realization: nonempty product has trace");
      }
    }
  }
  return r;
}

Matrix genperm_multiply(const Matrix& dense, const Matrix& g) {
  const Eigen::Index dim = g.rows();
  Matrix out(dense.rows(), dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    Eigen::Index row = -1;
    Complex val = 0.0;
    for (Eigen::Index rr = 0; rr < dim; ++rr) {
      if (std::abs(g(rr, c)) > 1e-14) {
        if (row >= 0) throw schema_error("genperm_multiply: not a generalized permutation");
        row = rr;
        val = g(rr, c);
      }
    }
    if (row < 0) throw schema_error("genperm_multiply: zero column");
    out.col(c) = dense.col(row) * val;
  }
  return out;
}

int center_dimension_oracle(const SignStringRealization& r) {
  if (r.n > 20) throw guard_error("center_dimension_oracle: n > 20");
  // mask_i over subsets J: bit j set iff s_j anticommutes with s_i.
  std::vector<std::uint32_t> anti(r.n, 0);
  for (int i = 0; i < r.n; ++i) {
    for (int j = 0; j < r.n; ++j) {
      if (r.symplectic(j, i)) anti[i] |= 1u << j;
    }
  }
  long long count = 0;
  for (std::uint32_t sub = 0; sub < (1u << r.n); ++sub) {
    bool central = true;
    for (int i = 0; i < r.n && central; ++i) {
      if (std::popcount(sub & anti[i]) & 1) central = false;
    }
    if (central) ++count;
  }
  const int c = static_cast<int>(std::lround(std::log2(double(count))));
  if ((1LL << c) != count) {
    throw invariant_error("center_dimension_oracle: count is not a power of 2");
  }
  return c;
}

}  // namespace nce
