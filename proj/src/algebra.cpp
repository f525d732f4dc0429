#include "nce/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nce {

int AlgebraBlockSpec::algebra_dim() const {
  int d = 0;
  for (const auto& b : blocks) d += b.block_dim * b.block_dim;
  return d;
}

int AlgebraBlockSpec::rank() const {
  int r = 0;
  for (const auto& b : blocks) r += b.block_dim;
  return r;
}

void AlgebraBlockSpec::validate() const {
  if (blocks.empty()) throw schema_error("AlgebraBlockSpec: no blocks");
  int total = 0;
  double tsum = 0.0;
  for (const auto& b : blocks) {
    if (b.block_dim < 1 || b.multiplicity < 1) {
      throw schema_error("AlgebraBlockSpec: block dims must be positive");
    }
    if (b.central_trace <= 0.0 || b.central_trace > 1.0) {
      throw schema_error("AlgebraBlockSpec: central trace outside (0,1]");
    }
    total += b.block_dim * b.multiplicity;
    tsum += b.central_trace;
  }
  if (total != ambient_dim) {
    std::ostringstream os;
    os << "AlgebraBlockSpec: sum n_j m_j = " << total << " != ambient "
       << ambient_dim;
    throw schema_error(os.str());
  }
  if (std::abs(tsum - 1.0) > 1e-9) {
    throw schema_error("AlgebraBlockSpec: central traces do not sum to 1");
  }
}

TraceFunctional paired_trace(const AlgebraBlockSpec& spec) {
  spec.validate();
  TraceFunctional tau;
  tau.weights = RVector::Zero(spec.ambient_dim);
  int off = 0;
  for (const auto& b : spec.blocks) {
    const int span = b.block_dim * b.multiplicity;
    const double w = b.central_trace / span;
    for (int i = 0; i < span; ++i) tau.weights(off + i) = w;
    off += span;
  }
  tau.is_normalized = true;
  return tau;
}

namespace {

Matrix unit_matrix(int dim) { return Matrix::Identity(dim, dim); }

// e_{rc} summed over the m_j copies of block j, embedded at offset.
Matrix replicated_unit(int ambient, int off, int n, int m, int r, int c) {
  Matrix e = Matrix::Zero(ambient, ambient);
  for (int copy = 0; copy < m; ++copy) {
    e(off + copy * n + r, off + copy * n + c) = 1.0;
  }
  return e;
}

}  // namespace

StarSubalgebra build_block_algebra(const AlgebraBlockSpec& spec,
                                   const TraceFunctional& tau) {
  spec.validate();
  if (tau.dim() != spec.ambient_dim) {
    throw schema_error("build_block_algebra: tau dimension mismatch");
  }
  StarSubalgebra alg;
  alg.ambient_dim = spec.ambient_dim;
  alg.unit = unit_matrix(spec.ambient_dim);
  alg.tau_weights = tau.weights;
  alg.block_spec = spec;

  std::vector<Matrix> raw;
  int off = 0;
  for (const auto& b : spec.blocks) {
    Matrix z = Matrix::Zero(spec.ambient_dim, spec.ambient_dim);
    Masa block_masa;
    for (int r = 0; r < b.block_dim; ++r) {
      for (int c = 0; c < b.block_dim; ++c) {
        Matrix e = replicated_unit(spec.ambient_dim, off, b.block_dim,
                                   b.multiplicity, r, c);
        raw.push_back(e);
        if (r == c) {
          z += e;
          alg.masa.projections.push_back(e);
        }
      }
    }
    alg.central_projections.push_back(z);
    off += b.block_dim * b.multiplicity;
  }
  alg.basis = orthonormalize(raw, tau);
  if (static_cast<int>(alg.basis.size()) != spec.algebra_dim()) {
    throw invariant_error("build_block_algebra: basis dimension mismatch");
  }
  // Recompute central traces from the actual tau.
  for (std::size_t j = 0; j < spec.blocks.size(); ++j) {
    alg.block_spec.blocks[j].central_trace =
        tau.apply(alg.central_projections[j]).real();
  }
  return alg;
}

StarSubalgebra full_matrix_algebra(int dim, const TraceFunctional& tau) {
  AlgebraBlockSpec spec;
  spec.ambient_dim = dim;
  spec.blocks = {BlockInfo{dim, 1, 1.0}};
  return build_block_algebra(spec, tau);
}

StarSubalgebra diagonal_masa_algebra(int dim, const TraceFunctional& tau) {
  AlgebraBlockSpec spec;
  spec.ambient_dim = dim;
  spec.blocks.reserve(dim);
  for (int i = 0; i < dim; ++i) spec.blocks.push_back(BlockInfo{1, 1, tau.weights(i)});
  return build_block_algebra(spec, tau);
}

StarSubalgebra scalar_algebra(int dim, const TraceFunctional& tau) {
  StarSubalgebra alg;
  alg.ambient_dim = dim;
  alg.unit = unit_matrix(dim);
  alg.tau_weights = tau.weights;
  alg.basis = orthonormalize({alg.unit}, tau);
  alg.block_spec.ambient_dim = dim;
  alg.block_spec.blocks = {BlockInfo{1, dim, 1.0}};
  alg.central_projections = {alg.unit};
  alg.masa.projections = {alg.unit};
  return alg;
}

StarSubalgebra conjugated_algebra(const StarSubalgebra& a, const Matrix& u,
                                  const TraceFunctional& tau) {
  StarSubalgebra out = a;
  for (auto& b : out.basis) b = u * b * u.adjoint();
  for (auto& z : out.central_projections) z = u * z * u.adjoint();
  for (auto& p : out.masa.projections) p = u * p * u.adjoint();
  // Conjugation preserves orthonormality only for a unitarily invariant tau.
  out.basis = orthonormalize(out.basis, tau);
  out.tau_weights = tau.weights;
  for (std::size_t j = 0; j < out.central_projections.size(); ++j) {
    out.block_spec.blocks[j].central_trace =
        tau.apply(out.central_projections[j]).real();
  }
  return out;
}

namespace {

double project_residual(const std::vector<Matrix>& basis, const Matrix& x,
                        const TraceFunctional& tau) {
  Matrix r = x;
  for (const Matrix& b : basis) r -= tau.inner(b, r) * b;
  return tau_two_norm(r, tau);
}

}  // namespace

StarSubalgebra generated_algebra(const std::vector<Matrix>& generators,
                                 const TraceFunctional& tau, int dim_cap) {
  if (generators.empty()) throw schema_error("generated_algebra: no generators");
  const int dim = static_cast<int>(generators.front().rows());
  std::vector<Matrix> seed;
  seed.push_back(unit_matrix(dim));
  for (const Matrix& g : generators) {
    if (g.rows() != dim || g.cols() != dim) {
      throw schema_error("generated_algebra: generator dimension mismatch");
    }
    seed.push_back(g);
    seed.push_back(g.adjoint());
  }
  std::vector<Matrix> basis = orthonormalize(seed, tau);

  for (;;) {
    std::vector<Matrix> fresh;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = 0; j < basis.size(); ++j) {
        Matrix p = basis[i] * basis[j];
        const double scale = std::max(1.0, tau_two_norm(p, tau));
        if (project_residual(basis, p, tau) > kClosureTol * scale) {
          fresh.push_back(std::move(p));
        }
      }
    }
    if (fresh.empty()) break;
    std::vector<Matrix> merged = basis;
    merged.insert(merged.end(), fresh.begin(), fresh.end());
    basis = orthonormalize(merged, tau);
    if (static_cast<int>(basis.size()) > dim_cap) {
      std::ostringstream os;
      os << "generated_algebra: closure exceeded dimension cap " << dim_cap;
      throw guard_error(os.str());
    }
  }

  StarSubalgebra alg;
  alg.ambient_dim = dim;
  alg.unit = unit_matrix(dim);
  alg.tau_weights = tau.weights;
  alg.basis = std::move(basis);
  derive_structure(alg, tau);
  return alg;
}

StarSubalgebra join_algebra(const StarSubalgebra& a, const StarSubalgebra& b,
                            const TraceFunctional& tau, int dim_cap) {
  std::vector<Matrix> gens = a.basis;
  gens.insert(gens.end(), b.basis.begin(), b.basis.end());
  return generated_algebra(gens, tau, dim_cap);
}

namespace {

// Hermitian spanning set of a complex matrix subspace.
std::vector<Matrix> hermitian_spanning(const std::vector<Matrix>& span,
                                       const TraceFunctional& tau) {
  std::vector<Matrix> parts;
  parts.reserve(2 * span.size());
  const Complex im(0.0, 1.0);
  for (const Matrix& s : span) {
    parts.push_back(hermitian_part(s));
    parts.push_back(hermitian_part(im * s));
  }
  return orthonormalize(parts, tau);
}

// Clusters ascending eigenvalues with the given gap; returns index ranges.
std::vector<std::pair<int, int>> cluster_eigenvalues(const RVector& ev, double gap) {
  std::vector<std::pair<int, int>> ranges;
  int start = 0;
  for (int i = 1; i <= ev.size(); ++i) {
    if (i == ev.size() || ev(i) - ev(i - 1) > gap) {
      ranges.emplace_back(start, i);
      start = i;
    }
  }
  return ranges;
}

bool gaps_ambiguous(const RVector& ev, double gap) {
  for (int i = 1; i < ev.size(); ++i) {
    const double d = ev(i) - ev(i - 1);
    if (d > 0.05 * gap && d <= gap) return true;
  }
  return false;
}

Matrix cluster_projection(const SpectralDecomposition& d, int lo, int hi) {
  const int dim = static_cast<int>(d.vectors.rows());
  Matrix p = Matrix::Zero(dim, dim);
  for (int i = lo; i < hi; ++i) {
    p += d.vectors.col(i) * d.vectors.col(i).adjoint();
  }
  return p;
}

}  // namespace

void derive_structure(StarSubalgebra& alg, const TraceFunctional& tau,
                      std::uint64_t seed) {
  const int m = alg.dim();
  const int dim = alg.ambient_dim;
  if (project_residual(alg.basis, alg.unit, tau) > kClosureTol) {
    throw schema_error("derive_structure: algebra does not contain the unit");
  }

  // Center: null space of alpha -> ([sum alpha_i b_i, b_j])_j via the normal
  // matrix M_pq = sum_j <[b_p,b_j],[b_q,b_j]>.
  Matrix com_gram = Matrix::Zero(m, m);
  std::vector<std::vector<Matrix>> coms(m);
  for (int p = 0; p < m; ++p) {
    coms[p].reserve(m);
    for (int j = 0; j < m; ++j) {
      coms[p].push_back(alg.basis[p] * alg.basis[j] - alg.basis[j] * alg.basis[p]);
    }
  }
  for (int p = 0; p < m; ++p) {
    for (int q = p; q < m; ++q) {
      Complex acc = 0.0;
      for (int j = 0; j < m; ++j) acc += tau.inner(coms[p][j], coms[q][j]);
      com_gram(p, q) = acc;
      com_gram(q, p) = std::conj(acc);
    }
  }
  SpectralDecomposition gd = eigh(HermitianOperator::make(com_gram, 1e-8));
  const double gscale = std::max(1.0, gd.eigenvalues(m - 1));
  std::vector<Matrix> center_span;
  for (int i = 0; i < m; ++i) {
    if (gd.eigenvalues(i) <= 1e-12 * gscale) {
      Matrix x = Matrix::Zero(dim, dim);
      for (int p = 0; p < m; ++p) x += gd.vectors(p, i) * alg.basis[p];
      center_span.push_back(std::move(x));
    }
  }
  std::vector<Matrix> center_herm = hermitian_spanning(center_span, tau);
  const int center_dim = static_cast<int>(center_herm.size());
  if (center_dim < 1) throw invariant_error("derive_structure: empty center");

  // Generic central element; retried when eigenvalue gaps are ambiguous.
  std::vector<std::pair<int, int>> ranges;
  SpectralDecomposition cd;
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt >= 32) {
      throw invariant_error("derive_structure: no generic central element found");
    }
    Rng rng(seed + attempt);
    Matrix h = Matrix::Zero(dim, dim);
    for (const Matrix& c : center_herm) h += rng.uniform(-1.0, 1.0) * c;
    cd = eigh(HermitianOperator::make(h, 1e-8));
    if (gaps_ambiguous(cd.eigenvalues, kSpectralGapTol)) continue;
    ranges = cluster_eigenvalues(cd.eigenvalues, kSpectralGapTol);
    if (static_cast<int>(ranges.size()) == center_dim) break;
  }

  alg.central_projections.clear();
  alg.block_spec.blocks.clear();
  alg.block_spec.ambient_dim = dim;
  alg.masa.projections.clear();

  for (const auto& [lo, hi] : ranges) {
    Matrix z = cluster_projection(cd, lo, hi);
    if (project_residual(alg.basis, z, tau) > kClosureTol) {
      throw invariant_error("derive_structure: central projection leaves the algebra");
    }
    // Compressed corner z A z spans an n x n matrix algebra repeated m times.
    std::vector<Matrix> corner;
    corner.reserve(alg.basis.size());
    for (const Matrix& b : alg.basis) corner.push_back(z * b * z);
    corner = orthonormalize(corner, tau);
    const int corner_dim = static_cast<int>(corner.size());
    const int n = static_cast<int>(std::lround(std::sqrt(double(corner_dim))));
    if (n * n != corner_dim) {
      throw invariant_error("derive_structure: block dimension is not a square");
    }
    const double zt = z.trace().real();
    const int mult = static_cast<int>(std::lround(zt / n));
    if (std::abs(zt - double(n) * mult) > 1e-6) {
      throw invariant_error("derive_structure: non-integer multiplicity");
    }
    BlockInfo info;
    info.block_dim = n;
    info.multiplicity = mult;
    info.central_trace = tau.apply(z).real();
    alg.block_spec.blocks.push_back(info);
    alg.central_projections.push_back(z);

    // Masa inside the block: spectral projections of a generic self-adjoint
    // corner element; n clusters of multiplicity mult each.
    std::vector<Matrix> corner_herm = hermitian_spanning(corner, tau);
    bool masa_done = false;
    for (std::uint64_t attempt = 0; attempt < 32 && !masa_done; ++attempt) {
      Rng rng(seed + 101 + attempt);
      Matrix g = Matrix::Zero(dim, dim);
      for (const Matrix& c : corner_herm) g += rng.uniform(-1.0, 1.0) * c;
      // Push the complement far away so block eigenvectors stay inside z.
      Matrix shifted = g - 10.0 * (double)hermitian_op_norm(g) *
                               (Matrix::Identity(dim, dim) - z);
      SpectralDecomposition sd = eigh(HermitianOperator::make(shifted, 1e-8));
      // Keep only the eigenvalues inside the block corner.
      if (gaps_ambiguous(sd.eigenvalues, kSpectralGapTol)) continue;
      auto subranges = cluster_eigenvalues(sd.eigenvalues, kSpectralGapTol);
      std::vector<Matrix> projs;
      bool ok = true;
      for (const auto& [a, b2] : subranges) {
        Matrix p = cluster_projection(sd, a, b2);
        const Matrix pz = z * p * z;
        if (max_abs(pz - p) > 1e-8) continue;  // complement cluster
        if (b2 - a != mult) {
          ok = false;
          break;
        }
        if (project_residual(alg.basis, p, tau) > kClosureTol) {
          ok = false;
          break;
        }
        projs.push_back(std::move(p));
      }
      if (ok && static_cast<int>(projs.size()) == n) {
        for (auto& p : projs) alg.masa.projections.push_back(std::move(p));
        masa_done = true;
      }
    }
    if (!masa_done) {
      throw invariant_error("derive_structure: masa construction failed");
    }
  }

  Matrix zsum = Matrix::Zero(dim, dim);
  for (const Matrix& z : alg.central_projections) zsum += z;
  if (max_abs(zsum - alg.unit) > 1e-8) {
    throw invariant_error("derive_structure: central projections do not sum to 1");
  }
}

Matrix conditional_expectation(const StarSubalgebra& n, const Matrix& x,
                               const TraceFunctional& tau) {
  if (x.rows() != n.ambient_dim || x.cols() != n.ambient_dim) {
    throw schema_error("conditional_expectation: dimension mismatch");
  }
  if (tau.dim() != n.ambient_dim) {
    throw schema_error("conditional_expectation: tau dimension mismatch");
  }
  const bool same_tau =
      n.tau_weights.size() == tau.weights.size() &&
      (n.tau_weights - tau.weights).cwiseAbs().maxCoeff() < 1e-12;
  const std::vector<Matrix>* basis = &n.basis;
  std::vector<Matrix> rebuilt;
  if (!same_tau) {
    rebuilt = orthonormalize(n.basis, tau);
    basis = &rebuilt;
  }
  Matrix e = Matrix::Zero(n.ambient_dim, n.ambient_dim);
  for (const Matrix& b : *basis) e += tau.inner(b, x) * b;
  return e;
}

RankCenterMasa rank_center_masa(const StarSubalgebra& n, const TraceFunctional& tau) {
  // Sampled closure check: products of basis elements must stay in the span.
  const int m = n.dim();
  const int stride = std::max(1, (m * m) / 64);
  for (int idx = 0; idx < m * m; idx += stride) {
    const Matrix p = n.basis[idx / m] * n.basis[idx % m];
    const double scale = std::max(1.0, tau_two_norm(p, tau));
    if (project_residual(n.basis, p, tau) > kClosureTol * scale) {
      throw schema_error("rank_center_masa: basis not multiplicatively closed");
    }
  }
  RankCenterMasa out;
  out.rank = n.rank();
  out.masa = n.masa;
  out.center = generated_algebra(n.central_projections, tau,
                                 std::max(64, 2 * static_cast<int>(
                                                   n.central_projections.size())));
  return out;
}

double algebra_entropy(const StarSubalgebra& n, const TraceFunctional& tau) {
  if (!tau.tracial_on(n.basis)) {
    throw schema_error("algebra_entropy: tau is not tracial on the algebra");
  }
  double h = 0.0;
  for (std::size_t j = 0; j < n.block_spec.blocks.size(); ++j) {
    const auto& b = n.block_spec.blocks[j];
    const double t = tau.apply(n.central_projections[j]).real();
    const double x = t / b.block_dim;
    h += b.block_dim * (x <= 0.0 ? 0.0 : -x * std::log(x));
  }
  return h;
}

double span_residual(const StarSubalgebra& n, const Matrix& x,
                     const TraceFunctional& tau) {
  return project_residual(n.basis, x, tau);
}

bool contains(const StarSubalgebra& n, const Matrix& x, const TraceFunctional& tau,
              double tol) {
  const double scale = std::max(1.0, tau_two_norm(x, tau));
  return span_residual(n, x, tau) <= tol * scale;
}

bool is_subalgebra_of(const StarSubalgebra& p, const StarSubalgebra& n,
                      const TraceFunctional& tau, double tol) {
  for (const Matrix& b : p.basis) {
    if (!contains(n, b, tau, tol)) return false;
  }
  return true;
}

bool algebras_commute(const StarSubalgebra& a, const StarSubalgebra& b, double tol) {
  for (const Matrix& x : a.basis) {
    for (const Matrix& y : b.basis) {
      if (max_abs(x * y - y * x) > tol * std::max(1.0, max_abs(x) * max_abs(y))) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace nce
