#include "nce/chain.hpp"

#include <cmath>
#include <sstream>

#include "nce/entropy.hpp"

namespace nce {

long long ChainSpace::dim() const {
  long long d = 1;
  for (int s = 0; s < sites; ++s) {
    d *= site_dim;
    if (d > (1LL << 40)) throw guard_error("ChainSpace: dimension overflow");
  }
  return d;
}

long long ChainSpace::stride(int site) const {
  long long s = 1;
  for (int i = site + 1; i < sites; ++i) s *= site_dim;
  return s;
}

void ChainSpace::require_dense(long long cap) const {
  if (dim() > cap) {
    std::ostringstream os;
    os << "chain window needs dense dimension " << dim() << " > cap " << cap;
    throw guard_error(os.str());
  }
}

void ChainSpace::require_diag(long long cap) const {
  if (dim() > cap) {
    std::ostringstream os;
    os << "chain window needs diagonal dimension " << dim() << " > cap " << cap;
    throw guard_error(os.str());
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix embed_interval_operator(const ChainSpace& chain, const Matrix& op, int first) {
  chain.require_dense();
  int w = 0;
  long long opd = 1;
  while (opd < op.rows()) {
    opd *= chain.site_dim;
    ++w;
  }
  if (opd != op.rows() || first < 0 || first + w > chain.sites) {
    throw schema_error("embed_interval_operator: operator does not fit the window");
  }
  const long long left = ChainSpace{chain.site_dim, first}.dim();
  const long long right = ChainSpace{chain.site_dim, chain.sites - first - w}.dim();
  Matrix out = kron(Matrix::Identity(left, left), op);
  return kron(out, Matrix::Identity(right, right));
}

StarSubalgebra site_interval_algebra(const ChainSpace& chain, int first, int width,
                                     const TraceFunctional& tau) {
  chain.require_dense();
  if (first < 0 || first + width > chain.sites) {
    throw schema_error("site_interval_algebra: interval outside window");
  }
  const long long bd = ChainSpace{chain.site_dim, width}.dim();
  const long long dim = chain.dim();
  StarSubalgebra alg;
  alg.ambient_dim = static_cast<int>(dim);
  alg.unit = Matrix::Identity(dim, dim);
  alg.tau_weights = tau.weights;
  std::vector<Matrix> raw;
  raw.reserve(bd * bd);
  for (long long r = 0; r < bd; ++r) {
    for (long long c = 0; c < bd; ++c) {
      Matrix e = Matrix::Zero(bd, bd);
      e(r, c) = 1.0;
      Matrix emb = embed_interval_operator(chain, e, first);
      raw.push_back(emb);
      if (r == c) alg.masa.projections.push_back(std::move(emb));
    }
  }
  alg.basis = orthonormalize(raw, tau);
  alg.block_spec.ambient_dim = static_cast<int>(dim);
  alg.block_spec.blocks = {BlockInfo{static_cast<int>(bd), 1, 1.0}};
  alg.central_projections = {alg.unit};
  return alg;
}

namespace {

// Splits a chain index into (kept part index, complement part index).
struct IndexSplit {
  std::vector<long long> keep_strides;
  std::vector<long long> comp_strides;
  std::vector<long long> keep_chain_strides;
  std::vector<long long> comp_chain_strides;
  long long keep_dim = 1;
  long long comp_dim = 1;

  IndexSplit(const ChainSpace& chain, const std::vector<int>& keep) {
    std::vector<bool> kept(chain.sites, false);
    for (int s : keep) {
      if (s < 0 || s >= chain.sites) {
        throw schema_error("site subset outside window");
      }
      kept[s] = true;
    }
    for (int s = 0; s < chain.sites; ++s) {
      if (kept[s]) {
        keep_chain_strides.push_back(chain.stride(s));
        keep_dim *= chain.site_dim;
      } else {
        comp_chain_strides.push_back(chain.stride(s));
        comp_dim *= chain.site_dim;
      }
    }
  }

  long long chain_index(long long keep_idx, long long comp_idx, int d) const {
    long long idx = 0;
    for (int i = static_cast<int>(keep_chain_strides.size()) - 1; i >= 0; --i) {
      idx += (keep_idx % d) * keep_chain_strides[i];
      keep_idx /= d;
    }
    for (int i = static_cast<int>(comp_chain_strides.size()) - 1; i >= 0; --i) {
      idx += (comp_idx % d) * comp_chain_strides[i];
      comp_idx /= d;
    }
    return idx;
  }
};

}  // namespace

Matrix partial_trace(const ChainSpace& chain, const Matrix& x,
                     const std::vector<int>& keep) {
  IndexSplit split(chain, keep);
  Matrix out = Matrix::Zero(split.keep_dim, split.keep_dim);
  for (long long p = 0; p < split.keep_dim; ++p) {
    for (long long q = 0; q < split.keep_dim; ++q) {
      Complex acc = 0.0;
      for (long long c = 0; c < split.comp_dim; ++c) {
        acc += x(split.chain_index(p, c, chain.site_dim),
                 split.chain_index(q, c, chain.site_dim));
      }
      out(p, q) = acc;
    }
  }
  return out;
}

Matrix interval_expectation(const ChainSpace& chain, const Matrix& x, int first,
                            int width) {
  std::vector<int> keep;
  for (int s = first; s < first + width; ++s) keep.push_back(s);
  IndexSplit split(chain, keep);
  Matrix reduced = partial_trace(chain, x, keep) / double(split.comp_dim);
  return embed_interval_operator(chain, reduced, first);
}

RVector product_diag(const ChainSpace& chain, const RVector& site_diag) {
  if (site_diag.size() != chain.site_dim) {
    throw schema_error("product_diag: site diagonal has wrong length");
  }
  chain.require_diag();
  const long long dim = chain.dim();
  RVector v = RVector::Ones(dim);
  for (long long idx = 0; idx < dim; ++idx) {
    long long rem = idx;
    double prod = 1.0;
    for (int s = chain.sites - 1; s >= 0; --s) {
      prod *= site_diag(rem % chain.site_dim);
      rem /= chain.site_dim;
    }
    v(idx) = prod;
  }
  return v;
}

RVector embed_interval_diag(const ChainSpace& chain, const RVector& diag, int first) {
  chain.require_diag();
  int w = 0;
  long long opd = 1;
  while (opd < diag.size()) {
    opd *= chain.site_dim;
    ++w;
  }
  if (opd != diag.size() || first < 0 || first + w > chain.sites) {
    throw schema_error("embed_interval_diag: diagonal does not fit the window");
  }
  const long long dim = chain.dim();
  const long long right = chain.stride(first + w - 1);
  RVector v(dim);
  for (long long idx = 0; idx < dim; ++idx) {
    v(idx) = diag((idx / right) % opd);
  }
  return v;
}

RVector partial_average_diag(const ChainSpace& chain, const RVector& v,
                             const std::vector<int>& keep) {
  IndexSplit split(chain, keep);
  RVector sums = RVector::Zero(split.keep_dim);
  for (long long p = 0; p < split.keep_dim; ++p) {
    double acc = 0.0;
    for (long long c = 0; c < split.comp_dim; ++c) {
      acc += v(split.chain_index(p, c, chain.site_dim));
    }
    sums(p) = acc / double(split.comp_dim);
  }
  RVector out(v.size());
  for (long long p = 0; p < split.keep_dim; ++p) {
    for (long long c = 0; c < split.comp_dim; ++c) {
      out(split.chain_index(p, c, chain.site_dim)) = sums(p);
    }
  }
  return out;
}

RVector cylinder_indicator(const ChainSpace& chain, const std::vector<int>& sites,
                           const std::vector<int>& pattern) {
  if (sites.size() != pattern.size()) {
    throw schema_error("cylinder_indicator: pattern length mismatch");
  }
  chain.require_diag();
  const long long dim = chain.dim();
  RVector v = RVector::Ones(dim);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const long long stride = chain.stride(sites[i]);
    for (long long idx = 0; idx < dim; ++idx) {
      if ((idx / stride) % chain.site_dim != pattern[i]) v(idx) = 0.0;
    }
  }
  return v;
}

double mean_eta(const RVector& v) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double t = v(i);
    if (t > 0.0) acc -= t * std::log(t);
  }
  return acc / double(v.size());
}

double diag_relative_entropy(const RVector& a, const RVector& b) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) <= 1e-14) continue;
    if (b(i) <= 1e-14) return kInfiniteEntropy;
    acc += a(i) * (std::log(a(i)) - std::log(b(i)));
  }
  return acc / double(a.size());
}

}  // namespace nce
