#include "nce/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nce {

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double hermitian_op_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

HermitianOperator HermitianOperator::make(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) {
    throw schema_error("HermitianOperator: matrix is not square");
  }
  const double defect = max_abs(m - m.adjoint());
  const double scale = std::max(1.0, max_abs(m));
  if (defect > rel_tol * scale) {
    std::ostringstream os;
    os << "HermitianOperator: Hermitian defect " << defect << " exceeds "
       << rel_tol * scale;
    throw schema_error(os.str());
  }
  return HermitianOperator{hermitian_part(m)};
}

Matrix SpectralDecomposition::reconstruct() const {
  return vectors * eigenvalues.asDiagonal() * vectors.adjoint();
}

Matrix SpectralDecomposition::map_eigenvalues(
    const std::function<double(double)>& f) const {
  RVector mapped(eigenvalues.size());
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) mapped(i) = f(eigenvalues(i));
  return vectors * mapped.asDiagonal() * vectors.adjoint();
}

SpectralDecomposition eigh(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat);
  if (es.info() != Eigen::Success) {
    throw invariant_error("eigh: eigensolver failed to converge");
  }
  SpectralDecomposition d{es.eigenvalues(), es.eigenvectors()};
  const double scale = std::max(1.0, max_abs(h.mat));
  if (max_abs(d.reconstruct() - h.mat) > 1e-9 * scale) {
    throw invariant_error("eigh: reconstruction residual exceeds tolerance");
  }
  const Matrix gram = d.vectors.adjoint() * d.vectors;
  if (max_abs(gram - Matrix::Identity(h.dim(), h.dim())) > 1e-10) {
    throw invariant_error("eigh: eigenvector basis not orthonormal");
  }
  return d;
}

TraceFunctional TraceFunctional::uniform(int dim) {
  TraceFunctional t;
  t.weights = RVector::Constant(dim, 1.0 / dim);
  t.is_normalized = true;
  return t;
}

Complex TraceFunctional::apply(const Matrix& x) const {
  if (x.rows() != weights.size()) {
    throw schema_error("TraceFunctional: dimension mismatch");
  }
  Complex acc = 0.0;
  for (Eigen::Index a = 0; a < weights.size(); ++a) acc += weights(a) * x(a, a);
  return acc;
}

Complex TraceFunctional::inner(const Matrix& a, const Matrix& b) const {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != weights.size()) {
    throw schema_error("TraceFunctional::inner: dimension mismatch");
  }
  // tau(a* b) = sum_r w_r (a* b)(r,r); computed without forming the product.
  Complex acc = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    acc += weights(r) * a.col(r).dot(b.col(r));  // dot conjugates the left factor
  }
  return acc;
}

bool TraceFunctional::tracial_on(const std::vector<Matrix>& ops, double tol) const {
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i; j < ops.size(); ++j) {
      const Complex ab = apply(ops[i] * ops[j]);
      const Complex ba = apply(ops[j] * ops[i]);
      if (std::abs(ab - ba) > tol) return false;
    }
  }
  return true;
}

namespace {

constexpr double kClampWindow = 1e-12;

double eta_of(double t) { return t <= 0.0 ? 0.0 : -t * std::log(t); }

void check_domain(const RVector& ev, const char* fname) {
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -kClampWindow) {
      std::ostringstream os;
      os << "matrix_function(" << fname << "): eigenvalue " << ev(i)
         << " below domain (clamp window " << -kClampWindow << ")";
      throw guard_error(os.str());
    }
  }
}

}  // namespace

HermitianOperator matrix_function(const HermitianOperator& h, ScalarFn f,
                                  bool on_support) {
  SpectralDecomposition d = eigh(h);
  RVector ev = d.eigenvalues;
  switch (f) {
    case ScalarFn::Exp:
      return HermitianOperator::trusted(
          d.map_eigenvalues([](double t) { return std::exp(t); }));
    case ScalarFn::Eta:
      check_domain(ev, "eta");
      return HermitianOperator::trusted(
          d.map_eigenvalues([](double t) { return eta_of(t); }));
    case ScalarFn::Sqrt:
      check_domain(ev, "sqrt");
      return HermitianOperator::trusted(
          d.map_eigenvalues([](double t) { return t <= 0.0 ? 0.0 : std::sqrt(t); }));
    case ScalarFn::Log: {
      check_domain(ev, "log");
      if (!on_support) {
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
          if (ev(i) <= kClampWindow) {
            std::ostringstream os;
            os << "matrix_function(log): eigenvalue " << ev(i)
               << " in the null space; use supported-subspace mode";
            throw guard_error(os.str());
          }
        }
      }
      return HermitianOperator::trusted(d.map_eigenvalues([](double t) {
        return t <= kClampWindow ? 0.0 : std::log(t);
      }));
    }
  }
  throw schema_error("matrix_function: unknown function");
}

double tau_two_norm(const Matrix& x, const TraceFunctional& tau) {
  const double v = tau.inner(x, x).real();
  return v <= 0.0 ? 0.0 : std::sqrt(v);
}

std::vector<Matrix> orthonormalize(const std::vector<Matrix>& vectors,
                                   const TraceFunctional& tau, double drop_tol) {
  std::vector<Matrix> basis;
  for (const Matrix& v : vectors) {
    Matrix r = v;
    // Two MGS passes for numerical orthogonality.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Matrix& b : basis) r -= tau.inner(b, r) * b;
    }
    const double norm = tau_two_norm(r, tau);
    if (norm < drop_tol) continue;
    basis.push_back(r / norm);
  }
  return basis;
}

Matrix support_projection(const HermitianOperator& h, double tol) {
  SpectralDecomposition d = eigh(h);
  return d.map_eigenvalues([tol](double t) { return t > tol ? 1.0 : 0.0; });
}

Matrix random_hermitian(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = rng.complex_normal();
  return hermitian_part(g);
}

Matrix random_psd(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = rng.complex_normal();
  return g.adjoint() * g;
}

Matrix random_density(int dim, Rng& rng) {
  Matrix p = random_psd(dim, rng);
  return p / p.trace().real();
}

Matrix random_unitary(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = rng.complex_normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= (std::abs(d) > 0 ? d / std::abs(d) : 1.0);
  }
  return q;
}

}  // namespace nce
