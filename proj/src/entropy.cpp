#include "nce/entropy.hpp"

#include <cmath>
#include <sstream>

namespace nce {

double eta_scalar(double t) {
  if (t < 0.0) {
    std::ostringstream os;
    os << "eta_scalar: negative argument " << t;
    throw guard_error(os.str());
  }
  return t == 0.0 ? 0.0 : -t * std::log(t);
}

double tau_eta(const HermitianOperator& x, const TraceFunctional& tau) {
  SpectralDecomposition d = eigh(x);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
    const double lam = d.eigenvalues(i);
    if (lam <= 0.0) continue;  // eta(0) = 0; tiny negatives contribute nothing
    double w = 0.0;
    for (Eigen::Index a = 0; a < tau.weights.size(); ++a) {
      w += tau.weights(a) * std::norm(d.vectors(a, i));
    }
    acc += w * (-lam * std::log(lam));
  }
  return acc;
}

double von_neumann_entropy(const HermitianOperator& rho) {
  SpectralDecomposition d = eigh(rho);
  const double tr = d.eigenvalues.sum();
  if (std::abs(tr - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "von_neumann_entropy: trace " << tr << " != 1";
    throw schema_error(os.str());
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
    const double lam = d.eigenvalues(i);
    if (lam < -1e-9) {
      std::ostringstream os;
      os << "von_neumann_entropy: negative eigenvalue " << lam;
      throw schema_error(os.str());
    }
    if (lam > 0.0) s -= lam * std::log(lam);
  }
  return std::max(0.0, s);
}

namespace {

constexpr double kSupportTol = 1e-10;

void require_psd(const RVector& ev, const char* who) {
  const double scale = std::max(1.0, std::abs(ev(ev.size() - 1)));
  if (ev(0) < -1e-9 * scale) {
    std::ostringstream os;
    os << who << ": input not PSD (eigenvalue " << ev(0) << ")";
    throw schema_error(os.str());
  }
}

// tau(x f(y)) over the support of y, given y's spectral data.
double tau_x_logy(const Matrix& x, const SpectralDecomposition& yd,
                  const TraceFunctional& tau) {
  const Matrix wx = tau.weights.asDiagonal() * x;  // tr(W x log y)
  double acc = 0.0;
  for (Eigen::Index j = 0; j < yd.eigenvalues.size(); ++j) {
    const double mu = yd.eigenvalues(j);
    if (mu <= kSupportTol) continue;
    const Complex q = yd.vectors.col(j).dot(wx * yd.vectors.col(j));
    acc += std::log(mu) * q.real();
  }
  return acc;
}

}  // namespace

double relative_entropy(const HermitianOperator& x, const HermitianOperator& y,
                        const TraceFunctional& tau) {
  if (x.dim() != y.dim() || x.dim() != tau.dim()) {
    throw schema_error("relative_entropy: dimension mismatch");
  }
  SpectralDecomposition xd = eigh(x);
  SpectralDecomposition yd = eigh(y);
  require_psd(xd.eigenvalues, "relative_entropy(x)");
  require_psd(yd.eigenvalues, "relative_entropy(y)");

  // Support condition: tau(x (1 - supp y)) <= 1e-9.
  double leak = 0.0;
  const Matrix wx = tau.weights.asDiagonal() * x.mat;
  for (Eigen::Index j = 0; j < yd.eigenvalues.size(); ++j) {
    if (yd.eigenvalues(j) > kSupportTol) continue;
    leak += yd.vectors.col(j).dot(wx * yd.vectors.col(j)).real();
  }
  if (leak > 1e-9) return kInfiniteEntropy;

  double x_log_x = 0.0;
  for (Eigen::Index i = 0; i < xd.eigenvalues.size(); ++i) {
    const double lam = xd.eigenvalues(i);
    if (lam <= kSupportTol) continue;
    double w = 0.0;
    for (Eigen::Index a = 0; a < tau.weights.size(); ++a) {
      w += tau.weights(a) * std::norm(xd.vectors(a, i));
    }
    x_log_x += w * lam * std::log(lam);
  }
  return x_log_x - tau_x_logy(x.mat, yd, tau);
}

int PartitionOfUnity::flat_size() const {
  int n = 1;
  for (int r : index_ranges) n *= r;
  return n;
}

int PartitionOfUnity::flat_index(const std::vector<int>& multi) const {
  int f = 0;
  for (int j = 0; j < arity; ++j) f = f * index_ranges[j] + multi[j];
  return f;
}

std::vector<int> PartitionOfUnity::multi_index(int flat) const {
  std::vector<int> multi(arity);
  for (int j = arity - 1; j >= 0; --j) {
    multi[j] = flat % index_ranges[j];
    flat /= index_ranges[j];
  }
  return multi;
}

PartitionOfUnity PartitionOfUnity::trivial(int dim) {
  PartitionOfUnity p;
  p.arity = 1;
  p.index_ranges = {1};
  p.elements = {Matrix::Identity(dim, dim)};
  return p;
}

void PartitionOfUnity::validate(double psd_tol, double sum_tol) const {
  if (elements.empty() || static_cast<int>(elements.size()) != flat_size()) {
    throw schema_error("PartitionOfUnity: element count mismatch");
  }
  const int dim = static_cast<int>(elements.front().rows());
  Matrix sum = Matrix::Zero(dim, dim);
  for (const Matrix& e : elements) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -psd_tol) {
      throw schema_error("PartitionOfUnity: element not PSD");
    }
    sum += e;
  }
  if (max_abs(sum - Matrix::Identity(dim, dim)) > sum_tol) {
    throw schema_error("PartitionOfUnity: elements do not sum to identity");
  }
}

std::vector<Matrix> marginal_family(const PartitionOfUnity& p, int slot) {
  if (slot < 0 || slot >= p.arity) {
    throw schema_error("marginal_family: slot out of range");
  }
  const int dim = static_cast<int>(p.elements.front().rows());
  std::vector<Matrix> out(p.index_ranges[slot], Matrix::Zero(dim, dim));
  for (int f = 0; f < p.flat_size(); ++f) {
    out[p.multi_index(f)[slot]] += p.elements[f];
  }
  return out;
}

double cs_objective(const PartitionOfUnity& p,
                    const std::vector<StarSubalgebra>& algebras,
                    const TraceFunctional& tau) {
  if (p.arity != static_cast<int>(algebras.size())) {
    throw schema_error("cs_objective: arity does not match algebra count");
  }
  const int dim = static_cast<int>(p.elements.front().rows());
  for (const auto& n : algebras) {
    if (n.ambient_dim != dim) throw schema_error("cs_objective: ambient mismatch");
  }
  double value = 0.0;
  for (const Matrix& e : p.elements) {
    value += eta_scalar(std::max(0.0, tau.apply(e).real()));
  }
  for (int j = 0; j < p.arity; ++j) {
    for (const Matrix& xm : marginal_family(p, j)) {
      const Matrix em = conditional_expectation(algebras[j], xm, tau);
      value -= tau_eta(HermitianOperator::trusted(hermitian_part(em)), tau);
    }
  }
  return value;
}

int StateDecomposition::flat_size() const {
  int n = 1;
  for (int r : index_ranges) n *= r;
  return n;
}

void StateDecomposition::validate(const Matrix& state_density, double sum_tol) const {
  if (densities.empty() || static_cast<int>(densities.size()) != flat_size()) {
    throw schema_error("StateDecomposition: element count mismatch");
  }
  Matrix sum = Matrix::Zero(state_density.rows(), state_density.cols());
  for (const Matrix& d : densities) sum += d;
  if (max_abs(sum - state_density) > sum_tol) {
    throw schema_error("StateDecomposition: densities do not sum to the state");
  }
}

double cnt_objective(const StateDecomposition& dec, const Matrix& state_density,
                     const std::vector<StarSubalgebra>& algebras,
                     const TraceFunctional& tau) {
  if (dec.arity != static_cast<int>(algebras.size())) {
    throw schema_error("cnt_objective: arity does not match algebra count");
  }
  double value = 0.0;
  for (const Matrix& d : dec.densities) {
    value += eta_scalar(std::max(0.0, tau.apply(d).real()));
  }
  // Marginals per slot, then relative entropy of restrictions.
  PartitionOfUnity shape;
  shape.arity = dec.arity;
  shape.index_ranges = dec.index_ranges;
  shape.elements = dec.densities;
  for (int j = 0; j < dec.arity; ++j) {
    const Matrix state_rest =
        hermitian_part(conditional_expectation(algebras[j], state_density, tau));
    const HermitianOperator b = HermitianOperator::trusted(state_rest);
    for (const Matrix& km : marginal_family(shape, j)) {
      const Matrix rest =
          hermitian_part(conditional_expectation(algebras[j], km, tau));
      const double s =
          relative_entropy(HermitianOperator::trusted(rest), b, tau);
      if (s == kInfiniteEntropy) return -kInfiniteEntropy;
      value += s;
    }
  }
  return value;
}

double commuting_join_entropy(const std::vector<StarSubalgebra>& algebras,
                              const TraceFunctional& tau, int dim_cap) {
  if (algebras.empty()) throw schema_error("commuting_join_entropy: empty input");
  for (std::size_t i = 0; i < algebras.size(); ++i) {
    for (std::size_t j = i + 1; j < algebras.size(); ++j) {
      if (!algebras_commute(algebras[i], algebras[j])) {
        throw schema_error("commuting_join_entropy: algebras do not commute");
      }
    }
  }
  if (algebras.size() == 1) return algebra_entropy(algebras[0], tau);
  std::vector<Matrix> gens;
  for (const auto& a : algebras) {
    gens.insert(gens.end(), a.basis.begin(), a.basis.end());
  }
  StarSubalgebra join = generated_algebra(gens, tau, dim_cap);
  return algebra_entropy(join, tau);
}

}  // namespace nce
