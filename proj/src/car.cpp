#include "nce/car.hpp"

#include <cmath>
#include <sstream>

#include "nce/chain.hpp"
#include "nce/entropy.hpp"

namespace nce {

Matrix CARSystem::annihilator(const CVector& f) const {
  if (f.size() != modes) throw schema_error("annihilator: mode vector length");
  Matrix out = Matrix::Zero(dim(), dim());
  for (int i = 0; i < modes; ++i) out += f(i) * annihilators[i];
  return out;
}

namespace {

void verify_car_pair(const CARSystem& sys, int i, int j) {
  const Matrix& ai = sys.annihilators[i];
  const Matrix& aj = sys.annihilators[j];
  const Matrix anti = ai * aj + aj * ai;
  if (max_abs(anti) > 1e-12) {
    throw invariant_error("build_car: {a_i, a_j} != 0");
  }
  const Matrix mixed = ai * aj.adjoint() + aj.adjoint() * ai;
  const double target = i == j ? 1.0 : 0.0;
  if (max_abs(mixed - target * Matrix::Identity(sys.dim(), sys.dim())) > 1e-10) {
    throw invariant_error("build_car: {a_i, a_j*} != delta_ij");
  }
}

}  // namespace

CARSystem build_car(int modes) {
  if (modes < 1 || modes > 12) {
    std::ostringstream os;
    os << "build_car: modes " << modes << " outside guard [1,12]";
    throw guard_error(os.str());
  }
  CARSystem sys;
  sys.modes = modes;
  const Matrix z = (Matrix(2, 2) << 1, 0, 0, -1).finished();
  const Matrix low = (Matrix(2, 2) << 0, 1, 0, 0).finished();  // a|1> = |0>
  const Matrix id2 = Matrix::Identity(2, 2);
  for (int i = 0; i < modes; ++i) {
    Matrix op = Matrix::Identity(1, 1);
    for (int s = 0; s < modes; ++s) {
      op = kron(op, s < i ? z : (s == i ? low : id2));
    }
    sys.annihilators.push_back(std::move(op));
  }

  // Defining relations, verified at construction.
  if (modes <= 6) {
    for (int i = 0; i < modes; ++i)
      for (int j = i; j < modes; ++j) verify_car_pair(sys, i, j);
  } else {
    for (int i = 0; i < modes; ++i) verify_car_pair(sys, i, i);
    verify_car_pair(sys, 0, 1);
    verify_car_pair(sys, 0, modes - 1);
    verify_car_pair(sys, modes - 2, modes - 1);
  }
  // Random linear combinations: a(f)a(g)* + a(g)*a(f) = (f,g) 1.
  Rng rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    CVector f(modes), g(modes);
    for (int i = 0; i < modes; ++i) {
      f(i) = rng.complex_normal();
      g(i) = rng.complex_normal();
    }
    const Matrix af = sys.annihilator(f);
    const Matrix ag = sys.annihilator(g);
    const Complex fg = g.dot(f);  // (f,g) = sum f_a conj(g_a)
    const Matrix defect =
        af * ag.adjoint() + ag.adjoint() * af - fg * Matrix::Identity(sys.dim(), sys.dim());
    if (max_abs(defect) > 1e-10 * std::max(1.0, std::abs(fg))) {
      throw invariant_error("build_car: bilinear CAR relation failed");
    }
  }
  return sys;
}

MatrixUnitSystem matrix_units(const CARSystem& sys) {
  MatrixUnitSystem mu;
  mu.modes = sys.modes;
  const long long d = sys.dim();
  mu.v.push_back(Matrix::Identity(d, d));
  for (int n = 1; n <= sys.modes; ++n) {
    const Matrix& a = sys.annihilators[n - 1];
    const Matrix& vprev = mu.v[n - 1];
    std::array<Matrix, 4> e;
    e[0] = a * a.adjoint();          // e11
    e[1] = a * vprev;                // e12
    e[2] = vprev * a.adjoint();      // e21
    e[3] = a.adjoint() * a;          // e22
    mu.units.push_back(std::move(e));
    mu.v.push_back(vprev * (Matrix::Identity(d, d) - 2.0 * a.adjoint() * a));
  }
  return mu;
}

WickMonomial WickMonomial::from_operator_list(
    const std::vector<std::pair<bool, CVector>>& ops) {
  WickMonomial m;
  bool seen_plain = false;
  std::vector<CVector> daggered_in_order;
  for (const auto& [dagger, vec] : ops) {
    if (dagger) {
      if (seen_plain) {
        throw schema_error("WickMonomial: creator after annihilator (not Wick ordered)");
      }
      daggered_in_order.push_back(vec);
    } else {
      seen_plain = true;
      m.annihilators.push_back(vec);
    }
  }
  // Operator order is a*(f_n)...a*(f_1): the list arrives as f_n,...,f_1.
  m.creators.assign(daggered_in_order.rbegin(), daggered_in_order.rend());
  return m;
}

Complex quasifree_eval(const CARSystem& sys, const HermitianOperator& a_op,
                       const WickMonomial& mono) {
  if (a_op.dim() != sys.modes) {
    throw schema_error("quasifree_eval: one-particle operator dimension mismatch");
  }
  SpectralDecomposition d = eigh(a_op);
  if (d.eigenvalues(0) < -1e-10 || d.eigenvalues(d.eigenvalues.size() - 1) > 1.0 + 1e-10) {
    throw schema_error("quasifree_eval: A outside [0,1]");
  }
  const std::size_t n = mono.creators.size();
  if (n != mono.annihilators.size()) return Complex(0.0, 0.0);
  if (n == 0) return Complex(1.0, 0.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const CVector ag = a_op.mat * mono.annihilators[i];
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = mono.creators[j].dot(ag);  // (A g_i, f_j)
    }
  }
  return m.determinant();
}

Matrix monomial_operator(const CARSystem& sys, const WickMonomial& mono) {
  const long long d = sys.dim();
  Matrix p = Matrix::Identity(d, d);
  for (auto it = mono.creators.rbegin(); it != mono.creators.rend(); ++it) {
    p = p * sys.creator(*it);  // a*(f_n) ... a*(f_1)
  }
  for (const CVector& g : mono.annihilators) p = p * sys.annihilator(g);
  return p;
}

Matrix quasifree_density(const CARSystem& sys, const RVector& lambdas) {
  if (lambdas.size() != sys.modes) {
    throw schema_error("quasifree_density: lambda count mismatch");
  }
  Matrix rho = Matrix::Identity(1, 1);
  for (int i = 0; i < sys.modes; ++i) {
    const double l = lambdas(i);
    if (l < -1e-12 || l > 1.0 + 1e-12) {
      throw schema_error("quasifree_density: lambda outside [0,1]");
    }
    Matrix site(2, 2);
    site << 1.0 - l, 0.0, 0.0, l;
    rho = kron(rho, site);
  }
  return rho;
}

void SpectralSymbol::validate() const {
  if (theta.size() == 0 || static_cast<std::size_t>(theta.size()) != eigenvalues.size()) {
    throw schema_error("SpectralSymbol: grid/eigenvalue size mismatch");
  }
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (theta(i) < 0.0 || theta(i) >= 2.0 * M_PI) {
      throw schema_error("SpectralSymbol: theta outside [0, 2pi)");
    }
    if (i > 0 && theta(i) <= theta(i - 1)) {
      throw schema_error("SpectralSymbol: theta grid not ascending");
    }
    for (Eigen::Index l = 0; l < eigenvalues[i].size(); ++l) {
      const double v = eigenvalues[i](l);
      if (v < -1e-12 || v > 1.0 + 1e-12) {
        throw schema_error("SpectralSymbol: eigenvalue outside [0,1]");
      }
    }
  }
}

SpectralSymbol SpectralSymbol::constant(double lambda, int multiplicity,
                                        int samples) {
  SpectralSymbol s;
  s.theta = RVector::LinSpaced(samples, 0.0, 2.0 * M_PI * (samples - 1) / samples);
  for (int i = 0; i < samples; ++i) {
    s.eigenvalues.push_back(RVector::Constant(multiplicity, lambda));
  }
  return s;
}

double bogoliubov_entropy(const SpectralSymbol& symbol, int panels) {
  symbol.validate();
  if (panels < 2 || panels % 2 != 0) {
    throw schema_error("bogoliubov_entropy: odd grid refinement mismatch");
  }
  const int segs = static_cast<int>(symbol.theta.size());
  auto integrand = [&](int seg) {
    double f = 0.0;
    for (Eigen::Index l = 0; l < symbol.eigenvalues[seg].size(); ++l) {
      const double lam = std::min(1.0, std::max(0.0, symbol.eigenvalues[seg](l)));
      f += eta_scalar(lam) + eta_scalar(1.0 - lam);
    }
    return f;
  };

  // The integrand is piecewise constant on the sample segments; composite
  // Simpson is applied per segment so panel boundaries align with the jumps.
  double total = 0.0;
  for (int seg = 0; seg < segs; ++seg) {
    const double lo = symbol.theta(seg);
    const double hi = seg + 1 < segs ? symbol.theta(seg + 1) : 2.0 * M_PI;
    const double len = hi - lo;
    if (len <= 0.0) continue;
    int sub = std::max(2, static_cast<int>(std::lround(panels * len / (2.0 * M_PI))));
    if (sub % 2 != 0) ++sub;
    const double h = len / sub;
    const double fv = integrand(seg);
    double acc = fv + fv;  // endpoints of the segment
    for (int i = 1; i < sub; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * fv;
    total += acc * h / 3.0;
  }
  const double value = total / (2.0 * M_PI);
  return value < 0.0 ? 0.0 : value;
}

}  // namespace nce
