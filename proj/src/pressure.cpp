#include "nce/pressure.hpp"

#include <cmath>
#include <sstream>

#include "nce/chain.hpp"
#include "nce/entropy.hpp"

namespace nce {

double pressure_fd(const HermitianOperator& h) {
  SpectralDecomposition d = eigh(h);
  // log sum exp(-lambda) with a shift at the smallest eigenvalue.
  const double lo = d.eigenvalues(0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
    acc += std::exp(lo - d.eigenvalues(i));
  }
  return -lo + std::log(acc);
}

GibbsState gibbs_state(const HermitianOperator& h) {
  SpectralDecomposition d = eigh(h);
  const double lo = d.eigenvalues(0);
  RVector w(d.eigenvalues.size());
  double z = 0.0;
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
    w(i) = std::exp(lo - d.eigenvalues(i));
    z += w(i);
  }
  w /= z;
  GibbsState g;
  g.density = d.vectors * w.asDiagonal() * d.vectors.adjoint();
  g.log_partition = -lo + std::log(z);
  if (max_abs(g.density * h.mat - h.mat * g.density) >
      1e-9 * std::max(1.0, max_abs(h.mat))) {
    throw invariant_error("gibbs_state: density does not commute with H");
  }
  return g;
}

double variational_gap(const HermitianOperator& rho, const HermitianOperator& h) {
  const double s = von_neumann_entropy(rho);
  const double energy = (rho.mat * h.mat).trace().real();
  const double gap = pressure_fd(h) - (s - energy);
  if (gap < -1e-9) {
    throw invariant_error("variational_gap: negative gap (variational principle)");
  }
  // Cross-check against the algebraic identity gap = S(rho, Gibbs(h)).
  const int dim = h.dim();
  GibbsState g = gibbs_state(h);
  const double rel = relative_entropy(
      HermitianOperator::trusted(double(dim) * rho.mat),
      HermitianOperator::trusted(double(dim) * g.density),
      TraceFunctional::uniform(dim));
  if (rel != kInfiniteEntropy && std::abs(gap - rel) > 1e-8 * std::max(1.0, gap)) {
    throw invariant_error("variational_gap: relative-entropy identity violated");
  }
  return gap;
}

bool peierls_bogoliubov_check(const HermitianOperator& h, const HermitianOperator& k,
                              double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(k.mat - h.mat, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-9) {
    throw schema_error("peierls_bogoliubov_check: precondition h <= k fails");
  }
  const double left = pressure_fd(HermitianOperator::trusted(-h.mat));
  const double right = pressure_fd(HermitianOperator::trusted(-k.mat));
  return left <= right + tol;
}

double LocalHamiltonian::term_norm() const { return hermitian_op_norm(term.mat); }

void LocalHamiltonian::validate() const {
  if (site_dim < 2) throw schema_error("LocalHamiltonian: site_dim < 2");
  if (support < 1) throw schema_error("LocalHamiltonian: support < 1");
  long long want = 1;
  for (int i = 0; i < support; ++i) want *= site_dim;
  if (term.dim() != want) {
    std::ostringstream os;
    os << "LocalHamiltonian: term dim " << term.dim() << " != d^support = " << want;
    throw schema_error(os.str());
  }
}

namespace {

void check_pressure_guard(const LocalHamiltonian& lh, int k_max) {
  const double qubits = (k_max + lh.support) * std::log2(double(lh.site_dim));
  if (qubits > 14.0 + 1e-9) {
    std::ostringstream os;
    os << "shift_pressure_estimate: (k_max + support) log2(d) = " << qubits
       << " exceeds the dimension guard 14";
    throw guard_error(os.str());
  }
}

bool is_diagonal(const Matrix& m) {
  double off = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r != c) off = std::max(off, std::abs(m(r, c)));
    }
  }
  return off <= 1e-14 * std::max(1.0, max_abs(m));
}

double log_sum_exp_neg(const RVector& diag) {
  const double lo = diag.minCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) acc += std::exp(lo - diag(i));
  return -lo + std::log(acc);
}

// p_k for one horizon, dispatching on the structure of the term.
double pressure_at_horizon(const LocalHamiltonian& lh, int k) {
  const int sites = k + lh.support;
  const ChainSpace chain{lh.site_dim, sites};
  if (lh.support == 1) {
    // Single-site terms act on disjoint sites: Tr e^{-H_k} factorizes into
    // (Tr_site e^{-h})^{k+1}, so p_k is the single-site pressure exactly.
    return pressure_fd(lh.term);
  }
  if (is_diagonal(lh.term.mat)) {
    chain.require_diag();
    RVector hk = RVector::Zero(chain.dim());
    const RVector term_diag = lh.term.mat.diagonal().real();
    for (int j = 0; j <= k; ++j) {
      hk += embed_interval_diag(chain, term_diag, j);
    }
    return log_sum_exp_neg(hk) / double(k + 1);
  }
  chain.require_dense();
  Matrix hk = Matrix::Zero(chain.dim(), chain.dim());
  for (int j = 0; j <= k; ++j) {
    hk += embed_interval_operator(chain, lh.term.mat, j);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hk, Eigen::EigenvaluesOnly);
  return log_sum_exp_neg(es.eigenvalues()) / double(k + 1);
}

double aitken_extrapolate(const std::vector<double>& v) {
  if (v.size() < 3) return v.empty() ? 0.0 : v.back();
  const double x0 = v[v.size() - 3], x1 = v[v.size() - 2], x2 = v.back();
  const double denom = x2 - 2.0 * x1 + x0;
  if (std::abs(denom) < 1e-14) return x2;
  return x2 - (x2 - x1) * (x2 - x1) / denom;
}

}  // namespace

PressureSequence shift_pressure_estimate(const LocalHamiltonian& lh, int k_max) {
  lh.validate();
  check_pressure_guard(lh, k_max);
  PressureSequence seq;
  for (int k = 1; k <= k_max; ++k) {
    seq.horizons.push_back(k);
    seq.values.push_back(pressure_at_horizon(lh, k));
  }
  seq.last = seq.values.back();
  seq.aitken = aitken_extrapolate(seq.values);
  return seq;
}

TransferOracle ising_transfer_oracle(const LocalHamiltonian& lh, int k_max) {
  lh.validate();
  if (lh.support != 2 || !is_diagonal(lh.term.mat)) {
    throw schema_error("ising_transfer_oracle: needs a diagonal two-site term");
  }
  const int d = lh.site_dim;
  Eigen::MatrixXd t(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      t(a, b) = std::exp(-lh.term.mat(a * d + b, a * d + b).real());
    }
  }
  TransferOracle oracle;
  // 1^T T^{k+1} 1 with running rescaling against overflow.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
  double log_scale = 0.0;
  int applied = 0;
  for (int k = 1; k <= k_max; ++k) {
    while (applied < k + 1) {
      const double s = v.maxCoeff();
      v /= s;
      log_scale += std::log(s);
      v = t * v;
      ++applied;
    }
    oracle.values.push_back((std::log(v.sum()) + log_scale) / double(k + 1));
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(t);
  double lmax = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    lmax = std::max(lmax, std::abs(es.eigenvalues()(i)));
  }
  oracle.log_lambda_max = std::log(lmax);
  return oracle;
}

bool PressureSuiteReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

namespace {

// log Tr exp(-sum of terms) when every term is single-site: the trace
// factorizes into a product over sites.
double log_trace_site_terms(int d, int window,
                            const std::vector<std::pair<int, Matrix>>& terms) {
  std::vector<Matrix> per_site(window, Matrix::Zero(d, d));
  for (const auto& [s, m] : terms) per_site[s] += m;
  double acc = 0.0;
  for (const Matrix& m : per_site) {
    acc += pressure_fd(HermitianOperator::trusted(hermitian_part(m)));
  }
  return acc;
}

// log Tr exp(-sum of interval terms) on a fixed window (common-window
// comparisons for the telescoping check); diagonal term lists stay on the
// diagonal path.
double log_trace_interval_terms(int d, int window,
                                const std::vector<std::pair<int, Matrix>>& terms) {
  const ChainSpace chain{d, window};
  bool all_diag = true;
  for (const auto& [first, m] : terms) all_diag = all_diag && is_diagonal(m);
  if (all_diag) {
    chain.require_diag();
    RVector hk = RVector::Zero(chain.dim());
    for (const auto& [first, m] : terms) {
      hk += embed_interval_diag(chain, m.diagonal().real(), first);
    }
    return log_sum_exp_neg(hk);
  }
  chain.require_dense();
  Matrix hk = Matrix::Zero(chain.dim(), chain.dim());
  for (const auto& [first, m] : terms) {
    hk += embed_interval_operator(chain, m, first);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hk, Eigen::EigenvaluesOnly);
  return log_sum_exp_neg(es.eigenvalues());
}

}  // namespace

PressureSuiteReport pressure_property_suite(const LocalHamiltonian& lh, int k,
                                            std::uint64_t seed) {
  lh.validate();
  check_pressure_guard(lh, k);
  PressureSuiteReport rep;
  rep.k = k;
  Rng rng(seed);
  const int td = lh.term.dim();
  const double p_h = pressure_at_horizon(lh, k);
  const bool classical = is_diagonal(lh.term.mat);

  // Partner terms share the term's structure so classical instances stay on
  // the fast paths at large horizons.
  auto partner_psd = [&]() -> Matrix {
    if (!classical) {
      Matrix p = random_psd(td, rng);
      return p / hermitian_op_norm(p);
    }
    RVector v(td);
    for (int i = 0; i < td; ++i) v(i) = std::abs(rng.normal());
    v /= v.maxCoeff();
    return v.cast<Complex>().asDiagonal();
  };
  auto partner_herm = [&]() -> Matrix {
    if (!classical) return random_hermitian(td, rng);
    RVector v(td);
    for (int i = 0; i < td; ++i) v(i) = rng.normal();
    return v.cast<Complex>().asDiagonal();
  };

  {  // (ii) monotone decrease under H <= K.
    LocalHamiltonian bigger = lh;
    bigger.term = HermitianOperator::trusted(lh.term.mat + partner_psd());
    const double p_k2 = pressure_at_horizon(bigger, k);
    PressureCheck c{"monotone (ii)", p_h >= p_k2 - 1e-9, p_k2 - p_h, 1e-9};
    rep.checks.push_back(c);
  }
  {  // (iii) c-shift identity, exact: the identity term contributes (k+1)c.
    const double cshift = 0.7;
    LocalHamiltonian shifted = lh;
    shifted.term = HermitianOperator::trusted(
        lh.term.mat + cshift * Matrix::Identity(td, td));
    const double p_s = pressure_at_horizon(shifted, k);
    const double defect = std::abs(p_s - (p_h - cshift));
    rep.checks.push_back(PressureCheck{"c-shift (iii)", defect <= 1e-12, defect, 1e-12});
  }
  {  // (v) Lipschitz in the operator norm.
    LocalHamiltonian other = lh;
    other.term = HermitianOperator::trusted(lh.term.mat + 0.5 * partner_herm());
    const double p_o = pressure_at_horizon(other, k);
    const double dist = hermitian_op_norm(lh.term.mat - other.term.mat);
    const double defect = std::abs(p_h - p_o) - dist;
    rep.checks.push_back(PressureCheck{"Lipschitz (v)", defect <= 1e-9, defect, 1e-9});
  }
  {  // (vii) telescoping defect of H + alpha(K) - K, common window:
     // H'_k = H_k + alpha^{k+1}(K) - K, so the defect obeys 2||K||/(k+1).
     // A diagonal H gets a diagonal K so the comparison stays classical.
    Matrix ksite;
    if (classical) {
      RVector kd(lh.site_dim);
      for (int i = 0; i < lh.site_dim; ++i) kd(i) = rng.normal();
      kd /= kd.cwiseAbs().maxCoeff();
      ksite = kd.cast<Complex>().asDiagonal();
    } else {
      ksite = random_hermitian(lh.site_dim, rng);
      ksite /= hermitian_op_norm(ksite);  // ||K|| = 1
    }
    double p_moved, p_base;
    if (lh.support == 1) {
      const int window = k + 2;
      std::vector<std::pair<int, Matrix>> base, moved;
      for (int j = 0; j <= k; ++j) {
        base.emplace_back(j, lh.term.mat);
        moved.emplace_back(j, lh.term.mat);
      }
      moved.emplace_back(k + 1, ksite);
      moved.emplace_back(0, -ksite);
      p_base = log_trace_site_terms(lh.site_dim, window, base) / double(k + 1);
      p_moved = log_trace_site_terms(lh.site_dim, window, moved) / double(k + 1);
    } else {
      const int window = k + lh.support + 1;
      std::vector<std::pair<int, Matrix>> base, moved;
      for (int j = 0; j <= k; ++j) {
        base.emplace_back(j, lh.term.mat);
        moved.emplace_back(j, lh.term.mat);
      }
      moved.emplace_back(k + 1, ksite);
      moved.emplace_back(0, -ksite);
      p_base = log_trace_interval_terms(lh.site_dim, window, base) / double(k + 1);
      p_moved =
          log_trace_interval_terms(lh.site_dim, window, moved) / double(k + 1);
    }
    const double defect = std::abs(p_moved - p_base);
    const double bound = 2.0 / double(k + 1) + 1e-9;  // 2 ||K|| / (k+1)
    rep.checks.push_back(PressureCheck{"telescoping (vii)", defect <= bound, defect, bound});
  }
  {  // Convexity of lambda -> p_k(lambda H + (1-lambda) K), 5-point midpoints.
    LocalHamiltonian other = lh;
    other.term = HermitianOperator::trusted(partner_herm());
    std::vector<double> vals;
    for (int i = 0; i <= 4; ++i) {
      const double lam = i / 4.0;
      LocalHamiltonian mix = lh;
      mix.term = HermitianOperator::trusted(lam * lh.term.mat +
                                            (1.0 - lam) * other.term.mat);
      vals.push_back(pressure_at_horizon(mix, k));
    }
    double worst = 0.0;
    for (int i = 1; i <= 3; ++i) {
      worst = std::max(worst, vals[i] - 0.5 * (vals[i - 1] + vals[i + 1]));
    }
    rep.checks.push_back(PressureCheck{"convexity", worst <= 1e-9, worst, 1e-9});
  }
  return rep;
}

}  // namespace nce
