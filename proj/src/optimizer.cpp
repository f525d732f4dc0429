#include "nce/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "nce/workers.hpp"

namespace nce {

namespace {

constexpr double kEigenFloor = 1e-12;

void require_uniform_trace(const TraceFunctional& tau, const char* who) {
  const double w0 = 1.0 / tau.dim();
  for (Eigen::Index i = 0; i < tau.weights.size(); ++i) {
    if (std::abs(tau.weights(i) - w0) > 1e-12) {
      throw schema_error(std::string(who) +
                         ": requires the tracial (uniform) state");
    }
  }
}

// Spectral log with an eigenvalue floor; used inside gradients only.
Matrix log_floored(const Matrix& h) {
  SpectralDecomposition d = eigh(HermitianOperator::trusted(hermitian_part(h)));
  return d.map_eigenvalues(
      [](double t) { return std::log(std::max(t, kEigenFloor)); });
}

Matrix psd_sqrt(const Matrix& h) {
  SpectralDecomposition d = eigh(HermitianOperator::trusted(hermitian_part(h)));
  return d.map_eigenvalues(
      [](double t) { return t <= 0.0 ? 0.0 : std::sqrt(t); });
}

std::vector<Matrix> marginal_sums(const std::vector<Matrix>& x,
                                  const std::vector<int>& ranges, int slot) {
  const int dim = static_cast<int>(x.front().rows());
  std::vector<Matrix> out(ranges[slot], Matrix::Zero(dim, dim));
  // Flat layout: last slot fastest.
  int stride = 1;
  for (std::size_t j = slot + 1; j < ranges.size(); ++j) stride *= ranges[j];
  const int period = stride * ranges[slot];
  for (std::size_t f = 0; f < x.size(); ++f) {
    out[(static_cast<int>(f) % period) / stride] += x[f];
  }
  return out;
}

// Multivariate subalgebra entropy objective and gradient.
class CsObjective : public detail::PartitionObjective {
 public:
  CsObjective(const std::vector<StarSubalgebra>& algebras,
              const TraceFunctional& tau, std::vector<int> ranges)
      : algebras_(algebras), tau_(tau), ranges_(std::move(ranges)) {}

  double value(const std::vector<Matrix>& x) const override {
    double v = 0.0;
    for (const Matrix& e : x) v += eta_scalar(std::max(0.0, tau_.apply(e).real()));
    for (std::size_t j = 0; j < algebras_.size(); ++j) {
      for (const Matrix& xm : marginal_sums(x, ranges_, static_cast<int>(j))) {
        const Matrix em = conditional_expectation(algebras_[j], xm, tau_);
        v -= tau_eta(HermitianOperator::trusted(hermitian_part(em)), tau_);
      }
    }
    return v;
  }

  std::vector<Matrix> gradient(const std::vector<Matrix>& x) const override {
    const int dim = static_cast<int>(x.front().rows());
    const double invd = 1.0 / dim;
    const Matrix id = Matrix::Identity(dim, dim);
    // log(E_{N_j} x^j) + 1 per slot and index.
    std::vector<std::vector<Matrix>> slot_terms(algebras_.size());
    for (std::size_t j = 0; j < algebras_.size(); ++j) {
      for (const Matrix& xm : marginal_sums(x, ranges_, static_cast<int>(j))) {
        const Matrix em = conditional_expectation(algebras_[j], xm, tau_);
        slot_terms[j].push_back(log_floored(em) + id);
      }
    }
    std::vector<Matrix> g;
    g.reserve(x.size());
    std::vector<int> multi(ranges_.size(), 0);
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double t = std::max(tau_.apply(x[f]).real(), kEigenFloor);
      Matrix gf = (-std::log(t) - 1.0) * id;
      for (std::size_t j = 0; j < algebras_.size(); ++j) {
        gf += slot_terms[j][multi[j]];
      }
      g.push_back(invd * gf);
      for (int j = static_cast<int>(ranges_.size()) - 1; j >= 0; --j) {
        if (++multi[j] < ranges_[j]) break;
        multi[j] = 0;
      }
    }
    return g;
  }

 private:
  const std::vector<StarSubalgebra>& algebras_;
  const TraceFunctional& tau_;
  std::vector<int> ranges_;
};

// H(N|P) objective: sum_i [tau eta(E_P x_i) - tau eta(E_N x_i)].
class RelAlgObjective : public detail::PartitionObjective {
 public:
  RelAlgObjective(const StarSubalgebra& n, const StarSubalgebra& p,
                  const TraceFunctional& tau)
      : n_(n), p_(p), tau_(tau) {}

  double value(const std::vector<Matrix>& x) const override {
    double v = 0.0;
    for (const Matrix& e : x) {
      const Matrix ep = conditional_expectation(p_, e, tau_);
      const Matrix en = conditional_expectation(n_, e, tau_);
      v += tau_eta(HermitianOperator::trusted(hermitian_part(ep)), tau_) -
           tau_eta(HermitianOperator::trusted(hermitian_part(en)), tau_);
    }
    return v;
  }

  std::vector<Matrix> gradient(const std::vector<Matrix>& x) const override {
    const int dim = static_cast<int>(x.front().rows());
    const double invd = 1.0 / dim;
    std::vector<Matrix> g;
    g.reserve(x.size());
    for (const Matrix& e : x) {
      const Matrix ep = conditional_expectation(p_, e, tau_);
      const Matrix en = conditional_expectation(n_, e, tau_);
      g.push_back(invd * (log_floored(en) - log_floored(ep)));
    }
    return g;
  }

 private:
  const StarSubalgebra& n_;
  const StarSubalgebra& p_;
  const TraceFunctional& tau_;
};

// Functional-decomposition objective at densities k_I = W x_I W, W = k_phi^{1/2}.
class CntObjective : public detail::PartitionObjective {
 public:
  CntObjective(const std::vector<StarSubalgebra>& algebras,
               const TraceFunctional& tau, std::vector<int> ranges,
               const Matrix& k_phi)
      : algebras_(algebras),
        tau_(tau),
        ranges_(std::move(ranges)),
        k_phi_(k_phi),
        w_(psd_sqrt(k_phi)) {
    restricted_.reserve(algebras_.size());
    restricted_logs_.reserve(algebras_.size());
    for (const auto& n : algebras_) {
      Matrix b = hermitian_part(conditional_expectation(n, k_phi_, tau_));
      restricted_.push_back(b);
      restricted_logs_.push_back(log_floored(b));
    }
  }

  double value(const std::vector<Matrix>& x) const override {
    double v = 0.0;
    std::vector<Matrix> k;
    k.reserve(x.size());
    for (const Matrix& e : x) {
      Matrix ke = w_ * e * w_;
      v += eta_scalar(std::max(0.0, tau_.apply(ke).real()));
      k.push_back(std::move(ke));
    }
    for (std::size_t j = 0; j < algebras_.size(); ++j) {
      const HermitianOperator b = HermitianOperator::trusted(restricted_[j]);
      for (const Matrix& km : marginal_sums(k, ranges_, static_cast<int>(j))) {
        const Matrix rest = hermitian_part(
            conditional_expectation(algebras_[j], km, tau_));
        const double s = relative_entropy(HermitianOperator::trusted(rest), b, tau_);
        if (s == kInfiniteEntropy) return -kInfiniteEntropy;
        v += s;
      }
    }
    return v;
  }

  std::vector<Matrix> gradient(const std::vector<Matrix>& x) const override {
    const int dim = static_cast<int>(x.front().rows());
    const double invd = 1.0 / dim;
    std::vector<Matrix> k;
    k.reserve(x.size());
    for (const Matrix& e : x) k.push_back(w_ * e * w_);
    const Matrix id = Matrix::Identity(dim, dim);
    std::vector<std::vector<Matrix>> slot_terms(algebras_.size());
    for (std::size_t j = 0; j < algebras_.size(); ++j) {
      for (const Matrix& km : marginal_sums(k, ranges_, static_cast<int>(j))) {
        const Matrix y = hermitian_part(
            conditional_expectation(algebras_[j], km, tau_));
        const Matrix z = log_floored(y) - restricted_logs_[j] + id;
        slot_terms[j].push_back(w_ * z * w_);
      }
    }
    std::vector<Matrix> g;
    g.reserve(x.size());
    std::vector<int> multi(ranges_.size(), 0);
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double t = std::max(tau_.apply(k[f]).real(), kEigenFloor);
      Matrix gf = (-std::log(t) - 1.0) * k_phi_;
      for (std::size_t j = 0; j < algebras_.size(); ++j) {
        gf += slot_terms[j][multi[j]];
      }
      g.push_back(invd * hermitian_part(gf));
      for (int j = static_cast<int>(ranges_.size()) - 1; j >= 0; --j) {
        if (++multi[j] < ranges_[j]) break;
        multi[j] = 0;
      }
    }
    return g;
  }

  const Matrix& weight() const { return w_; }

 private:
  const std::vector<StarSubalgebra>& algebras_;
  const TraceFunctional& tau_;
  std::vector<int> ranges_;
  Matrix k_phi_;
  Matrix w_;
  std::vector<Matrix> restricted_;
  std::vector<Matrix> restricted_logs_;
};

std::vector<Matrix> random_free(int count, int dim, Rng& rng) {
  std::vector<Matrix> c;
  c.reserve(count);
  for (int i = 0; i < count; ++i) {
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int cc = 0; cc < dim; ++cc) m(r, cc) = rng.complex_normal();
    c.push_back(std::move(m));
  }
  return c;
}

// Masa-product warm start: c_I = prod_j p^{(j)}_{i_j} for in-range indices,
// small random matrices for any grown indices.
std::vector<Matrix> structured_free(const std::vector<const Masa*>& masas,
                                    const std::vector<int>& ranges, int dim,
                                    Rng& rng) {
  int total = 1;
  for (int r : ranges) total *= r;
  std::vector<Matrix> c;
  c.reserve(total);
  std::vector<int> multi(ranges.size(), 0);
  for (int f = 0; f < total; ++f) {
    bool in_range = true;
    for (std::size_t j = 0; j < ranges.size(); ++j) {
      if (multi[j] >= static_cast<int>(masas[j]->projections.size())) {
        in_range = false;
        break;
      }
    }
    if (in_range) {
      Matrix prod = Matrix::Identity(dim, dim);
      for (std::size_t j = 0; j < ranges.size(); ++j) {
        prod = prod * masas[j]->projections[multi[j]];
      }
      c.push_back(std::move(prod));
    } else {
      Matrix m(dim, dim);
      for (int r = 0; r < dim; ++r)
        for (int cc = 0; cc < dim; ++cc) m(r, cc) = 1e-3 * rng.complex_normal();
      c.push_back(std::move(m));
    }
    for (int j = static_cast<int>(ranges.size()) - 1; j >= 0; --j) {
      if (++multi[j] < ranges[j]) break;
      multi[j] = 0;
    }
  }
  return c;
}

struct RestartPlan {
  std::vector<int> ranges;
  int restarts;
  std::uint64_t seed_base;
};

detail::EngineResult best_over_restarts(
    const detail::PartitionObjective& obj, const RestartPlan& plan, int dim,
    int iterations, const std::vector<const Masa*>* masas) {
  std::vector<detail::EngineResult> results(plan.restarts);
  parallel_for(plan.restarts, [&](int r) {
    Rng rng(plan.seed_base + static_cast<std::uint64_t>(r));
    int total = 1;
    for (int x : plan.ranges) total *= x;
    std::vector<Matrix> c;
    if (r == 0 && masas != nullptr) {
      c = structured_free(*masas, plan.ranges, dim, rng);
    } else {
      c = random_free(total, dim, rng);
    }
    results[r] = detail::ascend(obj, std::move(c), iterations);
  });
  // Deterministic merge: max value, ties to the lowest seed index.
  int best = 0;
  for (int r = 1; r < plan.restarts; ++r) {
    if (results[r].value > results[best].value) best = r;
  }
  return results[best];
}

}  // namespace

namespace detail {

std::vector<Matrix> partition_from_free(const std::vector<Matrix>& c) {
  const int dim = static_cast<int>(c.front().rows());
  Matrix s = Matrix::Zero(dim, dim);
  std::vector<Matrix> a;
  a.reserve(c.size());
  for (const Matrix& ci : c) {
    a.push_back(ci.adjoint() * ci);
    s += a.back();
  }
  SpectralDecomposition sd = eigh(HermitianOperator::trusted(hermitian_part(s)));
  const double floor = std::max(kEigenFloor * sd.eigenvalues.maxCoeff(), 1e-300);
  const Matrix t = sd.map_eigenvalues(
      [floor](double v) { return 1.0 / std::sqrt(std::max(v, floor)); });
  std::vector<Matrix> x;
  x.reserve(c.size());
  for (const Matrix& ai : a) x.push_back(hermitian_part(t * ai * t));
  return x;
}

EngineResult ascend(const PartitionObjective& obj, std::vector<Matrix> c,
                    int iterations) {
  const int dim = static_cast<int>(c.front().rows());
  EngineResult out;
  std::vector<Matrix> x = partition_from_free(c);
  double f = obj.value(x);
  int stall = 0;

  for (int iter = 0; iter < iterations; ++iter) {
    // Rebuild shared pieces of the chain rule at the current point.
    Matrix s = Matrix::Zero(dim, dim);
    std::vector<Matrix> a;
    a.reserve(c.size());
    for (const Matrix& ci : c) {
      a.push_back(ci.adjoint() * ci);
      s += a.back();
    }
    SpectralDecomposition sd = eigh(HermitianOperator::trusted(hermitian_part(s)));
    const double smax = sd.eigenvalues.maxCoeff();
    const double floor = std::max(kEigenFloor * smax, 1e-300);
    RVector se = sd.eigenvalues.cwiseMax(floor);
    const Matrix t = sd.map_eigenvalues(
        [floor](double v) { return 1.0 / std::sqrt(std::max(v, floor)); });

    x.clear();
    for (const Matrix& ai : a) x.push_back(hermitian_part(t * ai * t));
    std::vector<Matrix> g = obj.gradient(x);

    Matrix q = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < c.size(); ++i) {
      q += a[i] * t * g[i] + g[i] * t * a[i];
    }
    // Divided differences of v -> v^{-1/2} transported to the S-eigenbasis.
    Matrix qu = sd.vectors.adjoint() * q * sd.vectors;
    for (int p = 0; p < dim; ++p) {
      for (int r = 0; r < dim; ++r) {
        const double sp = se(p), sr = se(r);
        double dd;
        if (std::abs(sp - sr) > 1e-12 * std::max(sp, sr)) {
          dd = (1.0 / std::sqrt(sp) - 1.0 / std::sqrt(sr)) / (sp - sr);
        } else {
          dd = -0.5 * std::pow(0.5 * (sp + sr), -1.5);
        }
        qu(p, r) *= dd;
      }
    }
    const Matrix rmat = hermitian_part(sd.vectors * qu * sd.vectors.adjoint());

    std::vector<Matrix> dir;
    dir.reserve(c.size());
    double slope = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Matrix m = hermitian_part(t * g[i] * t + rmat);
      dir.push_back(c[i] * m);
      slope += 2.0 * (m * a[i] * m).trace().real();
    }
    if (!(slope > 1e-15)) {
      out.converged = true;
      break;
    }

    // Backtracking: accept the first step with sufficient increase.
    double step = 1.0 / std::max(1.0, std::sqrt(slope));
    bool accepted = false;
    double f_new = f;
    std::vector<Matrix> c_new;
    for (int h = 0; h < 30; ++h) {
      c_new = c;
      for (std::size_t i = 0; i < c.size(); ++i) c_new[i] += step * dir[i];
      const std::vector<Matrix> x_new = partition_from_free(c_new);
      f_new = obj.value(x_new);
      if (f_new > f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double rel = (f_new - f) / std::max(1.0, std::abs(f_new));
    c = std::move(c_new);
    // Keep the parametrization scale bounded (x is invariant under c -> l c).
    double cmax = 0.0;
    for (const Matrix& ci : c) cmax = std::max(cmax, max_abs(ci));
    if (cmax > 1e3 || (cmax > 0 && cmax < 1e-3)) {
      for (Matrix& ci : c) ci /= cmax;
    }
    f = f_new;
    if (rel < 1e-9) {
      if (++stall >= 5) {
        out.converged = true;
        break;
      }
    } else {
      stall = 0;
    }
  }

  out.witness = partition_from_free(c);
  out.value = obj.value(out.witness);
  return out;
}

}  // namespace detail

namespace {

std::vector<int> default_ranges(const std::vector<StarSubalgebra>& algebras) {
  std::vector<int> r;
  r.reserve(algebras.size());
  for (const auto& a : algebras) r.push_back(std::max(1, a.rank()));
  return r;
}

// Best Thm-2.5-style upper bound: H(join) when computable, else sum H(N_i).
double cs_upper_bound(const std::vector<StarSubalgebra>& algebras,
                      const TraceFunctional& tau) {
  double sum = 0.0;
  for (const auto& a : algebras) sum += algebra_entropy(a, tau);
  if (algebras.size() == 1) return algebra_entropy(algebras[0], tau);
  try {
    std::vector<Matrix> gens;
    for (const auto& a : algebras)
      gens.insert(gens.end(), a.basis.begin(), a.basis.end());
    StarSubalgebra join = generated_algebra(gens, tau, 512);
    return std::min(sum, algebra_entropy(join, tau));
  } catch (const guard_error&) {
    return sum;
  }
}

template <typename MakeObjective>
EntropyEstimate run_partition_search(
    const std::vector<StarSubalgebra>& algebras, const OptimizerBudget& budget,
    const MakeObjective& make_objective, const std::vector<const Masa*>& masas) {
  const int dim = algebras.front().ambient_dim;
  std::vector<int> ranges =
      budget.index_ranges.empty() ? default_ranges(algebras) : budget.index_ranges;
  std::vector<int> caps;
  caps.reserve(ranges.size());
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    caps.push_back(2 * std::max(1, algebras[j].rank()));
  }

  EntropyEstimate est;
  est.restarts_used = 0;

  auto run_plan = [&](const std::vector<int>& rr, int restarts,
                      std::uint64_t seed) {
    auto obj = make_objective(rr);
    RestartPlan plan{rr, restarts, seed};
    detail::EngineResult res = best_over_restarts(
        *obj, plan, dim, budget.iterations,
        budget.structured_start ? &masas : nullptr);
    est.restarts_used += restarts;
    return res;
  };

  detail::EngineResult best = run_plan(ranges, budget.restarts, budget.seed_base);

  if (budget.grow_index_ranges) {
    const int probe_restarts = std::max(4, budget.restarts / 4);
    std::uint64_t probe_seed = budget.seed_base + 1000;
    for (;;) {
      bool can_grow = false;
      std::vector<int> grown = ranges;
      for (std::size_t j = 0; j < grown.size(); ++j) {
        if (grown[j] < caps[j]) {
          ++grown[j];
          can_grow = true;
        }
      }
      if (!can_grow) break;
      detail::EngineResult probe = run_plan(grown, probe_restarts, probe_seed);
      probe_seed += 1000;
      if (probe.value > best.value + 1e-4) {
        best = probe;
        ranges = grown;
      } else {
        break;
      }
    }
  }

  est.value = best.value;
  est.converged = best.converged;
  est.index_ranges = ranges;
  est.witness.arity = static_cast<int>(ranges.size());
  est.witness.index_ranges = ranges;
  est.witness.elements = best.witness;
  return est;
}

}  // namespace

EntropyEstimate maximize_cs_entropy(const std::vector<StarSubalgebra>& algebras,
                                    const TraceFunctional& tau,
                                    const OptimizerBudget& budget) {
  if (algebras.empty()) throw schema_error("maximize_cs_entropy: no algebras");
  require_uniform_trace(tau, "maximize_cs_entropy");
  std::vector<const Masa*> masas;
  for (const auto& a : algebras) masas.push_back(&a.masa);
  auto make = [&](const std::vector<int>& rr) {
    return std::make_unique<CsObjective>(algebras, tau, rr);
  };
  EntropyEstimate est = run_partition_search(algebras, budget, make, masas);
  est.upper_bound = cs_upper_bound(algebras, tau);
  if (est.value > est.upper_bound + 1e-6) {
    throw invariant_error("maximize_cs_entropy: witness beats the upper bound");
  }
  return est;
}

EntropyEstimate relative_algebra_entropy(const StarSubalgebra& n,
                                         const StarSubalgebra& p,
                                         const TraceFunctional& tau,
                                         const OptimizerBudget& budget) {
  if (n.ambient_dim != p.ambient_dim) {
    throw schema_error("relative_algebra_entropy: ambient mismatch");
  }
  require_uniform_trace(tau, "relative_algebra_entropy");
  if (is_subalgebra_of(n, p, tau)) {
    EntropyEstimate est;
    est.value = 0.0;
    est.upper_bound = 0.0;
    est.witness = PartitionOfUnity::trivial(n.ambient_dim);
    est.index_ranges = {1};
    est.converged = true;
    return est;
  }
  std::vector<StarSubalgebra> single{n};
  std::vector<const Masa*> masas{&n.masa};
  auto make = [&](const std::vector<int>& rr) {
    (void)rr;
    return std::make_unique<RelAlgObjective>(n, p, tau);
  };
  OptimizerBudget b = budget;
  if (b.index_ranges.empty()) b.index_ranges = {std::max(1, n.rank())};
  EntropyEstimate est = run_partition_search(single, b, make, masas);
  est.upper_bound = algebra_entropy(n, tau);
  return est;
}

double state_restriction_entropy(const StarSubalgebra& n, const Matrix& k,
                                 const TraceFunctional& tau) {
  const Matrix h = hermitian_part(conditional_expectation(n, k, tau));
  double s = 0.0;
  const int dim = n.ambient_dim;
  for (std::size_t l = 0; l < n.central_projections.size(); ++l) {
    const Matrix& z = n.central_projections[l];
    const int mult = n.block_spec.blocks[l].multiplicity;
    SpectralDecomposition d =
        eigh(HermitianOperator::trusted(hermitian_part(z * h * z)));
    // Corner spectrum repeats each physical eigenvalue `mult` times; the
    // canonical density eigenvalue is mu * mult / dim.
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
      const double mu = d.eigenvalues(i);
      if (mu <= 1e-14) continue;
      acc += eta_scalar(mu * mult / dim);
    }
    s += acc / mult;
  }
  return s;
}

EntropyEstimate cnt_entropy(const HermitianOperator& rho,
                            const std::vector<StarSubalgebra>& algebras,
                            const TraceFunctional& tau,
                            const OptimizerBudget& budget) {
  if (algebras.empty()) throw schema_error("cnt_entropy: no algebras");
  require_uniform_trace(tau, "cnt_entropy");
  const int dim = algebras.front().ambient_dim;
  if (rho.dim() != dim) throw schema_error("cnt_entropy: state dimension mismatch");
  const double tr = rho.mat.trace().real();
  if (std::abs(tr - 1.0) > 1e-8) {
    throw schema_error("cnt_entropy: state density must have unit trace");
  }
  const Matrix k_phi = rho.mat * static_cast<double>(dim);  // density w.r.t. tau

  std::vector<const Masa*> masas;
  for (const auto& a : algebras) masas.push_back(&a.masa);
  Matrix w = psd_sqrt(k_phi);
  auto make = [&](const std::vector<int>& rr) {
    return std::make_unique<CntObjective>(algebras, tau, rr, k_phi);
  };
  EntropyEstimate est = run_partition_search(algebras, budget, make, masas);

  // Certified decomposition k_I = W x_I W.
  StateDecomposition dec;
  dec.arity = est.witness.arity;
  dec.index_ranges = est.witness.index_ranges;
  for (const Matrix& x : est.witness.elements) {
    dec.densities.push_back(hermitian_part(w * x * w));
  }
  est.witness_decomposition = std::move(dec);

  // Upper bound: S(phi|_join) when the join is computable, else the sum of
  // per-algebra restriction entropies.
  double sum = 0.0;
  for (const auto& a : algebras) sum += state_restriction_entropy(a, k_phi, tau);
  double upper = sum;
  if (algebras.size() > 1) {
    try {
      std::vector<Matrix> gens;
      for (const auto& a : algebras)
        gens.insert(gens.end(), a.basis.begin(), a.basis.end());
      StarSubalgebra join = generated_algebra(gens, tau, 512);
      upper = std::min(sum, state_restriction_entropy(join, k_phi, tau));
    } catch (const guard_error&) {
    }
  }
  est.upper_bound = upper;
  if (est.value > est.upper_bound + 1e-6) {
    throw invariant_error("cnt_entropy: witness beats the upper bound");
  }
  return est;
}

}  // namespace nce
