#include "nce/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nce/binary_shift.hpp"
#include "nce/car.hpp"
#include "nce/dynamics.hpp"
#include "nce/entropy.hpp"
#include "nce/optimizer.hpp"
#include "nce/pressure.hpp"

namespace nce::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }

  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

// 1. H(M_n) = log n exactly; the optimizer reaches log n within 1e-3 in <10s.
CriterionResult criterion_1() {
  Check c;
  for (int n = 2; n <= 6; ++n) {
    const TraceFunctional tau = TraceFunctional::uniform(n);
    const StarSubalgebra mn = full_matrix_algebra(n, tau);
    const double h = algebra_entropy(mn, tau);
    c.require(std::abs(h - std::log(double(n))) <= 1e-12,
              "H(M_" + std::to_string(n) + ") = " + fmt(h));
  }
  const auto t0 = Clock::now();
  for (int n = 2; n <= 3; ++n) {
    const TraceFunctional tau = TraceFunctional::uniform(n);
    const StarSubalgebra mn = full_matrix_algebra(n, tau);
    EntropyEstimate est = maximize_cs_entropy({mn}, tau);
    c.require(est.value >= std::log(double(n)) - 1e-3,
              "optimizer M_" + std::to_string(n) + " reached only " + fmt(est.value));
    c.require(est.value <= est.upper_bound + 1e-6, "estimate above upper bound");
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.require(secs < 10.0, "optimizer runtime " + fmt(secs) + "s >= 10s");
  c.note("optimizer runtime " + fmt(secs) + "s");
  return {1, "H(M_n) = log n and optimizer reach", c.pass, c.detail.str(), 0};
}

// 2. 2-shift horizon bounds and the truncation-report correction.
CriterionResult criterion_2() {
  Check c;
  const double log2 = std::log(2.0);
  {
    ShiftSystem sys = ShiftSystem::trace_shift(2, 6);
    HorizonReport rep = horizon_entropy(sys, BlockRef{0, 1}, 6);
    c.require(rep.lower >= log2 - 1e-6, "lower " + fmt(rep.lower));
    c.require(std::abs(rep.upper_bound - log2) <= 1e-12,
              "upper " + fmt(rep.upper_bound));
    c.note("lower=" + fmt(rep.lower) + " upper=" + fmt(rep.upper_bound));
  }
  {
    ShiftSystem sys = ShiftSystem::trace_shift(2, 11);
    const int k = 4;
    std::vector<BlockRef> blocks;
    for (int q = 1; q <= 3; ++q) blocks.push_back(BlockRef{0, 2 * q});
    auto reports = ks_truncation_report(sys, blocks, k);
    for (int q = 1; q <= 3; ++q) {
      const double want = double(2 * q + k - 1) / k * log2;
      const double got = reports[q - 1].lower;
      c.require(std::abs(got - want) <= 2e-3,
                "ks q=" + std::to_string(q) + ": " + fmt(got) + " vs " + fmt(want));
    }
  }
  return {2, "n-shift: horizon bounds and KS truncation", c.pass, c.detail.str(), 0};
}

// 3. Bernoulli(0.3,0.7) per-step functional-decomposition estimate at k=6.
CriterionResult criterion_3() {
  Check c;
  const auto t0 = Clock::now();
  Matrix h(2, 2);
  h << 0.3, 0.0, 0.0, 0.7;
  ShiftSystem sys = ShiftSystem::make(2, HermitianOperator::make(h), 6,
                                      ShiftKind::Bernoulli);
  HorizonReport rep = horizon_entropy(sys, BlockRef{0, 1}, 6);
  const double target = eta_scalar(0.3) + eta_scalar(0.7);
  c.require(std::abs(rep.lower - target) <= 0.05,
            "per-step " + fmt(rep.lower) + " vs " + fmt(target));
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.require(secs < 60.0, "runtime " + fmt(secs) + "s >= 60s");
  c.note("per-step=" + fmt(rep.lower) + " target=" + fmt(target) + " in " +
         fmt(secs) + "s");
  return {3, "Bernoulli(0.3,0.7) per-step estimate", c.pass, c.detail.str(), 0};
}

// 4. Bogoliubov integral: constant symbols at 1024 panels.
CriterionResult criterion_4() {
  Check c;
  for (double lam : {0.5, 0.3, 0.8}) {
    for (int p = 1; p <= 3; ++p) {
      const double got = bogoliubov_entropy(SpectralSymbol::constant(lam, p), 1024);
      const double want = p * (eta_scalar(lam) + eta_scalar(1.0 - lam));
      c.require(std::abs(got - want) <= 1e-6,
                "lambda=" + fmt(lam) + " p=" + std::to_string(p) + ": " + fmt(got));
    }
  }
  const double half = bogoliubov_entropy(SpectralSymbol::constant(0.5, 1), 1024);
  c.require(std::abs(half - std::log(2.0)) <= 1e-12, "log 2 density: " + fmt(half));
  return {4, "Bogoliubov integral, constant symbols", c.pass, c.detail.str(), 0};
}

// 5. CAR relations and quasifree determinant vs explicit density.
CriterionResult criterion_5() {
  Check c;
  for (int m = 1; m <= 6; ++m) {
    CARSystem sys = build_car(m);
    const long long dim = sys.dim();
    const Matrix id = Matrix::Identity(dim, dim);
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const Matrix& ai = sys.annihilators[i];
        const Matrix& aj = sys.annihilators[j];
        worst = std::max(worst, max_abs(ai * aj + aj * ai));
        const double delta = i == j ? 1.0 : 0.0;
        worst = std::max(worst,
                         max_abs(ai * aj.adjoint() + aj.adjoint() * ai - delta * id));
      }
    }
    c.require(worst <= 1e-10, "CAR relations m=" + std::to_string(m));

    MatrixUnitSystem mu = matrix_units(sys);
    double mu_worst = 0.0;
    for (int n = 1; n <= m; ++n) {
      mu_worst = std::max(mu_worst, max_abs(mu.e(n, 1, 1) + mu.e(n, 2, 2) - id));
      for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
          for (int p = 1; p <= 2; ++p)
            for (int q = 1; q <= 2; ++q) {
              const Matrix want = j == p ? Matrix(mu.e(n, i, q))
                                         : Matrix(Matrix::Zero(dim, dim));
              mu_worst = std::max(mu_worst, max_abs(mu.e(n, i, j) * mu.e(n, p, q) - want));
            }
      for (int n2 = n + 1; n2 <= m; ++n2)
        for (int i = 1; i <= 2; ++i)
          for (int j = 1; j <= 2; ++j)
            for (int p = 1; p <= 2; ++p)
              for (int q = 1; q <= 2; ++q) {
                const Matrix a = mu.e(n, i, j), b = mu.e(n2, p, q);
                mu_worst = std::max(mu_worst, max_abs(a * b - b * a));
              }
    }
    c.require(mu_worst <= 1e-10, "matrix units m=" + std::to_string(m));
  }

  Rng rng(11);
  int done = 0;
  double worst = 0.0;
  while (done < 50) {
    const int m = 2 + static_cast<int>(rng.integer(4));  // 2..5 modes
    CARSystem sys = build_car(m);
    RVector lam(m);
    for (int i = 0; i < m; ++i) lam(i) = rng.uniform();
    Matrix a = lam.cast<Complex>().asDiagonal();
    const Matrix rho = quasifree_density(sys, lam);
    const int deg = 1 + static_cast<int>(rng.integer(2));  // 1..2 pairs
    WickMonomial mono;
    for (int t = 0; t < deg; ++t) {
      CVector f(m), g(m);
      for (int i = 0; i < m; ++i) {
        f(i) = rng.complex_normal();
        g(i) = rng.complex_normal();
      }
      mono.creators.push_back(f / std::sqrt(double(m)));
      mono.annihilators.push_back(g / std::sqrt(double(m)));
    }
    const Complex det = quasifree_eval(sys, HermitianOperator::trusted(a), mono);
    const Complex dens = (rho * monomial_operator(sys, mono)).trace();
    worst = std::max(worst, std::abs(det - dens));
    ++done;
  }
  c.require(worst <= 1e-9, "quasifree vs density worst " + fmt(worst));
  c.note("quasifree worst defect " + fmt(worst));
  return {5, "CAR relations and quasifree determinant", c.pass, c.detail.str(), 0};
}

// 6. Binary shifts: elimination vs center oracle, identities, parse.
CriterionResult criterion_6() {
  Check c;
  const double half_log2 = 0.5 * std::log(2.0);
  Rng rng(17);
  int streams_done = 0;
  int attempts = 0;
  while (streams_done < 20 && attempts < 400) {
    ++attempts;
    std::string s;
    for (int i = 0; i < 16; ++i) s.push_back(rng.integer(2) ? '1' : '0');
    Bitstream b;
    try {
      b = Bitstream::parse(s);
    } catch (const schema_error&) {
      continue;
    }
    if (b.all_zero()) continue;
    StructureSequence seq = structure_sequence(b, 16);
    bool has_zero = false;
    for (const auto& row : seq.rows) has_zero |= (row.c == 0);
    if (!has_zero) continue;  // keep streams whose mean touches the floor
    ++streams_done;

    double min_mean = std::numeric_limits<double>::infinity();
    for (const auto& row : seq.rows) {
      c.require(row.n == 2 * row.d + row.c, "n = 2d + c failed at n=" +
                                               std::to_string(row.n));
      SignStringRealization r = sign_string_realization(b, row.n, false);
      const int oracle = center_dimension_oracle(r);
      c.require(oracle == row.c, "oracle mismatch at n=" + std::to_string(row.n) +
                                     " bits=" + s);
      if (row.c == 0) {
        c.require(std::abs(row.mean - half_log2) <= 1e-15,
                  "mean at c=0 not half log 2 (n=" + std::to_string(row.n) + ")");
      }
      min_mean = std::min(min_mean, row.mean);
    }
    c.require(std::abs(min_mean - half_log2) <= 1e-15,
              "min mean " + fmt(min_mean) + " != half log 2 for bits=" + s);
    concatenation_decomposition(seq.c_sequence());  // throws on parse failure
    if (!c.pass) break;
  }
  c.require(streams_done == 20, "only " + std::to_string(streams_done) +
                                    " usable random bitstreams");
  return {6, "binary shifts: structure vs GF(2) center oracle", c.pass,
          c.detail.str(), 0};
}

// 7. X superset of odds: commuting t_j witness, traceless products.
CriterionResult criterion_7() {
  Check c;
  Bitstream b = Bitstream::parse("1010101010");  // odds within window 10
  SignStringRealization r = sign_string_realization(b, 10, true);
  std::vector<Matrix> t;
  for (int j = 1; j <= 5; ++j) {
    // s_{2j-1} s_{2j}; the generators are generalized permutations.
    t.push_back(genperm_multiply(r.dense[2 * j - 2], r.dense[2 * j - 1]));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      worst = std::max(worst, max_abs(genperm_multiply(t[i], t[j]) -
                                      genperm_multiply(t[j], t[i])));
    }
  }
  c.require(worst <= 1e-10, "t_j commutators up to " + fmt(worst));
  const long long dim = 1LL << r.qubits;
  double trace_worst = 0.0;
  for (unsigned mask = 1; mask < 32; ++mask) {
    Matrix p = Matrix::Identity(dim, dim);
    for (int j = 0; j < 5; ++j) {
      if (mask & (1u << j)) p = genperm_multiply(p, t[j]);
    }
    trace_worst = std::max(trace_worst, std::abs(p.trace()) / double(dim));
  }
  c.require(trace_worst <= 1e-10, "product trace up to " + fmt(trace_worst));
  c.note("qubits=" + std::to_string(r.qubits));
  return {7, "odd-bitstream commuting witness", c.pass, c.detail.str(), 0};
}

// 8. Gibbs equality and the finite-dimensional variational principle.
CriterionResult criterion_8() {
  Check c;
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 + static_cast<int>(rng.integer(15));  // 2..16
    const HermitianOperator h =
        HermitianOperator::trusted(random_hermitian(dim, rng));
    GibbsState g = gibbs_state(h);
    const double gap =
        variational_gap(HermitianOperator::trusted(g.density), h);
    c.require(gap <= 1e-8, "Gibbs gap " + fmt(gap));
    const double pressure = pressure_fd(h);
    for (int probe = 0; probe < 200; ++probe) {
      const Matrix rho = random_density(dim, rng);
      const double s =
          von_neumann_entropy(HermitianOperator::trusted(rho));
      const double val = s - (rho * h.mat).trace().real();
      c.require(val <= pressure + 1e-9, "density beat the pressure");
      if (!c.pass) break;
    }
    if (!c.pass) break;
  }
  return {8, "Gibbs equality and variational bound", c.pass, c.detail.str(), 0};
}

// 9. Peierls-Bogoliubov on random ordered pairs.
CriterionResult criterion_9() {
  Check c;
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + static_cast<int>(rng.integer(7));  // 2..8
    const Matrix h = random_hermitian(dim, rng);
    const Matrix k = h + random_psd(dim, rng);
    c.require(peierls_bogoliubov_check(HermitianOperator::trusted(h),
                                       HermitianOperator::trusted(k), 1e-9),
              "pair " + std::to_string(trial));
    if (!c.pass) break;
  }
  return {9, "Peierls-Bogoliubov inequality", c.pass, c.detail.str(), 0};
}

// 10. Shift pressure: exact flat cases and the transfer-matrix oracle.
CriterionResult criterion_10() {
  Check c;
  const auto t0 = Clock::now();
  {
    LocalHamiltonian zero;
    zero.site_dim = 2;
    zero.support = 1;
    zero.term = HermitianOperator::trusted(Matrix::Zero(2, 2));
    PressureSequence seq = shift_pressure_estimate(zero, 12);
    for (double v : seq.values) {
      c.require(std::abs(v - std::log(2.0)) <= 1e-12, "H=0 p_k " + fmt(v));
    }
  }
  {
    LocalHamiltonian single;
    single.site_dim = 2;
    single.support = 1;
    Matrix h(2, 2);
    h << 0.0, 0.0, 0.0, 1.0;
    single.term = HermitianOperator::trusted(h);
    PressureSequence seq = shift_pressure_estimate(single, 12);
    const double want = std::log(1.0 + std::exp(-1.0));
    for (double v : seq.values) {
      c.require(std::abs(v - want) <= 1e-12, "single-site p_k " + fmt(v));
    }
  }
  {
    LocalHamiltonian ising;
    ising.site_dim = 2;
    ising.support = 2;
    Matrix e = Matrix::Zero(4, 4);  // -J sigma sigma', J = 1
    e(0, 0) = -1.0;
    e(1, 1) = 1.0;
    e(2, 2) = 1.0;
    e(3, 3) = -1.0;
    ising.term = HermitianOperator::trusted(e);
    PressureSequence seq = shift_pressure_estimate(ising, 12);
    TransferOracle oracle = ising_transfer_oracle(ising, 12);
    const double got = seq.values.back();
    const double want = oracle.values.back();
    c.require(std::abs(got - want) <= 1e-3,
              "Ising p_12 " + fmt(got) + " vs oracle " + fmt(want));
    c.note("Ising p_12=" + fmt(got) + " oracle=" + fmt(want) +
           " log(lambda_max)=" + fmt(oracle.log_lambda_max));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.require(secs < 120.0, "runtime " + fmt(secs) + "s >= 120s");
  return {10, "shift pressure: flat cases and Ising oracle", c.pass,
          c.detail.str(), 0};
}

// 11. Property suites: partition positivity, relative-entropy identities,
// pressure properties at k = 10.
CriterionResult criterion_11() {
  Check c;
  Rng rng(31);
  {  // Lemma 2.3 nonnegativity on 1000 random S_2 partitions in M_2, M_3.
    double min_value = std::numeric_limits<double>::infinity();
    double min_stat = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 1000; ++trial) {
      const int dim = trial % 2 == 0 ? 2 : 3;
      const TraceFunctional tau = TraceFunctional::uniform(dim);
      std::vector<Matrix> free;
      for (int i = 0; i < 4; ++i) free.push_back(random_hermitian(dim, rng) +
                                                 random_hermitian(dim, rng) *
                                                     Complex(0, 1));
      std::vector<Matrix> x = detail::partition_from_free(free);
      // Slots of size 2 x 2: marginals over the flat layout.
      std::vector<Matrix> m1 = {x[0] + x[1], x[2] + x[3]};
      std::vector<Matrix> m2 = {x[0] + x[2], x[1] + x[3]};
      double value = 0.0;
      for (const Matrix& m : m1)
        value += tau_eta(HermitianOperator::trusted(hermitian_part(m)), tau);
      for (const Matrix& m : m2)
        value += tau_eta(HermitianOperator::trusted(hermitian_part(m)), tau);
      for (const Matrix& e : x)
        value -= tau_eta(HermitianOperator::trusted(hermitian_part(e)), tau);
      min_value = std::min(min_value, value);
      // Commutator statistic reported, not asserted (see docs).
      double stat = 0.0;
      for (const Matrix& a : m1) {
        const Matrix ra =
            matrix_function(HermitianOperator::trusted(hermitian_part(a)),
                            ScalarFn::Sqrt)
                .mat;
        for (const Matrix& b : m2) {
          const Matrix rb =
              matrix_function(HermitianOperator::trusted(hermitian_part(b)),
                              ScalarFn::Sqrt)
                  .mat;
          stat += 0.5 * tau_two_norm(ra * rb - rb * ra, tau);
        }
      }
      min_stat = std::min(min_stat, value - stat);
    }
    c.require(min_value >= -1e-9, "partition defect min " + fmt(min_value));
    c.note("min S_2 value " + fmt(min_value) + ", min (value - commutator stat) " +
           fmt(min_stat));
  }
  {  // Conditional-expectation identity, monotonicity, joint convexity.
    const int dim = 4;
    const TraceFunctional tau = TraceFunctional::uniform(dim);
    AlgebraBlockSpec spec;
    spec.ambient_dim = 4;
    spec.blocks = {BlockInfo{2, 2, 1.0}};
    const StarSubalgebra n = build_block_algebra(spec, tau);  // M_2 x 1_2
    for (int trial = 0; trial < 20; ++trial) {
      Matrix komega = random_psd(dim, rng);
      komega *= dim / komega.trace().real();  // density w.r.t. tau
      Matrix blk = random_psd(2, rng);
      // The canonical block embedding repeats M_2 along the diagonal.
      Matrix g = kron(Matrix::Identity(2, 2), blk);
      g *= dim / g.trace().real();
      const Matrix en = hermitian_part(conditional_expectation(n, komega, tau));
      const double lhs = relative_entropy(HermitianOperator::trusted(komega),
                                          HermitianOperator::trusted(g), tau);
      const double rhs =
          relative_entropy(HermitianOperator::trusted(en),
                           HermitianOperator::trusted(g), tau) +
          relative_entropy(HermitianOperator::trusted(komega),
                           HermitianOperator::trusted(en), tau);
      c.require(std::abs(lhs - rhs) <= 1e-8,
                "identity (2.6) defect " + fmt(std::abs(lhs - rhs)));

      const Matrix phi = random_psd(dim, rng);
      const Matrix omega = random_psd(dim, rng);
      const Matrix psi = omega + random_psd(dim, rng);
      const double s_psi = relative_entropy(HermitianOperator::trusted(phi),
                                            HermitianOperator::trusted(psi), tau);
      const double s_omega = relative_entropy(HermitianOperator::trusted(phi),
                                              HermitianOperator::trusted(omega), tau);
      c.require(s_psi <= s_omega + 1e-9, "monotonicity (2.7)");

      const Matrix x1 = random_psd(dim, rng), x2 = random_psd(dim, rng);
      const Matrix y1 = random_psd(dim, rng), y2 = random_psd(dim, rng);
      const double mixed = relative_entropy(
          HermitianOperator::trusted(0.5 * (x1 + x2)),
          HermitianOperator::trusted(0.5 * (y1 + y2)), tau);
      const double split =
          0.5 * relative_entropy(HermitianOperator::trusted(x1),
                                 HermitianOperator::trusted(y1), tau) +
          0.5 * relative_entropy(HermitianOperator::trusted(x2),
                                 HermitianOperator::trusted(y2), tau);
      c.require(mixed <= split + 1e-9, "joint convexity");
      if (!c.pass) break;
    }
  }
  {  // Pressure property suite at k = 10.
    LocalHamiltonian lh;
    lh.site_dim = 2;
    lh.support = 1;
    lh.term = HermitianOperator::trusted(random_hermitian(2, rng));
    PressureSuiteReport rep = pressure_property_suite(lh, 10, 5);
    for (const auto& chk : rep.checks) {
      c.require(chk.pass, chk.name + " defect " + fmt(chk.defect));
    }
  }
  return {11, "property suites (partitions, relative entropy, pressure)", c.pass,
          c.detail.str(), 0};
}

// 12. Inequality chain: CS lower bounds vs delta-rank upper bounds.
CriterionResult criterion_12() {
  Check c;
  ShiftSystem sys = ShiftSystem::trace_shift(2, 6);
  HorizonReport lower = horizon_entropy(sys, BlockRef{0, 1}, 6);
  ApproxEntropyReport upper = approx_entropy_report(sys, BlockRef{0, 1}, 0.25, 6);
  for (int kk = 1; kk <= 6; ++kk) {
    c.require(lower.per_step[kk - 1] <= upper.per_step[kk - 1] + 2e-3,
              "horizon " + std::to_string(kk) + ": " + fmt(lower.per_step[kk - 1]) +
                  " > " + fmt(upper.per_step[kk - 1]));
  }
  return {12, "inequality chain: CS lower vs delta-rank upper", c.pass,
          c.detail.str(), 0};
}

}  // namespace

bool run(std::ostream& out, const std::vector<int>& only) {
  using Fn = std::function<CriterionResult()>;
  const std::vector<Fn> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9,  criterion_10,
      criterion_11, criterion_12};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() &&
        std::find(only.begin(), only.end(), id) == only.end()) {
      continue;
    }
    const auto t0 = Clock::now();
    CriterionResult res;
    try {
      res = criteria[i]();
    } catch (const std::exception& e) {
      res.id = id;
      res.title = "criterion raised";
      res.pass = false;
      res.detail = e.what();
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    all = all && res.pass;
    out << (res.pass ? "[PASS]" : "[FAIL]") << " criterion " << res.id << ": "
        << res.title;
    if (!res.detail.empty()) out << " (" << res.detail << ")";
    out << " [" << std::fixed << std::setprecision(2) << res.seconds << "s]"
        << std::defaultfloat << "\n";
  }
  return all;
}

}  // namespace nce::acceptance
