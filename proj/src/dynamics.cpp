#include "nce/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace nce {

ShiftSystem ShiftSystem::make(int site_dim, const HermitianOperator& site_state,
                              int window_sites, ShiftKind kind) {
  if (site_state.dim() != site_dim) {
    throw schema_error("ShiftSystem: site state dimension mismatch");
  }
  SpectralDecomposition d = eigh(site_state);
  double tr = d.eigenvalues.sum();
  if (std::abs(tr - 1.0) > 1e-8 || d.eigenvalues(0) < -1e-9) {
    throw schema_error("ShiftSystem: site state must be a density operator");
  }
  ShiftSystem sys;
  sys.site_dim = site_dim;
  sys.site_density = d.eigenvalues.cwiseMax(0.0);
  sys.window_sites = window_sites;
  sys.kind = kind;
  return sys;
}

ShiftSystem ShiftSystem::trace_shift(int site_dim, int window_sites) {
  ShiftSystem sys;
  sys.site_dim = site_dim;
  sys.site_density = RVector::Constant(site_dim, 1.0 / site_dim);
  sys.window_sites = window_sites;
  sys.kind = ShiftKind::TraceShift;
  return sys;
}

namespace {

std::vector<int> union_sites(BlockRef block, int kk, int step) {
  std::set<int> s;
  for (int j = 0; j < kk; ++j) {
    for (int w = 0; w < block.width; ++w) s.insert(block.first + j * step + w);
  }
  return std::vector<int>(s.begin(), s.end());
}

std::vector<int> digits(long long pattern, int len, int d) {
  std::vector<int> out(len);
  for (int i = len - 1; i >= 0; --i) {
    out[i] = static_cast<int>(pattern % d);
    pattern /= d;
  }
  return out;
}

struct WitnessValue {
  double lower = 0.0;
  double upper = 0.0;
};

// Remark-2.13 style diagonal product partition over the joined sites; exact
// evaluation through the diagonal path. Upper bound: entropy of the joined
// site algebra via its masa projections.
WitnessValue diagonal_witness(const ShiftSystem& sys, BlockRef block, int kk,
                              int step) {
  const ChainSpace chain = sys.chain();
  const int d = sys.site_dim;
  const std::vector<int> u = union_sites(block, kk, step);
  long long patterns = 1;
  for (std::size_t i = 0; i < u.size(); ++i) {
    patterns *= d;
    if (patterns > (1 << 20)) throw guard_error("diagonal witness: union too large");
  }

  double eta_tau_sum = 0.0;
  for (long long pat = 0; pat < patterns; ++pat) {
    const RVector cyl = cylinder_indicator(chain, u, digits(pat, u.size(), d));
    eta_tau_sum += eta_scalar(cyl.mean());
  }

  // Marginal terms: the slot-j marginal is the cylinder over the block-j
  // sites, already inside N_j; tau eta of its expectation.
  double marginal_sum = 0.0;
  long long bpat = 1;
  for (int w = 0; w < block.width; ++w) bpat *= d;
  for (int j = 0; j < kk; ++j) {
    std::vector<int> bsites;
    for (int w = 0; w < block.width; ++w) bsites.push_back(block.first + j * step + w);
    for (long long pat = 0; pat < bpat; ++pat) {
      const RVector cyl =
          cylinder_indicator(chain, bsites, digits(pat, bsites.size(), d));
      const RVector e = partial_average_diag(chain, cyl, bsites);
      marginal_sum += mean_eta(e);
    }
  }

  WitnessValue v;
  v.lower = eta_tau_sum - marginal_sum;
  // Join of the translated blocks = full algebra over u; H = sum eta tau(e)
  // over its diagonal masa, which is the eta_tau_sum enumeration itself.
  v.upper = eta_tau_sum;
  return v;
}

// Prop-3.10 style witness: decompose the product state along the diagonal
// masas (they lie in the centralizer since the site density is diagonal).
WitnessValue centralizer_witness(const ShiftSystem& sys, BlockRef block, int kk,
                                 int step) {
  const ChainSpace chain = sys.chain();
  const int d = sys.site_dim;
  const std::vector<int> u = union_sites(block, kk, step);
  long long patterns = 1;
  for (std::size_t i = 0; i < u.size(); ++i) {
    patterns *= d;
    if (patterns > (1 << 20)) throw guard_error("centralizer witness: union too large");
  }
  const RVector k_phi = product_diag(chain, sys.site_density) * double(chain.dim());

  double eta_sum = 0.0;
  for (long long pat = 0; pat < patterns; ++pat) {
    const RVector cyl = cylinder_indicator(chain, u, digits(pat, u.size(), d));
    const double mass = (k_phi.array() * cyl.array()).mean();
    eta_sum += eta_scalar(std::max(0.0, mass));
  }

  double s_sum = 0.0;
  long long bpat = 1;
  for (int w = 0; w < block.width; ++w) bpat *= d;
  for (int j = 0; j < kk; ++j) {
    std::vector<int> bsites;
    for (int w = 0; w < block.width; ++w) bsites.push_back(block.first + j * step + w);
    const RVector b = partial_average_diag(chain, k_phi, bsites);
    for (long long pat = 0; pat < bpat; ++pat) {
      const RVector cyl =
          cylinder_indicator(chain, bsites, digits(pat, bsites.size(), d));
      const RVector km = k_phi.array() * cyl.array();
      const RVector rest = partial_average_diag(chain, km, bsites);
      const double s = diag_relative_entropy(rest, b);
      if (s == kInfiniteEntropy) {
        throw invariant_error("centralizer witness: support leak");
      }
      s_sum += s;
    }
  }

  WitnessValue v;
  v.lower = eta_sum + s_sum;
  // S(phi|_join): the joined-site restriction of the product state is the
  // classical marginal, whose entropy is the eta_sum enumeration.
  v.upper = eta_sum;
  return v;
}

// Generic optimizer fallback on the materialized window (small windows only).
WitnessValue optimizer_witness(const ShiftSystem& sys, BlockRef block, int kk,
                               int step, const OptimizerBudget* budget) {
  const ChainSpace chain = sys.chain();
  chain.require_dense(64);
  const TraceFunctional tau = TraceFunctional::uniform(static_cast<int>(chain.dim()));
  std::vector<StarSubalgebra> algebras;
  for (int j = 0; j < kk; ++j) {
    algebras.push_back(
        site_interval_algebra(chain, block.first + j * step, block.width, tau));
  }
  OptimizerBudget b = budget != nullptr ? *budget : OptimizerBudget::defaults();
  WitnessValue v;
  if (sys.kind == ShiftKind::TraceShift) {
    EntropyEstimate est = maximize_cs_entropy(algebras, tau, b);
    v.lower = est.value;
    v.upper = est.upper_bound;
  } else {
    const RVector rho_diag = product_diag(chain, sys.site_density);
    Matrix rho = rho_diag.cast<Complex>().asDiagonal();
    EntropyEstimate est =
        cnt_entropy(HermitianOperator::trusted(rho), algebras, tau, b);
    v.lower = est.value;
    v.upper = est.upper_bound;
  }
  return v;
}

}  // namespace

HorizonReport horizon_entropy(const ShiftSystem& sys, BlockRef block, int k,
                              int step, HorizonMethod method,
                              const OptimizerBudget* budget) {
  if (k < 1 || block.width < 1 || block.first < 0) {
    throw schema_error("horizon_entropy: bad block or horizon");
  }
  const int last_site = block.first + block.width - 1 + (k - 1) * std::max(step, 0);
  if (last_site >= sys.window_sites) {
    std::ostringstream os;
    os << "horizon_entropy: horizon needs site " << last_site
       << " beyond the materialized window of " << sys.window_sites << " sites";
    throw guard_error(os.str());
  }
  HorizonMethod m = method;
  if (m == HorizonMethod::Auto) {
    m = sys.kind == ShiftKind::TraceShift ? HorizonMethod::Diagonal
                                          : HorizonMethod::CentralizerMasa;
  }

  HorizonReport rep;
  rep.k = k;
  rep.block = block;
  rep.step = step;
  switch (m) {
    case HorizonMethod::Diagonal:
      rep.lower_witness = "diagonal";
      break;
    case HorizonMethod::CentralizerMasa:
      rep.lower_witness = "centralizer-masa";
      break;
    default:
      rep.lower_witness = "optimizer";
  }

  for (int kk = 1; kk <= k; ++kk) {
    WitnessValue v;
    switch (m) {
      case HorizonMethod::Diagonal:
        v = diagonal_witness(sys, block, kk, step);
        break;
      case HorizonMethod::CentralizerMasa:
        v = centralizer_witness(sys, block, kk, step);
        break;
      default:
        v = optimizer_witness(sys, block, kk, step, budget);
    }
    const int us = static_cast<int>(union_sites(block, kk, step).size());
    rep.join_sites.push_back(us);
    rep.per_step.push_back(v.lower / kk);
    rep.upper_per_step.push_back(v.upper / kk);
    rep.per_site.push_back(v.lower / us);
    if (v.lower > v.upper + 1e-6) {
      throw invariant_error("horizon_entropy: lower bound exceeds upper bound");
    }
  }
  rep.lower = rep.per_step.back();
  rep.upper_bound = rep.upper_per_step.back();
  return rep;
}

std::vector<HorizonReport> ks_truncation_report(const ShiftSystem& sys,
                                                const std::vector<BlockRef>& blocks,
                                                int k) {
  for (std::size_t j = 1; j < blocks.size(); ++j) {
    if (blocks[j].width < blocks[j - 1].width ||
        blocks[j].first > blocks[j - 1].first) {
      throw schema_error("ks_truncation_report: blocks must be ascending");
    }
  }
  std::vector<HorizonReport> reports;
  for (const BlockRef& b : blocks) reports.push_back(horizon_entropy(sys, b, k));
  for (std::size_t j = 1; j < reports.size(); ++j) {
    if (reports[j].lower < reports[j - 1].lower - 2e-3) {
      throw invariant_error("ks_truncation_report: reports not monotone");
    }
  }
  return reports;
}

namespace {

double operator_norm(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.adjoint() * x, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues()(es.eigenvalues().size() - 1);
  return top <= 0.0 ? 0.0 : std::sqrt(top);
}

void require_contractions(const std::vector<Matrix>& omega) {
  for (const Matrix& x : omega) {
    if (operator_norm(x) > 1.0 + 1e-9) {
      throw schema_error("omega elements must have operator norm <= 1");
    }
  }
}

}  // namespace

SubsetCheckResult subset_delta_check(const std::vector<Matrix>& omega,
                                     const StarSubalgebra& a, double delta,
                                     const TraceFunctional& tau) {
  require_contractions(omega);
  SubsetCheckResult res;
  res.inside = true;
  for (const Matrix& x : omega) {
    const Matrix e = conditional_expectation(a, x, tau);
    const double dist = tau_two_norm(x - e, tau);
    res.distances.push_back(dist);
    if (!(dist < delta)) res.inside = false;
  }
  return res;
}

DeltaRankResult delta_rank_upper(const DeltaRankQuery& q, const TraceFunctional& tau) {
  require_contractions(q.omega);
  if (q.omega.empty()) throw schema_error("delta_rank_upper: empty omega");
  const int dim = static_cast<int>(q.omega.front().rows());

  DeltaRankResult best;
  best.rank = dim;  // the full ambient always succeeds
  best.log_rank = std::log(double(dim));
  best.achieved_by = -1;

  // Scalars: E_{C1}(x) = tau(x) 1.
  bool scalars_ok = true;
  DeltaRankResult scalar_probe;
  for (const Matrix& x : q.omega) {
    const Matrix e = tau.apply(x) * Matrix::Identity(dim, dim);
    const double dist = tau_two_norm(x - e, tau);
    scalar_probe.scalar_distances.push_back(dist);
    if (!(dist < q.delta)) scalars_ok = false;
  }
  best.scalar_distances = scalar_probe.scalar_distances;
  if (scalars_ok) {
    best.rank = 1;
    best.log_rank = 0.0;
    best.achieved_by = -2;
    return best;
  }

  for (std::size_t i = 0; i < q.candidates.size(); ++i) {
    const StarSubalgebra& a = q.candidates[i];
    const long long rank = a.rank();
    if (rank >= best.rank) continue;
    if (subset_delta_check(q.omega, a, q.delta, tau).inside) {
      best.rank = rank;
      best.log_rank = std::log(double(rank));
      best.achieved_by = static_cast<int>(i);
    }
  }
  return best;
}

ApproxEntropyReport approx_entropy_report(const ShiftSystem& sys, BlockRef block,
                                          double delta, int k_max, int direction,
                                          int step) {
  if (direction != 1 && direction != -1) {
    throw schema_error("approx_entropy_report: direction must be +1 or -1");
  }
  if (step < 0) throw schema_error("approx_entropy_report: step must be >= 0");
  const ChainSpace chain = sys.chain();
  chain.require_dense(4096);
  const int dim = static_cast<int>(chain.dim());
  const TraceFunctional tau = TraceFunctional::uniform(dim);
  const int d = sys.site_dim;

  // Matrix units of the block algebra and their shift orbit.
  long long bd = 1;
  for (int w = 0; w < block.width; ++w) bd *= d;
  auto block_units = [&](int first) {
    std::vector<Matrix> units;
    for (long long r = 0; r < bd; ++r) {
      for (long long c = 0; c < bd; ++c) {
        Matrix e = Matrix::Zero(bd, bd);
        e(r, c) = 1.0;
        units.push_back(embed_interval_operator(chain, e, first));
      }
    }
    return units;
  };

  ApproxEntropyReport rep;
  rep.delta = delta;
  rep.k_max = k_max;

  std::vector<Matrix> orbit;
  for (int kk = 1; kk <= k_max; ++kk) {
    const int j = kk - 1;
    const int first = block.first + j * step * direction;
    if (first < 0 || first + block.width > sys.window_sites) {
      throw guard_error("approx_entropy_report: orbit leaves the window");
    }
    auto units = block_units(first);
    orbit.insert(orbit.end(), units.begin(), units.end());
    require_contractions(orbit);

    // Scalars first, then interval joins by ascending rank.
    bool found = false;
    double log_rank = std::log(double(dim));
    int width = sys.window_sites;
    {
      bool ok = true;
      for (const Matrix& x : orbit) {
        const Matrix e = tau.apply(x) * Matrix::Identity(dim, dim);
        if (!(tau_two_norm(x - e, tau) < delta)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        found = true;
        log_rank = 0.0;
        width = 0;
      }
    }
    for (int m = 1; m <= sys.window_sites && !found; ++m) {
      for (int a = 0; a + m <= sys.window_sites && !found; ++a) {
        bool ok = true;
        for (const Matrix& x : orbit) {
          const Matrix e = interval_expectation(chain, x, a, m);
          if (!(tau_two_norm(x - e, tau) < delta)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          found = true;
          log_rank = m * std::log(double(d));
          width = m;
        }
      }
    }
    rep.log_rank.push_back(log_rank);
    rep.per_step.push_back(log_rank / kk);
    rep.achieved_width.push_back(width);
  }
  return rep;
}

}  // namespace nce
