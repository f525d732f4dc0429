// Command-line front door: parse inputs, dispatch to the library, emit
// JSON/CSV reports. Exit codes: 0 ok, 1 acceptance failure, 2 schema
// violation, 3 numerical guard exceeded, 4 internal invariant failure.

#include <cmath>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nce/acceptance.hpp"
#include "nce/binary_shift.hpp"
#include "nce/car.hpp"
#include "nce/dynamics.hpp"
#include "nce/entropy.hpp"
#include "nce/json_io.hpp"
#include "nce/optimizer.hpp"
#include "nce/pressure.hpp"
#include "nce/version.hpp"

namespace {

using namespace nce;

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

HermitianOperator hermitian_from_file(const std::string& path) {
  return HermitianOperator::make(matrix_from_json(json_read_file(path)));
}

std::vector<StarSubalgebra> algebras_from_files(const std::vector<std::string>& paths,
                                                int& ambient) {
  std::vector<StarSubalgebra> algebras;
  ambient = -1;
  for (const std::string& p : paths) {
    const Json j = json_read_file(p);
    int dim = 0;
    if (j.contains("ambient_dim")) {
      dim = j.at("ambient_dim").get<int>();
    } else if (j.contains("generators") && !j.at("generators").empty()) {
      dim = j.at("generators").front().at("dim").get<int>();
    } else {
      throw schema_error("algebra file " + p + ": cannot determine ambient");
    }
    if (ambient < 0) ambient = dim;
    if (ambient != dim) throw schema_error("algebra files disagree on ambient");
    algebras.push_back(algebra_from_json(j, TraceFunctional::uniform(dim)));
  }
  return algebras;
}

OptimizerBudget budget_from(int restarts, int iterations, std::uint64_t seed) {
  OptimizerBudget b;
  if (restarts > 0) b.restarts = restarts;
  if (iterations > 0) b.iterations = iterations;
  b.seed_base = seed;
  return b;
}

int dispatch(CLI::App& app) {
  // eta
  auto* eta_cmd = app.get_subcommand("eta");
  if (eta_cmd->parsed()) {
    const double t = eta_cmd->get_option("--t")->as<double>();
    Json j = report_base();
    j["eta"] = eta_scalar(t);
    emit(j);
    return 0;
  }
  // entropy
  auto* entropy_cmd = app.get_subcommand("entropy");
  if (entropy_cmd->parsed()) {
    const auto path = entropy_cmd->get_option("--state")->as<std::string>();
    Json j = report_base();
    j["S"] = von_neumann_entropy(hermitian_from_file(path));
    emit(j);
    return 0;
  }
  // relent
  auto* relent_cmd = app.get_subcommand("relent");
  if (relent_cmd->parsed()) {
    const auto xp = relent_cmd->get_option("--x")->as<std::string>();
    const auto yp = relent_cmd->get_option("--y")->as<std::string>();
    const HermitianOperator x = hermitian_from_file(xp);
    const HermitianOperator y = hermitian_from_file(yp);
    const double s = relative_entropy(x, y, TraceFunctional::uniform(x.dim()));
    Json j = report_base();
    j["infinite"] = (s == kInfiniteEntropy);
    if (s != kInfiniteEntropy) j["value"] = s;
    emit(j);
    return 0;
  }
  // cs-entropy
  auto* cs_cmd = app.get_subcommand("cs-entropy");
  if (cs_cmd->parsed()) {
    const auto files = cs_cmd->get_option("--algebra")->as<std::vector<std::string>>();
    int ambient = 0;
    auto algebras = algebras_from_files(files, ambient);
    const auto budget = budget_from(cs_cmd->get_option("--restarts")->as<int>(),
                                    cs_cmd->get_option("--iterations")->as<int>(),
                                    cs_cmd->get_option("--seed")->as<std::uint64_t>());
    EntropyEstimate est =
        maximize_cs_entropy(algebras, TraceFunctional::uniform(ambient), budget);
    const auto wfile = cs_cmd->get_option("--witness-out")->as<std::string>();
    if (!wfile.empty()) json_write_file(wfile, witness_to_json(est.witness));
    emit(estimate_to_json(est, wfile));
    return 0;
  }
  // relalg
  auto* relalg_cmd = app.get_subcommand("relalg");
  if (relalg_cmd->parsed()) {
    const auto nf = relalg_cmd->get_option("--n")->as<std::string>();
    const auto pf = relalg_cmd->get_option("--p")->as<std::string>();
    int ambient = 0;
    auto algebras = algebras_from_files({nf, pf}, ambient);
    const auto budget =
        budget_from(relalg_cmd->get_option("--restarts")->as<int>(),
                    relalg_cmd->get_option("--iterations")->as<int>(),
                    relalg_cmd->get_option("--seed")->as<std::uint64_t>());
    EntropyEstimate est = relative_algebra_entropy(
        algebras[0], algebras[1], TraceFunctional::uniform(ambient), budget);
    emit(estimate_to_json(est, ""));
    return 0;
  }
  // cnt
  auto* cnt_cmd = app.get_subcommand("cnt");
  if (cnt_cmd->parsed()) {
    const auto sp = cnt_cmd->get_option("--state")->as<std::string>();
    const auto files = cnt_cmd->get_option("--algebra")->as<std::vector<std::string>>();
    int ambient = 0;
    auto algebras = algebras_from_files(files, ambient);
    const auto budget = budget_from(cnt_cmd->get_option("--restarts")->as<int>(),
                                    cnt_cmd->get_option("--iterations")->as<int>(),
                                    cnt_cmd->get_option("--seed")->as<std::uint64_t>());
    EntropyEstimate est = cnt_entropy(hermitian_from_file(sp), algebras,
                                      TraceFunctional::uniform(ambient), budget);
    emit(estimate_to_json(est, ""));
    return 0;
  }
  // shift-entropy
  auto* shift_cmd = app.get_subcommand("shift-entropy");
  if (shift_cmd->parsed()) {
    const int d = shift_cmd->get_option("--site-dim")->as<int>();
    const int k = shift_cmd->get_option("--horizon")->as<int>();
    const int window = shift_cmd->get_option("--window")->as<int>();
    const auto mode = shift_cmd->get_option("--mode")->as<std::string>();
    const auto density_file = shift_cmd->get_option("--site-density")->as<std::string>();
    const double delta = shift_cmd->get_option("--delta")->as<double>();

    const int half = (window + 1) / 2;
    const int sites = 2 * half + 1;
    HermitianOperator site_state =
        density_file.empty()
            ? HermitianOperator::trusted(Matrix::Identity(d, d) / double(d))
            : hermitian_from_file(density_file);
    const ShiftKind kind = mode == "cnt" ? ShiftKind::Bernoulli : ShiftKind::TraceShift;
    ShiftSystem sys = ShiftSystem::make(d, site_state, sites, kind);
    sys.origin = half;
    if (mode == "rank") {
      emit(approx_report_to_json(
          approx_entropy_report(sys, BlockRef{0, 1}, delta, k)));
    } else {
      emit(horizon_report_to_json(horizon_entropy(sys, BlockRef{0, 1}, k)));
    }
    return 0;
  }
  // delta-rank
  auto* dr_cmd = app.get_subcommand("delta-rank");
  if (dr_cmd->parsed()) {
    const auto omega_files = dr_cmd->get_option("--omega")->as<std::vector<std::string>>();
    const double delta = dr_cmd->get_option("--delta")->as<double>();
    DeltaRankQuery q;
    q.delta = delta;
    for (const auto& f : omega_files) {
      q.omega.push_back(matrix_from_json(json_read_file(f)));
    }
    const int dim = static_cast<int>(q.omega.front().rows());
    if (dr_cmd->get_option("--candidate")->count() > 0) {
      const auto cand_files =
          dr_cmd->get_option("--candidate")->as<std::vector<std::string>>();
      for (const auto& f : cand_files) {
        q.candidates.push_back(
            algebra_from_json(json_read_file(f), TraceFunctional::uniform(dim)));
      }
    }
    DeltaRankResult res = delta_rank_upper(q, TraceFunctional::uniform(dim));
    Json j = report_base();
    j["rank"] = res.rank;
    j["log_rank"] = res.log_rank;
    j["achieved_by"] = res.achieved_by;
    j["scalar_distances"] = res.scalar_distances;
    emit(j);
    return 0;
  }
  // car verify
  auto* car_cmd = app.get_subcommand("car");
  if (car_cmd->parsed()) {
    auto* verify_cmd = car_cmd->get_subcommand("verify");
    const int m = verify_cmd->get_option("--modes")->as<int>();
    CARSystem sys = build_car(m);  // construction verifies the relations
    MatrixUnitSystem mu = matrix_units(sys);
    const long long dim = sys.dim();
    double worst_car = 0.0, worst_units = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const Matrix& ai = sys.annihilators[i];
        const Matrix& aj = sys.annihilators[j];
        worst_car = std::max(worst_car, max_abs(ai * aj + aj * ai));
        const double delta = i == j ? 1.0 : 0.0;
        worst_car = std::max(
            worst_car, max_abs(ai * aj.adjoint() + aj.adjoint() * ai -
                               delta * Matrix::Identity(dim, dim)));
      }
    }
    for (int n = 1; n <= m; ++n) {
      worst_units = std::max(
          worst_units,
          max_abs(mu.e(n, 1, 1) + mu.e(n, 2, 2) - Matrix::Identity(dim, dim)));
      worst_units =
          std::max(worst_units, max_abs(mu.e(n, 1, 2) * mu.e(n, 2, 1) - mu.e(n, 1, 1)));
    }
    Json j = report_base();
    j["modes"] = m;
    j["worst_car_defect"] = worst_car;
    j["worst_unit_defect"] = worst_units;
    emit(j);
    return 0;
  }
  // bogoliubov
  auto* bog_cmd = app.get_subcommand("bogoliubov");
  if (bog_cmd->parsed()) {
    const auto sf = bog_cmd->get_option("--symbol")->as<std::string>();
    const int panels = bog_cmd->get_option("--panels")->as<int>();
    SpectralSymbol sym = symbol_from_json(json_read_file(sf));
    Json j = report_base();
    j["entropy"] = bogoliubov_entropy(sym, panels);
    j["infinite"] = sym.infinite_flag;
    emit(j);
    return 0;
  }
  // binary-shift
  auto* bs_cmd = app.get_subcommand("binary-shift");
  if (bs_cmd->parsed()) {
    const auto bits = bs_cmd->get_option("--bits")->as<std::string>();
    const int max_n = bs_cmd->get_option("--max-n")->as<int>();
    const bool oracle = bs_cmd->get_option("--oracle")->as<bool>();
    const int dense_max = bs_cmd->get_option("--dense-max")->as<int>();
    Bitstream b = Bitstream::parse(bits);
    if (b.all_zero()) {
      std::cout << "# warning: all-zero window (the standing nonperiodicity "
                   "assumption cannot hold)\n";
    }
    if (auto p = b.smallest_consistent_period()) {
      std::cout << "# warning: window is consistent with period " << *p << "\n";
    }
    StructureSequence seq = structure_sequence(b, max_n);
    std::cout << "n,c_n,d_n,H_n,mean_n";
    if (oracle) std::cout << ",oracle_ok";
    std::cout << "\n";
    std::cout << std::setprecision(17);
    for (const auto& row : seq.rows) {
      std::cout << row.n << "," << row.c << "," << row.d << "," << row.h << ","
                << row.mean;
      if (oracle) {
        SignStringRealization r =
            sign_string_realization(b, row.n, row.n <= dense_max);
        std::cout << "," << (center_dimension_oracle(r) == row.c ? "true" : "false");
      }
      std::cout << "\n";
    }
    ConcatenationParse parse = concatenation_decomposition(seq.c_sequence());
    std::cout << "# parse m_i:";
    for (int m : parse.m_values) std::cout << " " << m;
    if (!parse.residual_tail.empty()) {
      std::cout << " | residual:";
      for (int v : parse.residual_tail) std::cout << " " << v;
    }
    std::cout << "\n";
    return 0;
  }
  // pressure
  auto* pr_cmd = app.get_subcommand("pressure");
  if (pr_cmd->parsed()) {
    LocalHamiltonian lh;
    lh.site_dim = pr_cmd->get_option("--site-dim")->as<int>();
    lh.support = pr_cmd->get_option("--support")->as<int>();
    lh.term = hermitian_from_file(pr_cmd->get_option("--term")->as<std::string>());
    const int kmax = pr_cmd->get_option("--kmax")->as<int>();
    Json j = report_base();
    j["sequence"] = pressure_sequence_to_json(shift_pressure_estimate(lh, kmax));
    if (pr_cmd->get_option("--ising-oracle")->as<bool>()) {
      TransferOracle oracle = ising_transfer_oracle(lh, kmax);
      j["transfer_oracle"] =
          Json{{"values", oracle.values}, {"log_lambda_max", oracle.log_lambda_max}};
    }
    if (pr_cmd->get_option("--suite")->as<bool>()) {
      const int k = std::min(kmax, 10);
      j["suite"] = pressure_suite_to_json(pressure_property_suite(
          lh, k, pr_cmd->get_option("--seed")->as<std::uint64_t>()));
    }
    emit(j);
    return 0;
  }
  // acceptance
  auto* acc_cmd = app.get_subcommand("acceptance");
  if (acc_cmd->parsed()) {
    std::vector<int> only;
    if (acc_cmd->get_option("--only")->count() > 0) {
      only = acc_cmd->get_option("--only")->as<std::vector<int>>();
    }
    const bool ok = nce::acceptance::run(std::cout, only);
    return ok ? 0 : 1;
  }
  std::cerr << app.help() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nce: dynamical entropy and pressure on finite-dimensional "
               "operator algebras"};
  app.set_version_flag("--version", std::string(nce::kVersion));
  app.require_subcommand(0, 1);

  auto* eta_cmd = app.add_subcommand("eta", "evaluate eta(t) = -t log t");
  eta_cmd->add_option("--t", "argument")->required();

  auto* entropy_cmd = app.add_subcommand("entropy", "von Neumann entropy of a state");
  entropy_cmd->add_option("--state", "density matrix JSON file")->required();

  auto* relent_cmd = app.add_subcommand("relent", "relative entropy S(x,y)");
  relent_cmd->add_option("--x", "PSD matrix JSON")->required();
  relent_cmd->add_option("--y", "PSD matrix JSON")->required();

  auto* cs_cmd = app.add_subcommand("cs-entropy", "multivariate entropy lower bound");
  cs_cmd->add_option("--algebra", "algebra JSON files")->required()->expected(1, -1);
  cs_cmd->add_option("--restarts", "restart count")->default_val(0);
  cs_cmd->add_option("--iterations", "iteration cap")->default_val(0);
  cs_cmd->add_option("--seed", "base seed")->default_val(0);
  cs_cmd->add_option("--witness-out", "witness JSON output path")->default_val("");

  auto* relalg_cmd = app.add_subcommand("relalg", "relative algebra entropy H(N|P)");
  relalg_cmd->add_option("--n", "algebra N JSON")->required();
  relalg_cmd->add_option("--p", "algebra P JSON")->required();
  relalg_cmd->add_option("--restarts", "restart count")->default_val(0);
  relalg_cmd->add_option("--iterations", "iteration cap")->default_val(0);
  relalg_cmd->add_option("--seed", "base seed")->default_val(0);

  auto* cnt_cmd = app.add_subcommand("cnt", "state-dependent entropy lower bound");
  cnt_cmd->add_option("--state", "density matrix JSON")->required();
  cnt_cmd->add_option("--algebra", "algebra JSON files")->required()->expected(1, -1);
  cnt_cmd->add_option("--restarts", "restart count")->default_val(0);
  cnt_cmd->add_option("--iterations", "iteration cap")->default_val(0);
  cnt_cmd->add_option("--seed", "base seed")->default_val(0);

  auto* shift_cmd = app.add_subcommand("shift-entropy", "finite-horizon shift entropy");
  shift_cmd->add_option("--site-dim", "site dimension d")->required();
  shift_cmd->add_option("--site-density", "site density JSON (default maximally mixed)")
      ->default_val("");
  shift_cmd->add_option("--horizon", "horizon k")->required();
  shift_cmd->add_option("--window", "window parameter L")->required();
  shift_cmd->add_option("--mode", "cs | cnt | rank")
      ->default_val("cs")
      ->check(CLI::IsMember({"cs", "cnt", "rank"}));
  shift_cmd->add_option("--delta", "delta for rank mode")->default_val(0.25);

  auto* dr_cmd = app.add_subcommand("delta-rank", "delta-rank upper bound");
  dr_cmd->add_option("--omega", "operator JSON files")->required()->expected(1, -1);
  dr_cmd->add_option("--delta", "delta")->required();
  dr_cmd->add_option("--candidate", "candidate algebra JSON files")->expected(0, -1);

  auto* car_cmd = app.add_subcommand("car", "CAR algebra tools");
  auto* car_verify = car_cmd->add_subcommand("verify", "verify the defining relations");
  car_verify->add_option("--modes", "mode count")->required();
  car_cmd->require_subcommand(1);

  auto* bog_cmd = app.add_subcommand("bogoliubov", "quasifree entropy integral");
  bog_cmd->add_option("--symbol", "symbol JSON file")->required();
  bog_cmd->add_option("--panels", "Simpson panel count (even)")->default_val(1024);

  auto* bs_cmd = app.add_subcommand("binary-shift", "binary shift structure sequences");
  bs_cmd->add_option("--bits", "bitstream, e.g. 0110100")->required();
  bs_cmd->add_option("--max-n", "largest stage n")->required();
  bs_cmd->add_flag("--oracle", "cross-check c_n against the GF(2) center oracle");
  bs_cmd->add_option("--dense-max", "largest n for dense verification")->default_val(8);

  auto* pr_cmd = app.add_subcommand("pressure", "finite-horizon shift pressure");
  pr_cmd->add_option("--site-dim", "site dimension d")->required();
  pr_cmd->add_option("--support", "term support s")->required();
  pr_cmd->add_option("--term", "term matrix JSON")->required();
  pr_cmd->add_option("--kmax", "largest horizon")->required();
  pr_cmd->add_flag("--suite", "run the property suite");
  pr_cmd->add_flag("--ising-oracle", "run the transfer-matrix oracle");
  pr_cmd->add_option("--seed", "suite seed")->default_val(0);

  auto* acc_cmd = app.add_subcommand("acceptance", "run the acceptance criteria");
  acc_cmd->add_flag("--all", "run every criterion (default)");
  acc_cmd->add_option("--only", "criterion ids to run")->expected(1, -1);

  CLI11_PARSE(app, argc, argv);

  try {
    return dispatch(app);
  } catch (const nce::schema_error& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return nce::schema_error::exit_code;
  } catch (const nce::guard_error& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return nce::guard_error::exit_code;
  } catch (const nce::invariant_error& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return nce::invariant_error::exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
