#include "nce/json_io.hpp"

#include <fstream>

#include "nce/version.hpp"

namespace nce {

Json matrix_to_json(const Matrix& m) {
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      entries.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
  }
  return Json{{"dim", m.rows()}, {"entries", entries}};
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw schema_error("matrix JSON must carry \"dim\" and \"entries\"");
  }
  const int dim = j.at("dim").get<int>();
  const Json& entries = j.at("entries");
  if (dim < 1 || !entries.is_array() ||
      entries.size() != static_cast<std::size_t>(dim) * dim) {
    throw schema_error("matrix JSON: dim * dim must equal the entry count");
  }
  Matrix m(dim, dim);
  std::size_t idx = 0;
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c, ++idx) {
      const Json& e = entries[idx];
      if (!e.is_array() || e.size() != 2) {
        throw schema_error("matrix JSON: entries must be [re, im] pairs");
      }
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) {
        throw schema_error("matrix JSON: entries must be finite");
      }
    }
  }
  return m;
}

Json json_read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema_error("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw schema_error("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

Json matrix_read_file(const std::string& path) { return json_read_file(path); }

void json_write_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw schema_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

StarSubalgebra algebra_from_json(const Json& j, const TraceFunctional& tau) {
  if (j.contains("blocks")) {
    AlgebraBlockSpec spec;
    spec.ambient_dim = j.at("ambient_dim").get<int>();
    for (const Json& b : j.at("blocks")) {
      BlockInfo info;
      info.block_dim = b.at("n").get<int>();
      info.multiplicity = b.at("m").get<int>();
      info.central_trace = b.at("t").get<double>();
      spec.blocks.push_back(info);
    }
    return build_block_algebra(spec, tau);
  }
  if (j.contains("generators")) {
    std::vector<Matrix> gens;
    for (const Json& g : j.at("generators")) gens.push_back(matrix_from_json(g));
    return generated_algebra(gens, tau);
  }
  throw schema_error("algebra JSON must carry \"blocks\" or \"generators\"");
}

SpectralSymbol symbol_from_json(const Json& j) {
  SpectralSymbol s;
  if (!j.contains("theta") || !j.contains("eigenvalues")) {
    throw schema_error("symbol JSON must carry \"theta\" and \"eigenvalues\"");
  }
  const auto& th = j.at("theta");
  const auto& ev = j.at("eigenvalues");
  if (!th.is_array() || !ev.is_array() || th.size() != ev.size()) {
    throw schema_error("symbol JSON: theta/eigenvalues size mismatch");
  }
  s.theta.resize(th.size());
  for (std::size_t i = 0; i < th.size(); ++i) {
    s.theta(i) = th[i].get<double>();
    RVector lams(ev[i].size());
    for (std::size_t l = 0; l < ev[i].size(); ++l) lams(l) = ev[i][l].get<double>();
    s.eigenvalues.push_back(std::move(lams));
  }
  s.infinite_flag = j.value("infinite", false);
  s.validate();
  return s;
}

Json report_base() { return Json{{"version", kVersion}}; }

Json witness_to_json(const PartitionOfUnity& p) {
  Json elements = Json::array();
  for (int f = 0; f < p.flat_size(); ++f) {
    elements.push_back(Json{{"index", p.multi_index(f)},
                            {"matrix", matrix_to_json(p.elements[f])}});
  }
  Json j = report_base();
  j["arity"] = p.arity;
  j["index_ranges"] = p.index_ranges;
  j["elements"] = elements;
  return j;
}

Json estimate_to_json(const EntropyEstimate& est, const std::string& witness_file) {
  Json j = report_base();
  j["value"] = est.value;
  j["upper_bound"] = est.upper_bound;
  j["restarts_used"] = est.restarts_used;
  j["converged"] = est.converged;
  j["index_ranges"] = est.index_ranges;
  j["witness_file"] = witness_file;
  return j;
}

Json horizon_report_to_json(const HorizonReport& rep) {
  Json j = report_base();
  j["k"] = rep.k;
  j["block"] = Json{{"first", rep.block.first}, {"width", rep.block.width}};
  j["step"] = rep.step;
  j["per_step"] = rep.per_step;
  j["upper_per_step"] = rep.upper_per_step;
  j["per_site"] = rep.per_site;
  j["join_sites"] = rep.join_sites;
  j["lower"] = rep.lower;
  j["upper_bound"] = rep.upper_bound;
  j["lower_witness"] = rep.lower_witness;
  return j;
}

Json approx_report_to_json(const ApproxEntropyReport& rep) {
  Json j = report_base();
  j["delta"] = rep.delta;
  j["k_max"] = rep.k_max;
  j["log_rank"] = rep.log_rank;
  j["per_step"] = rep.per_step;
  j["achieved_width"] = rep.achieved_width;
  return j;
}

Json pressure_sequence_to_json(const PressureSequence& seq) {
  Json j = report_base();
  j["horizons"] = seq.horizons;
  j["values"] = seq.values;
  j["last"] = seq.last;
  j["aitken"] = seq.aitken;
  return j;
}

Json pressure_suite_to_json(const PressureSuiteReport& rep) {
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"pass", c.pass},
                          {"defect", c.defect},
                          {"bound", c.bound}});
  }
  Json j = report_base();
  j["k"] = rep.k;
  j["checks"] = checks;
  j["all_pass"] = rep.all_pass();
  return j;
}

}  // namespace nce
