#pragma once

#include <string>

#include "json.hpp"
#include "nce/algebra.hpp"
#include "nce/car.hpp"
#include "nce/dynamics.hpp"
#include "nce/linalg.hpp"
#include "nce/optimizer.hpp"
#include "nce/pressure.hpp"

namespace nce {

using Json = nlohmann::json;

/// Matrix schema: {"dim": n, "entries": [[re, im], ...]} row-major.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json matrix_read_file(const std::string& path);
Json json_read_file(const std::string& path);
void json_write_file(const std::string& path, const Json& j);

/// Algebra schema: {"ambient_dim": N, "blocks": [{"n":..,"m":..,"t":..}]}
/// or {"generators": [matrix, ...]} (closure computed).
StarSubalgebra algebra_from_json(const Json& j, const TraceFunctional& tau);

/// Symbol schema: {"theta": [...], "eigenvalues": [[...], ...], "infinite": bool}.
SpectralSymbol symbol_from_json(const Json& j);

Json witness_to_json(const PartitionOfUnity& p);
Json estimate_to_json(const EntropyEstimate& est, const std::string& witness_file);
Json horizon_report_to_json(const HorizonReport& rep);
Json approx_report_to_json(const ApproxEntropyReport& rep);
Json pressure_sequence_to_json(const PressureSequence& seq);
Json pressure_suite_to_json(const PressureSuiteReport& rep);

/// {"version": ...} stamp present in every report.
Json report_base();

}  // namespace nce
