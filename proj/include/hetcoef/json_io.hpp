#ifndef HETCOEF_JSON_IO_HPP_
#define HETCOEF_JSON_IO_HPP_

#include <json.hpp>
#include <string>

#include "hetcoef/basis.hpp"
#include "hetcoef/dgp.hpp"
#include "hetcoef/diagnostics.hpp"
#include "hetcoef/estimator.hpp"
#include "hetcoef/montecarlo.hpp"

namespace hetcoef {

// All top-level documents carry `"schema_version": 1`.
inline constexpr int kSchemaVersion = 1;

nlohmann::json basis_to_json(const BasisSpec& spec);
BasisSpec basis_from_json(const nlohmann::json& doc);

nlohmann::json dgp_config_to_json(const DgpConfig& config);
DgpConfig dgp_config_from_json(const nlohmann::json& doc);

nlohmann::json ground_truth_to_json(const GroundTruth& truth);

nlohmann::json fitted_model_to_json(const FittedModel& model);
FittedModel fitted_model_from_json(const nlohmann::json& doc);

nlohmann::json diagnostics_report_to_json(const DiagnosticsReport& report);

nlohmann::json mc_config_to_json(const McConfig& config);
McConfig mc_config_from_json(const nlohmann::json& doc);
nlohmann::json mc_report_to_json(const McReport& report);

// Per-bin eigenvalue profile in plot-ready CSV form.
void write_eigenvalue_profile_csv(const DiagnosticsReport& report,
                                  std::ostream& out);

nlohmann::json load_json_file(const std::string& path);
// Atomic: serialize, then rename into place.
void save_json_file(const nlohmann::json& doc, const std::string& path);

}  // namespace hetcoef

#endif  // HETCOEF_JSON_IO_HPP_
