#include "hetcoef/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hetcoef/errors.hpp"

namespace hetcoef {

using nlohmann::json;

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

[[noreturn]] void rethrow_as_data_error(const std::string& what,
                                        const json::exception& e) {
  throw DataError(what + ": " + e.what());
}

}  // namespace

json basis_to_json(const BasisSpec& spec) {
  json doc;
  doc["kind"] = to_string(spec.kind);
  doc["dimension"] = spec.dimension;
  switch (spec.kind) {
    case BasisKind::kBspline:
      doc["domain"] = {spec.domain_lo, spec.domain_hi};
      if (!spec.knots.empty()) doc["knots"] = spec.knots;
      break;
    case BasisKind::kIndicator:
      if (!spec.edges.empty()) doc["edges"] = spec.edges;
      break;
    case BasisKind::kTreatmentDummies:
      doc["treatments"] = spec.treatment_count;
      break;
    default:
      break;
  }
  return doc;
}

BasisSpec basis_from_json(const json& doc) {
  try {
    const BasisKind kind = basis_kind_from_string(doc.at("kind"));
    switch (kind) {
      case BasisKind::kPower:
        return BasisSpec::Power(doc.at("dimension"));
      case BasisKind::kBspline: {
        double lo = 0.0, hi = 1.0;
        if (doc.contains("domain")) {
          lo = doc["domain"].at(0);
          hi = doc["domain"].at(1);
        }
        return BasisSpec::Bspline(
            doc.at("dimension"), lo, hi,
            doc.value("knots", std::vector<double>{}));
      }
      case BasisKind::kIndicator:
        return BasisSpec::Indicator(
            doc.at("dimension"), doc.value("edges", std::vector<double>{}));
      case BasisKind::kTreatmentDummies:
        return BasisSpec::TreatmentDummies(doc.at("treatments"));
    }
    throw DataError("unknown basis kind");
  } catch (const json::exception& e) {
    rethrow_as_data_error("invalid basis spec", e);
  }
}

json dgp_config_to_json(const DgpConfig& config) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = to_string(config.kind);
  doc["p"] = basis_to_json(config.p_spec);
  doc["heterogeneity"] = {
      {"mean", to_vector(config.heterogeneity.mean)},
      {"noise_scale", config.heterogeneity.noise_scale},
      {"rho", config.heterogeneity.rho},
      {"dependence", to_string(config.heterogeneity.dependence)}};
  if (config.kind == DgpKind::kTriangular) {
    doc["instrument"] = {{"values", config.instrument.values},
                         {"probs", config.instrument.probs}};
    doc["first_stage"] = {{"intercepts", config.first_stage.intercepts},
                          {"slopes", config.first_stage.slopes}};
  } else {
    doc["treatment"] = {{"intercepts", config.treatment.intercepts},
                        {"slopes", config.treatment.slopes}};
  }
  doc["emit_v"] = config.emit_v;
  doc["seed"] = config.seed;
  return doc;
}

DgpConfig dgp_config_from_json(const json& doc) {
  try {
    DgpConfig config;
    config.kind = dgp_kind_from_string(doc.at("kind"));
    config.p_spec = basis_from_json(doc.at("p"));
    const json& het = doc.at("heterogeneity");
    config.heterogeneity.mean =
        to_eigen(het.at("mean").get<std::vector<double>>());
    config.heterogeneity.noise_scale = het.value("noise_scale", 1.0);
    config.heterogeneity.rho = het.value("rho", 0.0);
    config.heterogeneity.dependence =
        dependence_from_string(het.value("dependence", "linear"));
    if (config.kind == DgpKind::kTriangular) {
      const json& instrument = doc.at("instrument");
      config.instrument.values =
          instrument.at("values").get<std::vector<double>>();
      config.instrument.probs =
          instrument.at("probs").get<std::vector<double>>();
      const json& first_stage = doc.at("first_stage");
      config.first_stage.intercepts =
          first_stage.at("intercepts").get<std::vector<double>>();
      config.first_stage.slopes =
          first_stage.at("slopes").get<std::vector<double>>();
    } else {
      const json& treatment = doc.at("treatment");
      config.treatment.intercepts =
          treatment.at("intercepts").get<std::vector<double>>();
      config.treatment.slopes =
          treatment.at("slopes").get<std::vector<double>>();
    }
    config.emit_v = doc.value("emit_v", true);
    config.seed = doc.value("seed", std::uint64_t{0});
    config.validate();
    return config;
  } catch (const json::exception& e) {
    rethrow_as_data_error("invalid dgp config", e);
  }
}

json ground_truth_to_json(const GroundTruth& truth) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["p"] = basis_to_json(truth.p_spec);
  doc["mean_epsilon"] = to_vector(truth.mean_epsilon);
  if (truth.ate) {
    doc["ate"] = to_vector(*truth.ate);
  } else {
    doc["ate"] = nullptr;
  }
  return doc;
}

json fitted_model_to_json(const FittedModel& model) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["b"] = to_vector(model.b);
  doc["p"] = basis_to_json(model.p_spec);
  doc["psi"] = basis_to_json(model.psi_spec);
  doc["ridge"] = model.ridge;
  doc["gram_min_eigenvalue"] = model.gram_min_eigenvalue;
  doc["n"] = model.n;
  doc["v_bin_edges"] = model.v_bin_edges;
  return doc;
}

FittedModel fitted_model_from_json(const json& doc) {
  try {
    FittedModel model;
    model.b = to_eigen(doc.at("b").get<std::vector<double>>());
    model.p_spec = basis_from_json(doc.at("p"));
    model.psi_spec = basis_from_json(doc.at("psi"));
    model.ridge = doc.value("ridge", 0.0);
    model.gram_min_eigenvalue = doc.value("gram_min_eigenvalue", 0.0);
    model.n = doc.value("n", 0);
    model.v_bin_edges =
        doc.value("v_bin_edges", std::vector<double>{});
    if (model.b.size() !=
        static_cast<Eigen::Index>(model.p_spec.dimension) *
            model.psi_spec.dimension)
      throw DataError("fitted model b length does not match J*K");
    return model;
  } catch (const json::exception& e) {
    rethrow_as_data_error("invalid fitted model", e);
  }
}

namespace {

void put_if_finite(json& doc, const char* key, double value) {
  if (!std::isnan(value)) doc[key] = value;
}

}  // namespace

json diagnostics_report_to_json(const DiagnosticsReport& report) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["n"] = report.n;
  doc["n_bins"] = report.n_bins;
  doc["p"] = basis_to_json(report.p_spec);

  json verdicts = json::object();
  for (const auto& [name, verdict] : report.overall_verdicts)
    verdicts[name] = {{"status", to_string(verdict.status)},
                      {"detail", verdict.detail}};
  doc["verdicts"] = verdicts;

  json bins = json::array();
  json support_profile = json::array();
  json propensity_profile = json::array();
  for (const BinRecord& rec : report.per_bin) {
    json bin;
    bin["v_lo"] = rec.v_lo;
    bin["v_hi"] = rec.v_hi;
    bin["count"] = rec.count;
    bin["adequate"] = rec.adequate;
    if (rec.second_moment.size() > 0) {
      json m = json::array();
      for (Eigen::Index r = 0; r < rec.second_moment.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < rec.second_moment.cols(); ++c)
          row.push_back(rec.second_moment(r, c));
        m.push_back(row);
      }
      bin["second_moment"] = m;
    }
    put_if_finite(bin, "min_eigenvalue", rec.min_eigenvalue);
    put_if_finite(bin, "max_eigenvalue", rec.max_eigenvalue);
    put_if_finite(bin, "propensity", rec.propensity);
    put_if_finite(bin, "determinant", rec.determinant);
    put_if_finite(bin, "propensity_variance", rec.propensity_variance);
    if (!rec.treatment_freqs.empty()) {
      bin["treatment_freqs"] = rec.treatment_freqs;
      put_if_finite(bin, "exclusive_gap", rec.exclusive_gap);
    }
    if (!rec.cell_quantiles.empty())
      bin["cell_quantiles"] = rec.cell_quantiles;
    if (rec.support_cardinality >= 0)
      bin["support_cardinality"] = rec.support_cardinality;
    bins.push_back(std::move(bin));

    if (rec.support_cardinality >= 0)
      support_profile.push_back(rec.support_cardinality);
    if (!std::isnan(rec.propensity)) {
      propensity_profile.push_back(rec.propensity);
    } else if (!rec.treatment_freqs.empty()) {
      propensity_profile.push_back(rec.treatment_freqs);
    }
  }
  doc["bins"] = bins;
  if (!support_profile.empty()) doc["support_profile"] = support_profile;
  if (!propensity_profile.empty())
    doc["propensity_profile"] = propensity_profile;
  return doc;
}

json mc_config_to_json(const McConfig& config) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["dgp"] = dgp_config_to_json(config.dgp);
  doc["p"] = basis_to_json(config.p_spec);
  doc["psi_kind"] = to_string(config.psi_kind);
  doc["k_grid"] = config.k_grid;
  doc["ridge"] = config.ridge;
  doc["n_grid"] = config.n_grid;
  doc["replications"] = config.replications;
  doc["base_seed"] = config.base_seed;
  doc["x_grid"] = config.x_grid;
  doc["holdout_n"] = config.holdout_n;
  doc["threads"] = config.threads;
  return doc;
}

McConfig mc_config_from_json(const json& doc) {
  try {
    McConfig config;
    config.dgp = dgp_config_from_json(doc.at("dgp"));
    config.p_spec = doc.contains("p") ? basis_from_json(doc.at("p"))
                                      : config.dgp.p_spec;
    config.psi_kind =
        basis_kind_from_string(doc.value("psi_kind", "indicator"));
    config.k_grid = doc.at("k_grid").get<std::vector<int>>();
    config.ridge = doc.value("ridge", 0.0);
    for (const auto& n : doc.at("n_grid"))
      config.n_grid.push_back(n.get<Eigen::Index>());
    config.replications = doc.value("replications", 1);
    config.base_seed = doc.value("base_seed", std::uint64_t{0});
    config.x_grid = doc.value("x_grid", std::vector<double>{});
    config.holdout_n = doc.value("holdout_n", Eigen::Index{50000});
    config.threads = doc.value("threads", 1);
    config.validate();
    return config;
  } catch (const json::exception& e) {
    rethrow_as_data_error("invalid mc config", e);
  }
}

json mc_report_to_json(const McReport& report) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json cells = json::array();
  for (const McCell& cell : report.cells) {
    json c;
    c["n"] = cell.n;
    c["k"] = cell.k;
    c["target"] = cell.target;
    put_if_finite(c, "truth", cell.truth);
    put_if_finite(c, "mean_estimate", cell.mean_estimate);
    put_if_finite(c, "bias", cell.bias);
    put_if_finite(c, "rmse", cell.rmse);
    put_if_finite(c, "mean_gram_min_eigenvalue",
                  cell.mean_gram_min_eigenvalue);
    c["failures"] = cell.failures;
    c["successes"] = cell.successes;
    put_if_finite(c, "holdout_mse", cell.holdout_mse);
    put_if_finite(c, "insample_mse", cell.insample_mse);
    cells.push_back(std::move(c));
  }
  doc["cells"] = cells;
  return doc;
}

void write_eigenvalue_profile_csv(const DiagnosticsReport& report,
                                  std::ostream& out) {
  out << "bin,v_lo,v_hi,count,adequate,min_eigenvalue,max_eigenvalue,"
         "support_cardinality,propensity,exclusive_gap\n";
  auto put = [&out](double value) {
    if (!std::isnan(value)) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", value);
      out << buf;
    }
  };
  for (std::size_t b = 0; b < report.per_bin.size(); ++b) {
    const BinRecord& rec = report.per_bin[b];
    out << b << ',' << rec.v_lo << ',' << rec.v_hi << ',' << rec.count
        << ',' << (rec.adequate ? 1 : 0) << ',';
    put(rec.min_eigenvalue);
    out << ',';
    put(rec.max_eigenvalue);
    out << ',';
    if (rec.support_cardinality >= 0) out << rec.support_cardinality;
    out << ',';
    put(rec.propensity);
    out << ',';
    put(rec.exclusive_gap);
    out << '\n';
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    json doc;
    in >> doc;
    return doc;
  } catch (const json::exception& e) {
    throw DataError("cannot parse JSON in '" + path + "': " + e.what());
  }
}

void save_json_file(const json& doc, const std::string& path) {
  write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace hetcoef
