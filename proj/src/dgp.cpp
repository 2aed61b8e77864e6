#include "hetcoef/dgp.hpp"

#include <cmath>
#include <numeric>

#include "hetcoef/errors.hpp"
#include "hetcoef/rng.hpp"

namespace hetcoef {

std::string to_string(DgpKind kind) {
  switch (kind) {
    case DgpKind::kTriangular:
      return "triangular";
    case DgpKind::kBinaryTreatment:
      return "binary_treatment";
    case DgpKind::kMultiTreatment:
      return "multi_treatment";
  }
  return "unknown";
}

DgpKind dgp_kind_from_string(const std::string& name) {
  if (name == "triangular") return DgpKind::kTriangular;
  if (name == "binary_treatment") return DgpKind::kBinaryTreatment;
  if (name == "multi_treatment") return DgpKind::kMultiTreatment;
  throw DataError("unknown dgp kind '" + name + "'");
}

std::string to_string(Dependence dep) {
  switch (dep) {
    case Dependence::kLinear:
      return "linear";
    case Dependence::kSine:
      return "sine";
    case Dependence::kStep4:
      return "step4";
  }
  return "unknown";
}

Dependence dependence_from_string(const std::string& name) {
  if (name == "linear") return Dependence::kLinear;
  if (name == "sine") return Dependence::kSine;
  if (name == "step4") return Dependence::kStep4;
  throw DataError("unknown dependence transform '" + name + "'");
}

double dependence_value(Dependence dep, double eta) {
  switch (dep) {
    case Dependence::kLinear:
      return eta - 0.5;
    case Dependence::kSine:
      return std::sin(2.0 * M_PI * eta);
    case Dependence::kStep4: {
      static const double levels[4] = {-0.75, -0.25, 0.25, 0.75};
      int bin = static_cast<int>(eta * 4.0);
      if (bin > 3) bin = 3;
      if (bin < 0) bin = 0;
      return levels[bin];
    }
  }
  return 0.0;
}

void DgpConfig::validate() const {
  p_spec.validate();
  if (heterogeneity.mean.size() != p_spec.dimension)
    throw DataError("heterogeneity mean length must equal dim(p)");
  if (heterogeneity.noise_scale < 0.0)
    throw DataError("noise_scale must be >= 0");

  if (kind == DgpKind::kTriangular) {
    const std::size_t m = instrument.values.size();
    if (m < 1) throw DataError("instrument needs at least one support point");
    if (instrument.probs.size() != m ||
        first_stage.intercepts.size() != m || first_stage.slopes.size() != m)
      throw DataError(
          "instrument probs and first-stage coefficients must match the "
          "support size");
    double total = 0.0;
    for (double p : instrument.probs) {
      if (!(p > 0.0)) throw DataError("instrument probabilities must be > 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw DataError("instrument probabilities must sum to 1");
    for (double b : first_stage.slopes)
      if (!(b > 0.0))
        throw DataError("first-stage slope b(z) must be > 0 for every z");
  } else {
    const std::size_t t = treatment.intercepts.size();
    if (t < 1 || treatment.slopes.size() != t)
      throw DataError("treatment probabilities are missing or mismatched");
    if (kind == DgpKind::kBinaryTreatment && t != 1)
      throw DataError("binary_treatment takes exactly one probability");
    if (kind == DgpKind::kMultiTreatment) {
      if (p_spec.kind != BasisKind::kTreatmentDummies ||
          p_spec.treatment_count != static_cast<int>(t))
        throw DataError(
            "multi_treatment requires a treatment_dummies p basis with "
            "matching T");
    }
    // Affine probabilities: checking both endpoints of [0,1] bounds them
    // everywhere.
    for (double v : {0.0, 1.0}) {
      double total = 0.0;
      for (std::size_t s = 0; s < t; ++s) {
        const double ps = treatment.intercepts[s] + treatment.slopes[s] * v;
        if (ps < 0.0)
          throw DataError("treatment probability negative on [0,1]");
        total += ps;
      }
      if (total > 1.0 + 1e-12)
        throw DataError("treatment probabilities exceed 1 on [0,1]");
    }
  }
}

namespace {

Eigen::VectorXd draw_epsilon(const HeterogeneitySpec& het, double eta,
                             Philox& rng) {
  const Eigen::Index j = het.mean.size();
  Eigen::VectorXd eps(j);
  const double g = dependence_value(het.dependence, eta);
  for (Eigen::Index c = 0; c < j; ++c)
    eps[c] = het.mean[c] + het.rho * g + het.noise_scale * rng.normal();
  return eps;
}

}  // namespace

GroundTruth ground_truth(const DgpConfig& config) {
  config.validate();
  GroundTruth truth;
  truth.p_spec = config.p_spec;
  truth.mean_epsilon = config.heterogeneity.mean;
  if (config.kind != DgpKind::kTriangular) {
    const int t_count = static_cast<int>(config.treatment.intercepts.size());
    const bool dummies = config.p_spec.kind == BasisKind::kTreatmentDummies;
    const Eigen::VectorXd base =
        Eigen::VectorXd::Zero(dummies ? t_count : 1);
    const Eigen::VectorXd p0 = eval_p(config.p_spec, base);
    Eigen::VectorXd ate(t_count);
    for (int s = 0; s < t_count; ++s) {
      Eigen::VectorXd treated = base;
      treated[dummies ? s : 0] = 1.0;
      ate[s] = (eval_p(config.p_spec, treated) - p0)
                   .dot(config.heterogeneity.mean);
    }
    truth.ate = std::move(ate);
  }
  return truth;
}

std::pair<Dataset, GroundTruth> simulate(const DgpConfig& config,
                                         Eigen::Index n, std::uint64_t seed) {
  GroundTruth truth = ground_truth(config);
  if (n < 1) throw DataError("n must be >= 1");

  Philox rng(seed);
  Dataset data;
  data.y.resize(n);

  if (config.kind == DgpKind::kTriangular) {
    data.x.resize(n, 1);
    std::vector<int> z(n);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int zi = rng.categorical(config.instrument.probs);
      const double eta = rng.uniform_open();
      const Eigen::VectorXd eps =
          draw_epsilon(config.heterogeneity, eta, rng);
      const double x = config.first_stage.intercepts[zi] +
                       config.first_stage.slopes[zi] * eta;
      z[i] = zi;
      v[i] = eta;  // h is strictly increasing in eta, so F_{X|Z}(X|Z) = eta
      data.x(i, 0) = x;
      data.y[i] = eval_p(config.p_spec, x).dot(eps);
    }
    data.z = std::move(z);
    if (config.emit_v) data.v = std::move(v);
  } else {
    const int t_count = static_cast<int>(config.treatment.intercepts.size());
    const bool dummies = config.p_spec.kind == BasisKind::kTreatmentDummies;
    data.x.resize(n, dummies ? t_count : 1);
    Eigen::VectorXd v(n);
    std::vector<double> probs(t_count + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double vi = rng.uniform_open();
      double total = 0.0;
      for (int s = 0; s < t_count; ++s) {
        double ps = config.treatment.intercepts[s] +
                    config.treatment.slopes[s] * vi;
        ps = std::max(0.0, std::min(1.0, ps));
        probs[s + 1] = ps;
        total += ps;
      }
      probs[0] = std::max(0.0, 1.0 - total);  // no-treatment cell
      const int arm = rng.categorical(probs);
      const Eigen::VectorXd eps =
          draw_epsilon(config.heterogeneity, vi, rng);
      Eigen::VectorXd xrow = Eigen::VectorXd::Zero(data.x.cols());
      if (arm > 0) xrow[dummies ? arm - 1 : 0] = 1.0;
      data.x.row(i) = xrow.transpose();
      v[i] = vi;
      data.y[i] = eval_p(config.p_spec, xrow).dot(eps);
    }
    if (config.emit_v) data.v = std::move(v);
  }

  data.validate();
  return {std::move(data), std::move(truth)};
}

std::pair<Dataset, GroundTruth> simulate(const DgpConfig& config,
                                         Eigen::Index n) {
  return simulate(config, n, config.seed);
}

double true_asf(const GroundTruth& truth, const Eigen::VectorXd& x) {
  return eval_p(truth.p_spec, x).dot(truth.mean_epsilon);
}

double true_asf(const GroundTruth& truth, double x) {
  return eval_p(truth.p_spec, x).dot(truth.mean_epsilon);
}

Eigen::VectorXd true_q0(const DgpConfig& config, double v) {
  return config.heterogeneity.mean.array() +
         config.heterogeneity.rho *
             dependence_value(config.heterogeneity.dependence, v);
}

double true_crf(const DgpConfig& config, const Eigen::VectorXd& x, double v) {
  return eval_p(config.p_spec, x).dot(true_q0(config, v));
}

}  // namespace hetcoef
