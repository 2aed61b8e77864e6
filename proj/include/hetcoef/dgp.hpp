#ifndef HETCOEF_DGP_HPP_
#define HETCOEF_DGP_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hetcoef/basis.hpp"
#include "hetcoef/dataset.hpp"

namespace hetcoef {

enum class DgpKind { kTriangular, kBinaryTreatment, kMultiTreatment };

// Zero-mean transforms g(eta) carrying the dependence of the coefficients
// on the first-stage disturbance; zero mean keeps E[eps] equal to the
// configured mean vector, so the true ASF stays analytic.
enum class Dependence { kLinear, kSine, kStep4 };

std::string to_string(DgpKind kind);
DgpKind dgp_kind_from_string(const std::string& name);
std::string to_string(Dependence dep);
Dependence dependence_from_string(const std::string& name);

// g(eta) for eta in [0,1]: eta - 1/2, sin(2*pi*eta), or a zero-mean step
// function on quartiles.
double dependence_value(Dependence dep, double eta);

struct InstrumentSpec {
  std::vector<double> values;  // support points z_1..z_M
  std::vector<double> probs;   // strictly positive, sum to one
};

// Affine first stage per instrument support point:
// X = intercepts[m] + slopes[m] * eta, slopes[m] > 0, eta ~ Uniform(0,1).
struct FirstStageSpec {
  std::vector<double> intercepts;
  std::vector<double> slopes;
};

struct HeterogeneitySpec {
  Eigen::VectorXd mean;       // E[eps], length J
  double noise_scale = 1.0;   // sigma of the per-coefficient normal noise
  double rho = 0.0;           // strength of the dependence channel
  Dependence dependence = Dependence::kLinear;
};

// Treatment assignment probabilities, affine in the observable control:
// Pr(treatment t | V) = intercepts[t] + slopes[t] * V. A binary design
// has one entry; a multi-treatment design has T entries that must keep
// the total probability within [0,1] on all of [0,1].
struct TreatmentSpec {
  std::vector<double> intercepts;
  std::vector<double> slopes;
};

struct DgpConfig {
  DgpKind kind = DgpKind::kTriangular;
  BasisSpec p_spec;
  InstrumentSpec instrument;    // triangular designs
  FirstStageSpec first_stage;   // triangular designs
  HeterogeneitySpec heterogeneity;
  TreatmentSpec treatment;      // treatment designs
  bool emit_v = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  BasisSpec p_spec;
  Eigen::VectorXd mean_epsilon;
  // mu(t) - mu(0) per treatment arm; absent for triangular designs.
  std::optional<Eigen::VectorXd> ate;
};

// The analytic truth implied by a configuration; no draws involved.
GroundTruth ground_truth(const DgpConfig& config);

// Draws n i.i.d. rows. Bit-identical output for identical
// (config, n, seed).
std::pair<Dataset, GroundTruth> simulate(const DgpConfig& config,
                                         Eigen::Index n);
std::pair<Dataset, GroundTruth> simulate(const DgpConfig& config,
                                         Eigen::Index n, std::uint64_t seed);

// mu(x) = p(x)' E[eps].
double true_asf(const GroundTruth& truth, const Eigen::VectorXd& x);
double true_asf(const GroundTruth& truth, double x);

// q0(v) = E[eps | V=v] = mean + rho * g(v); the true varying coefficient.
Eigen::VectorXd true_q0(const DgpConfig& config, double v);

// p(x)' q0(v), the true control regression function.
double true_crf(const DgpConfig& config, const Eigen::VectorXd& x, double v);

}  // namespace hetcoef

#endif  // HETCOEF_DGP_HPP_
