#ifndef HETCOEF_ESTIMATOR_HPP_
#define HETCOEF_ESTIMATOR_HPP_

#include <Eigen/Dense>
#include <vector>

#include "hetcoef/basis.hpp"
#include "hetcoef/control.hpp"
#include "hetcoef/dataset.hpp"

namespace hetcoef {

// Least-squares fit of Y on p(X) (x) psi^K(V). The coefficient vector is
// laid out as b = (b_1', ..., b_J')' so q_j(v) = b_j' psi(v).
struct FittedModel {
  Eigen::VectorXd b;
  BasisSpec p_spec;
  BasisSpec psi_spec;  // indicator bin edges are frozen in here at fit time
  double ridge = 0.0;
  double gram_min_eigenvalue = 0.0;
  Eigen::Index n = 0;
  std::vector<double> v_bin_edges;
};

// Replaces default indicator bins with empirical quantile bins of v_hat
// so that the K cells hold equal mass. Other basis kinds pass through.
BasisSpec freeze_indicator_edges(const BasisSpec& psi_spec,
                                 const Eigen::VectorXd& v_hat);

// The n x (J*K) interaction matrix with rows p(x_i) (x) psi(v_hat_i).
Eigen::MatrixXd materialize_design(const Dataset& data,
                                   const ControlEstimate& control,
                                   const BasisSpec& p_spec,
                                   const BasisSpec& psi_spec);

// Minimizes mean squared residual plus ridge * ||b||^2 via a symmetric
// eigendecomposition of the Gram matrix. The smallest eigenvalue of the
// unpenalized Gram matrix is always computed; with ridge = 0 a value
// below 1e-10 * JK * (largest eigenvalue) raises IdentificationError.
FittedModel fit(const Dataset& data, const ControlEstimate& control,
                const BasisSpec& p_spec, const BasisSpec& psi_spec,
                double ridge = 0.0);

// q_hat(v): the J fitted varying coefficients at v in [0,1].
Eigen::VectorXd q_hat(const FittedModel& model, double v);

// p(x)' q_hat(v), the fitted control regression function.
double predict_crf(const FittedModel& model, const Eigen::VectorXd& x,
                   double v);
double predict_crf(const FittedModel& model, double x, double v);

// Sample-analog average structural function p(x)' mean_i q_hat(v_i).
double asf(const FittedModel& model, const ControlEstimate& control,
           const Eigen::VectorXd& x);
double asf(const FittedModel& model, const ControlEstimate& control,
           double x);

// asf at each treatment arm minus asf at the baseline. Length 1 for a
// binary design (power basis on x in {0,1}), length T for
// treatment_dummies.
Eigen::VectorXd ate(const FittedModel& model, const ControlEstimate& control);

// mean_i [dp(x_i)/dx]' q_hat(v_i) for differentiable scalar bases.
double average_derivative(const FittedModel& model, const Dataset& data,
                          const ControlEstimate& control);

// Mean squared residual of the fit on the given sample.
double in_sample_mse(const FittedModel& model, const Dataset& data,
                     const ControlEstimate& control);

}  // namespace hetcoef

#endif  // HETCOEF_ESTIMATOR_HPP_
