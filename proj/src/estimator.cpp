#include "hetcoef/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hetcoef/errors.hpp"
#include "hetcoef/quantile.hpp"

namespace hetcoef {

BasisSpec freeze_indicator_edges(const BasisSpec& psi_spec,
                                 const Eigen::VectorXd& v_hat) {
  if (psi_spec.kind != BasisKind::kIndicator || !psi_spec.edges.empty())
    return psi_spec;
  const int k = psi_spec.dimension;
  std::vector<double> sorted(v_hat.data(), v_hat.data() + v_hat.size());
  std::sort(sorted.begin(), sorted.end());
  BasisSpec frozen = psi_spec;
  frozen.edges.resize(k - 1);
  for (int c = 1; c < k; ++c)
    frozen.edges[c - 1] =
        sorted_quantile(sorted, static_cast<double>(c) / k);
  for (int c = 1; c < k - 1; ++c) {
    if (frozen.edges[c] <= frozen.edges[c - 1])
      throw DataError(
          "v has too few distinct values to form " + std::to_string(k) +
          " indicator bins");
  }
  frozen.validate();
  return frozen;
}

Eigen::MatrixXd materialize_design(const Dataset& data,
                                   const ControlEstimate& control,
                                   const BasisSpec& p_spec,
                                   const BasisSpec& psi_spec) {
  const Eigen::Index n = data.n();
  Eigen::MatrixXd design(n, p_spec.dimension * psi_spec.dimension);
  for (Eigen::Index i = 0; i < n; ++i)
    design.row(i) =
        design_row(p_spec, psi_spec, data.x.row(i).transpose(),
                   control.v_hat[i])
            .transpose();
  return design;
}

FittedModel fit(const Dataset& data, const ControlEstimate& control,
                const BasisSpec& p_spec, const BasisSpec& psi_spec,
                double ridge) {
  p_spec.validate();
  psi_spec.validate();
  if (ridge < 0.0) throw DataError("ridge must be >= 0");
  const Eigen::Index n = data.n();
  if (control.v_hat.size() != n)
    throw DataError("control estimate does not match the dataset rows");
  const Eigen::Index jk =
      static_cast<Eigen::Index>(p_spec.dimension) * psi_spec.dimension;
  if (n <= jk)
    throw DataError("need n > J*K observations, have n=" +
                    std::to_string(n) + ", J*K=" + std::to_string(jk));

  const BasisSpec psi = freeze_indicator_edges(psi_spec, control.v_hat);

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(jk, jk);
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(jk);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd row = design_row(
        p_spec, psi, data.x.row(i).transpose(), control.v_hat[i]);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(row, 1.0);
    moment.noalias() += row * data.y[i];
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  gram /= static_cast<double>(n);
  moment /= static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw DataError("eigendecomposition of the Gram matrix failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lambda_min = lambda[0];
  const double lambda_max = lambda[jk - 1];
  const double tol = 1e-10 * static_cast<double>(jk) * lambda_max;

  if (ridge == 0.0 && lambda_min < tol) {
    std::ostringstream msg;
    msg << "design Gram matrix is numerically singular: min eigenvalue "
        << lambda_min << " < tolerance " << tol
        << "; the conditional second moment of p(X) given V is rank "
           "deficient, which with a discrete instrument happens whenever "
           "the instrument support carries fewer than dim(p) distinct "
           "first-stage responses (pass --ridge to regularize anyway)";
    throw IdentificationError(msg.str(), lambda_min, tol);
  }

  FittedModel model;
  model.b.resize(jk);
  // b = V diag(1/(lambda + ridge)) V' moment.
  const Eigen::VectorXd rotated = eig.eigenvectors().transpose() * moment;
  Eigen::VectorXd scaled(jk);
  for (Eigen::Index i = 0; i < jk; ++i)
    scaled[i] = rotated[i] / (lambda[i] + ridge);
  model.b = eig.eigenvectors() * scaled;
  model.p_spec = p_spec;
  model.psi_spec = psi;
  model.ridge = ridge;
  model.gram_min_eigenvalue = std::max(0.0, lambda_min);
  model.n = n;
  if (psi.kind == BasisKind::kIndicator) model.v_bin_edges = psi.edges;
  return model;
}

Eigen::VectorXd q_hat(const FittedModel& model, double v) {
  const Eigen::VectorXd psi = eval_psi(model.psi_spec, v);
  const int j = model.p_spec.dimension;
  const int k = model.psi_spec.dimension;
  Eigen::VectorXd q(j);
  for (int c = 0; c < j; ++c) q[c] = model.b.segment(c * k, k).dot(psi);
  return q;
}

double predict_crf(const FittedModel& model, const Eigen::VectorXd& x,
                   double v) {
  return eval_p(model.p_spec, x).dot(q_hat(model, v));
}

double predict_crf(const FittedModel& model, double x, double v) {
  return eval_p(model.p_spec, x).dot(q_hat(model, v));
}

namespace {

// mean_i q_hat(v_i) = B * mean_i psi(v_i); linearity makes one psi pass
// enough.
Eigen::VectorXd mean_q(const FittedModel& model,
                       const ControlEstimate& control) {
  const int k = model.psi_spec.dimension;
  Eigen::VectorXd psi_bar = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < control.v_hat.size(); ++i)
    psi_bar += eval_psi(model.psi_spec, control.v_hat[i]);
  psi_bar /= static_cast<double>(control.v_hat.size());
  const int j = model.p_spec.dimension;
  Eigen::VectorXd q(j);
  for (int c = 0; c < j; ++c) q[c] = model.b.segment(c * k, k).dot(psi_bar);
  return q;
}

}  // namespace

double asf(const FittedModel& model, const ControlEstimate& control,
           const Eigen::VectorXd& x) {
  return eval_p(model.p_spec, x).dot(mean_q(model, control));
}

double asf(const FittedModel& model, const ControlEstimate& control,
           double x) {
  return eval_p(model.p_spec, x).dot(mean_q(model, control));
}

Eigen::VectorXd ate(const FittedModel& model, const ControlEstimate& control) {
  const Eigen::VectorXd q_bar = mean_q(model, control);
  if (model.p_spec.kind == BasisKind::kTreatmentDummies) {
    const int t_count = model.p_spec.treatment_count;
    const Eigen::VectorXd base = Eigen::VectorXd::Zero(t_count);
    const Eigen::VectorXd p0 = eval_p(model.p_spec, base);
    Eigen::VectorXd out(t_count);
    for (int t = 0; t < t_count; ++t) {
      Eigen::VectorXd treated = base;
      treated[t] = 1.0;
      out[t] = (eval_p(model.p_spec, treated) - p0).dot(q_bar);
    }
    return out;
  }
  if (model.p_spec.kind == BasisKind::kPower) {
    Eigen::VectorXd out(1);
    out[0] = (eval_p(model.p_spec, 1.0) - eval_p(model.p_spec, 0.0))
                 .dot(q_bar);
    return out;
  }
  throw DataError("ate requires a treatment design basis");
}

double average_derivative(const FittedModel& model, const Dataset& data,
                          const ControlEstimate& control) {
  if (data.x.cols() != 1)
    throw DataError("average_derivative requires scalar x");
  if (data.n() != control.v_hat.size())
    throw DataError("control estimate does not match the dataset rows");
  const int k = model.psi_spec.dimension;
  const int j = model.p_spec.dimension;
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd dp = eval_p_derivative(model.p_spec, data.x(i, 0));
    const Eigen::VectorXd psi = eval_psi(model.psi_spec, control.v_hat[i]);
    for (int c = 0; c < j; ++c)
      total += dp[c] * model.b.segment(c * k, k).dot(psi);
  }
  return total / static_cast<double>(data.n());
}

double in_sample_mse(const FittedModel& model, const Dataset& data,
                     const ControlEstimate& control) {
  if (data.n() != control.v_hat.size())
    throw DataError("control estimate does not match the dataset rows");
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double fitted = predict_crf(model, data.x.row(i).transpose(),
                                      control.v_hat[i]);
    const double r = data.y[i] - fitted;
    total += r * r;
  }
  return total / static_cast<double>(data.n());
}

}  // namespace hetcoef
