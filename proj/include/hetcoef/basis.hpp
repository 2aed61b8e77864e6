#ifndef HETCOEF_BASIS_HPP_
#define HETCOEF_BASIS_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hetcoef {

enum class BasisKind { kPower, kBspline, kIndicator, kTreatmentDummies };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& name);

// Declarative description of a known function vector: the outcome-side
// basis p(.) of dimension J or the control-side basis psi(.) of
// dimension K.
//
//   power             (1, x, x^2, ..., x^{J-1})
//   bspline           cubic B-splines on [domain_lo, domain_hi] with an
//                     open knot vector; uniform interior knots unless
//                     `knots` is supplied
//   indicator         one-hot over K bins of [0,1]; interior cut points
//                     in `edges`, equal-width by default
//   treatment_dummies (1, X(1), ..., X(T)), dimension T+1
struct BasisSpec {
  BasisKind kind = BasisKind::kPower;
  int dimension = 1;
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  std::vector<double> knots;  // bspline interior knots, strictly increasing
  std::vector<double> edges;  // indicator interior cut points, size K-1
  int treatment_count = 0;

  static BasisSpec Power(int dimension);
  static BasisSpec Bspline(int dimension, double lo, double hi,
                           std::vector<double> interior_knots = {});
  static BasisSpec Indicator(int dimension, std::vector<double> edges = {});
  static BasisSpec TreatmentDummies(int treatments);

  // B-spline order actually used: cubic, degraded for tiny dimensions.
  int bspline_order() const;

  // Throws DataError when an invariant is violated.
  void validate() const;
};

// Evaluates p(x). Scalar kinds (power, bspline) expect a length-1 x;
// treatment_dummies expects a length-T 0/1 vector.
Eigen::VectorXd eval_p(const BasisSpec& spec, const Eigen::VectorXd& x);
Eigen::VectorXd eval_p(const BasisSpec& spec, double x);

// d p(x) / dx for differentiable scalar kinds (power, bspline).
Eigen::VectorXd eval_p_derivative(const BasisSpec& spec, double x);

// Evaluates psi^K(v) for v in [0,1].
Eigen::VectorXd eval_psi(const BasisSpec& spec, double v);

// Kronecker regressor p(x) (x) psi(v): entry j*K + k is p_j(x) * psi_k(v),
// matching the coefficient layout b = (b_1', ..., b_J')'.
Eigen::VectorXd design_row(const BasisSpec& p_spec, const BasisSpec& psi_spec,
                           const Eigen::VectorXd& x, double v);

}  // namespace hetcoef

#endif  // HETCOEF_BASIS_HPP_
