#include "hetcoef/basis.hpp"

#include <algorithm>
#include <cmath>

#include "hetcoef/errors.hpp"

namespace hetcoef {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::kPower:
      return "power";
    case BasisKind::kBspline:
      return "bspline";
    case BasisKind::kIndicator:
      return "indicator";
    case BasisKind::kTreatmentDummies:
      return "treatment_dummies";
  }
  return "unknown";
}

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "power") return BasisKind::kPower;
  if (name == "bspline") return BasisKind::kBspline;
  if (name == "indicator") return BasisKind::kIndicator;
  if (name == "treatment_dummies" || name == "treatment" || name == "dummies")
    return BasisKind::kTreatmentDummies;
  throw DataError("unknown basis kind '" + name + "'");
}

BasisSpec BasisSpec::Power(int dimension) {
  BasisSpec spec;
  spec.kind = BasisKind::kPower;
  spec.dimension = dimension;
  spec.validate();
  return spec;
}

BasisSpec BasisSpec::Bspline(int dimension, double lo, double hi,
                             std::vector<double> interior_knots) {
  BasisSpec spec;
  spec.kind = BasisKind::kBspline;
  spec.dimension = dimension;
  spec.domain_lo = lo;
  spec.domain_hi = hi;
  spec.knots = std::move(interior_knots);
  spec.validate();
  return spec;
}

BasisSpec BasisSpec::Indicator(int dimension, std::vector<double> edges) {
  BasisSpec spec;
  spec.kind = BasisKind::kIndicator;
  spec.dimension = dimension;
  spec.edges = std::move(edges);
  spec.validate();
  return spec;
}

BasisSpec BasisSpec::TreatmentDummies(int treatments) {
  BasisSpec spec;
  spec.kind = BasisKind::kTreatmentDummies;
  spec.treatment_count = treatments;
  spec.dimension = treatments + 1;
  spec.validate();
  return spec;
}

int BasisSpec::bspline_order() const { return std::min(4, dimension); }

void BasisSpec::validate() const {
  if (dimension < 1) throw DataError("basis dimension must be >= 1");
  switch (kind) {
    case BasisKind::kPower:
      break;
    case BasisKind::kBspline: {
      if (!(domain_lo < domain_hi))
        throw DataError("bspline domain bounds must satisfy lo < hi");
      const int n_interior = dimension - bspline_order();
      if (!knots.empty() &&
          static_cast<int>(knots.size()) != n_interior)
        throw DataError("bspline needs dimension - order interior knots");
      double prev = domain_lo;
      for (double t : knots) {
        if (!(t > prev) || !(t < domain_hi))
          throw DataError(
              "bspline knots must be strictly increasing and strictly "
              "inside the domain bounds");
        prev = t;
      }
      break;
    }
    case BasisKind::kIndicator: {
      if (!edges.empty() &&
          static_cast<int>(edges.size()) != dimension - 1)
        throw DataError("indicator basis needs dimension - 1 cut points");
      double prev = 0.0;
      for (double e : edges) {
        if (!(e > prev) || !(e < 1.0))
          throw DataError(
              "indicator cut points must be strictly increasing inside "
              "(0,1)");
        prev = e;
      }
      break;
    }
    case BasisKind::kTreatmentDummies:
      if (treatment_count < 1)
        throw DataError("treatment_dummies needs treatment_count >= 1");
      if (dimension != treatment_count + 1)
        throw DataError(
            "treatment_dummies dimension must equal treatment_count + 1");
      break;
  }
}

namespace {

// Full knot vector for the open (clamped) B-spline basis: the boundary
// knots repeated `order` times around the interior knots.
std::vector<double> full_knot_vector(const BasisSpec& spec) {
  const int order = spec.bspline_order();
  const int n_interior = spec.dimension - order;
  std::vector<double> t;
  t.reserve(spec.dimension + order);
  for (int i = 0; i < order; ++i) t.push_back(spec.domain_lo);
  if (!spec.knots.empty()) {
    t.insert(t.end(), spec.knots.begin(), spec.knots.end());
  } else {
    for (int i = 1; i <= n_interior; ++i) {
      const double frac = static_cast<double>(i) / (n_interior + 1);
      t.push_back(spec.domain_lo + frac * (spec.domain_hi - spec.domain_lo));
    }
  }
  for (int i = 0; i < order; ++i) t.push_back(spec.domain_hi);
  return t;
}

// Cox-de Boor recursion over the whole basis. Returns values of all
// B_{i,order}(x), i = 0..nbasis-1, or first derivatives when deriv == 1.
Eigen::VectorXd bspline_values(const std::vector<double>& t, int order,
                               int nbasis, double x, int deriv) {
  const int n_spans = static_cast<int>(t.size()) - 1;
  // Order-1 indicators; the right boundary closes the last nonempty span.
  std::vector<double> b(n_spans, 0.0);
  if (x >= t.back()) {
    for (int i = n_spans - 1; i >= 0; --i) {
      if (t[i] < t[i + 1]) {
        b[i] = 1.0;
        break;
      }
    }
  } else {
    for (int i = 0; i < n_spans; ++i) {
      if (t[i] <= x && x < t[i + 1]) {
        b[i] = 1.0;
        break;
      }
    }
  }
  auto ratio = [](double num, double den) {
    return den == 0.0 ? 0.0 : num / den;
  };
  std::vector<double> prev;
  for (int m = 2; m <= order; ++m) {
    if (m == order && deriv == 1) prev = b;
    const int count = static_cast<int>(t.size()) - m;
    std::vector<double> next(count, 0.0);
    for (int i = 0; i < count; ++i) {
      next[i] = ratio(x - t[i], t[i + m - 1] - t[i]) * b[i] +
                ratio(t[i + m] - x, t[i + m] - t[i + 1]) * b[i + 1];
    }
    b.swap(next);
  }
  Eigen::VectorXd out(nbasis);
  if (deriv == 0 || order == 1) {
    for (int i = 0; i < nbasis; ++i)
      out[i] = deriv == 0 ? b[i] : 0.0;
    return out;
  }
  // B'_{i,k}(x) = (k-1) [ B_{i,k-1}/(t_{i+k-1}-t_i)
  //                        - B_{i+1,k-1}/(t_{i+k}-t_{i+1}) ].
  for (int i = 0; i < nbasis; ++i) {
    const double left = ratio(prev[i], t[i + order - 1] - t[i]);
    const double right = ratio(prev[i + 1], t[i + order] - t[i + 1]);
    out[i] = (order - 1) * (left - right);
  }
  return out;
}

Eigen::VectorXd eval_scalar(const BasisSpec& spec, double x, int deriv) {
  switch (spec.kind) {
    case BasisKind::kPower: {
      Eigen::VectorXd out(spec.dimension);
      if (deriv == 0) {
        double pw = 1.0;
        for (int j = 0; j < spec.dimension; ++j) {
          out[j] = pw;
          pw *= x;
        }
      } else {
        out.setZero();
        double pw = 1.0;
        for (int j = 1; j < spec.dimension; ++j) {
          out[j] = j * pw;
          pw *= x;
        }
      }
      return out;
    }
    case BasisKind::kBspline: {
      if (x < spec.domain_lo || x > spec.domain_hi)
        throw DataError("x outside bspline domain bounds");
      return bspline_values(full_knot_vector(spec), spec.bspline_order(),
                            spec.dimension, x, deriv);
    }
    default:
      throw DataError("basis kind is not a scalar function basis");
  }
}

}  // namespace

Eigen::VectorXd eval_p(const BasisSpec& spec, const Eigen::VectorXd& x) {
  spec.validate();
  if (spec.kind == BasisKind::kTreatmentDummies) {
    if (x.size() != spec.treatment_count)
      throw DataError("treatment_dummies expects a length-T input");
    Eigen::VectorXd out(spec.dimension);
    out[0] = 1.0;
    for (int t = 0; t < spec.treatment_count; ++t) {
      if (x[t] != 0.0 && x[t] != 1.0)
        throw DataError("treatment dummies must be 0 or 1");
      out[t + 1] = x[t];
    }
    return out;
  }
  if (x.size() != 1)
    throw DataError("scalar basis expects a length-1 input");
  return eval_scalar(spec, x[0], 0);
}

Eigen::VectorXd eval_p(const BasisSpec& spec, double x) {
  spec.validate();
  return eval_scalar(spec, x, 0);
}

Eigen::VectorXd eval_p_derivative(const BasisSpec& spec, double x) {
  spec.validate();
  if (spec.kind != BasisKind::kPower && spec.kind != BasisKind::kBspline)
    throw DataError("basis kind is not differentiable in x");
  return eval_scalar(spec, x, 1);
}

Eigen::VectorXd eval_psi(const BasisSpec& spec, double v) {
  spec.validate();
  if (v < 0.0 || v > 1.0) throw DataError("v outside [0,1]");
  switch (spec.kind) {
    case BasisKind::kIndicator: {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.dimension);
      int bin = 0;
      if (!spec.edges.empty()) {
        bin = static_cast<int>(
            std::upper_bound(spec.edges.begin(), spec.edges.end(), v) -
            spec.edges.begin());
      } else {
        bin = std::min(static_cast<int>(v * spec.dimension),
                       spec.dimension - 1);
      }
      out[bin] = 1.0;
      return out;
    }
    case BasisKind::kPower:
    case BasisKind::kBspline:
      return eval_scalar(spec, v, 0);
    default:
      throw DataError("treatment_dummies cannot be used as a control basis");
  }
}

Eigen::VectorXd design_row(const BasisSpec& p_spec, const BasisSpec& psi_spec,
                           const Eigen::VectorXd& x, double v) {
  const Eigen::VectorXd p = eval_p(p_spec, x);
  const Eigen::VectorXd psi = eval_psi(psi_spec, v);
  Eigen::VectorXd out(p.size() * psi.size());
  for (Eigen::Index j = 0; j < p.size(); ++j)
    out.segment(j * psi.size(), psi.size()) = p[j] * psi;
  return out;
}

}  // namespace hetcoef
