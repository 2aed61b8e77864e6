#ifndef HETCOEF_DIAGNOSTICS_HPP_
#define HETCOEF_DIAGNOSTICS_HPP_

#include <Eigen/Dense>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hetcoef/basis.hpp"
#include "hetcoef/control.hpp"
#include "hetcoef/dataset.hpp"

namespace hetcoef {

struct DiagnosticsOptions {
  int n_bins = 10;
  // Minimum eigenvalue threshold, relative to the bin's largest
  // eigenvalue.
  double eps_id_rel = 1e-6;
  // Overlap margin: the propensity must stay inside
  // [eps_propensity, 1 - eps_propensity].
  double eps_propensity = 0.01;
  // Quantile separation tolerance in units of sd(X).
  double delta_q_rel = 1e-6;
};

enum class VerdictStatus { kPass, kFail, kNotApplicable };

std::string to_string(VerdictStatus status);

struct Verdict {
  VerdictStatus status = VerdictStatus::kNotApplicable;
  std::string detail;
};

// One quantile bin of the control variable. A bin is "adequate" when its
// count reaches max(J, 30); only adequate bins enter verdicts, the rest
// are reported.
struct BinRecord {
  double v_lo = 0.0;
  double v_hi = 1.0;
  Eigen::Index count = 0;
  bool adequate = false;
  Eigen::MatrixXd second_moment;  // J x J average of p(x) p(x)'
  double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  double max_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  // Binary-treatment extras.
  double propensity = std::numeric_limits<double>::quiet_NaN();
  double determinant = std::numeric_limits<double>::quiet_NaN();
  double propensity_variance = std::numeric_limits<double>::quiet_NaN();
  // Mutually-exclusive-treatments extras.
  std::vector<double> treatment_freqs;
  double exclusive_gap = std::numeric_limits<double>::quiet_NaN();
  // Discrete-instrument extras.
  std::vector<double> cell_quantiles;  // Q(v_mid | z) per instrument code
  int support_cardinality = -1;        // distinct values among them
};

struct DiagnosticsReport {
  std::vector<BinRecord> per_bin;
  std::map<std::string, Verdict> overall_verdicts;
  BasisSpec p_spec;
  Eigen::Index n = 0;
  int n_bins = 0;
};

// Partitions [0,1] into equal-quantile bins of v_hat and averages
// p(x) p(x)' within each; fills eigenvalues and the `assumption2` verdict
// (pass iff every adequate bin is nonsingular at the relative tolerance).
DiagnosticsReport conditional_second_moment(const Dataset& data,
                                            const ControlEstimate& control,
                                            const BasisSpec& p_spec,
                                            const DiagnosticsOptions& options);

// Binary treatment: per-bin propensity must keep away from 0 and 1. Also
// records the per-bin determinant of the (1,X) second moment and the
// matching P(1-P), which agree as an algebraic identity on sample
// moments. Fills per-bin extras into `report` when given.
Verdict check_binary_overlap(const Dataset& data,
                             const ControlEstimate& control,
                             const DiagnosticsOptions& options,
                             DiagnosticsReport* report = nullptr);

// Mutually exclusive treatments: per-bin 1 - sum of treatment frequencies
// must stay positive wherever every arm is populated. Cross-checked
// against the minimum eigenvalue of the same bin's second moment.
Verdict check_mutually_exclusive(const Dataset& data,
                                 const ControlEstimate& control,
                                 const DiagnosticsOptions& options,
                                 DiagnosticsReport* report = nullptr);

// Discrete instrument: counts the distinct per-cell conditional quantiles
// of X at each bin midpoint; fails when any adequate bin shows fewer than
// dim(p) distinct values.
Verdict count_instrument_support(const Dataset& data,
                                 const ControlEstimate& control,
                                 const BasisSpec& p_spec,
                                 const DiagnosticsOptions& options,
                                 DiagnosticsReport* report = nullptr);

// Two-point instrument with p(x) = (1, x): passes when the two per-cell
// quantiles separate in every adequate bin, which forces the second
// moment nonsingular; cross-checked against the eigenvalue test.
Verdict check_binary_instrument(const Dataset& data,
                                const ControlEstimate& control,
                                const DiagnosticsOptions& options,
                                DiagnosticsReport* report = nullptr);

// Runs every check whose preconditions the data meets and merges the
// verdicts into one report; inapplicable checks are reported as such.
DiagnosticsReport diagnose_all(const Dataset& data,
                               const ControlEstimate& control,
                               const BasisSpec& p_spec,
                               const DiagnosticsOptions& options);

}  // namespace hetcoef

#endif  // HETCOEF_DIAGNOSTICS_HPP_
