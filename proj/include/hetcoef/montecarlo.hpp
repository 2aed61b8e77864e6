#ifndef HETCOEF_MONTECARLO_HPP_
#define HETCOEF_MONTECARLO_HPP_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "hetcoef/basis.hpp"
#include "hetcoef/dgp.hpp"

namespace hetcoef {

struct McConfig {
  DgpConfig dgp;
  BasisSpec p_spec;
  BasisKind psi_kind = BasisKind::kIndicator;
  std::vector<int> k_grid;            // strictly increasing
  double ridge = 0.0;
  std::vector<Eigen::Index> n_grid;   // strictly increasing
  int replications = 1;
  std::uint64_t base_seed = 0;
  std::vector<double> x_grid;         // ASF targets (scalar-x designs)
  Eigen::Index holdout_n = 50000;     // approximation study only
  int threads = 1;

  void validate() const;
};

// One aggregate per (n, K, target). Targets are `asf@<x>` per grid point
// and `ate<t>` per treatment arm; the approximation study uses `crf`.
struct McCell {
  Eigen::Index n = 0;
  int k = 0;
  std::string target;
  double truth = std::numeric_limits<double>::quiet_NaN();
  double mean_estimate = std::numeric_limits<double>::quiet_NaN();
  double bias = std::numeric_limits<double>::quiet_NaN();
  double rmse = std::numeric_limits<double>::quiet_NaN();
  double mean_gram_min_eigenvalue =
      std::numeric_limits<double>::quiet_NaN();
  int failures = 0;
  int successes = 0;
  double holdout_mse = std::numeric_limits<double>::quiet_NaN();
  double insample_mse = std::numeric_limits<double>::quiet_NaN();
};

struct McReport {
  std::vector<McCell> cells;
};

// Bias/RMSE of ASF and ATE across replications for every (n, K) cell.
// Replication r draws with seed base_seed + r; fits that raise an
// identification failure are counted per cell, never fatal.
McReport run(const McConfig& config);

// Holdout mean squared error between the true and fitted control
// regression function per K, plus the in-sample residual MSE. Trains on
// n_grid.back() rows and evaluates on a fresh holdout of holdout_n rows
// at the true control values.
McReport approximation_study(const McConfig& config);

void write_mc_report_csv(const McReport& report, std::ostream& out);

}  // namespace hetcoef

#endif  // HETCOEF_MONTECARLO_HPP_
