#ifndef HETCOEF_CONTROL_HPP_
#define HETCOEF_CONTROL_HPP_

#include <Eigen/Dense>
#include <map>

#include "hetcoef/dataset.hpp"

namespace hetcoef {

struct ControlEstimate {
  Eigen::VectorXd v_hat;                  // strictly inside (0,1)
  std::map<int, Eigen::Index> cell_counts;  // instrument code -> n_z
};

// Empirical conditional CDF of X given discrete Z: within cell Z = z,
// v_hat_i = (rank_i - 0.5) / n_z with mid-ranks for ties. Requires every
// cell to hold at least two observations.
ControlEstimate estimate_control(const Dataset& data);

// Uses the observed v column, clamped into [1e-6, 1 - 1e-6].
ControlEstimate passthrough_control(const Dataset& data);

}  // namespace hetcoef

#endif  // HETCOEF_CONTROL_HPP_
