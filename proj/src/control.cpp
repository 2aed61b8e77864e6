#include "hetcoef/control.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hetcoef/errors.hpp"

namespace hetcoef {

ControlEstimate estimate_control(const Dataset& data) {
  if (!data.z) throw DataError("estimate_control requires a z column");
  if (data.x.cols() != 1)
    throw DataError("estimate_control requires a scalar x column");

  std::map<int, std::vector<Eigen::Index>> cells;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (!std::isfinite(data.x(i, 0))) throw DataError("non-finite x value");
    cells[(*data.z)[i]].push_back(i);
  }

  ControlEstimate est;
  est.v_hat.resize(data.n());
  for (auto& [code, members] : cells) {
    const Eigen::Index m = static_cast<Eigen::Index>(members.size());
    if (m < 2)
      throw DataError("instrument cell z=" + std::to_string(code) +
                      " has fewer than 2 observations");
    est.cell_counts[code] = m;
    std::sort(members.begin(), members.end(),
              [&](Eigen::Index a, Eigen::Index b) {
                return data.x(a, 0) < data.x(b, 0);
              });
    // Tied x values share the average of their 1-based positions.
    Eigen::Index start = 0;
    while (start < m) {
      Eigen::Index stop = start + 1;
      while (stop < m &&
             data.x(members[stop], 0) == data.x(members[start], 0))
        ++stop;
      const double mid_rank = 0.5 * static_cast<double>(start + stop + 1);
      const double v = (mid_rank - 0.5) / static_cast<double>(m);
      for (Eigen::Index k = start; k < stop; ++k)
        est.v_hat[members[k]] = v;
      start = stop;
    }
  }
  return est;
}

ControlEstimate passthrough_control(const Dataset& data) {
  if (!data.v) throw DataError("passthrough_control requires a v column");
  ControlEstimate est;
  est.v_hat.resize(data.n());
  constexpr double kEps = 1e-6;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double v = (*data.v)[i];
    if (!(v >= 0.0 && v <= 1.0))
      throw DataError("v entries must lie in [0,1]");
    est.v_hat[i] = std::min(1.0 - kEps, std::max(kEps, v));
  }
  if (data.z) {
    for (Eigen::Index i = 0; i < data.n(); ++i)
      ++est.cell_counts[(*data.z)[i]];
  }
  return est;
}

}  // namespace hetcoef
