#ifndef HETCOEF_QUANTILE_HPP_
#define HETCOEF_QUANTILE_HPP_

#include <algorithm>
#include <vector>

namespace hetcoef {

// Empirical quantile of a sorted sample with linear interpolation between
// order statistics, placed so that the value at probability
// (r - 0.5) / m is exactly the r-th order statistic. This inverts the
// (rank - 0.5) / n_z convention used for the estimated control variable.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  const std::size_t m = sorted.size();
  if (m == 1) return sorted[0];
  double h = q * static_cast<double>(m) - 0.5;
  if (h <= 0.0) return sorted.front();
  if (h >= static_cast<double>(m - 1)) return sorted.back();
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace hetcoef

#endif  // HETCOEF_QUANTILE_HPP_
