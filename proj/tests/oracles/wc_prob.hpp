#pragma once

// Reference worst-case escape probability: distances recomputed from the
// interval definition, objective evaluated by direct summation at
// lambda = 0 and at every 1/d_i, O(N^2).

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double distance_to_escape(double lo, double hi, double w) {
  if (lo == 0.0)
    return w < hi ? hi - w : 0.0;
  if (w <= lo || w >= hi)
    return 0.0;
  return std::min(hi - w, w - lo);
}

inline double wc_probability(double lo, double hi, const std::vector<double> &samples,
                             double theta) {
  std::vector<double> d;
  for (double w : samples)
    d.push_back(distance_to_escape(lo, hi, w));
  auto objective = [&](double lambda) {
    double acc = 0.0;
    for (double di : d)
      acc += std::max(0.0, 1.0 - lambda * di);
    return lambda * theta + acc / static_cast<double>(d.size());
  };
  double best = objective(0.0);
  for (double di : d)
    if (di > 0.0)
      best = std::min(best, objective(1.0 / di));
  return std::min(best, 1.0);
}

} // namespace oracle
