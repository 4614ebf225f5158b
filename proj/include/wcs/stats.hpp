#ifndef WCS_STATS_HPP
#define WCS_STATS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace wcs {

// Total variation distance between two discrete distributions.
inline double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  return 0.5 * (p - q).cwiseAbs().sum();
}

// Kolmogorov-Smirnov distance between the empirical distribution of integer
// samples and a model CCDF evaluated at the same support points.
inline double ks_distance(const std::vector<long>& samples,
                          const std::function<double(long)>& model_ccdf) {
  if (samples.empty()) return 1.0;
  std::map<long, long> counts;
  for (long s : samples) counts[s] += 1;
  double n = double(samples.size());
  double seen = 0.0;
  double worst = 0.0;
  for (const auto& [value, cnt] : counts) {
    seen += double(cnt);
    double emp_ccdf = 1.0 - seen / n;  // Pr[T > value]
    worst = std::max(worst, std::abs(emp_ccdf - model_ccdf(value)));
  }
  return worst;
}

}  // namespace wcs

#endif
