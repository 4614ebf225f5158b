#ifndef WCS_ASYMPTOTICS_HPP
#define WCS_ASYMPTOTICS_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "wcs/chain.hpp"
#include "wcs/config.hpp"
#include "wcs/kernel.hpp"

namespace wcs {

// Stationary relative-distance marginal: area ratios of the state annuli
// for the nearest of m independently placed WCSs.
inline Eigen::VectorXd distance_stationary_vector(const NetworkConfig& cfg) {
  const int M = cfg.resolved_M();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(M + 1);
  if (cfg.m == 0) {
    phi(M) = 1.0;
    return phi;
  }
  double prev = 1.0;
  for (int k = 1; k <= M; ++k) {
    double tail =
        std::pow(1.0 - stationary_cdf(cfg.state_inner_radius(k), cfg), cfg.m);
    phi(k - 1) = prev - tail;
    prev = tail;
  }
  phi(M) = prev;
  return phi;
}

// Mean per-slot energy inflow in steady state (unbounded battery):
// charge events happen at d = 0 with rate p_c and deliver batches ~ beta.
inline double mean_arrival_rate(const NetworkConfig& cfg,
                                const TransitionKernel& kernel) {
  if (cfg.m == 0) return 0.0;
  double phi0 = 1.0 - std::pow(1.0 - cfg.coverage_ratio(), cfg.m);
  return kernel.p_c * phi0 * ChargingProfile(cfg.radii).mean_batch();
}

// Infinite-battery throughput: the energy queue never overflows, so the
// active probability is the inflow/outflow ratio capped at one. Every
// factor is speed-independent.
inline double infinite_battery_pon(const NetworkConfig& cfg,
                                   const TransitionKernel& kernel) {
  if (cfg.m == 0) return 0.0;
  double lam = mean_arrival_rate(cfg, kernel);
  if (kernel.p_t <= 0.0) return lam > 0.0 ? 1.0 : 0.0;
  return std::min(1.0, lam / kernel.p_t);
}

inline double infinite_battery_throughput(const NetworkConfig& cfg,
                                          const TransitionKernel& kernel) {
  return throughput_from_pon(infinite_battery_pon(cfg, kernel), cfg.q);
}

// Evaluable versions of the density scaling law. Both bounds share the
// shape Lambda(x*K) with x = min(1, m/n); the upper bound carries the mean
// batch size, the lower bound a single unit per charge.
struct ScalingBounds {
  double a = 0.0;      // 1 - exp(-pi/4 (1-q))
  double c1 = 0.0;     // exp(-pi u / (4a) * sum_k k beta(k))
  double c2 = 0.0;     // exp(-pi u / (4a))
  double ratio = 0.0;  // min(1, m/n)
  double lower = 0.0;
  double upper = 0.0;
};

inline ScalingBounds scaling_bounds(const NetworkConfig& cfg) {
  ScalingBounds b;
  const double pi4 = std::numbers::pi / 4.0;
  b.a = 1.0 - std::exp(-pi4 * (1.0 - cfg.q));
  double mean_batch = ChargingProfile(cfg.radii).mean_batch();
  b.c1 = std::exp(-pi4 * cfg.u / b.a * mean_batch);
  b.c2 = std::exp(-pi4 * cfg.u / b.a);
  b.ratio = std::min(1.0, double(cfg.m) / double(cfg.n));
  double kappa = cfg.u / (cfg.q * b.a);  // limit of p_c/p_t per unit ratio
  double pon_upper = std::min(1.0, b.ratio * kappa * mean_batch);
  double pon_lower = std::min(1.0, b.ratio * kappa);
  b.upper = throughput_from_pon(pon_upper, cfg.q);
  b.lower = throughput_from_pon(pon_lower, cfg.q);
  return b;
}

// Reference model with memoryless relocation: every row of the distance
// kernel is the stationary marginal (the infinite-speed limit).
inline TransitionKernel iid_kernel(const NetworkConfig& cfg) {
  TransitionKernel k = build_kernel(cfg);
  Eigen::VectorXd phi = distance_stationary_vector(cfg);
  for (int i = 0; i < k.P.rows(); ++i) k.P.row(i) = phi.transpose();
  return k;
}

}  // namespace wcs

#endif
