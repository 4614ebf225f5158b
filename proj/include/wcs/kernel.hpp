#ifndef WCS_KERNEL_HPP
#define WCS_KERNEL_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wcs/config.hpp"
#include "wcs/quadrature.hpp"

namespace wcs {

inline double binom_pmf(int k, int n, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  double lg = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
              std::lgamma(n - k + 1.0) + k * std::log(p) +
              (n - k) * std::log1p(-p);
  return std::exp(lg);
}

inline double binom_cdf(int k, int n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  double s = 0.0;
  for (int i = 0; i <= k; ++i) s += binom_pmf(i, n, p);
  return std::min(1.0, s);
}

// Pr[D_{t+1} <= x2 | D_t = x1] for a step of length exactly v in a uniform
// direction, distances measured from a fixed point in the plane.
inline double conditional_step_cdf(double x1, double x2, double v) {
  if (v + x2 < x1 || v - x2 > x1) return 0.0;
  if (x2 - v > x1) return 1.0;
  double c = (v * v + x1 * x1 - x2 * x2) / (2.0 * v * x1);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) / std::numbers::pi;
}

namespace detail {

// Integral of the arccos branch of the step kernel against the stationary
// density 2*pi*x/S, over (lo, hi). Endpoints have square-root derivative
// singularities, so callers split exactly at the branch boundaries.
inline double arc_piece(double lo, double hi, double x2, double v, double S) {
  if (!(hi > lo)) return 0.0;
  auto f = [x2, v, S](double x) {
    double c = (v * v + x * x - x2 * x2) / (2.0 * v * x);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c) / std::numbers::pi * (2.0 * std::numbers::pi * x / S);
  };
  return integrate(f, lo, hi, 1e-10);
}

}  // namespace detail

// Stationary marginal CDF of the distance to one fixed WCS.
inline double stationary_cdf(double x, const NetworkConfig& cfg) {
  if (x <= 0.0) return 0.0;
  double F = std::numbers::pi * x * x / cfg.S;
  return std::min(1.0, F);
}

// Joint CDF Pr[D_t <= x1, D_{t+1} <= x2] under the stationary marginal,
// single WCS. Piecewise: the step kernel is 1 below x2-v, 0 above x2+v,
// and the arccos branch in between.
inline double joint_cdf(double x1, double x2, const NetworkConfig& cfg) {
  if (!(cfg.v > 0.0))
    throw std::invalid_argument("joint_cdf requires v > 0");
  double hi_cap = std::min(x1, cfg.disc_radius());
  if (hi_cap <= 0.0 || x2 <= 0.0) return 0.0;
  double v = cfg.v;
  double flat_end = std::min(hi_cap, x2 - v);  // kernel == 1 here
  double val = flat_end > 0.0 ? stationary_cdf(flat_end, cfg) : 0.0;
  double lo = std::abs(v - x2);
  double hi = std::min(hi_cap, v + x2);
  val += detail::arc_piece(std::max(lo, 0.0), hi, x2, v, cfg.S);
  return val;
}

// Marginal CDF of D_{t+1} implied by one plane step from the stationary
// marginal; differs from stationary_cdf only through edge effects.
inline double step_marginal_cdf(double x2, const NetworkConfig& cfg) {
  return joint_cdf(cfg.disc_radius(), x2, cfg);
}

namespace detail {

// Joint CDF at state boundaries, with "one past M" meaning no constraint.
inline double boundary_joint_cdf(int bi, int bj, int M,
                                 const NetworkConfig& cfg) {
  const bool ti = bi > M, tj = bj > M;  // unconstrained axes
  if (ti && tj) return 1.0;
  if (tj) return stationary_cdf(cfg.state_inner_radius(bi), cfg);
  if (ti) return step_marginal_cdf(cfg.state_inner_radius(bj), cfg);
  double xi = cfg.state_inner_radius(bi);
  double xj = cfg.state_inner_radius(bj);
  if (xi <= 0.0 || xj <= 0.0) return 0.0;
  return joint_cdf(xi, xj, cfg);
}

}  // namespace detail

// alpha_{i,j} = Pr[d_t = i, d_{t+1} = j] for a single WCS, by
// inclusion-exclusion over the four state-boundary radii.
inline double cell_probability(int i, int j, const NetworkConfig& cfg) {
  int M = cfg.resolved_M();
  if (i < 0 || i > M || j < 0 || j > M)
    throw std::out_of_range("cell_probability: state index out of range");
  if (std::abs(i - j) > 1) return 0.0;  // one step moves at most v
  double a = detail::boundary_joint_cdf(i + 1, j + 1, M, cfg);
  double b = detail::boundary_joint_cdf(i, j + 1, M, cfg);
  double c = detail::boundary_joint_cdf(i + 1, j, M, cfg);
  double d = detail::boundary_joint_cdf(i, j, M, cfg);
  return std::max(0.0, a - b - c + d);
}

// A_{a,b} = Pr[d_t >= a, d_{t+1} >= b] for a single WCS.
inline double joint_ccdf(int a, int b, const NetworkConfig& cfg) {
  int M = cfg.resolved_M();
  if (a < 0 || a > M || b < 0 || b > M)
    throw std::out_of_range("joint_ccdf: state index out of range");
  double xa = cfg.state_inner_radius(a);
  double xb = cfg.state_inner_radius(b);
  double val = 1.0 - stationary_cdf(xa, cfg) - step_marginal_cdf(xb, cfg) +
               (xa > 0.0 && xb > 0.0 ? joint_cdf(xa, xb, cfg) : 0.0);
  return std::clamp(val, 0.0, 1.0);
}

// Per-slot probability an active node transmits, at transmission range r.
inline double transmit_probability(int n, double S, double q, double r) {
  if (n < 2) return 0.0;
  double ratio = std::numbers::pi * r * r / S;
  return q * (1.0 - std::pow(1.0 - (1.0 - q) * ratio, n - 1));
}

inline double transmit_probability(const NetworkConfig& cfg) {
  return transmit_probability(cfg.n, cfg.S, cfg.q,
                              transmission_range(cfg.n, cfg.S));
}

// Charging probability, with the two closed forms the literature prints.
// `value` comes from the first-principles expectation over the number of
// covering WCSs; `appendix_form` matches it algebraically, `eq10_form`
// does not (see charge_probability_warnings).
struct ChargeProbability {
  double value = 0.0;
  double eq10_form = 0.0;
  double appendix_form = 0.0;
};

inline ChargeProbability charge_probability(const NetworkConfig& cfg) {
  ChargeProbability out;
  if (cfg.m < 1) return out;
  double rho = cfg.coverage_ratio();
  double denom = 1.0 - std::pow(1.0 - rho, cfg.m);

  // Per-WCS failure probability given coverage: the node contends with
  // l ~ Bin(n-1, rho) others and is picked with probability min(1, u/(l+1)).
  double success = 0.0;
  for (int l = 0; l <= cfg.n - 1; ++l)
    success += std::min(1.0, double(cfg.u) / (l + 1)) *
               binom_pmf(l, cfg.n - 1, rho);
  double A = 1.0 - success;

  double num = 0.0;
  for (int i = 1; i <= cfg.m; ++i)
    num += (1.0 - std::pow(A, i)) * binom_pmf(i, cfg.m, rho);
  out.value = num / denom;

  double inner10 = 1.0 - rho * binom_cdf(cfg.u - 2, cfg.n - 1, rho) -
                   double(cfg.u) / cfg.n *
                       std::pow(1.0 - binom_cdf(cfg.u - 1, cfg.n, rho), cfg.n);
  out.eq10_form = (1.0 - std::pow(inner10, cfg.m)) / denom;

  double A_appx = 1.0 - binom_cdf(cfg.u - 2, cfg.n - 1, rho) -
                  cfg.u * (1.0 - binom_cdf(cfg.u - 1, cfg.n, rho)) /
                      (cfg.n * rho);
  out.appendix_form =
      (1.0 - std::pow(A_appx * rho + 1.0 - rho, cfg.m)) / denom;
  return out;
}

inline std::vector<std::string> charge_probability_warnings(
    const ChargeProbability& pc) {
  std::vector<std::string> w;
  if (std::abs(pc.value - pc.eq10_form) > 1e-9)
    w.push_back("closed-form p_c (main-text variant) disagrees with the "
                "first-principles expectation; using the expectation");
  if (std::abs(pc.value - pc.appendix_form) > 1e-9)
    w.push_back("closed-form p_c (appendix variant) disagrees with the "
                "first-principles expectation; using the expectation");
  return w;
}

struct TransitionKernel {
  Eigen::MatrixXd P;          // (M+1)x(M+1), tridiagonal, row-stochastic
  double p_t = 0.0;           // per-slot transmission probability
  double p_c = 0.0;           // per-slot charging-selection probability
  std::vector<double> beta;   // batch-size distribution beta(1..E)
  int M = 0;

  // Stationary probability of relative-distance state k (area ratios).
  double state_probability(int k) const { return state_prob_[k]; }
  std::vector<double> state_prob_;
};

// Distance-state transition matrix. The joint CCDFs that are forced by the
// speed bound reduce to one-dimensional tail probabilities; evaluating those
// in closed form keeps every row sum exactly 1 and makes the chain's
// stationary distance marginal coincide with the area-ratio vector.
inline Eigen::MatrixXd transition_matrix(const NetworkConfig& cfg) {
  if (cfg.m < 1)
    throw std::invalid_argument("transition_matrix requires m >= 1");
  if (!(cfg.v > 0.0))
    throw std::invalid_argument("transition_matrix requires v > 0");
  const int M = cfg.resolved_M();
  const int m = cfg.m;

  // tail(k) = Pr[one WCS farther than the inner boundary of state k].
  std::vector<double> tail(M + 2);
  for (int k = 0; k <= M + 1; ++k) {
    double x = k <= M ? cfg.state_inner_radius(k) : cfg.disc_radius();
    tail[k] = std::pow(1.0 - stationary_cdf(x, cfg), m);
  }
  std::vector<double> den(M + 1);  // Pr[d = k] for the nearest of m WCSs
  den[0] = 1.0 - tail[1];
  for (int k = 1; k < M; ++k) den[k] = tail[k] - tail[k + 1];
  if (M >= 1) den[M] = tail[M];
  for (int k = 0; k <= M; ++k)
    if (den[k] < 1e-14)
      throw std::runtime_error("resolution M too large for this geometry "
                               "(distance state " + std::to_string(k) +
                               " has probability < 1e-14)");

  // diag(k) = Pr[d_t >= k, d_{t+1} >= k]^... per-WCS value; only these need
  // quadrature, all off-diagonal CCDFs collapse via the speed bound.
  std::vector<double> diag(M + 1);
  diag[0] = 1.0;
  for (int k = 1; k <= M; ++k) {
    double x = cfg.state_inner_radius(k);
    double F = stationary_cdf(x, cfg);
    double d = 1.0 - 2.0 * F + joint_cdf(x, x, cfg);
    diag[k] = std::clamp(d, 0.0, 1.0);
  }

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M + 1, M + 1);
  auto powm = [m](double x) { return std::pow(x, m); };

  if (M == 0) {  // single state: nothing to resolve
    P(0, 0) = 1.0;
    return P;
  }

  {  // row 0: exits land in state 1 only
    double up = (tail[1] - powm(diag[1])) / den[0];
    up = std::clamp(up, 0.0, 1.0);
    P(0, 1) = up;
    P(0, 0) = 1.0 - up;
  }
  for (int i = 1; i < M; ++i) {
    double down = 1.0 - (powm(diag[i]) - tail[i + 1]) / den[i];
    double up = (tail[i + 1] - powm(diag[i + 1])) / den[i];
    down = std::clamp(down, 0.0, 1.0);
    up = std::clamp(up, 0.0, 1.0 - down);
    P(i, i - 1) = down;
    P(i, i + 1) = up;
    P(i, i) = 1.0 - down - up;
  }
  {  // row M: the outermost state can only re-enter M-1
    double stay = std::clamp(powm(diag[M]) / den[M], 0.0, 1.0);
    P(M, M) = stay;
    P(M, M - 1) = 1.0 - stay;
  }
  return P;
}

inline TransitionKernel build_kernel(const NetworkConfig& cfg) {
  cfg.validate();
  TransitionKernel k;
  k.M = cfg.resolved_M();
  k.P = transition_matrix(cfg);
  k.p_t = transmit_probability(cfg);
  k.p_c = charge_probability(cfg).value;
  k.beta = ChargingProfile(cfg.radii).beta;
  k.state_prob_.resize(k.M + 1);
  double prev = 1.0;
  for (int s = 1; s <= k.M; ++s) {
    double t = std::pow(1.0 - stationary_cdf(cfg.state_inner_radius(s), cfg),
                        cfg.m);
    k.state_prob_[s - 1] = prev - t;
    prev = t;
  }
  k.state_prob_[k.M] = prev;
  return k;
}

}  // namespace wcs

#endif
