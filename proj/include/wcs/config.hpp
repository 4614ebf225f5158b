#ifndef WCS_CONFIG_HPP
#define WCS_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wcs {

struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string f, const std::string& what)
      : std::runtime_error("config field '" + f + "': " + what),
        field(std::move(f)) {}
};

// Scenario parameters. Distances are meters, speed is meters per slot,
// energy is in integer units; the network is a sqrt(S) x sqrt(S) square.
struct NetworkConfig {
  int n = 10;                  // mobile nodes
  int m = 1;                   // wireless charging stations
  double S = 20.0;             // area, m^2
  double v = 1.0;              // node speed, m/slot
  double q = 0.5;              // transmitter-mode probability
  int u = 1;                   // nodes charged per WCS per slot
  int L = 10;                  // battery capacity, energy units
  int E = 3;                   // max energy units per slot
  std::vector<double> radii;   // R_1 > R_2 > ... > R_E, meters
  int M = 0;                   // distance resolution; 0 means auto
  std::uint64_t seed = 12345;  // simulation seed

  double disc_radius() const { return std::sqrt(S / std::numbers::pi); }
  double charging_range() const { return radii.at(0); }
  double coverage_ratio() const {
    double r1 = charging_range();
    return std::numbers::pi * r1 * r1 / S;
  }

  // Boundary radius of relative-distance state k: states are
  //   0: (0, R_1],  k: (R_1+(k-1)v, R_1+kv] for k < M,  M: (R_1+(M-1)v, inf).
  double state_inner_radius(int k) const {
    return k == 0 ? 0.0 : radii[0] + (k - 1) * v;
  }

  void validate() const;
  int resolved_M() const;  // M, or the auto-derived value when M == 0
};

// Calibration radii: R_1 sized so the charging region covers about 5.3% of
// the default 20 m^2 area, lower tiers at 2/3 and 1/3 of R_1.
inline std::vector<double> default_radii(int E, double R1 = 0.581) {
  std::vector<double> r(E);
  for (int k = 0; k < E; ++k) r[k] = R1 * double(E - k) / double(E);
  return r;
}

inline NetworkConfig default_config() {
  NetworkConfig cfg;
  cfg.radii = default_radii(cfg.E);
  return cfg;
}

// M = floor((sqrt(S/pi) - R_1)/v), clamped to >= 1.
inline int default_resolution(double S, double R1, double v) {
  if (v <= 0.0)
    throw ConfigError("v", "stationary nodes require explicit M=1 degenerate mode");
  double span = std::sqrt(S / std::numbers::pi) - R1;
  int M = int(std::floor(span / v + 1e-12));
  return M < 1 ? 1 : M;
}

inline int NetworkConfig::resolved_M() const {
  if (M > 0) return M;
  return default_resolution(S, radii.at(0), v);
}

inline void NetworkConfig::validate() const {
  if (n < 1) throw ConfigError("n", "must be >= 1");
  if (m < 0) throw ConfigError("m", "must be >= 0");
  if (!(S > 0.0)) throw ConfigError("S", "must be > 0");
  if (!(v >= 0.0)) throw ConfigError("v", "must be >= 0");
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("q", "must satisfy 0 < q < 1");
  if (u < 1) throw ConfigError("u", "must be >= 1");
  if (L < 1) throw ConfigError("L", "must be >= 1");
  if (E < 1) throw ConfigError("E", "must be >= 1");
  if (int(radii.size()) != E) {
    std::ostringstream msg;
    msg << "expected exactly E=" << E << " entries, got " << radii.size();
    throw ConfigError("radii", msg.str());
  }
  double edge = disc_radius();
  for (int k = 0; k < E; ++k) {
    if (!(radii[k] > 0.0)) throw ConfigError("radii", "entries must be > 0");
    if (!(radii[k] < edge))
      throw ConfigError("radii", "entries must be < sqrt(S/pi)");
    if (k > 0 && !(radii[k] < radii[k - 1]))
      throw ConfigError("radii", "entries must be strictly decreasing");
  }
  if (M != 0) {
    if (M < 1) throw ConfigError("M", "must be >= 1 (or omitted for auto)");
    double outer = radii[0] + double(M) * v;
    if (std::numbers::pi * outer * outer > S * (1.0 + 1e-9))
      throw ConfigError("M", "annuli do not fit: pi*(R_1 + M*v)^2 must be <= S");
  }
}

// beta(k) = Pr[a charged node receives k units]; area ratio of band k.
struct ChargingProfile {
  std::vector<double> radii;
  std::vector<double> beta;  // beta[k-1] = beta(k), k = 1..E

  explicit ChargingProfile(const std::vector<double>& r) : radii(r) {
    const int E = int(r.size());
    beta.resize(E);
    double R1sq = r[0] * r[0];
    for (int k = 1; k < E; ++k)
      beta[k - 1] = (r[k - 1] * r[k - 1] - r[k] * r[k]) / R1sq;
    beta[E - 1] = r[E - 1] * r[E - 1] / R1sq;
  }

  int units() const { return int(beta.size()); }
  double mean_batch() const {  // sum_k k*beta(k)
    double s = 0.0;
    for (int k = 1; k <= units(); ++k) s += k * beta[k - 1];
    return s;
  }
};

// Exact mean distance to the nearest of n uniform nodes in area S:
//   r = sqrt(S)*Gamma(n) / (2*Gamma(n+1/2)).
inline double transmission_range(int n, double S) {
  if (n < 1) throw std::invalid_argument("transmission_range: n must be >= 1");
  if (!(S > 0.0)) throw std::invalid_argument("transmission_range: S must be > 0");
  return 0.5 * std::sqrt(S) * std::exp(std::lgamma(n) - std::lgamma(n + 0.5));
}

inline double transmission_range_approx(int n, double S) {
  return std::sqrt(S) / (2.0 * std::sqrt(double(n)));
}

// Units of energy received at the given distance from a WCS.
inline int charge_units(double distance, const ChargingProfile& profile) {
  const int E = profile.units();
  if (distance > profile.radii[0]) return 0;
  if (distance <= profile.radii[E - 1]) return E;
  for (int k = 1; k < E; ++k)
    if (distance > profile.radii[k]) return k;
  return E;
}

// Relative-distance state index for a nearest-WCS distance.
inline int relative_distance(double distance, const NetworkConfig& cfg) {
  double R1 = cfg.radii.at(0);
  if (distance <= R1) return 0;
  if (cfg.v <= 0.0)
    throw ConfigError("v", "relative distance undefined for v=0 outside the charging range");
  int M = cfg.resolved_M();
  int k = int(std::ceil((distance - R1) / cfg.v - 1e-12));
  return k < M ? k : M;
}

}  // namespace wcs

#endif
