#ifndef WCS_SWEEP_HPP
#define WCS_SWEEP_HPP

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "wcs/asymptotics.hpp"
#include "wcs/chain.hpp"
#include "wcs/intermeeting.hpp"
#include "wcs/kernel.hpp"
#include "wcs/montecarlo.hpp"

namespace wcs {

struct SweepSpec {
  std::string param;          // one of v, L, n, m
  std::vector<double> grid;   // strictly increasing
  NetworkConfig base;
  bool simulate = false;
  long slots = 100000;
  long warmup = -1;  // -1: derive per point
  int jobs = 1;

  void validate() const {
    if (param != "v" && param != "L" && param != "n" && param != "m")
      throw ConfigError("param", "sweep parameter must be one of v, L, n, m");
    if (grid.empty()) throw ConfigError("grid", "sweep grid is empty");
    for (size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw ConfigError("grid", "sweep grid must be strictly increasing");
  }
};

struct SweepRow {
  double value = 0.0;
  int M = 0;
  double p_t = 0.0, p_c = 0.0;
  double lambda1 = 0.0;
  double P_on = 0.0, Lambda = 0.0;
  double Lambda_iid = 0.0;
  double Lambda_inf = 0.0;
  double Lambda_lower = 0.0, Lambda_upper = 0.0;
  double sim_P_on = 0.0, sim_Lambda = 0.0;
  bool simulated = false;
  std::string error;
};

inline NetworkConfig apply_sweep_value(const NetworkConfig& base,
                                       const std::string& param, double x) {
  NetworkConfig cfg = base;
  if (param == "v") cfg.v = x;
  else if (param == "L") cfg.L = int(std::llround(x));
  else if (param == "n") cfg.n = int(std::llround(x));
  else if (param == "m") cfg.m = int(std::llround(x));
  return cfg;
}

// Analytic estimate used for simulation warmup: ten mean inter-meeting times.
inline long default_warmup(const NetworkConfig& cfg, long slots) {
  long w = 1000;
  try {
    if (cfg.m >= 1 && cfg.v > 0.0) {
      TransitionKernel k = build_kernel(cfg);
      double lam1 = analyze_intermeeting(k).spectral_radius;
      if (lam1 < 1.0) w = long(std::ceil(10.0 / (1.0 - lam1)));
    }
  } catch (const std::exception&) {
  }
  w = std::max<long>(w, 100);
  return std::min(w, slots / 2);
}

inline SweepRow sweep_point(const SweepSpec& spec, size_t index) {
  SweepRow row;
  row.value = spec.grid[index];
  try {
    NetworkConfig cfg = apply_sweep_value(spec.base, spec.param, row.value);
    cfg.seed = spec.base.seed + 1000003ull * index;
    cfg.validate();
    if (cfg.m == 0) {
      // no stations: the battery drains and stays empty
      ScalingBounds b = scaling_bounds(cfg);
      row.Lambda_lower = b.lower;
      row.Lambda_upper = b.upper;
    } else {
      TransitionKernel kernel = build_kernel(cfg);
      row.M = kernel.M;
      row.p_t = kernel.p_t;
      row.p_c = kernel.p_c;
      row.lambda1 = analyze_intermeeting(kernel).spectral_radius;
      SteadyState ss = solve_steady_state(build_chain(kernel, cfg));
      row.P_on = ss.P_on;
      row.Lambda = throughput_from_pon(ss.P_on, cfg.q);
      SteadyState iid = solve_steady_state(build_chain(iid_kernel(cfg), cfg));
      row.Lambda_iid = throughput_from_pon(iid.P_on, cfg.q);
      row.Lambda_inf = infinite_battery_throughput(cfg, kernel);
      ScalingBounds b = scaling_bounds(cfg);
      row.Lambda_lower = b.lower;
      row.Lambda_upper = b.upper;
    }
    if (spec.simulate) {
      long warm = spec.warmup >= 0 ? spec.warmup
                                   : default_warmup(cfg, spec.slots);
      SimStats st = run(cfg, spec.slots, warm);
      row.sim_P_on = st.p_on_hat;
      row.sim_Lambda = st.lambda_hat;
      row.simulated = true;
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

// Rows are computed in parallel up to spec.jobs and returned in grid order.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const size_t npts = spec.grid.size();
  std::vector<SweepRow> rows(npts);
  int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < npts; ++i) rows[i] = sweep_point(spec, i);
    return rows;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= npts) return;
      rows[i] = sweep_point(spec, i);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::min<size_t>(jobs, npts); ++j)
    pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace wcs

#endif
