#ifndef WCS_VALIDATION_HPP
#define WCS_VALIDATION_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "wcs/chain.hpp"
#include "wcs/intermeeting.hpp"
#include "wcs/kernel.hpp"
#include "wcs/montecarlo.hpp"
#include "wcs/stats.hpp"

namespace wcs {

struct CheckRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<CheckRow> rows;
  double analytic_P_on = 0.0;
  double sim_P_on = 0.0;
  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return !rows.empty();
  }
};

struct ValidationTolerances {
  double tv = 0.02;
  double se_multiplier = 3.0;
  double p_on = 0.01;
  double ks = 0.02;

  ValidationTolerances scaled(double f) const {
    return {tv * f, se_multiplier * f, p_on * f, ks * f};
  }
};

// Analytic model vs slotted simulation on one scenario.
inline ValidationReport validate_config(const NetworkConfig& cfg, long slots,
                                        long warmup,
                                        const ValidationTolerances& tol = {}) {
  ValidationReport rep;
  TransitionKernel kernel = build_kernel(cfg);
  ChainModel model = build_chain(kernel, cfg);
  SteadyState ss = solve_steady_state(model);
  SimStats st = run(cfg, slots, warmup);
  EmpiricalKernel ek = empirical_kernel(st);

  rep.analytic_P_on = ss.P_on;
  rep.sim_P_on = st.p_on_hat;

  for (int i = 0; i <= kernel.M; ++i) {
    CheckRow row;
    row.name = "TV(P row " + std::to_string(i) + ")";
    row.threshold = tol.tv;
    if (!ek.row_complete[i]) {
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.pass = false;
      row.name += " [under-visited]";
    } else {
      row.value = tv_distance(kernel.P.row(i).transpose(),
                              ek.P_hat.row(i).transpose());
      row.pass = row.value < row.threshold;
    }
    rep.rows.push_back(row);
  }

  {
    CheckRow row;
    row.name = "|p_t - p_t_hat| / SE";
    row.value = st.p_t_se > 0.0
                    ? std::abs(kernel.p_t - st.p_t_hat) / st.p_t_se
                    : std::numeric_limits<double>::infinity();
    row.threshold = tol.se_multiplier;
    row.pass = row.value <= row.threshold;
    rep.rows.push_back(row);
  }
  {
    CheckRow row;
    row.name = "|p_c - p_c_hat| / SE";
    row.value = st.p_c_se > 0.0
                    ? std::abs(kernel.p_c - st.p_c_hat) / st.p_c_se
                    : std::numeric_limits<double>::infinity();
    row.threshold = tol.se_multiplier;
    row.pass = row.value <= row.threshold;
    rep.rows.push_back(row);
  }
  {
    CheckRow row;
    row.name = "|P_on - P_on_hat|";
    row.value = std::abs(ss.P_on - st.p_on_hat);
    row.threshold = tol.p_on;
    row.pass = row.value < row.threshold;
    rep.rows.push_back(row);
  }
  {
    CheckRow row;
    row.name = "KS(intermeeting CCDF)";
    row.threshold = tol.ks;
    if (st.intermeeting_samples.empty()) {
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.pass = false;
      row.name += " [no samples]";
    } else {
      Eigen::MatrixXd P = inner_kernel(kernel);
      Eigen::VectorXd p0 = departure_distribution(kernel.M);
      long tmax = *std::max_element(st.intermeeting_samples.begin(),
                                    st.intermeeting_samples.end());
      std::vector<double> table(size_t(tmax) + 2, 0.0);
      Eigen::RowVectorXd w = p0.transpose();
      for (long t = 1; t <= tmax + 1; ++t) {
        table[size_t(t)] = w.sum();
        w = w * P;
      }
      row.value = ks_distance(st.intermeeting_samples, [&](long t) {
        return t >= 1 && t <= tmax + 1 ? table[size_t(t)] : 0.0;
      });
      row.pass = row.value < row.threshold;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace wcs

#endif
