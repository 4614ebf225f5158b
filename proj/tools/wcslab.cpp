// wcslab: throughput laboratory for WCS-overlaid mobile networks.
// Subcommands: solve, kernel, intermeeting, limits, bounds, simulate,
// sweep, validate. JSON goes to stdout, CSV tables to --out.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wcs/wcs.hpp"

using json = nlohmann::ordered_json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_path;
  long slots = 100000;
  long warmup = -1;
  bool seed_given = false;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "scenario file (key = value lines)");
  cmd->add_option("--set", o.sets, "override one field, e.g. --set q=0.4")
      ->type_name("KEY=VALUE");
  cmd->add_option("--out", o.out_path, "CSV output path");
  cmd->add_option("--seed", o.seed, "simulation seed")
      ->each([&o](const std::string&) { o.seed_given = true; });
  cmd->add_option("--slots", o.slots, "simulation slots");
  cmd->add_option("--warmup", o.warmup,
                  "warmup slots (default: 10x the mean inter-meeting time)");
}

wcs::NetworkConfig make_config(const CommonOpts& o) {
  wcs::NetworkConfig cfg = wcs::default_config();
  if (!o.config_path.empty()) cfg = wcs::load_config_file(o.config_path, cfg);
  for (const std::string& s : o.sets) {
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw wcs::ConfigError(s, "--set expects KEY=VALUE");
    wcs::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed_given) cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write to '" + path + "'");
  out << text;
}

std::string pi_csv(const wcs::SteadyState& ss) {
  std::ostringstream csv;
  for (int l = 0; l <= ss.L; ++l) {
    Eigen::VectorXd lvl = ss.level(l);
    for (int d = 0; d <= ss.M; ++d) {
      if (d) csv << ",";
      csv << wcs::fmt17(lvl(d));
    }
    csv << "\n";
  }
  return csv.str();
}

int cmd_solve(const CommonOpts& o) {
  wcs::NetworkConfig cfg = make_config(o);
  json out;
  if (cfg.m == 0) {
    out["P_on"] = 0.0;
    out["Lambda"] = 0.0;
    out["residual"] = 0.0;
    if (!o.out_path.empty()) write_file(o.out_path, "");
  } else {
    wcs::TransitionKernel kernel = wcs::build_kernel(cfg);
    for (const std::string& w :
         wcs::charge_probability_warnings(wcs::charge_probability(cfg)))
      std::cerr << "warning: " << w << "\n";
    wcs::SteadyState ss = wcs::solve_steady_state(wcs::build_chain(kernel, cfg));
    out["P_on"] = ss.P_on;
    out["Lambda"] = wcs::throughput_from_pon(ss.P_on, cfg.q);
    out["residual"] = ss.residual;
    if (!o.out_path.empty()) write_file(o.out_path, pi_csv(ss));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_kernel(const CommonOpts& o) {
  wcs::NetworkConfig cfg = make_config(o);
  wcs::TransitionKernel kernel = wcs::build_kernel(cfg);
  json out;
  out["M"] = kernel.M;
  out["p_t"] = kernel.p_t;
  out["p_c"] = kernel.p_c;
  out["beta"] = kernel.beta;
  out["state_probabilities"] = kernel.state_prob_;
  std::cout << out.dump(2) << "\n";
  if (!o.out_path.empty()) {
    std::ostringstream csv;
    for (int i = 0; i <= kernel.M; ++i) {
      for (int j = 0; j <= kernel.M; ++j) {
        if (j) csv << ",";
        csv << wcs::fmt17(kernel.P(i, j));
      }
      csv << "\n";
    }
    write_file(o.out_path, csv.str());
  }
  return 0;
}

int cmd_intermeeting(const CommonOpts& o, long tmax) {
  wcs::NetworkConfig cfg = make_config(o);
  wcs::TransitionKernel kernel = wcs::build_kernel(cfg);
  wcs::SpectralSummary s = wcs::analyze_intermeeting(kernel);
  json out;
  out["M"] = kernel.M;
  out["eigenvalues"] = s.eigenvalues;
  out["gamma"] = s.gamma;
  out["spectral_radius"] = s.spectral_radius;
  out["mean_exact"] = s.mean_exact;
  out["mean_approx"] = s.mean_approx;
  out["degenerate"] = s.degenerate;
  std::cout << out.dump(2) << "\n";
  if (!o.out_path.empty()) {
    Eigen::MatrixXd P = wcs::inner_kernel(kernel);
    Eigen::VectorXd p0 = wcs::departure_distribution(kernel.M);
    std::ostringstream csv;
    csv << "t,exact,spectral,one_term\n";
    Eigen::RowVectorXd w = p0.transpose();
    for (long t = 1; t <= tmax; ++t) {
      double exact = w.sum();
      // the spectral form falls back to the exact value on degeneracy
      double spectral = s.degenerate ? exact : s.ccdf(t);
      csv << t << "," << wcs::fmt17(exact) << "," << wcs::fmt17(spectral)
          << "," << wcs::fmt17(s.ccdf_one_term(t)) << "\n";
      w = w * P;
    }
    write_file(o.out_path, csv.str());
  }
  return 0;
}

int cmd_limits(const CommonOpts& o) {
  wcs::NetworkConfig cfg = make_config(o);
  json out;
  if (cfg.m == 0) {
    out["lambda_bar"] = 0.0;
    out["P_on_infinite"] = 0.0;
    out["Lambda_infinite"] = 0.0;
  } else {
    wcs::TransitionKernel kernel = wcs::build_kernel(cfg);
    out["p_t"] = kernel.p_t;
    out["p_c"] = kernel.p_c;
    out["mean_batch"] = wcs::ChargingProfile(cfg.radii).mean_batch();
    out["lambda_bar"] = wcs::mean_arrival_rate(cfg, kernel);
    out["P_on_infinite"] = wcs::infinite_battery_pon(cfg, kernel);
    out["Lambda_infinite"] = wcs::infinite_battery_throughput(cfg, kernel);
    out["P_on_lower_bound"] = wcs::pon_lower_bound(kernel, cfg);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_bounds(const CommonOpts& o) {
  wcs::NetworkConfig cfg = make_config(o);
  wcs::ScalingBounds b = wcs::scaling_bounds(cfg);
  json out;
  out["a"] = b.a;
  out["c1"] = b.c1;
  out["c2"] = b.c2;
  out["ratio"] = b.ratio;
  out["lower"] = b.lower;
  out["upper"] = b.upper;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const CommonOpts& o, const std::string& samples_path) {
  wcs::NetworkConfig cfg = make_config(o);
  long warmup = o.warmup >= 0 ? o.warmup : wcs::default_warmup(cfg, o.slots);
  wcs::SimStats st = wcs::run(cfg, o.slots, warmup);
  double ti_mean = 0.0;
  for (long s : st.intermeeting_samples) ti_mean += double(s);
  if (!st.intermeeting_samples.empty())
    ti_mean /= double(st.intermeeting_samples.size());
  json out;
  out["slots"] = st.slots;
  out["warmup"] = st.warmup;
  out["seed"] = st.seed;
  out["P_on_hat"] = st.p_on_hat;
  out["p_t_hat"] = st.p_t_hat;
  out["p_t_se"] = st.p_t_se;
  out["p_c_hat"] = st.p_c_hat;
  out["p_c_se"] = st.p_c_se;
  out["Lambda_hat"] = st.lambda_hat;
  out["energy_inflow_rate"] = st.energy_inflow_rate;
  out["intermeeting_samples"] = st.intermeeting_samples.size();
  out["intermeeting_mean"] = ti_mean;
  out["min_energy"] = st.min_energy_seen;
  out["max_energy"] = st.max_energy_seen;
  std::cout << out.dump(2) << "\n";
  if (!o.out_path.empty()) {
    std::ostringstream csv;
    csv << "t,active_fraction\n";
    for (size_t i = 0; i < st.active_fraction.size(); ++i)
      csv << (st.warmup + long(i) + 1) << ","
          << wcs::fmt17(double(st.active_fraction[i])) << "\n";
    write_file(o.out_path, csv.str());
  }
  if (!samples_path.empty()) {
    std::ostringstream txt;
    for (long s : st.intermeeting_samples) txt << s << "\n";
    write_file(samples_path, txt.str());
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& param,
              const std::string& grid_text, bool simulate, int jobs) {
  wcs::SweepSpec spec;
  spec.base = make_config(o);
  spec.param = param;
  spec.simulate = simulate;
  spec.slots = o.slots;
  spec.warmup = o.warmup;
  spec.jobs = jobs;
  for (double x : wcs::detail::parse_double_list(grid_text, "grid"))
    spec.grid.push_back(x);
  spec.validate();
  if (o.out_path.empty())
    throw wcs::ConfigError("out", "sweep requires --out for the CSV table");

  std::vector<wcs::SweepRow> rows = wcs::run_sweep(spec);
  std::ostringstream csv;
  csv << "param,value,M,p_t,p_c,lambda1,P_on,Lambda,Lambda_iid,Lambda_inf,"
         "Lambda_lower,Lambda_upper,sim_P_on,sim_Lambda,error\n";
  for (const auto& r : rows) {
    csv << param << "," << wcs::fmt17(r.value) << "," << r.M << ","
        << wcs::fmt17(r.p_t) << "," << wcs::fmt17(r.p_c) << ","
        << wcs::fmt17(r.lambda1) << "," << wcs::fmt17(r.P_on) << ","
        << wcs::fmt17(r.Lambda) << "," << wcs::fmt17(r.Lambda_iid) << ","
        << wcs::fmt17(r.Lambda_inf) << "," << wcs::fmt17(r.Lambda_lower)
        << "," << wcs::fmt17(r.Lambda_upper) << ",";
    if (r.simulated)
      csv << wcs::fmt17(r.sim_P_on) << "," << wcs::fmt17(r.sim_Lambda);
    else
      csv << ",";
    std::string err = r.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n') ch = ';';
    csv << "," << err << "\n";
  }
  write_file(o.out_path, csv.str());

  json out;
  out["param"] = param;
  out["points"] = rows.size();
  int failures = 0;
  for (const auto& r : rows)
    if (!r.error.empty()) ++failures;
  out["failures"] = failures;
  out["csv"] = o.out_path;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_validate(const CommonOpts& o, double tolerance) {
  wcs::NetworkConfig cfg = make_config(o);
  long warmup = o.warmup >= 0 ? o.warmup : wcs::default_warmup(cfg, o.slots);
  wcs::ValidationTolerances tol;
  wcs::ValidationReport rep =
      wcs::validate_config(cfg, o.slots, warmup, tol.scaled(tolerance));
  std::printf("%-28s %12s %12s  %s\n", "check", "value", "threshold", "result");
  for (const auto& row : rep.rows)
    std::printf("%-28s %12.6g %12.6g  %s\n", row.name.c_str(), row.value,
                row.threshold, row.pass ? "pass" : "FAIL");
  std::printf("analytic P_on = %.6f, simulated P_on = %.6f\n",
              rep.analytic_P_on, rep.sim_P_on);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"throughput laboratory for mobile networks with wireless "
               "charging stations"};
  app.require_subcommand(1);

  CommonOpts o;
  long tmax = 500;
  std::string samples_path, sweep_param, sweep_grid;
  bool sweep_simulate = false;
  int jobs = 1;
  double tolerance = 1.0;

  auto* solve = app.add_subcommand("solve", "steady state, P_on and throughput");
  add_common(solve, o);
  auto* kernel = app.add_subcommand("kernel", "distance transition kernel dump");
  add_common(kernel, o);
  auto* inter = app.add_subcommand("intermeeting", "inter-meeting time analysis");
  add_common(inter, o);
  inter->add_option("--tmax", tmax, "CCDF table horizon");
  auto* limits = app.add_subcommand("limits", "infinite-battery limit");
  add_common(limits, o);
  auto* bounds = app.add_subcommand("bounds", "density scaling-law bounds");
  add_common(bounds, o);
  auto* sim = app.add_subcommand("simulate", "slotted Monte Carlo run");
  add_common(sim, o);
  sim->add_option("--samples-out", samples_path,
                  "write raw inter-meeting samples, one per line");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  add_common(sweep, o);
  sweep->add_option("--param", sweep_param, "v, L, n or m")->required();
  sweep->add_option("--grid", sweep_grid, "comma-separated values")->required();
  sweep->add_flag("--simulate", sweep_simulate, "add Monte Carlo columns");
  sweep->add_option("--jobs", jobs, "parallel workers");
  auto* validate = app.add_subcommand("validate", "analytic vs simulation");
  add_common(validate, o);
  validate->add_option("--tolerance", tolerance, "tolerance multiplier");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (kernel->parsed()) return cmd_kernel(o);
    if (inter->parsed()) return cmd_intermeeting(o, tmax);
    if (limits->parsed()) return cmd_limits(o);
    if (bounds->parsed()) return cmd_bounds(o);
    if (sim->parsed()) return cmd_simulate(o, samples_path);
    if (sweep->parsed())
      return cmd_sweep(o, sweep_param, sweep_grid, sweep_simulate, jobs);
    if (validate->parsed()) return cmd_validate(o, tolerance);
  } catch (const wcs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
