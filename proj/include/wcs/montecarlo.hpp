#ifndef WCS_MONTECARLO_HPP
#define WCS_MONTECARLO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "wcs/config.hpp"
#include "wcs/kernel.hpp"

namespace wcs {

inline double torus_delta(double a, double b, double side) {
  double d = std::abs(a - b);
  return d > 0.5 * side ? side - d : d;
}

inline double torus_distance(double x1, double y1, double x2, double y2,
                             double side) {
  double dx = torus_delta(x1, x2, side);
  double dy = torus_delta(y1, y2, side);
  return std::hypot(dx, dy);
}

inline double wrap_coord(double x, double side) {
  x = std::fmod(x, side);
  return x < 0.0 ? x + side : x;
}

// Slotted world: positions on the [0, sqrt(S))^2 torus, WCS locations fixed
// per run, per-node batteries and relay queues.
struct WorldState {
  NetworkConfig cfg;
  ChargingProfile profile;
  double side = 0.0;
  double range = 0.0;  // transmission range r (exact form)
  long slot = 0;       // completed slots

  std::vector<double> px, py;  // nodes
  std::vector<double> wx, wy;  // stations
  std::vector<int> energy;
  std::vector<int> dest;                           // fixed S-D pairing
  std::vector<std::vector<std::deque<int>>> relay; // [holder][dest] -> src FIFO

  std::mt19937_64 rng;

  // scratch, reused across slots
  std::vector<double> nearest_dist;
  std::vector<int> charge_by;   // WCS index charging the node this slot, or -1
  std::vector<char> is_tx;
  std::vector<int> in_region_ids;

  explicit WorldState(const NetworkConfig& c)
      : cfg(c), profile(c.radii), rng(c.seed) {
    cfg.validate();
    side = std::sqrt(cfg.S);
    range = transmission_range(cfg.n, cfg.S);
    std::uniform_real_distribution<double> unif(0.0, side);
    px.resize(cfg.n);
    py.resize(cfg.n);
    for (int i = 0; i < cfg.n; ++i) {
      px[i] = unif(rng);
      py[i] = unif(rng);
    }
    wx.resize(cfg.m);
    wy.resize(cfg.m);
    for (int j = 0; j < cfg.m; ++j) {
      wx[j] = unif(rng);
      wy[j] = unif(rng);
    }
    energy.assign(cfg.n, cfg.L / 2);  // mid-charge start, settled by warmup
    dest.resize(cfg.n);
    // random pairing without self-loops: shuffle, then repair fixed points
    for (int i = 0; i < cfg.n; ++i) dest[i] = i;
    if (cfg.n > 1) {
      for (int i = cfg.n - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(dest[i], dest[pick(rng)]);
      }
      for (int i = 0; i < cfg.n; ++i)
        if (dest[i] == i) std::swap(dest[i], dest[(i + 1) % cfg.n]);
    }
    relay.assign(cfg.n, std::vector<std::deque<int>>(cfg.n));
    // Saturation warm start: stock every relay with a couple of packets per
    // flow so measured delivery rates reflect the steady state instead of
    // the slow queue fill-up. Sources are attributed through the inverse
    // pairing, so long-run rates stay exact.
    if (cfg.n > 1) {
      std::vector<int> src_of(cfg.n, 0);
      for (int s = 0; s < cfg.n; ++s) src_of[dest[s]] = s;
      for (int j = 0; j < cfg.n; ++j)
        for (int d = 0; d < cfg.n; ++d) {
          if (d == j || src_of[d] == j) continue;
          relay[j][d].push_back(src_of[d]);
          relay[j][d].push_back(src_of[d]);
        }
    }
    nearest_dist.resize(cfg.n);
    charge_by.assign(cfg.n, -1);
    is_tx.assign(cfg.n, 0);
  }

  double node_wcs_distance(int i, int j) const {
    return torus_distance(px[i], py[i], wx[j], wy[j], side);
  }
  double node_distance(int i, int k) const {
    return torus_distance(px[i], py[i], px[k], py[k], side);
  }
  double nearest_wcs_distance(int i) const {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < cfg.m; ++j) best = std::min(best, node_wcs_distance(i, j));
    return best;
  }
  // Distance state for stats; with v = 0 only in/out is meaningful.
  int distance_state(double dist, int M) const {
    if (dist <= cfg.radii[0]) return 0;
    if (cfg.v <= 0.0 || cfg.m == 0) return M;
    int k = int(std::ceil((dist - cfg.radii[0]) / cfg.v - 1e-12));
    return k < M ? k : M;
  }
};

// Per-slot event record handed to the stats collector.
struct SlotEvents {
  int active_nodes = 0;        // e >= 1 at slot end
  int routing_active = 0;      // e >= 1 when the routing stage ran
  int in_region_nodes = 0;     // within R_1 of some WCS after the move
  int charged_nodes = 0;       // selected by at least one WCS
  int tx_feasible = 0;         // transmitter mode with >= 1 receiver in range,
                               // counted for every node (mode-and-neighbor)
  int tx_spent = 0;            // transmissions that actually consumed energy
  long energy_added = 0;       // units actually stored (after the L cap)
  std::vector<int> delivered_src;  // sources of packets delivered this slot
};

// Advance one slot: move, charge, route. Slots count from 1; odd slots run
// the source->relay phase, even slots relay->destination.
inline SlotEvents step(WorldState& w) {
  const NetworkConfig& cfg = w.cfg;
  const int n = cfg.n;
  SlotEvents ev;
  w.slot += 1;
  const bool phase1 = (w.slot % 2) == 1;

  // 1. mobility: a fresh uniform direction, displacement exactly v
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    double th = angle(w.rng);
    w.px[i] = wrap_coord(w.px[i] + cfg.v * std::cos(th), w.side);
    w.py[i] = wrap_coord(w.py[i] + cfg.v * std::sin(th), w.side);
  }

  // 2. charging: each WCS picks up to u nodes in range; a node picked by
  // several WCSs is charged by the nearest one only
  std::fill(w.charge_by.begin(), w.charge_by.end(), -1);
  for (int j = 0; j < cfg.m; ++j) {
    w.in_region_ids.clear();
    for (int i = 0; i < n; ++i)
      if (w.node_wcs_distance(i, j) <= cfg.radii[0])
        w.in_region_ids.push_back(i);
    int cnt = int(w.in_region_ids.size());
    int take = std::min(cnt, cfg.u);
    for (int t = 0; t < take; ++t) {  // partial Fisher-Yates
      if (cnt > cfg.u) {
        std::uniform_int_distribution<int> pick(t, cnt - 1);
        std::swap(w.in_region_ids[t], w.in_region_ids[pick(w.rng)]);
      }
      int i = w.in_region_ids[t];
      if (w.charge_by[i] < 0 ||
          w.node_wcs_distance(i, j) < w.node_wcs_distance(i, w.charge_by[i]))
        w.charge_by[i] = j;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (w.charge_by[i] < 0) continue;
    ev.charged_nodes += 1;
    int gain = charge_units(w.node_wcs_distance(i, w.charge_by[i]), w.profile);
    int stored = std::min(cfg.L - w.energy[i], gain);
    w.energy[i] += stored;
    ev.energy_added += stored;
  }

  // 3. routing: mode switch, then transmissions under the two-phase schedule
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < n; ++i) w.is_tx[i] = coin(w.rng) < cfg.q ? 1 : 0;
  for (int i = 0; i < n; ++i)
    if (w.energy[i] >= 1) ev.routing_active += 1;

  // a packet reaches its receiver only if no other scheduled transmitter
  // sits within the transmission range of that receiver
  static thread_local std::vector<char> interferer;
  interferer.assign(n, 0);
  for (int k = 0; k < n; ++k)
    if (w.is_tx[k] && w.energy[k] >= 1) interferer[k] = 1;
  auto guard_zone_clear = [&](int sender, int receiver) {
    for (int k = 0; k < n; ++k) {
      if (k == sender || k == receiver) continue;
      if (interferer[k] && w.node_distance(k, receiver) < w.range)
        return false;
    }
    return true;
  };

  for (int i = 0; i < n; ++i) {
    if (!w.is_tx[i]) continue;
    // receivers in range
    static thread_local std::vector<int> rx;
    rx.clear();
    for (int k = 0; k < n; ++k)
      if (k != i && !w.is_tx[k] && w.node_distance(i, k) <= w.range)
        rx.push_back(k);
    if (rx.empty()) continue;
    ev.tx_feasible += 1;
    if (w.energy[i] < 1) continue;
    ev.tx_spent += 1;
    w.energy[i] -= 1;  // one unit per transmission
    if (phase1) {
      std::uniform_int_distribution<int> pick(0, int(rx.size()) - 1);
      int tgt = rx[pick(w.rng)];
      if (!guard_zone_clear(i, tgt)) continue;
      if (tgt == w.dest[i])
        ev.delivered_src.push_back(i);
      else
        w.relay[tgt][w.dest[i]].push_back(i);
    } else {
      static thread_local std::vector<int> usable;
      usable.clear();
      for (int tgt : rx)
        if (tgt == w.dest[i] || !w.relay[i][tgt].empty()) usable.push_back(tgt);
      if (usable.empty()) continue;
      std::uniform_int_distribution<int> pick(0, int(usable.size()) - 1);
      int tgt = usable[pick(w.rng)];
      if (!guard_zone_clear(i, tgt)) continue;
      auto& q = w.relay[i][tgt];
      if (!q.empty()) {
        ev.delivered_src.push_back(q.front());
        q.pop_front();
      } else {
        ev.delivered_src.push_back(i);  // own packet straight home
      }
    }
  }

  for (int i = 0; i < n; ++i)
    if (w.energy[i] >= 1) ev.active_nodes += 1;
  for (int i = 0; i < n; ++i) {
    w.nearest_dist[i] = cfg.m > 0 ? w.nearest_wcs_distance(i)
                                  : std::numeric_limits<double>::infinity();
    if (cfg.m > 0 && w.nearest_dist[i] <= cfg.radii[0]) ev.in_region_nodes += 1;
  }
  return ev;
}

struct SimStats {
  long slots = 0;
  long warmup = 0;
  std::uint64_t seed = 0;
  int M = 0;

  double p_on_hat = 0.0;
  double p_t_hat = 0.0, p_t_se = 0.0;
  double p_c_hat = 0.0, p_c_se = 0.0;
  double lambda_hat = 0.0;  // delivered packets per node per slot
  double energy_inflow_rate = 0.0;

  Eigen::MatrixXd transition_counts;       // (M+1)^2, post-warmup
  std::vector<long> intermeeting_samples;  // gaps between meeting slots, >= 2
  std::vector<long> delivered;             // per node
  std::vector<float> active_fraction;      // per post-warmup slot
  int min_energy_seen = 0, max_energy_seen = 0;
};

// Run with statistics collected after the warmup. Deterministic per seed.
inline SimStats run(const NetworkConfig& cfg, long slots, long warmup) {
  if (!(slots > warmup && warmup >= 0))
    throw std::invalid_argument("run requires slots > warmup >= 0");
  WorldState w(cfg);
  const int n = cfg.n;
  const int M = (cfg.m > 0 && cfg.v > 0.0) ? cfg.resolved_M() : 1;

  SimStats st;
  st.slots = slots;
  st.warmup = warmup;
  st.seed = cfg.seed;
  st.M = M;
  st.transition_counts = Eigen::MatrixXd::Zero(M + 1, M + 1);
  st.delivered.assign(n, 0);
  st.active_fraction.reserve(slots - warmup);
  st.min_energy_seen = cfg.L;
  st.max_energy_seen = 0;

  std::vector<int> prev_state(n, -1);
  std::vector<long> last_meeting(n, -1);

  const int batches = 100;  // batch means for the frequency standard errors
  long batch_len = std::max<long>(1, (slots - warmup) / batches);
  std::vector<double> bt_num, bt_den, bc_num, bc_den;
  double cur_bt_num = 0, cur_bt_den = 0, cur_bc_num = 0, cur_bc_den = 0;
  long in_batch = 0;

  long active_node_slots = 0, node_slots = 0;
  long tx_feasible = 0;
  long charged = 0, in_region = 0;
  long delivered_total = 0;
  long inflow = 0;

  for (long t = 1; t <= slots; ++t) {
    SlotEvents ev = step(w);
    const bool counted = t > warmup;

    for (int i = 0; i < n; ++i) {
      st.min_energy_seen = std::min(st.min_energy_seen, w.energy[i]);
      st.max_energy_seen = std::max(st.max_energy_seen, w.energy[i]);
    }
    if (!counted) {
      for (int i = 0; i < n; ++i)
        prev_state[i] = w.distance_state(w.nearest_dist[i], M);
      continue;
    }

    st.active_fraction.push_back(float(ev.active_nodes) / float(n));
    node_slots += n;
    active_node_slots += ev.active_nodes;
    tx_feasible += ev.tx_feasible;
    charged += ev.charged_nodes;
    in_region += ev.in_region_nodes;
    inflow += ev.energy_added;
    for (int src : ev.delivered_src) {
      st.delivered[src] += 1;
      delivered_total += 1;
    }

    cur_bt_num += ev.tx_feasible;
    cur_bt_den += n;
    cur_bc_num += ev.charged_nodes;
    cur_bc_den += ev.in_region_nodes;
    if (++in_batch == batch_len) {
      if (cur_bt_den > 0) {
        bt_num.push_back(cur_bt_num);
        bt_den.push_back(cur_bt_den);
      }
      if (cur_bc_den > 0) {
        bc_num.push_back(cur_bc_num);
        bc_den.push_back(cur_bc_den);
      }
      cur_bt_num = cur_bt_den = cur_bc_num = cur_bc_den = 0;
      in_batch = 0;
    }

    for (int i = 0; i < n; ++i) {
      int s = w.distance_state(w.nearest_dist[i], M);
      if (prev_state[i] >= 0) st.transition_counts(prev_state[i], s) += 1.0;
      prev_state[i] = s;
      if (cfg.m > 0 && s == 0) {
        if (last_meeting[i] >= 0 && t - last_meeting[i] >= 2)
          st.intermeeting_samples.push_back(t - last_meeting[i]);
        last_meeting[i] = t;
      }
    }
  }

  long counted_slots = slots - warmup;
  st.p_on_hat = double(active_node_slots) / double(node_slots);
  st.p_t_hat = double(tx_feasible) / double(node_slots);
  st.p_c_hat = in_region > 0 ? double(charged) / double(in_region) : 0.0;
  st.lambda_hat = double(delivered_total) / double(n) / double(counted_slots);
  st.energy_inflow_rate = double(inflow) / double(n) / double(counted_slots);

  auto batch_se = [](const std::vector<double>& num,
                     const std::vector<double>& den, double mean) {
    if (num.size() < 2) return 0.0;
    double var = 0.0;
    for (size_t b = 0; b < num.size(); ++b) {
      double r = num[b] / den[b];
      var += (r - mean) * (r - mean);
    }
    var /= double(num.size() - 1);
    return std::sqrt(var / double(num.size()));
  };
  st.p_t_se = batch_se(bt_num, bt_den, st.p_t_hat);
  st.p_c_se = batch_se(bc_num, bc_den, st.p_c_hat);
  return st;
}

struct EmpiricalKernel {
  Eigen::MatrixXd P_hat;
  Eigen::VectorXd row_visits;
  std::vector<bool> row_complete;  // >= 1000 visits
};

// Row-normalized transition frequencies; thin rows are flagged, never filled.
inline EmpiricalKernel empirical_kernel(const SimStats& st,
                                        long min_visits = 1000) {
  const int n = int(st.transition_counts.rows());
  EmpiricalKernel ek;
  ek.P_hat = Eigen::MatrixXd::Zero(n, n);
  ek.row_visits = st.transition_counts.rowwise().sum();
  ek.row_complete.assign(n, false);
  for (int i = 0; i < n; ++i) {
    if (ek.row_visits(i) >= double(min_visits)) {
      ek.row_complete[i] = true;
      ek.P_hat.row(i) = st.transition_counts.row(i) / ek.row_visits(i);
    }
  }
  return ek;
}

}  // namespace wcs

#endif
