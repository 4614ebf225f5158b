#ifndef WCS_CHAIN_HPP
#define WCS_CHAIN_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "wcs/config.hpp"
#include "wcs/kernel.hpp"

namespace wcs {

// Block description of the (L+1)(M+1)-state generator. Levels are energy
// counts; within a level the phase is the relative-distance state.
//   B0   level-0 diagonal block: distance moves minus the charging drain
//   A0   downward block, p_t * I (one transmission per slot)
//   A1   interior diagonal block, B0 - A0
//   recharge[k-1] = p_c * beta(k), the (0,0) entry of the k-units-up block
struct ChainModel {
  Eigen::MatrixXd B0;
  Eigen::MatrixXd A1;
  double p_t = 0.0;
  double p_c = 0.0;
  std::vector<double> recharge;
  int L = 0;
  int M = 0;

  int phases() const { return M + 1; }
  int batches() const { return int(recharge.size()); }
  int states() const { return (L + 1) * phases(); }
  double recharge_total() const {
    double s = 0.0;
    for (double c : recharge) s += c;
    return s;
  }
  // Folded up-coefficient from level L-k into the full-battery column.
  double folded_recharge(int k) const {
    double s = 0.0;
    for (int j = k; j <= batches(); ++j) s += recharge[j - 1];
    return s;
  }
};

inline ChainModel build_chain(const TransitionKernel& kernel, int L) {
  if (L < 1) throw std::invalid_argument("build_chain requires L >= 1");
  const int n = kernel.M + 1;
  ChainModel model;
  model.L = L;
  model.M = kernel.M;
  model.p_t = kernel.p_t;
  model.p_c = kernel.p_c;
  model.recharge.resize(kernel.beta.size());
  for (size_t k = 0; k < kernel.beta.size(); ++k)
    model.recharge[k] = kernel.p_c * kernel.beta[k];

  model.B0 = kernel.P - Eigen::MatrixXd::Identity(n, n);
  model.B0(0, 0) -= kernel.p_c;
  model.A1 = model.B0 - kernel.p_t * Eigen::MatrixXd::Identity(n, n);

  // Generator sanity: level-0 and interior block-row sums must vanish.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd r0 = model.B0 * ones;
  r0(0) += model.recharge_total();
  Eigen::VectorXd ri = model.A1 * ones;
  ri(0) += model.recharge_total();
  ri.array() += kernel.p_t;
  if (r0.cwiseAbs().maxCoeff() > 1e-12 || ri.cwiseAbs().maxCoeff() > 1e-12)
    throw std::logic_error("chain blocks violate the generator row-sum identity");
  return model;
}

inline ChainModel build_chain(const TransitionKernel& kernel,
                              const NetworkConfig& cfg) {
  return build_chain(kernel, cfg.L);
}

struct SteadyState {
  Eigen::VectorXd pi;  // level-major: pi[(M+1)*l + d]
  int L = 0;
  int M = 0;
  double residual = 0.0;  // ||pi Q||_inf
  double P_on = 0.0;

  Eigen::VectorXd level(int l) const {
    return pi.segment(l * (M + 1), M + 1);
  }
};

inline double active_probability(const SteadyState& ss) {
  return 1.0 - ss.level(0).sum();
}

// Lambda(P_on) = q/2 * P_on * exp(-pi/4 q P_on) * (1 - exp(pi/4 (q-1))).
inline double throughput_from_pon(double P_on, double q) {
  const double pi4 = std::numbers::pi / 4.0;
  return 0.5 * q * P_on * std::exp(-pi4 * q * P_on) *
         (1.0 - std::exp(pi4 * (q - 1.0)));
}

namespace detail {

// Left stationary vector of a small row-stochastic matrix, by replacing one
// balance equation with the normalization row.
inline Eigen::VectorXd stationary_row_vector(const Eigen::MatrixXd& P) {
  const int n = int(P.rows());
  Eigen::MatrixXd A = P - Eigen::MatrixXd::Identity(n, n);
  A.col(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Unit(n, n - 1);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A.transpose());
  if (!lu.isInvertible())
    throw std::runtime_error("distance kernel is reducible; no unique stationary vector");
  Eigen::VectorXd piv = lu.solve(rhs);
  piv = piv.cwiseMax(0.0);
  piv /= piv.sum();
  return piv;
}

inline double chain_residual(const ChainModel& model,
                             const Eigen::VectorXd& pi) {
  const int n = model.phases();
  const int L = model.L;
  const int E = model.batches();
  auto lvl = [&](int l) { return pi.segment(l * n, n).transpose(); };
  double worst = 0.0;
  for (int c = 0; c <= L; ++c) {
    Eigen::RowVectorXd r;
    if (c == 0)
      r = lvl(0) * model.B0;
    else
      r = lvl(c) * model.A1;
    if (c < L) r += model.p_t * lvl(c + 1);
    for (int k = 1; k <= std::min(E, c); ++k) {
      double coeff = (c == L) ? model.folded_recharge(k) : model.recharge[k - 1];
      r(0) += coeff * pi((c - k) * n);
    }
    if (c == L) r(0) += model.recharge_total() * pi(L * n);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace detail

// Balance-equation solve by censoring levels from the top down. Each
// censoring step eliminates one level; the up-blocks have a single nonzero
// row, so fills stay rank-one and the sweep costs O(L) small LU factors.
inline SteadyState solve_steady_state(const ChainModel& model) {
  const int n = model.phases();
  const int L = model.L;
  const int E = model.batches();

  SteadyState ss;
  ss.L = L;
  ss.M = model.M;
  ss.pi = Eigen::VectorXd::Zero(model.states());

  if (model.p_t == 0.0) {
    // No downward transitions: all stationary mass sits at full battery,
    // distributed as the stationary distance marginal.
    Eigen::MatrixXd P = model.B0 + Eigen::MatrixXd::Identity(n, n);
    P(0, 0) += model.p_c;
    ss.pi.segment(L * n, n) = detail::stationary_row_vector(P);
    ss.residual = detail::chain_residual(model, ss.pi);
    ss.P_on = active_probability(ss);
    return ss;
  }

  // Up-vectors into level t (row 0 of the block from level t-k), with the
  // overflow fold into the full-battery column.
  auto initial_up = [&](int t, int k) {
    Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(n);
    if (k >= 1 && k <= E && t - k >= 0)
      w(0) = (t == L) ? model.folded_recharge(k) : model.recharge[k - 1];
    return w;
  };

  std::vector<std::vector<Eigen::RowVectorXd>> up(L + 1);
  for (int t = 1; t <= L; ++t) {
    up[t].resize(E + 1, Eigen::RowVectorXd::Zero(n));
    for (int k = 1; k <= E; ++k) up[t][k] = initial_up(t, k);
  }

  std::vector<Eigen::MatrixXd> diag(L + 1);
  diag[0] = model.B0;
  for (int l = 1; l <= L; ++l) diag[l] = model.A1;
  diag[L](0, 0) += model.recharge_total();

  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu(L + 1);
  std::vector<std::vector<Eigen::RowVectorXd>> up_at_censor(L + 1);

  for (int l = L; l >= 1; --l) {
    up_at_censor[l] = up[l];
    lu[l] = Eigen::PartialPivLU<Eigen::MatrixXd>(-diag[l].transpose());
    for (int k = 1; k <= std::min(E, l); ++k) {
      const Eigen::RowVectorXd& w = up[l][k];
      if (w.isZero(0.0)) continue;
      Eigen::RowVectorXd fill =
          model.p_t * lu[l].solve(w.transpose()).transpose();
      if (k == 1)
        diag[l - 1].row(0) += fill;
      else
        up[l - 1][k - 1] += fill;
    }
  }

  // Level-0 system: one redundant equation replaced by normalization of
  // the level-0 block (global normalization happens after back-substitution).
  Eigen::MatrixXd A = diag[0];
  A.col(n - 1).setOnes();
  Eigen::FullPivLU<Eigen::MatrixXd> lu0(A.transpose());
  if (!lu0.isInvertible())
    throw std::runtime_error(
        "steady-state system is singular beyond the rank-1 deficiency "
        "(reducible chain)");
  Eigen::VectorXd pi0 = lu0.solve(Eigen::VectorXd::Unit(n, n - 1));
  ss.pi.segment(0, n) = pi0;

  for (int l = 1; l <= L; ++l) {
    Eigen::RowVectorXd z = Eigen::RowVectorXd::Zero(n);
    for (int k = 1; k <= std::min(E, l); ++k)
      z += ss.pi((l - k) * n) * up_at_censor[l][k];
    ss.pi.segment(l * n, n) = lu[l].solve(z.transpose());
  }

  ss.pi = ss.pi.cwiseMax(0.0);
  double total = ss.pi.sum();
  if (!(total > 0.0))
    throw std::runtime_error("steady-state solve produced a zero vector");
  ss.pi /= total;
  ss.residual = detail::chain_residual(model, ss.pi);
  ss.P_on = active_probability(ss);
  return ss;
}

// Dense assembly of the full generator; test oracle and residual checks.
inline Eigen::MatrixXd assemble_dense(const ChainModel& model) {
  const int n = model.phases();
  const int L = model.L;
  const int E = model.batches();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(model.states(), model.states());
  for (int l = 0; l <= L; ++l) {
    Eigen::MatrixXd d = (l == 0) ? model.B0 : model.A1;
    if (l == L) d(0, 0) += model.recharge_total();
    Q.block(l * n, l * n, n, n) = d;
    if (l >= 1)
      Q.block(l * n, (l - 1) * n, n, n) =
          model.p_t * Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= E && l + k <= L; ++k) {
      int c = l + k;
      double coeff =
          (c == L) ? model.folded_recharge(k) : model.recharge[k - 1];
      Q(l * n, c * n) += coeff;
    }
  }
  return Q;
}

// Independent oracle: left null space of the dense generator.
inline SteadyState solve_steady_state_dense(const ChainModel& model) {
  Eigen::MatrixXd Q = assemble_dense(model);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Q.transpose());
  lu.setThreshold(1e-10);
  Eigen::MatrixXd ker = lu.kernel();
  if (ker.cols() < 1)
    throw std::runtime_error("dense solve found no stationary vector");
  Eigen::VectorXd pi = ker.col(0);
  if (pi.sum() < 0.0) pi = -pi;
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  SteadyState ss;
  ss.L = model.L;
  ss.M = model.M;
  ss.pi = pi;
  ss.residual = detail::chain_residual(model, pi);
  ss.P_on = active_probability(ss);
  return ss;
}

// Finite-QBD solve for E = 1 in matrix-geometric form:
//   pi_k = v1 R1^k + v2 R2^{L-k},
// R1 = -A2 (A1 + eta A0)^{-1} with eta its own spectral radius, and
// R2 = -A0 (A1 + A0 G)^{-1} where G has an all-ones first column.
inline SteadyState solve_qbd_matrix_geometric(const ChainModel& model) {
  if (model.batches() != 1)
    throw std::invalid_argument("matrix-geometric solver requires E = 1");
  const int n = model.phases();
  const int L = model.L;
  const double c = model.recharge[0];
  const double p_t = model.p_t;
  if (p_t == 0.0) return solve_steady_state(model);

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd A2 = Eigen::MatrixXd::Zero(n, n);
  A2(0, 0) = c;

  // eta <- sr(-A2 (A1 + eta A0)^{-1}); the up-block is rank one, so the
  // spectral radius is the (0,0) entry of the resolvent row.
  double eta = 0.0;
  Eigen::VectorXd x;
  bool converged = false;
  for (int it = 0; it < 10000; ++it) {
    Eigen::MatrixXd X = model.A1 + eta * p_t * I;
    x = X.transpose().partialPivLu().solve(Eigen::VectorXd::Unit(n, 0));
    double next = -c * x(0);
    if (std::abs(next - eta) < 1e-12) {
      eta = next;
      converged = true;
      break;
    }
    eta = next;
  }
  if (!converged)
    throw std::runtime_error("spectral-radius iteration for R1 did not "
                             "converge in 10^4 steps");

  Eigen::MatrixXd R1 = Eigen::MatrixXd::Zero(n, n);
  R1.row(0) = -c * x.transpose();

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  G.col(0).setOnes();
  Eigen::MatrixXd R2 =
      -p_t * (model.A1 + p_t * G).partialPivLu().inverse();

  auto R1_pow = [&](int k) -> Eigen::MatrixXd {
    if (k == 0) return I;
    return std::pow(eta, k - 1) * R1;
  };
  std::vector<Eigen::MatrixXd> R2_pow(L + 1);
  R2_pow[0] = I;
  for (int k = 1; k <= L; ++k) R2_pow[k] = R2_pow[k - 1] * R2;

  // Boundary system [v1 v2] * sys = 0. The up-block is rank one, so the
  // geometric parameterization can be redundant; solve the homogeneous
  // system and use the normalization as pure scaling afterwards.
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  sys.block(0, 0, n, n) = model.B0 + p_t * R1;
  sys.block(0, n, n, n) = R1_pow(L - 1) * (A2 + R1 * (model.A1 + A2));
  sys.block(n, 0, n, n) = R2_pow[L - 1] * (R2 * model.B0 + p_t * I);
  sys.block(n, n, n, n) = model.A1 + A2 + R2 * A2;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.transpose());
  lu.setThreshold(1e-10);
  Eigen::MatrixXd ker = lu.kernel();
  if (ker.cols() < 1 || ker.isZero(0.0))
    throw std::runtime_error("matrix-geometric boundary system has no "
                             "nontrivial solution");

  auto expand = [&](const Eigen::VectorXd& vv) {
    Eigen::RowVectorXd v1 = vv.segment(0, n).transpose();
    Eigen::RowVectorXd v2 = vv.segment(n, n).transpose();
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(model.states());
    for (int k = 0; k <= L; ++k)
      pi.segment(k * n, n) =
          (v1 * R1_pow(k) + v2 * R2_pow[L - k]).transpose();
    return pi;
  };
  Eigen::VectorXd pi;
  double best = 0.0;
  for (int j = 0; j < ker.cols(); ++j) {
    Eigen::VectorXd cand = expand(ker.col(j));
    double mass = std::abs(cand.sum());
    if (mass > best) {
      best = mass;
      pi = cand;
    }
  }
  if (!(best > 0.0))
    throw std::runtime_error("matrix-geometric solution collapsed to zero");
  if (pi.sum() < 0.0) pi = -pi;

  SteadyState ss;
  ss.L = L;
  ss.M = model.M;
  ss.pi = pi.cwiseMax(0.0);
  ss.pi /= ss.pi.sum();
  ss.residual = detail::chain_residual(model, ss.pi);
  ss.P_on = active_probability(ss);
  return ss;
}

// Closed-form floor on the active probability.
inline double pon_lower_bound(const TransitionKernel& kernel,
                              const NetworkConfig& cfg) {
  if (cfg.m < 1) return 0.0;
  double coverage = 1.0 - std::pow(1.0 - cfg.coverage_ratio(), cfg.m);
  if (kernel.p_t <= 0.0) return coverage > 0.0 ? 1.0 : 0.0;
  return std::min(1.0, kernel.p_c / kernel.p_t * coverage);
}

}  // namespace wcs

#endif
