#ifndef WCS_INTERMEETING_HPP
#define WCS_INTERMEETING_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "wcs/config.hpp"
#include "wcs/kernel.hpp"

namespace wcs {

// Sub-stochastic kernel on the out-of-range states d = 1..M; state 1 leaks
// back into the charging region with probability P_{1,0}.
inline Eigen::MatrixXd inner_kernel(const TransitionKernel& kernel) {
  const int M = kernel.M;
  if (M < 1) throw std::invalid_argument("inner_kernel requires M >= 1");
  return kernel.P.block(1, 1, M, M);
}

// Pr[T_I > t] = p0 P^{t-1} 1, evaluated by repeated vector-matrix products.
inline double ccdf_exact(const Eigen::MatrixXd& P, const Eigen::VectorXd& p0,
                         long t) {
  if (t < 1) throw std::invalid_argument("ccdf_exact requires t >= 1");
  Eigen::RowVectorXd w = p0.transpose();
  for (long s = 1; s < t; ++s) w = w * P;
  return w.sum();
}

struct SpectralSummary {
  std::vector<double> eigenvalues;  // descending, all in (0,1)
  std::vector<double> gamma;        // Pr[T_I > t] = sum_i gamma_i lambda_i^{t-1}
  Eigen::VectorXd p0;
  double spectral_radius = 0.0;
  double mean_exact = 0.0;    // truncated sum of the exact CCDF
  double mean_approx = 0.0;   // 1 / (1 - lambda_1)
  bool degenerate = false;    // eigenvalues not numerically distinct
  bool symmetrizable = true;  // all off-diagonals positive

  double ccdf(long t) const {
    double s = 0.0;
    for (size_t i = 0; i < eigenvalues.size(); ++i)
      s += gamma[i] * std::pow(eigenvalues[i], double(t - 1));
    return s;
  }
  // Dominant-eigenvalue tail approximation.
  double ccdf_one_term(long t) const {
    return std::pow(spectral_radius, double(t));
  }
};

// Eigen-decomposition of the out-of-range kernel. An irreducible tridiagonal
// with positive off-diagonals is similar to a symmetric tridiagonal via a
// diagonal scaling, so the spectrum is real and a symmetric solver applies;
// the similarity also hands back bi-orthonormal left/right eigenvectors.
inline SpectralSummary spectral_decomposition(const Eigen::MatrixXd& P,
                                              const Eigen::VectorXd& p0) {
  const int M = int(P.rows());
  SpectralSummary out;
  out.p0 = p0;

  for (int i = 0; i + 1 < M; ++i)
    if (!(P(i, i + 1) > 0.0) || !(P(i + 1, i) > 0.0)) {
      out.symmetrizable = false;
      break;
    }

  Eigen::VectorXd lambda;
  Eigen::MatrixXd right, left;  // columns a_i; rows b_i^T with b_i^T a_j = delta
  if (out.symmetrizable) {
    // T = D P D^{-1} symmetric needs d_{i+1}/d_i = sqrt(P(i,i+1)/P(i+1,i))
    Eigen::VectorXd d(M);
    d(0) = 1.0;
    for (int i = 0; i + 1 < M; ++i)
      d(i + 1) = d(i) * std::sqrt(P(i, i + 1) / P(i + 1, i));
    Eigen::VectorXd diag(M), sub(std::max(
        0, M - 1));
    for (int i = 0; i < M; ++i) diag(i) = P(i, i);
    for (int i = 0; i + 1 < M; ++i)
      sub(i) = std::sqrt(P(i, i + 1) * P(i + 1, i));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    lambda = es.eigenvalues();
    const Eigen::MatrixXd& U = es.eigenvectors();  // orthonormal
    right.resize(M, M);
    left.resize(M, M);
    for (int i = 0; i < M; ++i) {
      right.col(i) = U.col(i).cwiseQuotient(d);
      left.row(i) = (U.col(i).cwiseProduct(d)).transpose();
    }
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(P);
    lambda = es.eigenvalues().real();
    right = es.eigenvectors().real();
    left = right.inverse();
  }

  // Sort descending and bundle the coefficients.
  std::vector<int> order(M);
  for (int i = 0; i < M; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return lambda(a) > lambda(b); });
  out.eigenvalues.resize(M);
  out.gamma.resize(M);
  for (int i = 0; i < M; ++i) {
    int j = order[i];
    out.eigenvalues[i] = lambda(j);
    out.gamma[i] = (p0.transpose() * right.col(j)).value() * left.row(j).sum();
  }
  out.spectral_radius = out.eigenvalues.front();
  for (int i = 0; i + 1 < M; ++i)
    if (out.eigenvalues[i] - out.eigenvalues[i + 1] < 1e-12)
      out.degenerate = true;

  out.mean_approx = 1.0 / (1.0 - out.spectral_radius);
  // E[T_I] = sum_{t>=0} Pr[T_I > t]; the t = 0 term is 1.
  {
    double mean = 1.0;
    Eigen::RowVectorXd w = p0.transpose();
    for (long t = 1; t < 20000000; ++t) {
      double tail = w.sum();
      mean += tail;
      if (tail < 1e-12) break;
      w = w * P;
    }
    out.mean_exact = mean;
  }
  return out;
}

inline Eigen::VectorXd departure_distribution(int M) {
  return Eigen::VectorXd::Unit(M, 0);  // unit mass on d = 1
}

inline SpectralSummary analyze_intermeeting(const TransitionKernel& kernel) {
  Eigen::MatrixXd P = inner_kernel(kernel);
  return spectral_decomposition(P, departure_distribution(kernel.M));
}

struct SpectralRadiusRow {
  double v = 0.0;
  int M = 0;
  double lambda1 = 0.0;
};

// lambda_1 per node speed; the sequence must be non-increasing.
inline std::vector<SpectralRadiusRow> spectral_radius_vs_speed(
    const NetworkConfig& base, const std::vector<double>& speeds) {
  for (size_t i = 0; i < speeds.size(); ++i) {
    if (!(speeds[i] > 0.0))
      throw std::invalid_argument("speeds must be positive");
    if (i > 0 && !(speeds[i] > speeds[i - 1]))
      throw std::invalid_argument("speeds must be ascending");
  }
  std::vector<SpectralRadiusRow> rows;
  rows.reserve(speeds.size());
  for (double v : speeds) {
    NetworkConfig cfg = base;
    cfg.v = v;
    cfg.M = 0;  // re-derive the resolution for each speed
    TransitionKernel kernel = build_kernel(cfg);
    SpectralSummary s = analyze_intermeeting(kernel);
    rows.push_back({v, kernel.M, s.spectral_radius});
  }
  for (size_t i = 0; i + 1 < rows.size(); ++i)
    if (rows[i + 1].lambda1 > rows[i].lambda1 + 1e-12)
      throw std::runtime_error(
          "spectral radius increased with node speed; kernel inconsistency");
  return rows;
}

struct MeanIntermeeting {
  double exact = 0.0;
  double approx = 0.0;
};

inline MeanIntermeeting mean_intermeeting(const SpectralSummary& s) {
  if (!(s.spectral_radius < 1.0))
    throw std::invalid_argument("mean inter-meeting time requires lambda_1 < 1");
  return {s.mean_exact, 1.0 / (1.0 - s.spectral_radius)};
}

}  // namespace wcs

#endif
