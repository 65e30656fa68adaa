#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

namespace beliefnet {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum_i exp(v_i)) with the usual max shift; tolerates -inf entries.
inline double log_sum_exp(const VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a +inf snuck in)
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

// KL divergence between two points of the probability simplex.
// Convention: 0*log(0/q) = 0; p_k > 0 with q_k = 0 yields +inf.
inline double kl_divergence(const VectorXd& p, const VectorXd& q) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

// Uniform (Dirichlet(1,...,1)) sample from the K-simplex.
inline VectorXd random_simplex_point(int K, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  VectorXd u(K);
  for (int i = 0; i < K; ++i) u[i] = exp1(rng);
  return u / u.sum();
}

}  // namespace beliefnet
