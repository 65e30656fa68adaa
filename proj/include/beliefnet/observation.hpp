#pragma once

// Per-agent likelihood families. Two families are supported:
//  - exponential_rates: agent k observes Exp(rate beta_k(theta)), independent
//    across agents;
//  - gaussian_mean_shift: agent k observes a unit-variance Gaussian with mean
//    m_k(theta); the joint covariance is Sigma(c) = c*11^T + (1-c)*I.
// Only the marginals enter the belief updates; the joint affects sampling.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "beliefnet/errors.hpp"
#include "beliefnet/rng.hpp"
#include "beliefnet/simplex.hpp"

namespace beliefnet {

struct HypothesisSet {
  int H = 2;
  int true_index = 0;

  HypothesisSet() = default;
  HypothesisSet(int H, int true_index) : H(H), true_index(true_index) {
    if (H < 1 || true_index < 0 || true_index >= H)
      throw invalid_spec_error("HypothesisSet: true_index out of range");
  }
};

class ObservationModel {
 public:
  enum class Family { exponential_rates, gaussian_mean_shift };

  // params is H x K: row theta holds the per-agent rate (exponential) or
  // mean (gaussian) under hypothesis theta.
  static ObservationModel exponential(MatrixXd rates) {
    if (rates.minCoeff() <= 0.0)
      throw invalid_spec_error("ObservationModel: exponential rates must be positive");
    return ObservationModel(Family::exponential_rates, std::move(rates), 0.0);
  }

  static ObservationModel gaussian(MatrixXd means, double correlation) {
    if (correlation < 0.0 || correlation > 1.0)
      throw invalid_spec_error("ObservationModel: correlation must lie in [0,1]");
    if (!means.allFinite()) throw invalid_spec_error("ObservationModel: means must be finite");
    return ObservationModel(Family::gaussian_mean_shift, std::move(means), correlation);
  }

  Family family() const { return family_; }
  int num_agents() const { return static_cast<int>(params_.cols()); }
  int num_hypotheses() const { return static_cast<int>(params_.rows()); }
  double correlation() const { return correlation_; }
  const MatrixXd& params() const { return params_; }

  // One private signal per agent, drawn under hypothesis theta0.
  VectorXd sample(int theta0, std::mt19937_64& rng) const {
    check_theta(theta0);
    const int K = num_agents();
    VectorXd x(K);
    if (family_ == Family::exponential_rates) {
      for (int k = 0; k < K; ++k) {
        std::exponential_distribution<double> d(params_(theta0, k));
        x[k] = d(rng);
      }
    } else {
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double z0 = gauss(rng);
      const double sc = std::sqrt(correlation_), si = std::sqrt(1.0 - correlation_);
      for (int k = 0; k < K; ++k) x[k] = params_(theta0, k) + sc * z0 + si * gauss(rng);
    }
    return x;
  }

  double log_likelihood(int agent, int theta, double x) const {
    check_theta(theta);
    if (family_ == Family::exponential_rates) {
      if (x < 0.0) throw std::domain_error("log_likelihood: exponential data must be nonnegative");
      const double b = params_(theta, agent);
      return std::log(b) - b * x;
    }
    const double d = x - params_(theta, agent);
    return -0.5 * d * d - 0.5 * std::log(2.0 * std::numbers::pi);
  }

  // log r_k(theta) = log L_k(x|theta) - log L_k(x|theta0).
  double log_likelihood_ratio(int agent, int theta, int theta0, double x) const {
    return log_likelihood(agent, theta, x) - log_likelihood(agent, theta0, x);
  }

  double likelihood_ratio(int agent, int theta, int theta0, double x) const {
    return std::exp(log_likelihood_ratio(agent, theta, theta0, x));
  }

  // Closed-form D(L_k(.|theta0) || L_k(.|theta)).
  double kl_divergence(int agent, int theta0, int theta) const {
    check_theta(theta0);
    check_theta(theta);
    if (family_ == Family::exponential_rates) {
      const double l0 = params_(theta0, agent), l1 = params_(theta, agent);
      return std::log(l0 / l1) + l1 / l0 - 1.0;
    }
    const double d = params_(theta0, agent) - params_(theta, agent);
    return 0.5 * d * d;
  }

  // True iff some agent separates theta from theta0 (Assumption 2). A model
  // violating this is still usable; simulations of non-identifiable setups
  // are legitimate diagnostics.
  bool globally_identifiable(int theta0) const {
    for (int theta = 0; theta < num_hypotheses(); ++theta) {
      if (theta == theta0) continue;
      bool seen = false;
      for (int k = 0; k < num_agents() && !seen; ++k) seen = kl_divergence(k, theta0, theta) > 0.0;
      if (!seen) return false;
    }
    return true;
  }

  // Vector of log r_k(theta) from one fresh joint draw under theta0.
  VectorXd sample_log_ratios(int theta0, int theta, std::mt19937_64& rng) const {
    const VectorXd x = sample(theta0, rng);
    VectorXd lr(num_agents());
    for (int k = 0; k < num_agents(); ++k) lr[k] = log_likelihood_ratio(k, theta, theta0, x[k]);
    return lr;
  }

 private:
  ObservationModel(Family f, MatrixXd params, double c)
      : family_(f), params_(std::move(params)), correlation_(c) {
    if (params_.rows() < 1 || params_.cols() < 1)
      throw invalid_spec_error("ObservationModel: empty parameter matrix");
  }

  void check_theta(int theta) const {
    if (theta < 0 || theta >= num_hypotheses())
      throw invalid_spec_error("ObservationModel: hypothesis index out of range");
  }

  Family family_;
  MatrixXd params_;
  double correlation_;
};

}  // namespace beliefnet
