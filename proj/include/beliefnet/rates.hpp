#pragma once

// Decay-rate analysis: the closed-form GA rate, Monte-Carlo estimates of the
// AA rate via random matrix products, subadditive brackets, the u-chain gap
// estimate, the variational lower bound with its KKT fixed point, and the
// closed forms for rank-one and exchangeable special cases.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beliefnet/errors.hpp"
#include "beliefnet/learning.hpp"
#include "beliefnet/observation.hpp"
#include "beliefnet/rng.hpp"
#include "beliefnet/simplex.hpp"
#include "beliefnet/topology.hpp"

namespace beliefnet {

struct MonteCarloEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
};

inline MonteCarloEstimate mc_from_samples(const std::vector<double>& xs) {
  MonteCarloEstimate e;
  e.samples = static_cast<long>(xs.size());
  double s = 0.0;
  for (double x : xs) s += x;
  e.value = s / e.samples;
  if (e.samples > 1) {
    double v = 0.0;
    for (double x : xs) v += (x - e.value) * (x - e.value);
    e.stderr_ = std::sqrt(v / (e.samples - 1) / e.samples);
  }
  return e;
}

// rho^GA = sum_k pi_k D(L_k(.|theta0) || L_k(.|theta)); exact.
inline double ga_rate(const CombinationMatrix& A, const ObservationModel& model, int theta0,
                      int theta) {
  if (!A.primitivity_exponent) throw non_primitive_error("ga_rate: matrix must be primitive");
  double r = 0.0;
  for (int k = 0; k < A.size(); ++k) r += A.perron[k] * model.kl_divergence(k, theta0, theta);
  return r;
}

struct EmpiricalRate {
  std::vector<double> per_agent;  // least-squares slope of -log mu over the trace tail
  double pooled = 0.0;
  double agent_spread = 0.0;      // max - min over agents; shrinks if the rate is common
};

// Tail slope of -log mu_{k,i}(theta) against i, over the last half of the trace.
inline EmpiricalRate empirical_rate(const SimulationTrace& trace, int theta) {
  if (trace.final_iteration() < 100)
    throw insufficient_data_error("empirical_rate: need at least 100 iterations");
  const std::size_t n = trace.iterations.size();
  std::size_t s0 = 0;
  while (s0 < n && trace.iterations[s0] < trace.final_iteration() / 2) ++s0;
  EmpiricalRate out;
  out.per_agent.resize(trace.K);
  for (int k = 0; k < trace.K; ++k) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double m = static_cast<double>(n - s0);
    for (std::size_t s = s0; s < n; ++s) {
      const double t = static_cast<double>(trace.iterations[s]);
      const double y = -trace.log_beliefs[s](k, theta);
      st += t; sy += y; stt += t * t; sty += t * y;
    }
    out.per_agent[k] = (m * sty - st * sy) / (m * stt - st * st);
  }
  const auto [mn, mx] = std::minmax_element(out.per_agent.begin(), out.per_agent.end());
  out.agent_spread = *mx - *mn;
  double sum = 0.0;
  for (double v : out.per_agent) sum += v;
  out.pooled = sum / trace.K;
  return out;
}

// Slowest wrong hypothesis dominates the network-level regret.
inline double network_rate(const std::vector<double>& pooled_rates) {
  if (pooled_rates.empty()) throw invalid_spec_error("network_rate: no wrong hypotheses");
  return *std::min_element(pooled_rates.begin(), pooled_rates.end());
}

namespace detail {

// One step of the normalized product M <- M * (A^T R), returning the log of
// the normalizer that was divided out. Renormalizing every step keeps the
// entries representable; the raw product underflows by i ~ 50.
inline double product_step(MatrixXd& M, const CombinationMatrix& A, const VectorXd& log_r) {
  const int K = static_cast<int>(M.rows());
  const double shift = log_r.maxCoeff();
  MatrixXd N = M * A.weights.transpose();
  for (int k = 0; k < K; ++k) N.col(k) *= std::exp(log_r[k] - shift);
  const double s = N.sum();
  M = N / s;
  return shift + std::log(s);
}

}  // namespace detail

struct MatrixProductRate {
  MonteCarloEstimate gamma;   // (1/i) log [Y_i]_{11}, across trials
  double entry_spread = 0.0;  // mean over trials of max-min of (1/i) log [Y_i]_{lk}
};

// gamma = lim (1/i) log [Y_i]_{11} with Y_i = prod A^T R_j, by Monte Carlo.
inline MatrixProductRate matrix_product_rate(const CombinationMatrix& A,
                                             const ObservationModel& model, int theta0, int theta,
                                             long horizon, int trials, std::uint64_t seed) {
  if (!A.primitivity_exponent)
    throw non_primitive_error("matrix_product_rate: matrix must be primitive");
  const int K = A.size();
  std::vector<double> gammas;
  double spread_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    auto rng = make_stream(seed, 0x1000 + t);
    MatrixXd M = MatrixXd::Identity(K, K);
    double acc = 0.0;
    for (long i = 0; i < horizon; ++i)
      acc += detail::product_step(M, A, model.sample_log_ratios(theta0, theta, rng));
    gammas.push_back((acc + std::log(M(0, 0))) / horizon);
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (int r = 0; r < K; ++r)
      for (int c = 0; c < K; ++c)
        if (M(r, c) > 0.0) {
          const double v = std::log(M(r, c)) / horizon;  // normalizer cancels in the spread
          mn = std::min(mn, v);
          mx = std::max(mx, v);
        }
    spread_sum += mx - mn;
  }
  MatrixProductRate out;
  out.gamma = mc_from_samples(gammas);
  out.entry_spread = spread_sum / trials;
  return out;
}

struct SubadditiveBounds {
  MonteCarloEstimate lower;  // (1/j) E[log ||Y_j||_-], min row sum
  MonteCarloEstimate upper;  // (1/j) E[log ||Y_j||_1], max row sum
  int horizon = 0;
};

// Bracket on gamma from super/submultiplicative row-sum functionals of Y_j.
inline SubadditiveBounds subadditive_bounds(const CombinationMatrix& A,
                                            const ObservationModel& model, int theta0, int theta,
                                            int j, int trials, std::uint64_t seed) {
  if (j < 1) throw invalid_spec_error("subadditive_bounds: j must be >= 1");
  const int K = A.size();
  std::vector<double> lo, hi;
  lo.reserve(trials);
  hi.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    auto rng = make_stream(seed, 0x2000 + t);
    MatrixXd M = MatrixXd::Identity(K, K);
    double acc = 0.0;
    for (int i = 0; i < j; ++i)
      acc += detail::product_step(M, A, model.sample_log_ratios(theta0, theta, rng));
    const VectorXd rows = M.rowwise().sum();
    lo.push_back((acc + std::log(rows.minCoeff())) / j);
    hi.push_back((acc + std::log(rows.maxCoeff())) / j);
  }
  SubadditiveBounds out;
  out.lower = mc_from_samples(lo);
  out.upper = mc_from_samples(hi);
  out.horizon = j;
  return out;
}

// Upper bound on rho^AA from any self-looped agent:
// -log a_kk + D(L_k(.|theta0) || L_k(.|theta)).
inline double inept_bound(const CombinationMatrix& A, const ObservationModel& model, int theta0,
                          int theta, int agent) {
  const double akk = A.weights(agent, agent);
  if (akk <= 0.0) throw inapplicable_error("inept_bound: agent has no self-loop");
  return -std::log(akk) + model.kl_divergence(agent, theta0, theta);
}

struct UChainState {
  VectorXd u;  // normalized first row of Y
  long iteration = 0;
};

// u' = R A u / sum, the transition map of the normalized-first-row chain.
inline UChainState u_chain_step(const UChainState& state, const CombinationMatrix& A,
                                const VectorXd& log_r) {
  const VectorXd Au = A.weights * state.u;
  const double shift = log_r.maxCoeff();
  VectorXd w(state.u.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = std::exp(log_r[k] - shift) * Au[k];
  UChainState next;
  next.u = w / w.sum();
  next.iteration = state.iteration + 1;
  return next;
}

struct GapEstimate {
  MonteCarloEstimate gap;     // across independent chains
  double chain_spread = 0.0;  // max-min of per-chain means (invariant-measure diagnostic)
};

// Time average of D(pi||u_j) - D(pi||A u_j) along the u-chain. Each summand
// is a data-processing difference and must be nonnegative.
inline GapEstimate gap_estimate(const CombinationMatrix& A, const ObservationModel& model,
                                int theta0, int theta, long horizon, long burn_in,
                                std::uint64_t seed, int chains = 8) {
  if (horizon <= burn_in) throw invalid_spec_error("gap_estimate: horizon must exceed burn_in");
  if (!A.primitivity_exponent) throw non_primitive_error("gap_estimate: matrix must be primitive");
  std::vector<double> per_chain;
  for (int c = 0; c < chains; ++c) {
    auto rng = make_stream(seed, 0x3000 + c);
    UChainState st{A.perron, 0};
    double acc = 0.0;
    long n = 0;
    for (long j = 0; j < horizon; ++j) {
      const VectorXd Au = A.weights * st.u;
      if (j >= burn_in) {
        const double d = kl_divergence(A.perron, st.u) - kl_divergence(A.perron, Au);
        if (d < -1e-10)
          throw std::logic_error("gap_estimate: negative data-processing difference");
        acc += d;
        ++n;
      }
      st = u_chain_step(st, A, model.sample_log_ratios(theta0, theta, rng));
    }
    per_chain.push_back(acc / n);
  }
  GapEstimate out;
  out.gap = mc_from_samples(per_chain);
  const auto [mn, mx] = std::minmax_element(per_chain.begin(), per_chain.end());
  out.chain_spread = *mx - *mn;
  return out;
}

// rho^AA = -E[log sum_k pi_k r_k] for rank-one A = pi 1^T (fusion center).
inline MonteCarloEstimate rank_one_exact(const VectorXd& pi, const ObservationModel& model,
                                         int theta0, int theta, long samples, std::uint64_t seed) {
  if (pi.minCoeff() <= 0.0) throw invalid_spec_error("rank_one_exact: pi must be positive");
  auto rng = make_stream(seed, 0x4000);
  const VectorXd log_pi = pi.array().log();
  std::vector<double> xs;
  xs.reserve(samples);
  for (long s = 0; s < samples; ++s) {
    const VectorXd lr = model.sample_log_ratios(theta0, theta, rng);
    xs.push_back(-log_sum_exp(log_pi + lr));
  }
  return mc_from_samples(xs);
}

// E[log sum pi_k r_k - sum pi_k log r_k]; the Jensen gap, equal to
// rho^GA - rho^AA under rank-one topologies.
inline MonteCarloEstimate jensen_gap(const VectorXd& pi, const ObservationModel& model, int theta0,
                                     int theta, long samples, std::uint64_t seed) {
  auto rng = make_stream(seed, 0x5000);
  const VectorXd log_pi = pi.array().log();
  std::vector<double> xs;
  xs.reserve(samples);
  for (long s = 0; s < samples; ++s) {
    const VectorXd lr = model.sample_log_ratios(theta0, theta, rng);
    xs.push_back(log_sum_exp(log_pi + lr) - pi.dot(lr));
  }
  return mc_from_samples(xs);
}

struct VariationalSolution {
  VectorXd v;            // minimizer on the simplex
  double F = 0.0;        // KL-plus-log-moment objective at v
  double G = 0.0;        // surrogate objective at v; G <= F at the fixed point
  int iterations = 0;
  double kkt_residual = 0.0;
  long samples = 0;
};

namespace detail {

struct FixedSample {
  MatrixXd log_r;   // samples x K, common random numbers
  double rho_ga_hat = 0.0;  // sample estimate of sum_k pi_k E[-log r_k]
};

inline FixedSample draw_fixed_sample(const ObservationModel& model, int theta0, int theta,
                                     long samples, std::uint64_t seed, const VectorXd& pi) {
  FixedSample fs;
  const int K = model.num_agents();
  fs.log_r.resize(samples, K);
  auto rng = make_stream(seed, 0x6000);
  for (long s = 0; s < samples; ++s) fs.log_r.row(s) = model.sample_log_ratios(theta0, theta, rng);
  fs.rho_ga_hat = -(fs.log_r * pi).mean();
  return fs;
}

// E[r_k / sum_l v_l r_l] for all k, evaluated on the fixed sample in log space.
inline VectorXd kkt_expectation(const FixedSample& fs, const VectorXd& v) {
  const long N = fs.log_r.rows();
  const int K = static_cast<int>(fs.log_r.cols());
  const VectorXd log_v = v.array().log();
  VectorXd acc = VectorXd::Zero(K);
  for (long s = 0; s < N; ++s) {
    const double den = log_sum_exp(log_v + fs.log_r.row(s).transpose());
    for (int k = 0; k < K; ++k) acc[k] += std::exp(fs.log_r(s, k) - den);
  }
  return acc / static_cast<double>(N);
}

inline double F_objective(const FixedSample& fs, const VectorXd& pi, const VectorXd& v) {
  const VectorXd log_v = v.array().log();
  double mom = 0.0;
  for (long s = 0; s < fs.log_r.rows(); ++s)
    mom += log_sum_exp(log_v + fs.log_r.row(s).transpose());
  mom /= static_cast<double>(fs.log_r.rows());
  return kl_divergence(pi, v) + mom + fs.rho_ga_hat;
}

inline double G_objective(const FixedSample& fs, const VectorXd& pi, const VectorXd& v) {
  const VectorXd E = kkt_expectation(fs, v);
  const VectorXd log_v = v.array().log();
  double mom = 0.0;
  for (long s = 0; s < fs.log_r.rows(); ++s)
    mom += log_sum_exp(log_v + fs.log_r.row(s).transpose());
  mom /= static_cast<double>(fs.log_r.rows());
  return pi.dot(E.array().log().matrix()) + mom + fs.rho_ga_hat;
}

}  // namespace detail

// Damped fixed-point iteration on the KKT conditions
// pi_k / v_k = E[r_k / sum_l v_l r_l], with multi-start since the objective
// is not jointly convex. Common random numbers across every evaluation.
inline VariationalSolution minimize_F(const CombinationMatrix& A, const ObservationModel& model,
                                      int theta0, int theta, long samples, std::uint64_t seed,
                                      int random_starts = 2) {
  if (!A.primitivity_exponent) throw non_primitive_error("minimize_F: matrix must be primitive");
  const int K = A.size();
  const VectorXd& pi = A.perron;
  const auto fs = detail::draw_fixed_sample(model, theta0, theta, samples, seed, pi);
  constexpr double kTau = 0.5, kTol = 1e-4;
  constexpr int kMaxIter = 10000;

  auto solve_from = [&](VectorXd v) -> std::optional<VariationalSolution> {
    for (int it = 1; it <= kMaxIter; ++it) {
      const VectorXd E = detail::kkt_expectation(fs, v);
      const double resid = ((pi.array() / v.array()) - E.array()).abs().maxCoeff();
      if (resid < kTol) {
        VariationalSolution sol;
        sol.v = v;
        sol.F = detail::F_objective(fs, pi, v);
        sol.G = detail::G_objective(fs, pi, v);
        sol.iterations = it;
        sol.kkt_residual = resid;
        sol.samples = samples;
        return sol;
      }
      VectorXd vn = pi.array() / E.array();
      v = (1.0 - kTau) * v + kTau * vn;
      v = v.cwiseMax(1e-300);
      v /= v.sum();
    }
    return std::nullopt;
  };

  std::optional<VariationalSolution> best = solve_from(pi);
  auto rng = make_stream(seed, 0x6F00);
  for (int s = 0; s < random_starts; ++s) {
    auto sol = solve_from(random_simplex_point(K, rng));
    if (sol && (!best || sol->F < best->F)) best = sol;
  }
  if (!best) throw convergence_error("minimize_F: KKT fixed point did not converge");
  return *best;
}

struct VariationalGapBound {
  double delta_relaxed = 0.0;  // (1 - dobrushin) * F(v*); always valid
  double optimistic = 0.0;     // (1 - eta_hat) * F(v*); eta_hat is a lower estimate
  double dobrushin = 0.0;
  double eta_hat = 0.0;
  double F_star = 0.0;
  bool trivial = false;  // dobrushin == 1: only the trivial bound gap >= 0
};

// Theorem-4 style lower bound on rho^GA - rho^AA. eta_A is not computable, so
// the reported bound uses the Dobrushin coefficient (eta_A <= delta_A); the
// eta_hat variant is an optimistic reference, not a certified bound.
inline VariationalGapBound variational_gap_bound(const CombinationMatrix& A,
                                                 const ObservationModel& model, int theta0,
                                                 int theta, long samples, std::uint64_t seed) {
  VariationalGapBound out;
  const auto eta = contraction_coefficient_estimate(A, 2000, seed);
  out.dobrushin = eta.dobrushin;
  out.eta_hat = eta.lower_estimate;
  const auto sol = minimize_F(A, model, theta0, theta, samples, seed);
  out.F_star = sol.F;
  if (out.dobrushin >= 1.0 - 1e-12) {
    out.trivial = true;
    out.delta_relaxed = 0.0;
  } else {
    out.delta_relaxed = (1.0 - out.dobrushin) * std::max(0.0, sol.F);
  }
  out.optimistic = (1.0 - out.eta_hat) * std::max(0.0, sol.F);
  return out;
}

struct ExchangeableBound {
  double B_A = 0.0;                // upper bound on rho^AA
  double gap_lower = 0.0;          // lower bound on rho^GA - rho^AA
  MonteCarloEstimate mean_log_avg; // E[log (1/K) sum_k r_k]
  double dobrushin = 0.0;
  double rho_ga = 0.0;
};

// Closed-form bound for exchangeable data on doubly stochastic networks:
// B_A = delta_A rho^GA - (1 - delta_A) E[log (1/K) sum r_k]. Identical
// marginals are checked here; joint exchangeability is the caller's
// responsibility.
inline ExchangeableBound exchangeable_bound(const CombinationMatrix& A,
                                            const ObservationModel& model, int theta0, int theta,
                                            long samples, std::uint64_t seed) {
  if (!A.doubly_stochastic())
    throw inapplicable_error("exchangeable_bound: matrix must be doubly stochastic");
  for (int t = 0; t < model.num_hypotheses(); ++t)
    for (int k = 1; k < model.num_agents(); ++k)
      if (std::abs(model.params()(t, k) - model.params()(t, 0)) > 1e-12)
        throw inapplicable_error("exchangeable_bound: marginals are not identical across agents");
  ExchangeableBound out;
  out.dobrushin = dobrushin_coefficient(A);
  out.rho_ga = ga_rate(A, model, theta0, theta);
  const int K = model.num_agents();
  const VectorXd uniform = VectorXd::Constant(K, 1.0 / K);
  auto est = rank_one_exact(uniform, model, theta0, theta, samples, seed);
  out.mean_log_avg = {-est.value, est.stderr_, est.samples};
  out.B_A = out.dobrushin * out.rho_ga - (1.0 - out.dobrushin) * out.mean_log_avg.value;
  out.gap_lower = (1.0 - out.dobrushin) * (out.rho_ga + out.mean_log_avg.value);
  return out;
}

}  // namespace beliefnet
