#pragma once

// Belief evolution under the four fusion rules. All belief arithmetic is in
// the log domain: with a KL divergence of 50 per step (the Gaussian setup),
// linear-domain beliefs underflow within ~15 iterations. -inf is a valid
// entry and means zero belief.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "beliefnet/errors.hpp"
#include "beliefnet/observation.hpp"
#include "beliefnet/rng.hpp"
#include "beliefnet/simplex.hpp"
#include "beliefnet/topology.hpp"

namespace beliefnet {

enum class RuleKind { aa_diffusion, ga_diffusion, aa_consensus, ga_consensus };

inline std::string rule_name(RuleKind r) {
  switch (r) {
    case RuleKind::aa_diffusion: return "aa_diffusion";
    case RuleKind::ga_diffusion: return "ga_diffusion";
    case RuleKind::aa_consensus: return "aa_consensus";
    case RuleKind::ga_consensus: return "ga_consensus";
  }
  return "?";
}

inline bool is_arithmetic(RuleKind r) {
  return r == RuleKind::aa_diffusion || r == RuleKind::aa_consensus;
}
inline bool is_diffusion(RuleKind r) {
  return r == RuleKind::aa_diffusion || r == RuleKind::ga_diffusion;
}

struct BeliefState {
  MatrixXd log_beliefs;  // K x H, rows normalized (logsumexp == 0)
  long iteration = 0;

  static BeliefState uniform(int K, int H) {
    BeliefState s;
    s.log_beliefs = MatrixXd::Constant(K, H, -std::log(static_cast<double>(H)));
    return s;
  }

  void normalize_rows(long iter_for_error) {
    for (Eigen::Index k = 0; k < log_beliefs.rows(); ++k) {
      const double z = log_sum_exp(log_beliefs.row(k).transpose());
      if (!std::isfinite(z))
        throw degenerate_belief_error("belief row lost all mass", iter_for_error);
      log_beliefs.row(k).array() -= z;
    }
  }
};

// Local Bayesian update (intermediate beliefs psi), given one signal per agent.
inline MatrixXd bayesian_update(const BeliefState& state, const VectorXd& batch,
                                const ObservationModel& model) {
  const int K = static_cast<int>(state.log_beliefs.rows());
  const int H = static_cast<int>(state.log_beliefs.cols());
  MatrixXd psi(K, H);
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < H; ++t) {
      const double prior = state.log_beliefs(k, t);
      psi(k, t) = (prior == kNegInf) ? kNegInf : model.log_likelihood(k, t, batch[k]) + prior;
    }
    const double z = log_sum_exp(psi.row(k).transpose());
    if (!std::isfinite(z))
      throw degenerate_belief_error("bayesian_update: belief support disjoint from likelihood",
                                    state.iteration + 1);
    psi.row(k).array() -= z;
  }
  return psi;
}

// Arithmetic fusion: log mu_k = logsumexp_l(log a_{lk} + log input_l).
// The support of the result is the union of the input supports.
inline MatrixXd fuse_aa(const MatrixXd& log_inputs, const CombinationMatrix& A) {
  const int K = static_cast<int>(log_inputs.rows());
  const int H = static_cast<int>(log_inputs.cols());
  MatrixXd out(K, H);
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < H; ++t) {
      double m = kNegInf;
      for (int l = 0; l < K; ++l) {
        const double a = A.weights(l, k);
        if (a > 0.0 && log_inputs(l, t) > m) m = log_inputs(l, t);
      }
      if (m == kNegInf) { out(k, t) = kNegInf; continue; }
      double s = 0.0;
      for (int l = 0; l < K; ++l) {
        const double a = A.weights(l, k);
        if (a > 0.0 && log_inputs(l, t) != kNegInf) s += a * std::exp(log_inputs(l, t) - m);
      }
      out(k, t) = m + std::log(s);
    }
  }
  return out;  // rows normalize automatically (convex combination of simplices)
}

// Geometric fusion: log mu_k = sum_l a_{lk} log input_l, then row-normalize.
// A zero belief anywhere in the neighborhood vetoes the hypothesis.
inline MatrixXd fuse_ga(const MatrixXd& log_inputs, const CombinationMatrix& A,
                        long iter_for_error = 0) {
  const int K = static_cast<int>(log_inputs.rows());
  const int H = static_cast<int>(log_inputs.cols());
  MatrixXd out(K, H);
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < H; ++t) {
      double s = 0.0;
      for (int l = 0; l < K; ++l) {
        const double a = A.weights(l, k);
        if (a == 0.0) continue;  // 0 * (-inf) must not poison the sum
        if (log_inputs(l, t) == kNegInf) { s = kNegInf; break; }
        s += a * log_inputs(l, t);
      }
      out(k, t) = s;
    }
    const double z = log_sum_exp(out.row(k).transpose());
    if (!std::isfinite(z))
      throw degenerate_belief_error("fuse_ga: all hypotheses vetoed", iter_for_error);
    out.row(k).array() -= z;
  }
  return out;
}

// Consensus variants (Eq.-7 style): agent k fuses its own fresh psi_k with
// the neighbors' beliefs from the previous iteration. All agents update
// synchronously from the previous iterate.
inline MatrixXd consensus_inputs_for_agent(const MatrixXd& psi, const MatrixXd& prev_mu, int k) {
  MatrixXd mixed = prev_mu;
  mixed.row(k) = psi.row(k);
  return mixed;
}

inline BeliefState step(const BeliefState& state, RuleKind rule, const CombinationMatrix& A,
                        const ObservationModel& model, int theta0, std::mt19937_64& rng) {
  const VectorXd batch = model.sample(theta0, rng);
  const MatrixXd psi = bayesian_update(state, batch, model);
  BeliefState next;
  next.iteration = state.iteration + 1;
  if (is_diffusion(rule)) {
    next.log_beliefs = is_arithmetic(rule) ? fuse_aa(psi, A) : fuse_ga(psi, A, next.iteration);
  } else {
    // column k mixes psi_k (weight a_kk) with prev mu_l (weights a_lk, l != k)
    const int K = static_cast<int>(psi.rows());
    next.log_beliefs.resize(K, psi.cols());
    for (int k = 0; k < K; ++k) {
      const MatrixXd mixed = consensus_inputs_for_agent(psi, state.log_beliefs, k);
      const MatrixXd fused = is_arithmetic(rule) ? fuse_aa(mixed, A) : fuse_ga(mixed, A, next.iteration);
      next.log_beliefs.row(k) = fused.row(k);
    }
  }
  next.normalize_rows(next.iteration);
  return next;
}

struct SimulationTrace {
  std::vector<long> iterations;        // strictly increasing snapshot indices
  std::vector<MatrixXd> log_beliefs;   // K x H per snapshot
  int K = 0, H = 0;
  int theta0 = 0;
  RuleKind rule = RuleKind::aa_diffusion;

  long final_iteration() const { return iterations.empty() ? 0 : iterations.back(); }

  // -(1/i) log mu_{k,i}(theta) at snapshot s.
  double scaled_neg_log_belief(std::size_t s, int agent, int theta) const {
    return -log_beliefs[s](agent, theta) / static_cast<double>(iterations[s]);
  }
};

struct RunSpec {
  RuleKind rule = RuleKind::ga_diffusion;
  int theta0 = 0;
  long iterations = 1000;
  long snapshot_stride = 0;  // 0: stride 1 up to iteration 1000, then 10
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // trial index; selects the RNG stream
  MatrixXd initial_log_beliefs;  // empty: uniform
};

inline SimulationTrace run(const RunSpec& spec, const CombinationMatrix& A,
                           const ObservationModel& model) {
  if (spec.iterations < 1) throw invalid_spec_error("run: iterations must be >= 1");
  const int K = A.size(), H = model.num_hypotheses();
  if (model.num_agents() != K) throw invalid_spec_error("run: model/network agent count mismatch");
  BeliefState state = BeliefState::uniform(K, H);
  if (spec.initial_log_beliefs.size() > 0) {
    state.log_beliefs = spec.initial_log_beliefs;
    state.normalize_rows(0);
  }
  auto rng = make_stream(spec.seed, spec.stream);
  SimulationTrace trace;
  trace.K = K;
  trace.H = H;
  trace.theta0 = spec.theta0;
  trace.rule = spec.rule;
  auto stride_at = [&](long i) {
    if (spec.snapshot_stride > 0) return spec.snapshot_stride;
    return i <= 1000 ? 1L : 10L;
  };
  for (long i = 1; i <= spec.iterations; ++i) {
    state = step(state, spec.rule, A, model, spec.theta0, rng);
    if (i % stride_at(i) == 0 || i == spec.iterations) {
      trace.iterations.push_back(i);
      trace.log_beliefs.push_back(state.log_beliefs);
    }
  }
  return trace;
}

// Linear recursion lambda_i = A^T (lambda_{i-1} + x_i) for the log-belief
// ratios under GA-diffusion; serves as an independent oracle for run().
inline std::vector<VectorXd> log_belief_ratio_recursion(const CombinationMatrix& A,
                                                        const std::vector<VectorXd>& llr_sequence,
                                                        const VectorXd& lambda0) {
  std::vector<VectorXd> out;
  out.reserve(llr_sequence.size());
  VectorXd lambda = lambda0;
  for (const auto& x : llr_sequence) {
    lambda = A.weights.transpose() * (lambda + x);
    out.push_back(lambda);
  }
  return out;
}

}  // namespace beliefnet
