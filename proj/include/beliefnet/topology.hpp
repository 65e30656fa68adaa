#pragma once

// Combination matrices for social learning networks: constructors for the
// standard graph families, the Perron vector, primitivity certification and
// the contraction / Dobrushin coefficients.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "beliefnet/errors.hpp"
#include "beliefnet/rng.hpp"
#include "beliefnet/simplex.hpp"

namespace beliefnet {

using EdgeList = std::vector<std::pair<int, int>>;

// Smallest n <= (K-1)^2 + 1 with A^n entrywise positive, or nullopt.
// Works on the boolean support pattern so floating-point fuzz cannot flip a
// zero into a positive entry.
inline std::optional<int> primitivity_exponent_of(const MatrixXd& A) {
  const int K = static_cast<int>(A.rows());
  const int cap = (K - 1) * (K - 1) + 1;  // Wielandt bound
  using BoolMat = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
  BoolMat S = (A.array() > 0.0);
  BoolMat P = S;
  for (int n = 1; n <= cap; ++n) {
    if (P.all()) return n;
    BoolMat Q = BoolMat::Constant(K, K, false);
    for (int c = 0; c < K; ++c)
      for (int m = 0; m < K; ++m)
        if (P(m, c))
          for (int r = 0; r < K; ++r)
            if (S(r, m)) Q(r, c) = true;
    P.swap(Q);
  }
  return std::nullopt;
}

// Right Perron eigenvector of a left-stochastic primitive matrix, normalized
// to the simplex. Power iteration from uniform, L1 tolerance 1e-12.
inline VectorXd perron_vector_of(const MatrixXd& A) {
  const int K = static_cast<int>(A.rows());
  if (!primitivity_exponent_of(A)) throw non_primitive_error("perron_vector: matrix is not primitive");
  VectorXd x = VectorXd::Constant(K, 1.0 / K);
  constexpr int kMaxIter = 100000;
  for (int it = 0; it < kMaxIter; ++it) {
    VectorXd y = A * x;
    y /= y.sum();
    if ((y - x).lpNorm<1>() < 1e-12) return y;
    x = std::move(y);
  }
  throw convergence_error("perron_vector: power iteration did not converge");
}

struct CombinationMatrix {
  // weights(l, k) = a_{lk}, the weight agent k assigns to neighbor l.
  MatrixXd weights;
  VectorXd perron;
  std::optional<int> primitivity_exponent;

  int size() const { return static_cast<int>(weights.rows()); }

  bool doubly_stochastic(double tol = 1e-10) const {
    return (weights.rowwise().sum().array() - 1.0).abs().maxCoeff() < tol;
  }

  static CombinationMatrix from_weights(MatrixXd A) {
    const int K = static_cast<int>(A.rows());
    if (A.cols() != K || K < 1) throw invalid_spec_error("combination matrix must be square");
    if (A.minCoeff() < 0.0) throw invalid_spec_error("combination matrix has negative entries");
    if ((A.colwise().sum().array() - 1.0).abs().maxCoeff() > 1e-12)
      throw invalid_spec_error("combination matrix columns must sum to 1");
    CombinationMatrix out;
    out.weights = std::move(A);
    out.primitivity_exponent = primitivity_exponent_of(out.weights);
    if (out.primitivity_exponent) out.perron = perron_vector_of(out.weights);
    return out;
  }
};

// Ring D-regular network: neighbors of k are
// {k-floor(D/2), ..., k-1, k+1, ..., k+ceil(D/2)} mod K, off-diagonal weight
// (1-alpha)/D, diagonal alpha. Doubly stochastic by construction.
inline CombinationMatrix build_d_regular(int K, int D, double alpha) {
  if (D < 1 || D >= K) throw invalid_spec_error("build_d_regular: requires 1 <= D < K");
  if (alpha < 0.0 || alpha >= 1.0) throw invalid_spec_error("build_d_regular: requires 0 <= alpha < 1");
  MatrixXd A = MatrixXd::Zero(K, K);
  const int lo = D / 2, hi = (D + 1) / 2;
  for (int k = 0; k < K; ++k) {
    for (int d = -lo; d <= hi; ++d) {
      if (d == 0) continue;
      A(((k + d) % K + K) % K, k) = (1.0 - alpha) / D;
    }
    A(k, k) = alpha;
  }
  auto out = CombinationMatrix::from_weights(std::move(A));
  if (!out.primitivity_exponent) throw non_primitive_error("build_d_regular: resulting ring is not primitive");
  return out;
}

// Lazy Metropolis weights on an undirected graph:
// b_{lk} = 1/max(deg l, deg k) on edges, b_{ll} = 1 - sum, A = alpha*I + (1-alpha)*B.
inline CombinationMatrix build_lazy_metropolis(int K, const EdgeList& edges, double alpha) {
  if (alpha < 0.0 || alpha >= 1.0) throw invalid_spec_error("build_lazy_metropolis: requires 0 <= alpha < 1");
  std::vector<std::vector<int>> adj(K);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= K || b >= K || a == b)
      throw invalid_spec_error("build_lazy_metropolis: bad edge");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  MatrixXd B = MatrixXd::Zero(K, K);
  for (int a = 0; a < K; ++a) {
    double off = 0.0;
    for (int b : adj[a]) {
      B(a, b) = 1.0 / std::max(adj[a].size(), adj[b].size());
      off += B(a, b);
    }
    B(a, a) = 1.0 - off;
  }
  MatrixXd A = alpha * MatrixXd::Identity(K, K) + (1.0 - alpha) * B;
  auto out = CombinationMatrix::from_weights(std::move(A));
  if (!out.primitivity_exponent)
    throw non_primitive_error("build_lazy_metropolis: graph is disconnected or periodic");
  return out;
}

// Rank-one matrix A = pi * 1^T; every column is pi. Models a fusion center.
inline CombinationMatrix build_rank_one(const VectorXd& pi) {
  if (pi.size() < 1 || pi.minCoeff() <= 0.0)
    throw invalid_spec_error("build_rank_one: pi must be strictly positive");
  if (std::abs(pi.sum() - 1.0) > 1e-12) throw invalid_spec_error("build_rank_one: pi must sum to 1");
  MatrixXd A = pi * Eigen::RowVectorXd::Ones(pi.size());
  return CombinationMatrix::from_weights(std::move(A));
}

inline CombinationMatrix build_fully_connected_uniform(int K) {
  return build_rank_one(VectorXd::Constant(K, 1.0 / K));
}

// Dobrushin coefficient: max over column pairs of half the L1 distance.
inline double dobrushin_coefficient(const CombinationMatrix& A) {
  const int K = A.size();
  double best = 0.0;
  for (int k = 0; k < K; ++k)
    for (int l = k + 1; l < K; ++l)
      best = std::max(best, 0.5 * (A.weights.col(k) - A.weights.col(l)).lpNorm<1>());
  return best;
}

struct ContractionEstimate {
  double lower_estimate;  // random-search + refinement, never exceeds dobrushin
  double dobrushin;       // valid upper bound on eta_A
};

// The KL contraction coefficient eta_A has no closed form; we report a
// lower estimate from random simplex pairs with local refinement, capped by
// the Dobrushin coefficient. Bounds that need a valid coefficient use the
// Dobrushin value.
inline ContractionEstimate contraction_coefficient_estimate(const CombinationMatrix& A, int samples,
                                                            std::uint64_t seed) {
  const int K = A.size();
  const double dob = dobrushin_coefficient(A);
  auto rng = make_stream(seed, 0xC0);
  auto ratio = [&](const VectorXd& u, const VectorXd& v) {
    const double d = kl_divergence(u, v);
    if (!(d > 1e-12) || !std::isfinite(d)) return 0.0;
    return kl_divergence(A.weights * u, A.weights * v) / d;
  };
  double best = 0.0;
  VectorXd bu = VectorXd::Constant(K, 1.0 / K), bv = bu;
  for (int s = 0; s < samples; ++s) {
    VectorXd u = random_simplex_point(K, rng);
    VectorXd v = random_simplex_point(K, rng);
    const double r = ratio(u, v);
    if (r > best) { best = r; bu = u; bv = v; }
  }
  // Local refinement: shrink v toward u while perturbing, keeping improvements.
  std::normal_distribution<double> gauss(0.0, 1.0);
  double step = 0.2;
  for (int it = 0; it < 400; ++it) {
    VectorXd u = bu, v = bv;
    for (int i = 0; i < K; ++i) {
      u[i] = std::max(1e-12, u[i] * std::exp(step * gauss(rng)));
      v[i] = std::max(1e-12, v[i] * std::exp(step * gauss(rng)));
    }
    u /= u.sum();
    v /= v.sum();
    // contract the pair toward each other; the supremum is often attained
    // in the local (chi-square) limit
    VectorXd mid = 0.5 * (u + v);
    VectorXd uc = mid + 0.5 * (u - mid), vc = mid + 0.5 * (v - mid);
    for (const auto& [pu, pv] : {std::pair{u, v}, std::pair{uc, vc}}) {
      const double r = ratio(pu, pv);
      if (r > best) { best = r; bu = pu; bv = pv; }
    }
    step *= 0.99;
  }
  return {std::min(best, dob), dob};
}

// Declarative network description; see config.hpp for the JSON form.
struct NetworkSpec {
  enum class Kind { d_regular, lazy_metropolis, rank_one, fully_connected_uniform, explicit_matrix };
  Kind kind = Kind::d_regular;
  int K = 0;
  int D = 0;             // d_regular
  double alpha = 0.0;    // d_regular, lazy_metropolis
  EdgeList edges;        // lazy_metropolis
  VectorXd pi;           // rank_one
  MatrixXd weights;      // explicit_matrix

  CombinationMatrix build() const {
    switch (kind) {
      case Kind::d_regular: return build_d_regular(K, D, alpha);
      case Kind::lazy_metropolis: return build_lazy_metropolis(K, edges, alpha);
      case Kind::rank_one: return build_rank_one(pi);
      case Kind::fully_connected_uniform: return build_fully_connected_uniform(K);
      case Kind::explicit_matrix: return CombinationMatrix::from_weights(weights);
    }
    throw invalid_spec_error("unknown network kind");
  }
};

}  // namespace beliefnet
