#pragma once

// RateReport: one document collecting the analytic rates, Monte-Carlo
// estimates and bounds for every wrong hypothesis, with provenance (sample
// counts, coefficients used).

#include <json.hpp>
#include <optional>
#include <sstream>
#include <vector>

#include "beliefnet/config.hpp"
#include "beliefnet/rates.hpp"

namespace beliefnet {

struct HypothesisReport {
  int theta = 0;
  double ga_rate = 0.0;
  std::optional<MatrixProductRate> gamma;
  std::vector<SubadditiveBounds> subadditive;
  std::optional<GapEstimate> gap;
  std::optional<MonteCarloEstimate> rank_one;
  std::optional<MonteCarloEstimate> jensen;
  std::optional<VariationalGapBound> variational;
  std::optional<ExchangeableBound> exchangeable;
  std::optional<double> inept;
  std::optional<int> inept_agent;
};

struct RateReport {
  std::vector<HypothesisReport> per_hypothesis;
  std::uint64_t seed = 0;
};

inline RateReport build_rate_report(const ExperimentConfig& cfg) {
  const auto A = cfg.network.build();
  const auto model = cfg.model();
  const auto& opt = cfg.analysis;
  if (model.num_hypotheses() < 2)
    throw invalid_spec_error("rate report: no wrong hypotheses to analyze");
  RateReport report;
  report.seed = cfg.seed;
  for (int theta = 0; theta < model.num_hypotheses(); ++theta) {
    if (theta == cfg.theta0) continue;
    HypothesisReport h;
    h.theta = theta;
    h.ga_rate = ga_rate(A, model, cfg.theta0, theta);
    if (opt.gamma)
      h.gamma = matrix_product_rate(A, model, cfg.theta0, theta, opt.gamma_horizon,
                                    opt.gamma_trials, cfg.seed);
    for (int j : opt.subadditive_j)
      h.subadditive.push_back(
          subadditive_bounds(A, model, cfg.theta0, theta, j, opt.subadditive_trials, cfg.seed));
    if (opt.gap)
      h.gap = gap_estimate(A, model, cfg.theta0, theta, opt.gap_horizon, opt.gap_burn_in, cfg.seed,
                           opt.gap_chains);
    if (opt.rank_one)
      h.rank_one = rank_one_exact(A.perron, model, cfg.theta0, theta, opt.mc_samples, cfg.seed);
    if (opt.jensen)
      h.jensen = jensen_gap(A.perron, model, cfg.theta0, theta, opt.mc_samples, cfg.seed);
    if (opt.variational)
      h.variational =
          variational_gap_bound(A, model, cfg.theta0, theta, opt.variational_samples, cfg.seed);
    if (opt.exchangeable)
      h.exchangeable = exchangeable_bound(A, model, cfg.theta0, theta, opt.mc_samples, cfg.seed);
    if (opt.inept_agent) {
      h.inept = inept_bound(A, model, cfg.theta0, theta, *opt.inept_agent);
      h.inept_agent = *opt.inept_agent;
    }
    report.per_hypothesis.push_back(std::move(h));
  }
  return report;
}

inline json mc_to_json(const MonteCarloEstimate& e) {
  return {{"value", e.value}, {"stderr", e.stderr_}, {"samples", e.samples}};
}

inline json report_to_json(const RateReport& r) {
  json hyps = json::array();
  for (const auto& h : r.per_hypothesis) {
    json j = {{"theta", h.theta}, {"ga_rate", h.ga_rate}};
    if (h.gamma) {
      j["gamma"] = mc_to_json(h.gamma->gamma);
      j["gamma"]["entry_spread"] = h.gamma->entry_spread;
      j["aa_rate_estimate"] = -h.gamma->gamma.value;
    }
    if (!h.subadditive.empty()) {
      json subs = json::array();
      for (const auto& s : h.subadditive)
        subs.push_back({{"j", s.horizon}, {"lower", mc_to_json(s.lower)}, {"upper", mc_to_json(s.upper)}});
      j["subadditive"] = subs;
    }
    if (h.gap) {
      j["gap_estimate"] = mc_to_json(h.gap->gap);
      j["gap_estimate"]["chain_spread"] = h.gap->chain_spread;
    }
    if (h.rank_one) j["rank_one_exact"] = mc_to_json(*h.rank_one);
    if (h.jensen) j["jensen_gap"] = mc_to_json(*h.jensen);
    if (h.variational) {
      const auto& v = *h.variational;
      j["variational_bound"] = {{"delta_relaxed", v.delta_relaxed}, {"optimistic", v.optimistic},
                                {"dobrushin", v.dobrushin},       {"eta_hat", v.eta_hat},
                                {"F_star", v.F_star},             {"trivial", v.trivial},
                                {"coefficient_used", "dobrushin"}};
    }
    if (h.exchangeable) {
      const auto& e = *h.exchangeable;
      j["exchangeable_bound"] = {{"B_A", e.B_A},
                                 {"gap_lower", e.gap_lower},
                                 {"mean_log_avg", mc_to_json(e.mean_log_avg)},
                                 {"dobrushin", e.dobrushin},
                                 {"rho_ga", e.rho_ga}};
    }
    if (h.inept) j["inept_bound"] = {{"agent", *h.inept_agent}, {"value", *h.inept}};
    hyps.push_back(std::move(j));
  }
  return {{"seed", r.seed}, {"hypotheses", hyps}};
}

inline std::string report_to_table(const RateReport& r) {
  std::ostringstream os;
  for (const auto& h : r.per_hypothesis) {
    os << "hypothesis " << h.theta << "\n";
    os << "  ga_rate            " << h.ga_rate << "\n";
    if (h.gamma)
      os << "  aa_rate (gamma MC) " << -h.gamma->gamma.value << " +/- " << h.gamma->gamma.stderr_
         << "  (entry spread " << h.gamma->entry_spread << ")\n";
    for (const auto& s : h.subadditive)
      os << "  gamma bracket j=" << s.horizon << "  [" << s.lower.value << ", " << s.upper.value
         << "]\n";
    if (h.gap)
      os << "  gap (u-chain)      " << h.gap->gap.value << " +/- " << h.gap->gap.stderr_ << "\n";
    if (h.rank_one)
      os << "  rank_one_exact     " << h.rank_one->value << " +/- " << h.rank_one->stderr_ << "\n";
    if (h.jensen)
      os << "  jensen_gap         " << h.jensen->value << " +/- " << h.jensen->stderr_ << "\n";
    if (h.variational)
      os << "  variational bound  " << h.variational->delta_relaxed << " (delta-relaxed, delta="
         << h.variational->dobrushin << ")\n";
    if (h.exchangeable)
      os << "  B_A                " << h.exchangeable->B_A << "  gap_lower "
         << h.exchangeable->gap_lower << "\n";
    if (h.inept)
      os << "  inept bound (k=" << *h.inept_agent << ")  " << *h.inept << "\n";
  }
  return os.str();
}

}  // namespace beliefnet
