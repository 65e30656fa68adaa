#pragma once

// JSON experiment configs and CSV export. The seed is mandatory: silent
// nondeterminism is the main reproducibility hazard, so there is no default.

#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "beliefnet/errors.hpp"
#include "beliefnet/learning.hpp"
#include "beliefnet/observation.hpp"
#include "beliefnet/topology.hpp"

namespace beliefnet {

using nlohmann::json;

inline json network_to_json(const NetworkSpec& n) {
  json j;
  switch (n.kind) {
    case NetworkSpec::Kind::d_regular:
      j = {{"kind", "d_regular"}, {"K", n.K}, {"D", n.D}, {"alpha", n.alpha}};
      break;
    case NetworkSpec::Kind::lazy_metropolis: {
      json edges = json::array();
      for (auto [a, b] : n.edges) edges.push_back({a, b});
      j = {{"kind", "lazy_metropolis"}, {"K", n.K}, {"alpha", n.alpha}, {"edges", edges}};
      break;
    }
    case NetworkSpec::Kind::rank_one: {
      std::vector<double> pi(n.pi.data(), n.pi.data() + n.pi.size());
      j = {{"kind", "rank_one"}, {"pi", pi}};
      break;
    }
    case NetworkSpec::Kind::fully_connected_uniform:
      j = {{"kind", "fully_connected_uniform"}, {"K", n.K}};
      break;
    case NetworkSpec::Kind::explicit_matrix: {
      json rows = json::array();
      for (Eigen::Index r = 0; r < n.weights.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < n.weights.cols(); ++c) row.push_back(n.weights(r, c));
        rows.push_back(row);
      }
      j = {{"kind", "explicit"}, {"weights", rows}};
      break;
    }
  }
  return j;
}

inline NetworkSpec network_from_json(const json& j) {
  NetworkSpec n;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "d_regular") {
    n.kind = NetworkSpec::Kind::d_regular;
    n.K = j.at("K").get<int>();
    n.D = j.at("D").get<int>();
    n.alpha = j.at("alpha").get<double>();
  } else if (kind == "lazy_metropolis") {
    n.kind = NetworkSpec::Kind::lazy_metropolis;
    n.K = j.at("K").get<int>();
    n.alpha = j.at("alpha").get<double>();
    for (const auto& e : j.at("edges")) n.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  } else if (kind == "rank_one") {
    n.kind = NetworkSpec::Kind::rank_one;
    const auto pi = j.at("pi").get<std::vector<double>>();
    n.pi = Eigen::Map<const VectorXd>(pi.data(), static_cast<Eigen::Index>(pi.size()));
    n.K = static_cast<int>(pi.size());
  } else if (kind == "fully_connected_uniform") {
    n.kind = NetworkSpec::Kind::fully_connected_uniform;
    n.K = j.at("K").get<int>();
  } else if (kind == "explicit") {
    n.kind = NetworkSpec::Kind::explicit_matrix;
    const auto rows = j.at("weights");
    const int K = static_cast<int>(rows.size());
    n.K = K;
    n.weights.resize(K, K);
    for (int r = 0; r < K; ++r)
      for (int c = 0; c < K; ++c) n.weights(r, c) = rows.at(r).at(c).get<double>();
  } else {
    throw invalid_spec_error("unknown network kind: " + kind);
  }
  return n;
}

inline json model_to_json(const ObservationModel& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.params().rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.params().cols(); ++c) row.push_back(m.params()(r, c));
    rows.push_back(row);
  }
  if (m.family() == ObservationModel::Family::exponential_rates)
    return {{"family", "exponential"}, {"rates", rows}};
  return {{"family", "gaussian"}, {"means", rows}, {"correlation", m.correlation()}};
}

inline ObservationModel model_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  auto parse_matrix = [](const json& rows) {
    const int H = static_cast<int>(rows.size());
    const int K = static_cast<int>(rows.at(0).size());
    MatrixXd m(H, K);
    for (int r = 0; r < H; ++r)
      for (int c = 0; c < K; ++c) m(r, c) = rows.at(r).at(c).get<double>();
    return m;
  };
  if (family == "exponential") return ObservationModel::exponential(parse_matrix(j.at("rates")));
  if (family == "gaussian")
    return ObservationModel::gaussian(parse_matrix(j.at("means")),
                                      j.at("correlation").get<double>());
  throw invalid_spec_error("unknown model family: " + family);
}

struct AnalysisOptions {
  bool ga_rate = true;
  bool gamma = false;
  long gamma_horizon = 20000;
  int gamma_trials = 10;
  std::vector<int> subadditive_j;  // empty: skip
  int subadditive_trials = 4000;
  bool gap = false;
  long gap_horizon = 20000;
  long gap_burn_in = 2000;
  int gap_chains = 8;
  bool rank_one = false;
  bool jensen = false;
  bool variational = false;
  bool exchangeable = false;
  long mc_samples = 1000000;
  long variational_samples = 200000;
  std::optional<int> inept_agent;
};

struct ExperimentConfig {
  NetworkSpec network;
  json model_json;  // kept verbatim so manifests round-trip exactly
  std::vector<RuleKind> rules;
  int theta0 = 0;
  long iterations = 20000;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  AnalysisOptions analysis;

  ObservationModel model() const { return model_from_json(model_json); }
};

inline RuleKind rule_from_name(const std::string& s) {
  if (s == "aa_diffusion") return RuleKind::aa_diffusion;
  if (s == "ga_diffusion") return RuleKind::ga_diffusion;
  if (s == "aa_consensus") return RuleKind::aa_consensus;
  if (s == "ga_consensus") return RuleKind::ga_consensus;
  throw invalid_spec_error("unknown rule: " + s);
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (!j.contains("seed")) throw invalid_spec_error("config: seed is required");
  c.seed = j.at("seed").get<std::uint64_t>();
  c.network = network_from_json(j.at("network"));
  c.model_json = j.at("model");
  const ObservationModel m = c.model();  // validates
  c.theta0 = j.at("true_hypothesis").get<int>();
  if (c.theta0 < 0 || c.theta0 >= m.num_hypotheses())
    throw invalid_spec_error("config: true_hypothesis index out of range");
  if (j.contains("rules"))
    for (const auto& r : j.at("rules")) c.rules.push_back(rule_from_name(r.get<std::string>()));
  c.iterations = j.value("iterations", 20000L);
  if (c.iterations < 1) throw invalid_spec_error("config: iterations must be >= 1");
  c.trials = j.value("trials", 1);
  c.output_dir = j.value("output_dir", std::string("out"));
  if (j.contains("analysis")) {
    const auto& a = j.at("analysis");
    auto& o = c.analysis;
    o.ga_rate = a.value("ga_rate", true);
    o.gamma = a.value("gamma", false);
    o.gamma_horizon = a.value("gamma_horizon", o.gamma_horizon);
    o.gamma_trials = a.value("gamma_trials", o.gamma_trials);
    if (a.contains("subadditive_j"))
      o.subadditive_j = a.at("subadditive_j").get<std::vector<int>>();
    o.subadditive_trials = a.value("subadditive_trials", o.subadditive_trials);
    o.gap = a.value("gap", false);
    o.gap_horizon = a.value("gap_horizon", o.gap_horizon);
    o.gap_burn_in = a.value("gap_burn_in", o.gap_burn_in);
    o.gap_chains = a.value("gap_chains", o.gap_chains);
    o.rank_one = a.value("rank_one", false);
    o.jensen = a.value("jensen", false);
    o.variational = a.value("variational", false);
    o.exchangeable = a.value("exchangeable", false);
    o.mc_samples = a.value("mc_samples", o.mc_samples);
    o.variational_samples = a.value("variational_samples", o.variational_samples);
    if (a.contains("inept_agent")) o.inept_agent = a.at("inept_agent").get<int>();
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_spec_error("cannot open config: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw invalid_spec_error("config parse error in " + path + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw invalid_spec_error("config field error in " + path + ": " + e.what());
  }
}

inline json config_to_json(const ExperimentConfig& c) {
  json rules = json::array();
  for (auto r : c.rules) rules.push_back(rule_name(r));
  json a = {{"ga_rate", c.analysis.ga_rate},
            {"gamma", c.analysis.gamma},
            {"gamma_horizon", c.analysis.gamma_horizon},
            {"gamma_trials", c.analysis.gamma_trials},
            {"subadditive_j", c.analysis.subadditive_j},
            {"subadditive_trials", c.analysis.subadditive_trials},
            {"gap", c.analysis.gap},
            {"gap_horizon", c.analysis.gap_horizon},
            {"gap_burn_in", c.analysis.gap_burn_in},
            {"gap_chains", c.analysis.gap_chains},
            {"rank_one", c.analysis.rank_one},
            {"jensen", c.analysis.jensen},
            {"variational", c.analysis.variational},
            {"exchangeable", c.analysis.exchangeable},
            {"mc_samples", c.analysis.mc_samples},
            {"variational_samples", c.analysis.variational_samples}};
  if (c.analysis.inept_agent) a["inept_agent"] = *c.analysis.inept_agent;
  return {{"seed", c.seed},
          {"network", network_to_json(c.network)},
          {"model", c.model_json},
          {"rules", rules},
          {"true_hypothesis", c.theta0},
          {"iterations", c.iterations},
          {"trials", c.trials},
          {"output_dir", c.output_dir},
          {"analysis", a}};
}

// ---- CSV export ------------------------------------------------------------

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Columns: iter, agent, hypothesis, log_belief.
inline std::string trace_to_csv(const SimulationTrace& t) {
  std::ostringstream os;
  os << "iter,agent,hypothesis,log_belief\n";
  for (std::size_t s = 0; s < t.iterations.size(); ++s)
    for (int k = 0; k < t.K; ++k)
      for (int h = 0; h < t.H; ++h)
        os << t.iterations[s] << ',' << k << ',' << h << ','
           << format_double(t.log_beliefs[s](k, h)) << '\n';
  return os.str();
}

// Columns: iter, agent, hypothesis, neg_log_belief_over_i (wrong hypotheses only).
inline std::string derived_series_to_csv(const SimulationTrace& t) {
  std::ostringstream os;
  os << "iter,agent,hypothesis,neg_log_belief_over_i\n";
  for (std::size_t s = 0; s < t.iterations.size(); ++s)
    for (int k = 0; k < t.K; ++k)
      for (int h = 0; h < t.H; ++h) {
        if (h == t.theta0) continue;
        os << t.iterations[s] << ',' << k << ',' << h << ','
           << format_double(t.scaled_neg_log_belief(s, k, h)) << '\n';
      }
  return os.str();
}

// Row-major matrix dump with a `K` header line.
inline std::string matrix_to_csv(const MatrixXd& m) {
  std::ostringstream os;
  os << "K," << m.rows() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? "," : "") << format_double(m(r, c));
    os << '\n';
  }
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace beliefnet
