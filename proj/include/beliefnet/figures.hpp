#pragma once

// Canonical experiment fixtures: the exponential rate lists, the three
// K = 10 networks and per-figure curve bundles. The 24-edge non-regular
// graph is this repo's documented stand-in (chosen so that the lazy
// Metropolis matrix at alpha = 0.05 has Dobrushin coefficient 0.81).

#include <string>
#include <vector>

#include "beliefnet/config.hpp"
#include "beliefnet/learning.hpp"
#include "beliefnet/observation.hpp"
#include "beliefnet/topology.hpp"

namespace beliefnet::figures {

inline std::vector<double> exponential_rate_list() {
  return {0.500, 0.300, 0.025, 0.750, 1.200, 2.250, 0.900, 1.0, 0.250, 0.025};
}

// Same list with agent 1 made uninformative (KL = 0).
inline std::vector<double> inept_rate_list() {
  auto b = exponential_rate_list();
  b[0] = 1.0;
  return b;
}

inline constexpr int kAgents = 10;

// Degrees (6,6,4,5,3,5,6,4,4,5); connected; non-regular; 24 edges.
inline EdgeList nonregular_24_edges() {
  return {{0, 1}, {0, 2}, {0, 4}, {0, 5}, {0, 6}, {0, 9}, {1, 2}, {1, 5},
          {1, 6}, {1, 7}, {1, 9}, {2, 3}, {2, 8}, {3, 5}, {3, 6}, {3, 7},
          {3, 9}, {4, 7}, {4, 8}, {5, 6}, {5, 8}, {6, 7}, {6, 9}, {8, 9}};
}

inline json exponential_model_json(const std::vector<double>& alt_rates) {
  json rates = json::array();
  rates.push_back(std::vector<double>(kAgents, 1.0));  // truth: rate 1
  rates.push_back(alt_rates);
  return {{"family", "exponential"}, {"rates", rates}};
}

inline json exchangeable_model_json(double rate = 3.0) {
  return exponential_model_json(std::vector<double>(kAgents, rate));
}

inline json gaussian_model_json(double correlation) {
  json means = json::array();
  means.push_back(std::vector<double>(kAgents, 0.0));
  means.push_back(std::vector<double>(kAgents, 10.0));
  return {{"family", "gaussian"}, {"means", means}, {"correlation", correlation}};
}

inline NetworkSpec ring_network(int D, double alpha = 0.05) {
  NetworkSpec n;
  n.kind = NetworkSpec::Kind::d_regular;
  n.K = kAgents;
  n.D = D;
  n.alpha = alpha;
  return n;
}

inline NetworkSpec nonregular_network(double alpha = 0.05) {
  NetworkSpec n;
  n.kind = NetworkSpec::Kind::lazy_metropolis;
  n.K = kAgents;
  n.alpha = alpha;
  n.edges = nonregular_24_edges();
  return n;
}

inline NetworkSpec rank_one_uniform_network() {
  NetworkSpec n;
  n.kind = NetworkSpec::Kind::fully_connected_uniform;
  n.K = kAgents;
  return n;
}

struct Curve {
  std::string label;
  NetworkSpec network;
  json model;
  RuleKind rule;
};

struct Reference {
  std::string label;
  double value;
};

struct FigureJob {
  std::string id;
  std::vector<Curve> curves;
  std::vector<Reference> references;  // horizontal reference lines
  long default_iterations = 20000;
  int default_trials = 20;
};

inline std::vector<std::string> figure_ids() { return {"3i", "3ii", "3iii", "4i", "4ii", "4iii"}; }

inline FigureJob figure_job(const std::string& id) {
  FigureJob job;
  job.id = id;
  if (id == "3i") {
    const auto model = exponential_model_json(exponential_rate_list());
    job.curves = {{"aa_2regular", ring_network(2), model, RuleKind::aa_diffusion},
                  {"aa_3regular", ring_network(3), model, RuleKind::aa_diffusion},
                  {"ga_2regular", ring_network(2), model, RuleKind::ga_diffusion},
                  {"ga_3regular", ring_network(3), model, RuleKind::ga_diffusion}};
  } else if (id == "3ii") {
    const auto model = exchangeable_model_json();
    job.curves = {{"aa_nonregular", nonregular_network(), model, RuleKind::aa_diffusion},
                  {"ga_nonregular", nonregular_network(), model, RuleKind::ga_diffusion}};
    // B_A is appended at run time (Monte-Carlo term).
  } else if (id == "3iii") {
    job.curves = {{"aa_rank_one", rank_one_uniform_network(), exchangeable_model_json(),
                   RuleKind::aa_diffusion}};
    job.references = {{"rank_one_closed_form", 0.0457}};
  } else if (id == "4i") {
    const auto model = exponential_model_json(inept_rate_list());
    for (double a : {0.01, 0.5, 0.8, 0.95}) {
      const std::string tag = std::to_string(a).substr(0, 4);
      job.curves.push_back({"aa_alpha" + tag, nonregular_network(a), model, RuleKind::aa_diffusion});
      job.curves.push_back({"ga_alpha" + tag, nonregular_network(a), model, RuleKind::ga_diffusion});
    }
  } else if (id == "4ii") {
    const auto model = gaussian_model_json(0.5);
    for (int D : {2, 3, 4, 6}) {
      job.curves.push_back(
          {"aa_" + std::to_string(D) + "regular", ring_network(D), model, RuleKind::aa_diffusion});
    }
    job.curves.push_back({"ga_2regular", ring_network(2), model, RuleKind::ga_diffusion});
  } else if (id == "4iii") {
    for (double c : {0.0, 0.4, 0.6, 0.9}) {
      const std::string tag = std::to_string(c).substr(0, 3);
      job.curves.push_back(
          {"aa_c" + tag, ring_network(2), gaussian_model_json(c), RuleKind::aa_diffusion});
    }
    job.curves.push_back({"ga_c0.9", ring_network(2), gaussian_model_json(0.9), RuleKind::ga_diffusion});
  } else {
    throw invalid_spec_error("unknown figure id: " + id);
  }
  return job;
}

}  // namespace beliefnet::figures
