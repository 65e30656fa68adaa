// Command-line front end: run social-learning simulations, compute rate
// reports, and regenerate the bundled experiment figures as plot-ready CSV.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "beliefnet/config.hpp"
#include "beliefnet/figures.hpp"
#include "beliefnet/rates.hpp"
#include "beliefnet/report.hpp"

namespace fs = std::filesystem;
using namespace beliefnet;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> trials;
  std::optional<long> iters;
};

ExperimentConfig load_with_overrides(const CommonFlags& f) {
  ExperimentConfig cfg = load_config(f.config_path);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out_dir) cfg.output_dir = *f.out_dir;
  if (f.trials) cfg.trials = *f.trials;
  if (f.iters) cfg.iterations = *f.iters;
  return cfg;
}

void write_manifest(const ExperimentConfig& cfg, const fs::path& dir) {
  json manifest = {{"tool", "beliefnet"}, {"version", "1.0.0"}, {"resolved_config", config_to_json(cfg)}};
  write_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

int cmd_simulate(const CommonFlags& flags) {
  const ExperimentConfig cfg = load_with_overrides(flags);
  if (cfg.rules.empty()) throw invalid_spec_error("simulate: config lists no rules");
  const auto A = cfg.network.build();
  const auto model = cfg.model();
  if (!model.globally_identifiable(cfg.theta0))
    std::cerr << "warning: model is not globally identifiable; beliefs need not converge\n";
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_manifest(cfg, dir);
  std::cout << "rule trial final_iter pooled_rate agent_spread\n";
  for (std::size_t ri = 0; ri < cfg.rules.size(); ++ri) {
    for (int trial = 0; trial < cfg.trials; ++trial) {
      RunSpec rs;
      rs.rule = cfg.rules[ri];
      rs.theta0 = cfg.theta0;
      rs.iterations = cfg.iterations;
      rs.seed = cfg.seed;
      rs.stream = ri * 100000ULL + static_cast<std::uint64_t>(trial);
      const auto trace = run(rs, A, model);
      const std::string base = rule_name(rs.rule) + "_t" + std::to_string(trial);
      write_file((dir / ("trace_" + base + ".csv")).string(), trace_to_csv(trace));
      write_file((dir / ("derived_" + base + ".csv")).string(), derived_series_to_csv(trace));
      for (int theta = 0; theta < model.num_hypotheses(); ++theta) {
        if (theta == cfg.theta0) continue;
        try {
          const auto er = empirical_rate(trace, theta);
          std::cout << rule_name(rs.rule) << ' ' << trial << ' ' << trace.final_iteration() << ' '
                    << er.pooled << ' ' << er.agent_spread << '\n';
        } catch (const insufficient_data_error&) {
          std::cout << rule_name(rs.rule) << ' ' << trial << ' ' << trace.final_iteration()
                    << " n/a n/a\n";
        }
      }
    }
  }
  return 0;
}

int cmd_rates(const CommonFlags& flags) {
  const ExperimentConfig cfg = load_with_overrides(flags);
  const RateReport report = build_rate_report(cfg);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_manifest(cfg, dir);
  write_file((dir / "rate_report.json").string(), report_to_json(report).dump(2) + "\n");
  std::cout << report_to_table(report);
  return 0;
}

int cmd_reproduce(const std::string& figure, const CommonFlags& flags) {
  auto job = figures::figure_job(figure);
  const long iters = flags.iters.value_or(job.default_iterations);
  const int trials = flags.trials.value_or(job.default_trials);
  const std::uint64_t seed = flags.seed.value_or(1u);
  const fs::path dir(flags.out_dir.value_or("figure_" + figure));
  fs::create_directories(dir);

  for (std::size_t ci = 0; ci < job.curves.size(); ++ci) {
    const auto& curve = job.curves[ci];
    const auto A = curve.network.build();
    const auto model = model_from_json(curve.model);
    const int theta = 1;  // bundled figures are all binary with theta0 = 0
    std::vector<long> snap_iters;
    std::vector<double> sum;
    for (int t = 0; t < trials; ++t) {
      RunSpec rs;
      rs.rule = curve.rule;
      rs.theta0 = 0;
      rs.iterations = iters;
      rs.seed = seed;
      rs.stream = ci * 100000ULL + static_cast<std::uint64_t>(t);
      const auto trace = run(rs, A, model);
      if (t == 0) {
        snap_iters = trace.iterations;
        sum.assign(snap_iters.size(), 0.0);
      }
      for (std::size_t s = 0; s < snap_iters.size(); ++s)
        sum[s] += trace.scaled_neg_log_belief(s, 0, theta);  // agent 1 per the figures
    }
    std::ostringstream os;
    os << "iter,value\n";
    for (std::size_t s = 0; s < snap_iters.size(); ++s)
      os << snap_iters[s] << ',' << format_double(sum[s] / trials) << '\n';
    write_file((dir / (curve.label + ".csv")).string(), os.str());
    std::cout << "wrote " << (dir / (curve.label + ".csv")).string() << '\n';
  }

  if (figure == "3ii") {
    const auto& curve = job.curves.front();
    const auto bound = exchangeable_bound(curve.network.build(), model_from_json(curve.model), 0, 1,
                                          1000000, seed);
    job.references.push_back({"B_A", bound.B_A});
  }
  for (const auto& ref : job.references) {
    write_file((dir / (ref.label + ".csv")).string(),
               "label,value\n" + ref.label + "," + format_double(ref.value) + "\n");
    std::cout << "wrote " << (dir / (ref.label + ".csv")).string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social-learning belief fusion simulator and rate analyzer"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string figure;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    if (need_config)
      sub->add_option("--config", flags.config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", flags.seed, "override the run seed");
    sub->add_option("--out", flags.out_dir, "output directory");
    sub->add_option("--trials", flags.trials, "override trial count");
    sub->add_option("--iters", flags.iters, "override iteration count");
  };

  auto* sim = app.add_subcommand("simulate", "run belief-evolution simulations, write traces");
  add_common(sim, true);
  auto* rates = app.add_subcommand("rates", "compute the rate report for a config");
  add_common(rates, true);
  auto* rep = app.add_subcommand("reproduce", "regenerate a bundled experiment figure");
  rep->add_option("--figure", figure, "one of 3i 3ii 3iii 4i 4ii 4iii")->required();
  add_common(rep, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfigError : 0;
  }

  try {
    if (sim->parsed()) return cmd_simulate(flags);
    if (rates->parsed()) return cmd_rates(flags);
    if (rep->parsed()) return cmd_reproduce(figure, flags);
  } catch (const invalid_spec_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumericError;
  }
  return 0;
}
