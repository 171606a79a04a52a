// Command-line front end: run, verify, linear, hookean-consistency, sweep.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oldroyd/harness/run.hpp"

namespace h = oldroyd::harness;

namespace {

constexpr int kExitChecksFailed = 4;

int report_config_error(const std::exception& e) {
  std::cerr << "config error: " << e.what() << "\n";
  return h::kExitConfig;
}

h::RunConfig load(const std::string& path, const std::string& output) {
  h::RunConfig cfg = h::load_config(path);
  if (!output.empty()) cfg.output_dir = output;
  return cfg;
}

int cmd_run(const std::string& path, const std::string& output) {
  h::RunConfig cfg;
  try {
    cfg = load(path, output);
  } catch (const oldroyd::ConfigError& e) {
    return report_config_error(e);
  }
  const h::RunOutcome o = h::execute(cfg);
  if (o.exit_code == h::kExitConfig) {
    std::cerr << "config error: " << o.message << "\n";
    return o.exit_code;
  }
  std::cout << "output " << o.directory.string() << "\n";
  if (!o.history.empty()) {
    const auto& last = o.history.back();
    std::cout << "t " << h::fmt(last.t) << " e0 " << h::fmt(last.e0) << " e1 " << h::fmt(last.e1)
              << " e2 " << h::fmt(last.e2) << "\n";
  }
  if (o.exit_code != h::kExitOk) std::cerr << "aborted: " << o.message << "\n";
  return o.exit_code;
}

int cmd_verify(std::uint64_t seed, int n, int trials) {
  std::vector<oldroyd::IdentityReport> reports;
  try {
    reports = oldroyd::run_suite(seed, n, trials);
  } catch (const oldroyd::ConfigError& e) {
    return report_config_error(e);
  }
  int failed = 0;
  for (const auto& r : reports) {
    std::cout << oldroyd::to_json(r).dump() << "\n";
    if (!r.pass) ++failed;
  }
  std::cerr << (failed == 0 ? "all pass" : std::to_string(failed) + " failed") << " ("
            << reports.size() << " checks, " << trials << " trials each, n = " << n << ")\n";
  return failed == 0 ? h::kExitOk : kExitChecksFailed;
}

int cmd_linear(int kmax, const oldroyd::ModelParams& p) {
  if (kmax < 1) {
    std::cerr << "config error: --kmax must be >= 1\n";
    return h::kExitConfig;
  }
  try {
    p.validate();
  } catch (const oldroyd::ConfigError& e) {
    return report_config_error(e);
  }
  h::write_eigenvalue_csv(std::cout, oldroyd::eigenvalue_table(kmax, p));
  return h::kExitOk;
}

int cmd_consistency(const std::string& path, const std::string& output) {
  h::RunConfig cfg;
  try {
    cfg = load(path, output);
  } catch (const oldroyd::ConfigError& e) {
    return report_config_error(e);
  }
  const h::ConsistencyOutcome o = h::hookean_consistency(cfg);
  if (o.exit_code == h::kExitConfig) {
    std::cerr << "config error: " << o.message << "\n";
    return o.exit_code;
  }
  std::cout << "max_drift_h2 " << h::fmt(o.max_drift) << "\n"
            << "max_g_closure " << h::fmt(o.max_closure) << "\n";
  if (o.exit_code != h::kExitOk) std::cerr << "aborted: " << o.message << "\n";
  return o.exit_code;
}

int cmd_sweep(const std::string& path, const std::string& output, const std::string& vary) {
  const auto eq = vary.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == vary.size()) {
    std::cerr << "config error: --vary expects key=v1,v2,...\n";
    return h::kExitConfig;
  }
  const std::string key = vary.substr(0, eq);
  std::vector<std::string> values;
  std::stringstream ss(vary.substr(eq + 1));
  for (std::string v; std::getline(ss, v, ',');) {
    if (!v.empty()) values.push_back(v);
  }
  std::vector<h::SweepVariant> out;
  try {
    out = h::sweep(load(path, output), key, values);
  } catch (const oldroyd::ConfigError& e) {
    return report_config_error(e);
  }
  int worst = h::kExitOk;
  for (const auto& v : out) {
    std::cout << key << '=' << v.value << " exit " << v.outcome.exit_code << "\n";
    worst = std::max(worst, v.outcome.exit_code);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oldroyd-B pseudo-spectral simulator and identity checks"};
  app.require_subcommand(1);

  std::string config_path, output;
  auto* run = app.add_subcommand("run", "integrate a configuration and write energies.csv, report.txt");
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "output directory (overrides output.dir)");

  std::uint64_t seed = 42;
  int n = 32, trials = 100;
  auto* verify = app.add_subcommand("verify", "random-trial identity suite, one JSON record per check");
  verify->add_option("--seed", seed, "sampler seed");
  verify->add_option("--n", n, "grid size (>= 16)");
  verify->add_option("--trials", trials, "random draws per check");

  int kmax = 2;
  oldroyd::ModelParams lp;
  auto* linear = app.add_subcommand("linear", "per-shell eigenvalues of the linearized system as CSV");
  linear->add_option("--kmax", kmax, "largest |k|");
  linear->add_option("--mu", lp.mu, "viscosity");
  linear->add_option("--mu1", lp.mu1, "stress coupling in the momentum equation");
  linear->add_option("--mu2", lp.mu2, "strain coupling in the stress equation");

  auto* consistency = app.add_subcommand(
      "hookean-consistency", "co-evolve Hookean and Oldroyd-B states and report their drift");
  consistency->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  consistency->add_option("-o,--output", output, "output directory (overrides output.dir)");

  std::string vary;
  auto* sweep = app.add_subcommand("sweep", "one run per value of a config key");
  sweep->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--vary", vary, "key=v1,v2,...")->required();
  sweep->add_option("-o,--output", output, "output directory (overrides output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : h::kExitConfig;
  }

  if (*run) return cmd_run(config_path, output);
  if (*verify) return cmd_verify(seed, n, trials);
  if (*linear) return cmd_linear(kmax, lp);
  if (*consistency) return cmd_consistency(config_path, output);
  if (*sweep) return cmd_sweep(config_path, output, vary);
  return h::kExitConfig;
}
