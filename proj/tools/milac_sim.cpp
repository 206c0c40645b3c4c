// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).
//
// CLI: nmse-sweep, complexity-sweep, papr-report and verify subcommands.
// Exit codes: 0 success, 1 invariant/acceptance failure, 2 config error.

#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "milac/sim/emit.hpp"
#include "milac/sim/sweeps.hpp"
#include "milac/sim/verify.hpp"

namespace {

using milac::sim::ExperimentConfig;
using milac::sim::SweepKind;

struct CommonFlags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Every flag funnels through the same key=value setter as the config file;
// flags win because they are applied after the file.
void add_common_flags(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path,
                  "flat key=value config file (flags override it)");
  const auto bind = [sub, &flags](const std::string& flag,
                                  const std::string& key,
                                  const std::string& help) {
    sub->add_option_function<std::string>(
        flag,
        [&flags, key](const std::string& value) {
          flags.overrides.emplace_back(key, value);
        },
        help);
  };
  bind("--seed", "seed", "base RNG seed (u64)");
  bind("--trials", "trials", "Monte Carlo trials per point");
  bind("--out", "out", "output directory");
  bind("--schemes", "schemes",
       "comma list: milac-ls,digital-ls,milac-mmse,digital-mmse");
  bind("--snr", "snr", "comma list of SNR points in dB");
  bind("--size", "sizes", "comma list of NTxNR pairs, e.g. 16x16,64x64");
  bind("--workers", "workers", "worker threads (0 = available parallelism)");
  bind("--format", "format", "csv|svg|both");
}

ExperimentConfig build_config(SweepKind kind, const CommonFlags& flags) {
  ExperimentConfig config = ExperimentConfig::defaults_for(kind);
  if (!flags.config_path.empty())
    milac::sim::apply_config_file(config, flags.config_path);
  for (const auto& [key, value] : flags.overrides)
    milac::sim::apply_key_value(config, key, value);
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MiLAC-aided MIMO channel estimation simulator"};
  app.require_subcommand(1);

  CommonFlags nmse_flags, complexity_flags, papr_flags, verify_flags;
  std::string fault_text = "none";

  CLI::App* nmse = app.add_subcommand("nmse-sweep", "NMSE versus SNR");
  add_common_flags(nmse, nmse_flags);
  CLI::App* complexity = app.add_subcommand(
      "complexity-sweep", "online real-operation counts versus N_R");
  add_common_flags(complexity, complexity_flags);
  CLI::App* papr =
      app.add_subcommand("papr-report", "per-chain PAPR of each scheme");
  add_common_flags(papr, papr_flags);
  CLI::App* verify =
      app.add_subcommand("verify", "run the invariant self-check suite");
  add_common_flags(verify, verify_flags);
  verify->add_option("--fault", fault_text,
                     "inject a fault (none|admittance|kkt); the matching "
                     "check must then fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (nmse->parsed()) {
      const auto config = build_config(SweepKind::nmse_vs_snr, nmse_flags);
      const auto rows = milac::sim::run_nmse_sweep(config);
      const auto written = milac::sim::emit_results(
          rows, config.out_dir, config.format, "nmse_sweep", "nmse",
          milac::sim::PlotAxis::snr_db);
      for (const auto& path : written) std::cout << "wrote " << path << "\n";
    } else if (complexity->parsed()) {
      const auto config =
          build_config(SweepKind::complexity_vs_nrx, complexity_flags);
      const auto rows = milac::sim::run_complexity_sweep(config);
      const auto written = milac::sim::emit_results(
          rows, config.out_dir, config.format, "complexity_sweep",
          "online_real_ops", milac::sim::PlotAxis::n_rx);
      for (const auto& path : written) std::cout << "wrote " << path << "\n";
    } else if (papr->parsed()) {
      const auto config = build_config(SweepKind::papr, papr_flags);
      const auto rows = milac::sim::run_papr_report(config);
      const auto written = milac::sim::emit_results(
          rows, config.out_dir, config.format, "papr_report", "papr_max",
          milac::sim::PlotAxis::snr_db);
      for (const auto& path : written) std::cout << "wrote " << path << "\n";
    } else if (verify->parsed()) {
      const auto config = build_config(SweepKind::verify, verify_flags);
      const auto fault = milac::sim::parse_fault(fault_text);
      const auto report = milac::sim::run_verify(config, fault);
      milac::sim::print_verify_report(report, std::cout);
      return report.all_pass() ? 0 : 1;
    }
  } catch (const milac::sim::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
