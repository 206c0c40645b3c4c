// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).
//
// Experiment configuration: defaults per sweep kind, flat key=value config
// files, and flag-style overrides.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "milac/milac.hpp"

namespace milac::sim {

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument("config error: field '" + field +
                              "': " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class SweepKind { nmse_vs_snr, complexity_vs_nrx, papr, verify };
enum class OutputFormat { csv, svg, both };

struct ExperimentConfig {
  SweepKind kind = SweepKind::nmse_vs_snr;
  std::vector<std::pair<Index, Index>> sizes;  // (n_tx, n_rx)
  std::vector<double> snr_db;
  double eps_tx = 0.8;
  double eps_rx = 0.8;
  double p_tx = 1.0;
  Index l_tx = 1;
  Index trials = 10000;
  std::uint64_t base_seed = 1;
  std::vector<Scheme> schemes = {Scheme::milac_ls, Scheme::digital_ls,
                                 Scheme::milac_mmse, Scheme::digital_mmse};
  std::string out_dir = ".";
  Index workers = 0;  // 0 = available parallelism
  OutputFormat format = OutputFormat::both;

  static ExperimentConfig defaults_for(SweepKind kind);
  void validate() const;  // throws ConfigError naming the offending field
};

struct ResultRow {
  std::string scheme;
  Index n_tx = 0;
  Index n_rx = 0;
  double snr_db = 0.0;
  std::string metric;
  double value = 0.0;
  Index trials = 0;
  double std_error = 0.0;
};

// Parsing helpers shared by the config-file reader and the CLI flags.
std::vector<std::pair<Index, Index>> parse_sizes(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);
std::vector<Scheme> parse_scheme_list(const std::string& text);
OutputFormat parse_format(const std::string& text);

/// Applies one key=value setting; throws ConfigError on unknown keys or
/// malformed values.
void apply_key_value(ExperimentConfig& config, const std::string& key,
                     const std::string& value);

/// Flat key=value file, '#' starts a comment, blank lines ignored.
void apply_config_file(ExperimentConfig& config, const std::string& path);

}  // namespace milac::sim
