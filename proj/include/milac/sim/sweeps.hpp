// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).
//
// Monte Carlo sweeps. Seeding plan: trial i uses the scheme-independent seed
// derive_seed(base, i), split into a channel stream and a noise stream, so
// every scheme inside a trial consumes identical random draws and results do
// not depend on worker scheduling.

#pragma once

#include <vector>

#include "milac/sim/experiment.hpp"

namespace milac::sim {

inline std::uint64_t trial_seed(std::uint64_t base, Index trial) {
  return derive_seed(base, static_cast<std::uint64_t>(trial));
}
inline std::uint64_t channel_seed(std::uint64_t base, Index trial) {
  return derive_seed(trial_seed(base, trial), 0);
}
inline std::uint64_t noise_seed(std::uint64_t base, Index trial) {
  return derive_seed(trial_seed(base, trial), 1);
}

/// NMSE versus SNR (one row per scheme, size and SNR point).
std::vector<ResultRow> run_nmse_sweep(const ExperimentConfig& config);

/// Online real-operation counts over the antenna grid; exact formula
/// evaluation, no simulation.
std::vector<ResultRow> run_complexity_sweep(const ExperimentConfig& config);

/// Per-chain PAPR of each scheme's transmit signals. The MiLAC schemes
/// report the source-signal PAPR, the digital schemes the per-antenna rows
/// of the training matrix. A supplementary "digital-ls-identity" row shows
/// the identity-training PAPR a digital system would incur.
std::vector<ResultRow> run_papr_report(const ExperimentConfig& config);

}  // namespace milac::sim
