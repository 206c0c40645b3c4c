// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).

#include "milac/sim/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace milac::sim {

namespace {

Index resolve_workers(Index requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<Index>(hw) : 1;
}

// Static contiguous partition of [0, trials); worker w handles one chunk, so
// the reduction order (by worker index) is independent of scheduling.
void parallel_trials(Index trials, Index workers,
                     const std::function<void(Index, Index, Index)>& body) {
  workers = std::min(workers, trials);
  if (workers <= 1) {
    body(0, 0, trials);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const Index chunk = (trials + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, w, begin, end] {
      try {
        body(w, begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double sigma2_for(double p_tx, double snr_db) {
  return p_tx / std::pow(10.0, snr_db / 10.0);
}

}  // namespace

std::vector<ResultRow> run_nmse_sweep(const ExperimentConfig& config) {
  config.validate();
  const Index workers = resolve_workers(config.workers);
  const Index n_snr = static_cast<Index>(config.snr_db.size());
  const Index n_schemes = static_cast<Index>(config.schemes.size());
  std::vector<ResultRow> rows;

  for (const auto& [n_tx, n_rx] : config.sizes) {
    const SystemConfigd model_cfg(n_tx, n_rx, config.l_tx, config.p_tx, 1.0);
    const ChannelModel<double> model =
        build_channel_model(model_cfg, config.eps_tx, config.eps_rx);
    const TrainingSchedule<double> ls_schedule = design_ls_training(model_cfg);
    const ComplexMatrixXd x_dft = dft_training_matrix(model_cfg);

    // Per-SNR MMSE designs (the allocation depends on sigma^2).
    std::vector<SystemConfigd> snr_cfg;
    std::vector<PowerAllocation<double>> allocations;
    std::vector<TrainingSchedule<double>> mmse_schedules;
    std::vector<ComplexMatrixXd> x_mmse;
    const bool wants_mmse =
        std::any_of(config.schemes.begin(), config.schemes.end(), [](Scheme s) {
          return s == Scheme::milac_mmse || s == Scheme::digital_mmse;
        });
    for (Index s = 0; s < n_snr; ++s) {
      const double sigma2 = sigma2_for(config.p_tx, config.snr_db[s]);
      snr_cfg.emplace_back(n_tx, n_rx, config.l_tx, config.p_tx, sigma2);
      if (wants_mmse) {
        allocations.push_back(allocate_training_power(
            model.r_v, sigma2, config.p_tx, model_cfg.tau, n_rx));
        mmse_schedules.push_back(
            design_mmse_training(model, allocations.back(), snr_cfg.back()));
        x_mmse.push_back(mmse_schedules.back().training_matrix());
      }
    }

    using Grid = std::vector<NmseAccumulator<double>>;
    std::vector<Grid> partial(static_cast<std::size_t>(workers),
                              Grid(static_cast<std::size_t>(n_snr * n_schemes)));

    parallel_trials(config.trials, workers, [&](Index w, Index begin, Index end) {
      Grid& grid = partial[static_cast<std::size_t>(w)];
      for (Index i = begin; i < end; ++i) {
        const ChannelRealization<double> chan =
            sample_channel(model, channel_seed(config.base_seed, i));
        Rng<double> noise_rng(noise_seed(config.base_seed, i));
        const ComplexMatrixXd noise_std =
            noise_rng.complex_gaussian_matrix(n_rx, model_cfg.tau, 1.0);
        for (Index s = 0; s < n_snr; ++s) {
          const double sigma = std::sqrt(snr_cfg[s].noise_power);
          const ComplexMatrixXd noise = sigma * noise_std;
          for (Index k = 0; k < n_schemes; ++k) {
            auto& acc = grid[static_cast<std::size_t>(s * n_schemes + k)];
            switch (config.schemes[static_cast<std::size_t>(k)]) {
              case Scheme::milac_ls: {
                const ComplexMatrixXd est = run_milac_ls(chan, ls_schedule, noise);
                acc.add(chan.h, est);
                break;
              }
              case Scheme::digital_ls: {
                const ComplexMatrixXd y = chan.h * x_dft + noise;
                const ComplexMatrixXd est = digital_ls_baseline(y, x_dft);
                acc.add(chan.h, est);
                break;
              }
              case Scheme::milac_mmse: {
                const MmseEstimate<double> est =
                    run_milac_mmse(chan, model, mmse_schedules[s], noise);
                acc.add(chan.h_v, est.h_v);
                break;
              }
              case Scheme::digital_mmse: {
                const ComplexMatrixXd y = chan.h * x_mmse[s] + noise;
                const ComplexMatrixXd est = digital_mmse_baseline(
                    y, model, allocations[s], snr_cfg[s]);
                acc.add(chan.h_v, est);
                break;
              }
            }
          }
        }
      }
    });

    for (Index s = 0; s < n_snr; ++s) {
      for (Index k = 0; k < n_schemes; ++k) {
        NmseAccumulator<double> acc;
        for (Index w = 0; w < workers; ++w)
          acc.merge(partial[static_cast<std::size_t>(w)]
                           [static_cast<std::size_t>(s * n_schemes + k)]);
        rows.push_back({to_string(config.schemes[static_cast<std::size_t>(k)]),
                        n_tx, n_rx, config.snr_db[s], "nmse", acc.value(),
                        static_cast<Index>(acc.count()),
                        acc.standard_error()});
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_complexity_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<ResultRow> rows;
  for (const auto& [n_tx, n_rx] : config.sizes) {
    const Index tau = n_tx;
    for (Scheme scheme : config.schemes) {
      rows.push_back({to_string(scheme), n_tx, n_rx, 0.0, "online_real_ops",
                      static_cast<double>(
                          complexity_report(n_tx, n_rx, tau, scheme)),
                      0, 0.0});
      rows.push_back({to_string(scheme), n_tx, n_rx, 0.0,
                      "online_real_ops_exact",
                      static_cast<double>(
                          complexity_report_exact(n_tx, n_rx, tau, scheme)),
                      0, 0.0});
    }
  }
  return rows;
}

std::vector<ResultRow> run_papr_report(const ExperimentConfig& config) {
  config.validate();
  std::vector<ResultRow> rows;
  const auto emit = [&rows](const PaprReport<double>& report, Index n_tx,
                            Index n_rx, double snr_db) {
    rows.push_back({report.scheme, n_tx, n_rx, snr_db, "papr_max",
                    report.max(), 1, 0.0});
    rows.push_back({report.scheme, n_tx, n_rx, snr_db, "papr_mean",
                    report.mean(), 1, 0.0});
  };

  for (const auto& [n_tx, n_rx] : config.sizes) {
    const SystemConfigd model_cfg(n_tx, n_rx, config.l_tx, config.p_tx, 1.0);
    const TrainingSchedule<double> ls_schedule = design_ls_training(model_cfg);
    for (Scheme scheme : config.schemes) {
      switch (scheme) {
        case Scheme::milac_ls:
          emit(papr_report(ls_schedule.source_matrix(), "milac-ls"), n_tx,
               n_rx, 0.0);
          break;
        case Scheme::milac_mmse:
          // Identical constant source as milac-ls, so PAPR is 1 regardless
          // of the allocation; report it without re-deriving the schedule.
          emit(papr_report(ls_schedule.source_matrix(), "milac-mmse"), n_tx,
               n_rx, 0.0);
          break;
        case Scheme::digital_ls: {
          emit(papr_report(dft_training_matrix(model_cfg), "digital-ls"),
               n_tx, n_rx, 0.0);
          // Supplementary: identity training in a digital system (not used
          // by any scheme here; shows why digital LS avoids it).
          const ComplexMatrixXd x_id =
              std::sqrt(config.p_tx / static_cast<double>(n_tx)) *
              ComplexMatrixXd::Identity(n_tx, n_tx);
          emit(papr_report(x_id, "digital-ls-identity"), n_tx, n_rx, 0.0);
          break;
        }
        case Scheme::digital_mmse: {
          const ChannelModel<double> model =
              build_channel_model(model_cfg, config.eps_tx, config.eps_rx);
          for (double snr_db : config.snr_db) {
            const double sigma2 = sigma2_for(config.p_tx, snr_db);
            const SystemConfigd cfg(n_tx, n_rx, config.l_tx, config.p_tx,
                                    sigma2);
            const auto alloc = allocate_training_power(
                model.r_v, sigma2, config.p_tx, cfg.tau, n_rx);
            const auto schedule = design_mmse_training(model, alloc, cfg);
            emit(papr_report(schedule.training_matrix(), "digital-mmse"),
                 n_tx, n_rx, snr_db);
          }
          break;
        }
      }
    }
  }
  return rows;
}

}  // namespace milac::sim
