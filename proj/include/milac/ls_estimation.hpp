// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).
//
// LS training design, slot-by-slot analog-path simulation, and the digital
// LS baseline with DFT training.

#pragma once

#include <numbers>
#include <vector>

#include "milac/channel_model.hpp"
#include "milac/metrics.hpp"
#include "milac/types.hpp"

namespace milac {

enum class SchemeTag { ls, mmse };

template <typename T>
struct TrainingSlot {
  ComplexMatrix<T> precoder;  // F_t, n_tx x l_tx
  ComplexMatrix<T> combiner;  // G_t, l_rx x n_rx
  ComplexVector<T> source;    // c_t, length l_tx
};

template <typename T>
struct TrainingSchedule {
  std::vector<TrainingSlot<T>> slots;
  SchemeTag scheme = SchemeTag::ls;

  Index tau() const { return static_cast<Index>(slots.size()); }

  /// Effective training matrix X with columns x_t = F_t c_t.
  ComplexMatrix<T> training_matrix() const {
    if (slots.empty())
      throw std::invalid_argument("TrainingSchedule: empty schedule");
    ComplexMatrix<T> x(slots.front().precoder.rows(), tau());
    for (Index t = 0; t < tau(); ++t)
      x.col(t) = slots[static_cast<std::size_t>(t)].precoder *
                 slots[static_cast<std::size_t>(t)].source;
    return x;
  }

  /// Source signals stacked as an l_tx x tau matrix (one row per RF chain).
  ComplexMatrix<T> source_matrix() const {
    if (slots.empty())
      throw std::invalid_argument("TrainingSchedule: empty schedule");
    ComplexMatrix<T> c(slots.front().source.size(), tau());
    for (Index t = 0; t < tau(); ++t)
      c.col(t) = slots[static_cast<std::size_t>(t)].source;
    return c;
  }
};

/// Constant-modulus source shared by every design: c_t = sqrt(p_tx/l_tx) * 1.
template <typename T>
ComplexVector<T> training_source(const SystemConfig<T>& config) {
  return ComplexVector<T>::Constant(
      config.l_tx, Complex<T>(std::sqrt(config.p_tx / T(config.l_tx)), T(0)));
}

// LS design: F_t = sqrt(1/(l_tx n_tx)) e_t 1^T steers the whole source power
// onto antenna t, and G_t = sqrt(n_tx/p_tx) I scales the received column so
// z_t is directly the t-th column of the LS estimate.
template <typename T>
TrainingSchedule<T> design_ls_training(const SystemConfig<T>& config) {
  config.validate();
  TrainingSchedule<T> schedule;
  schedule.scheme = SchemeTag::ls;
  const T precoder_gain = std::sqrt(T(1) / T(config.l_tx * config.n_tx));
  const ComplexMatrix<T> combiner =
      std::sqrt(T(config.n_tx) / config.p_tx) *
      ComplexMatrix<T>::Identity(config.l_rx, config.n_rx);
  const ComplexVector<T> source = training_source(config);
  schedule.slots.reserve(static_cast<std::size_t>(config.tau));
  for (Index t = 0; t < config.tau; ++t) {
    TrainingSlot<T> slot;
    slot.precoder = ComplexMatrix<T>::Zero(config.n_tx, config.l_tx);
    slot.precoder.row(t).setConstant(Complex<T>(precoder_gain, T(0)));
    slot.combiner = combiner;
    slot.source = source;
    schedule.slots.push_back(std::move(slot));
  }
  return schedule;
}

/// One slot of the analog path: z_t = G_t (H F_t c_t + n_t), computed as
/// slot-local products with no cross-slot state.
template <typename T, typename Derived>
ComplexVector<T> simulate_training_slot(const ChannelRealization<T>& chan,
                                        const TrainingSlot<T>& slot,
                                        const Eigen::MatrixBase<Derived>& noise) {
  if (slot.precoder.rows() != chan.h.cols() ||
      slot.precoder.cols() != slot.source.size())
    throw std::invalid_argument(
        "simulate_training_slot: precoder/source dimensions mismatch");
  if (slot.combiner.cols() != chan.h.rows() || noise.size() != chan.h.rows() ||
      noise.cols() != 1)
    throw std::invalid_argument(
        "simulate_training_slot: combiner/noise dimensions mismatch");
  const ComplexVector<T> x_t = slot.precoder * slot.source;
  const ComplexVector<T> y_t = chan.h * x_t + noise.derived();
  return slot.combiner * y_t;
}

// One coherence block of training. y = H x + n by construction; z collects
// the RF-chain outputs column by column as they arrive.
template <typename T>
struct TrainingBatch {
  ComplexMatrix<T> x;  // n_tx x tau
  ComplexMatrix<T> y;  // n_rx x tau
  ComplexMatrix<T> n;  // n_rx x tau
  ComplexMatrix<T> z;  // l_rx x tau
};

template <typename T>
TrainingBatch<T> simulate_training(const ChannelRealization<T>& chan,
                                   const TrainingSchedule<T>& schedule,
                                   const ComplexMatrix<T>& noise) {
  const Index tau = schedule.tau();
  if (tau < 1) throw std::invalid_argument("simulate_training: empty schedule");
  if (noise.rows() != chan.h.rows() || noise.cols() != tau)
    throw std::invalid_argument(
        "simulate_training: noise must be n_rx x tau");
  TrainingBatch<T> batch;
  batch.x.resize(chan.h.cols(), tau);
  batch.y.resize(chan.h.rows(), tau);
  batch.n = noise;
  batch.z.resize(schedule.slots.front().combiner.rows(), tau);
  for (Index t = 0; t < tau; ++t) {
    const auto& slot = schedule.slots[static_cast<std::size_t>(t)];
    batch.x.col(t) = slot.precoder * slot.source;
    batch.y.col(t) = chan.h * batch.x.col(t) + noise.col(t);
    batch.z.col(t) = slot.combiner * batch.y.col(t);
  }
  return batch;
}

/// MiLAC-aided LS estimate: the RF-chain outputs z_t are the estimate's
/// columns; no arithmetic touches them after the analog path, which is what
/// the (optional) counter certifies.
template <typename T>
ComplexMatrix<T> run_milac_ls(const ChannelRealization<T>& chan,
                              const TrainingSchedule<T>& schedule,
                              const ComplexMatrix<T>& noise,
                              OpCounter* counter = nullptr) {
  if (schedule.scheme != SchemeTag::ls)
    throw std::invalid_argument("run_milac_ls: schedule is not an LS design");
  (void)counter;  // zero online operations by construction
  return simulate_training(chan, schedule, noise).z;
}

/// Scaled DFT training matrix: X = sqrt(p_tx)/n_tx * DFT, which satisfies
/// X X^H = (p_tx/n_tx) I with constant-modulus (unit-PAPR) rows.
template <typename T>
ComplexMatrix<T> dft_training_matrix(const SystemConfig<T>& config) {
  config.validate();
  const Index n = config.n_tx;
  const T scale = std::sqrt(config.p_tx) / T(n);
  const T step = T(-2) * std::numbers::pi_v<T> / T(n);
  ComplexMatrix<T> x(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      x(i, j) = scale * std::polar(T(1), step * T((i * j) % n));
  return x;
}

/// Digital LS baseline: Y X^H (X X^H)^-1. The estimator factor is built
/// offline from the predetermined training matrix; the online cost is the
/// Y-by-estimator product.
template <typename DY, typename DX>
auto digital_ls_baseline(const Eigen::MatrixBase<DY>& y,
                         const Eigen::MatrixBase<DX>& x,
                         OpCounter* counter = nullptr)
    -> ComplexMatrix<detail::RealOf<DY>> {
  using T = detail::RealOf<DY>;
  const ComplexMatrix<T> ym = y.template cast<Complex<T>>();
  const ComplexMatrix<T> xm = x.template cast<Complex<T>>();
  const Index tau = ym.cols();
  const Index n_tx = xm.rows();
  if (xm.cols() != tau)
    throw std::invalid_argument(
        "digital_ls_baseline: training and received slot counts differ");
  const ComplexMatrix<T> gram = xm * xm.adjoint();
  const auto lu = gram.partialPivLu();
  if (detail::lu_is_singular(lu, T(1e-12)))
    throw std::invalid_argument(
        "digital_ls_baseline: training matrix is rank deficient");
  const ComplexMatrix<T> estimator = lu.solve(xm).adjoint();  // tau x n_tx
  if (counter) {
    counter->charge_matmul(CostPhase::offline, n_tx, tau, n_tx);  // X X^H
    counter->charge_matmul(CostPhase::offline, n_tx, n_tx, tau);  // solve
    counter->charge_matmul(CostPhase::online, ym.rows(), tau, n_tx);
  }
  return ym * estimator;
}

/// Sanity checks shared by both designs; throws on violation.
template <typename T>
void validate_schedule(const TrainingSchedule<T>& schedule,
                       const SystemConfig<T>& config) {
  config.validate();
  if (schedule.tau() != config.tau)
    throw std::invalid_argument("validate_schedule: wrong slot count");
  T precoder_energy = T(0);
  for (const auto& slot : schedule.slots) {
    if (slot.precoder.rows() != config.n_tx ||
        slot.precoder.cols() != config.l_tx ||
        slot.combiner.rows() != config.l_rx ||
        slot.combiner.cols() != config.n_rx ||
        slot.source.size() != config.l_tx)
      throw std::invalid_argument("validate_schedule: slot dimension mismatch");
    if (std::abs(slot.source.squaredNorm() - config.p_tx) > T(1e-12) * config.p_tx)
      throw std::invalid_argument(
          "validate_schedule: source norm must satisfy |c_t|^2 = p_tx");
    precoder_energy += slot.precoder.squaredNorm();
  }
  if (precoder_energy > T(1) + T(1e-12))
    throw std::invalid_argument(
        "validate_schedule: precoder energy exceeds the unit budget");
  const T x_energy = schedule.training_matrix().squaredNorm();
  if (x_energy > config.p_tx + T(1e-9))
    throw std::invalid_argument(
        "validate_schedule: training energy exceeds p_tx");
}

}  // namespace milac
