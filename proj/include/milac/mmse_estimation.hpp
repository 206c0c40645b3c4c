// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).
//
// MMSE training design on the virtual channel: two-layer water-filling power
// allocation, the diagonal estimator, the analog estimation path and its
// digital baseline.

#pragma once

#include <algorithm>
#include <vector>

#include "milac/channel_model.hpp"
#include "milac/ls_estimation.hpp"
#include "milac/metrics.hpp"
#include "milac/types.hpp"

namespace milac {

template <typename T>
struct PowerAllocation {
  RealVector<T> p;                // per-eigen-direction training power [W]
  T multiplier = T(0);            // KKT multiplier mu
  std::vector<Index> active_set;  // indices with p_t > 0
  T objective = T(0);             // attained MMSE objective
};

namespace detail {

// Magnitude of the slot-t objective derivative, strictly decreasing in p:
// sum_j sigma^2 r_k^2 / (sigma^2 + p r_k)^2 with k = t*n_rx + j.
template <typename T>
T waterfill_slope(const RealVector<T>& r_v, Index n_rx, Index t, T sigma2,
                  T p) {
  T s = T(0);
  for (Index j = 0; j < n_rx; ++j) {
    const T r = r_v[t * n_rx + j];
    const T d = sigma2 + p * r;
    s += sigma2 * r * r / (d * d);
  }
  return s;
}

}  // namespace detail

/// Objective value sum_k sigma^2 r_k / (sigma^2 + p_t r_k); with p = 0 this
/// is the prior variance sum_k r_k.
template <typename T>
T theoretical_mmse(const RealVector<T>& r_v, const PowerAllocation<T>& alloc,
                   T sigma2) {
  const Index tau = alloc.p.size();
  if (tau < 1 || r_v.size() % tau != 0)
    throw std::invalid_argument("theoretical_mmse: size mismatch");
  const Index n_rx = r_v.size() / tau;
  T mse = T(0);
  for (Index t = 0; t < tau; ++t)
    for (Index j = 0; j < n_rx; ++j) {
      const T r = r_v[t * n_rx + j];
      mse += sigma2 * r / (sigma2 + alloc.p[t] * r);
    }
  return mse;
}

// Two-layer water-filling: an outer bisection on the multiplier mu and, per
// slot, an inner bisection for the p_t solving slope(t, p_t) = mu. The outer
// layer stops when |sum p_t - p_total| < 1e-9 p_total, the inner one at 1e-12
// absolute in p_t; both are capped at 200 iterations. The result is
// certified a posteriori by verify_kkt.
template <typename T>
PowerAllocation<T> allocate_training_power(const RealVector<T>& r_v, T sigma2,
                                           T p_total, Index tau, Index n_rx) {
  if (tau < 1 || n_rx < 1 || r_v.size() != tau * n_rx)
    throw std::invalid_argument(
        "allocate_training_power: r_v must have tau*n_rx entries");
  if (!(sigma2 > T(0)) || !(p_total > T(0)))
    throw std::invalid_argument(
        "allocate_training_power: sigma2 and p_total must be > 0");
  if (!(r_v.minCoeff() > T(0)))
    throw std::invalid_argument(
        "allocate_training_power: r_v entries must be positive (full rank)");

  constexpr int kMaxIter = 200;
  const T budget_tol = T(1e-9) * p_total;
  const T p_tol = T(1e-12);

  const auto slope = [&](Index t, T p) {
    return detail::waterfill_slope(r_v, n_rx, t, sigma2, p);
  };

  const auto solve_slot = [&](Index t, T mu) -> T {
    if (slope(t, T(0)) <= mu) return T(0);
    T hi = p_total;
    int grow = 0;
    while (slope(t, hi) > mu) {
      hi *= T(2);
      if (++grow > kMaxIter)
        throw ConvergenceError(
            "allocate_training_power: slot bracket expansion failed");
    }
    T lo = T(0);
    int iter = 0;
    while (hi - lo > p_tol) {
      const T mid = (lo + hi) / T(2);
      (slope(t, mid) > mu ? lo : hi) = mid;
      if (++iter > kMaxIter)
        throw ConvergenceError(
            "allocate_training_power: slot bisection did not converge");
    }
    return (lo + hi) / T(2);
  };

  T mu_hi = T(0);
  T mu_lo = std::numeric_limits<T>::max();
  for (Index t = 0; t < tau; ++t) {
    mu_hi = std::max(mu_hi, slope(t, T(0)));
    mu_lo = std::min(mu_lo, slope(t, p_total));
  }

  RealVector<T> p = RealVector<T>::Zero(tau);
  T mu = mu_hi;
  bool converged = false;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    mu = (mu_lo + mu_hi) / T(2);
    T total = T(0);
    for (Index t = 0; t < tau; ++t) {
      p[t] = solve_slot(t, mu);
      total += p[t];
    }
    if (std::abs(total - p_total) < budget_tol) {
      converged = true;
      if (total > p_total) p *= p_total / total;  // never exceed the budget
      break;
    }
    (total > p_total ? mu_lo : mu_hi) = mu;
  }
  if (!converged)
    throw ConvergenceError(
        "allocate_training_power: multiplier bisection did not converge");

  PowerAllocation<T> alloc;
  alloc.p = std::move(p);
  alloc.multiplier = mu;
  for (Index t = 0; t < tau; ++t)
    if (alloc.p[t] > T(0)) alloc.active_set.push_back(t);
  alloc.objective = theoretical_mmse(r_v, alloc, sigma2);
  return alloc;
}

template <typename T>
struct KktReport {
  T max_stationarity_residual = T(0);   // relative, over the active set
  T max_complementarity_excess = T(0);  // relative, over the inactive set
  T budget_excess = T(0);
  bool nonnegative = true;
  bool pass = false;
};

/// A-posteriori certificate for an allocation: stationarity on the active
/// set, complementarity on the inactive set, budget and sign feasibility.
template <typename T>
KktReport<T> verify_kkt(const PowerAllocation<T>& alloc,
                        const RealVector<T>& r_v, T sigma2, T p_total,
                        Index n_rx, T rel_tol = T(1e-6)) {
  const Index tau = alloc.p.size();
  if (r_v.size() != tau * n_rx)
    throw std::invalid_argument("verify_kkt: size mismatch");
  KktReport<T> report;
  const T mu = alloc.multiplier;
  for (Index t = 0; t < tau; ++t) {
    const T g = detail::waterfill_slope(r_v, n_rx, t, sigma2, alloc.p[t]);
    if (alloc.p[t] > T(0)) {
      report.max_stationarity_residual =
          std::max(report.max_stationarity_residual, std::abs(g - mu) / mu);
    } else {
      report.max_complementarity_excess =
          std::max(report.max_complementarity_excess, (g - mu) / mu);
    }
    if (alloc.p[t] < T(0)) report.nonnegative = false;
  }
  report.budget_excess = alloc.p.sum() - p_total;
  report.pass = report.nonnegative &&
                report.max_stationarity_residual <= rel_tol &&
                report.max_complementarity_excess <= rel_tol &&
                report.budget_excess <= T(1e-9) * p_total;
  return report;
}

// Diagonal MMSE estimator in the virtual domain. Entry k (column-major over
// (receive j, slot t)) is sqrt(p_t) r_k / (sigma^2 + p_t r_k); slot t owns
// the contiguous block A_t = diag(a_diag[t*n_rx .. t*n_rx + n_rx - 1]).
template <typename T>
struct MmseEstimatorDiagonal {
  RealVector<T> a_diag;
  Index n_rx = 0;

  auto slot_block(Index t) const { return a_diag.segment(t * n_rx, n_rx); }
  Index tau() const { return n_rx > 0 ? a_diag.size() / n_rx : 0; }
};

template <typename T>
MmseEstimatorDiagonal<T> mmse_estimator_diagonal(const RealVector<T>& r_v,
                                                 const PowerAllocation<T>& alloc,
                                                 T sigma2, Index n_rx) {
  const Index tau = alloc.p.size();
  if (r_v.size() != tau * n_rx)
    throw std::invalid_argument("mmse_estimator_diagonal: size mismatch");
  MmseEstimatorDiagonal<T> est;
  est.n_rx = n_rx;
  est.a_diag.resize(r_v.size());
  for (Index t = 0; t < tau; ++t) {
    const T root_p = std::sqrt(alloc.p[t]);
    for (Index j = 0; j < n_rx; ++j) {
      const T r = r_v[t * n_rx + j];
      est.a_diag[t * n_rx + j] = root_p * r / (sigma2 + alloc.p[t] * r);
    }
  }
  return est;
}

namespace detail {

// G_t = A_t U_R^H; shared by the schedule design and the digital baseline so
// both paths apply bit-identical combiners.
template <typename T>
ComplexMatrix<T> mmse_combiner(const ChannelModel<T>& model,
                               const MmseEstimatorDiagonal<T>& est, Index t) {
  return est.slot_block(t).template cast<Complex<T>>().asDiagonal() *
         model.u_rx.adjoint();
}

}  // namespace detail

/// MMSE design: x_t = sqrt(p_t) u_t via F_t = sqrt(p_t/(l_tx p_tx)) u_t 1^T,
/// and G_t = A_t U_R^H so z_t is directly the t-th column of the virtual
/// MMSE estimate. Slots with p_t = 0 transmit nothing and estimate the prior
/// mean (zero).
template <typename T>
TrainingSchedule<T> design_mmse_training(const ChannelModel<T>& model,
                                         const PowerAllocation<T>& alloc,
                                         const SystemConfig<T>& config,
                                         OpCounter* counter = nullptr) {
  config.validate();
  if (model.n_tx() != config.n_tx || model.n_rx() != config.n_rx ||
      alloc.p.size() != config.tau)
    throw std::invalid_argument(
        "design_mmse_training: model/allocation/config dimensions mismatch");
  const MmseEstimatorDiagonal<T> est = mmse_estimator_diagonal(
      model.r_v, alloc, config.noise_power, config.n_rx);

  TrainingSchedule<T> schedule;
  schedule.scheme = SchemeTag::mmse;
  const ComplexVector<T> source = training_source(config);
  schedule.slots.reserve(static_cast<std::size_t>(config.tau));
  for (Index t = 0; t < config.tau; ++t) {
    TrainingSlot<T> slot;
    const T gain = std::sqrt(alloc.p[t] / (T(config.l_tx) * config.p_tx));
    slot.precoder = gain * model.u_tx.col(t) *
                    Eigen::Matrix<Complex<T>, 1, Eigen::Dynamic>::Ones(
                        config.l_tx);
    slot.combiner = detail::mmse_combiner(model, est, t);
    slot.source = source;
    schedule.slots.push_back(std::move(slot));
    if (counter) {
      counter->charge_complex_mul(CostPhase::offline,
                                  config.n_tx * config.l_tx);  // F_t build
      counter->charge_complex_mul(CostPhase::offline,
                                  config.n_rx * config.n_rx);  // G_t build
    }
  }
  return schedule;
}

template <typename T>
struct MmseEstimate {
  ComplexMatrix<T> h_v;  // virtual-domain estimate, read off the RF chains
  ComplexMatrix<T> h;    // physical-domain view, U_R h_v U_T^H
};

/// MiLAC-aided MMSE: column t of the virtual estimate is exactly z_t from
/// the slot simulation. The physical-domain rotation is a reporting
/// convenience computed outside the online path (NMSE is identical in either
/// domain).
template <typename T>
MmseEstimate<T> run_milac_mmse(const ChannelRealization<T>& chan,
                               const ChannelModel<T>& model,
                               const TrainingSchedule<T>& schedule,
                               const ComplexMatrix<T>& noise,
                               OpCounter* counter = nullptr) {
  if (schedule.scheme != SchemeTag::mmse)
    throw std::invalid_argument(
        "run_milac_mmse: schedule is not an MMSE design");
  (void)counter;  // zero online operations by construction
  MmseEstimate<T> est;
  est.h_v = simulate_training(chan, schedule, noise).z;
  est.h = model.u_rx * est.h_v * model.u_tx.adjoint();
  return est;
}

/// Digital MMSE baseline: applies the precomputed combiners G_t = A_t U_R^H
/// to the received columns, the per-slot matrix-vector products the digital
/// receiver must execute online (about 8 tau n_rx^2 real operations).
template <typename DY, typename T>
ComplexMatrix<T> digital_mmse_baseline(const Eigen::MatrixBase<DY>& y,
                                       const ChannelModel<T>& model,
                                       const PowerAllocation<T>& alloc,
                                       const SystemConfig<T>& config,
                                       OpCounter* counter = nullptr) {
  config.validate();
  const ComplexMatrix<T> ym = y.template cast<Complex<T>>();
  if (ym.rows() != config.n_rx || ym.cols() != config.tau ||
      model.n_rx() != config.n_rx || alloc.p.size() != config.tau)
    throw std::invalid_argument(
        "digital_mmse_baseline: dimensions mismatch");
  const MmseEstimatorDiagonal<T> est = mmse_estimator_diagonal(
      model.r_v, alloc, config.noise_power, config.n_rx);
  ComplexMatrix<T> h_v_est(config.n_rx, config.tau);
  for (Index t = 0; t < config.tau; ++t) {
    const ComplexMatrix<T> g = detail::mmse_combiner(model, est, t);
    if (counter) {
      counter->charge_complex_mul(CostPhase::offline,
                                  config.n_rx * config.n_rx);  // G_t build
      counter->charge_matmul(CostPhase::online, config.n_rx, config.n_rx, 1);
    }
    h_v_est.col(t) = g * ym.col(t);
  }
  return h_v_est;
}

}  // namespace milac
