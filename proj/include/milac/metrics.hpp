// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).
//
// NMSE, PAPR and real-operation accounting.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "milac/types.hpp"

namespace milac {

enum class Scheme { milac_ls, digital_ls, milac_mmse, digital_mmse };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::milac_ls: return "milac-ls";
    case Scheme::digital_ls: return "digital-ls";
    case Scheme::milac_mmse: return "milac-mmse";
    case Scheme::digital_mmse: return "digital-mmse";
  }
  return "unknown";
}

inline Scheme parse_scheme(std::string_view label) {
  if (label == "milac-ls") return Scheme::milac_ls;
  if (label == "digital-ls") return Scheme::digital_ls;
  if (label == "milac-mmse") return Scheme::milac_mmse;
  if (label == "digital-mmse") return Scheme::digital_mmse;
  throw std::invalid_argument("unknown scheme label: " + std::string(label));
}

inline bool is_milac(Scheme s) {
  return s == Scheme::milac_ls || s == Scheme::milac_mmse;
}

enum class CostPhase { offline, online };

// Real-operation accounting: 2 real ops per complex addition/subtraction and
// 6 per complex multiplication. Matrix products are tallied twice, once with
// the approximate 8LMN convention and once with the exact per-entry count
// L*M*(6N + 2(N-1)).
struct OpCounter {
  struct Tally {
    std::int64_t convention = 0;
    std::int64_t exact = 0;
    std::int64_t complex_mul = 0;
    std::int64_t complex_add = 0;

    std::int64_t total_events() const { return complex_mul + complex_add; }
    Tally& operator+=(const Tally& o) {
      convention += o.convention;
      exact += o.exact;
      complex_mul += o.complex_mul;
      complex_add += o.complex_add;
      return *this;
    }
  };

  Tally offline;
  Tally online;

  Tally& phase(CostPhase p) { return p == CostPhase::online ? online : offline; }
  const Tally& phase(CostPhase p) const {
    return p == CostPhase::online ? online : offline;
  }

  /// Complex product of an m x n by an n x l matrix.
  void charge_matmul(CostPhase p, std::int64_t m, std::int64_t n,
                     std::int64_t l) {
    Tally& t = phase(p);
    t.convention += 8 * l * m * n;
    t.exact += l * m * (6 * n + 2 * (n - 1));
    t.complex_mul += l * m * n;
    t.complex_add += l * m * (n - 1);
  }

  void charge_complex_mul(CostPhase p, std::int64_t count) {
    Tally& t = phase(p);
    t.convention += 6 * count;
    t.exact += 6 * count;
    t.complex_mul += count;
  }

  void charge_complex_add(CostPhase p, std::int64_t count) {
    Tally& t = phase(p);
    t.convention += 2 * count;
    t.exact += 2 * count;
    t.complex_add += count;
  }

  /// Dense Hermitian eigendecomposition, order-n^3 ballpark. Informative
  /// only; never part of an online tally.
  void charge_dense_eig(CostPhase p, std::int64_t n) {
    Tally& t = phase(p);
    t.convention += 8 * n * n * n;
    t.exact += 8 * n * n * n;
  }

  OpCounter& operator+=(const OpCounter& o) {
    offline += o.offline;
    online += o.online;
    return *this;
  }
};

/// Online real-operation count per coherence block, using the 8LMN
/// convention: digital LS is dominated by Y X^H, digital MMSE by the per-slot
/// G_t y_t products, and the MiLAC schemes run with no online computation.
inline std::int64_t complexity_report(Index n_tx, Index n_rx, Index tau,
                                      Scheme scheme) {
  const auto t = static_cast<std::int64_t>(tau);
  const auto r = static_cast<std::int64_t>(n_rx);
  const auto x = static_cast<std::int64_t>(n_tx);
  switch (scheme) {
    case Scheme::digital_ls: return 8 * t * r * x;
    case Scheme::digital_mmse: return 8 * t * r * r;
    case Scheme::milac_ls:
    case Scheme::milac_mmse: return 0;
  }
  throw std::invalid_argument("complexity_report: unknown scheme");
}

/// Same counts with the exact complex-arithmetic convention.
inline std::int64_t complexity_report_exact(Index n_tx, Index n_rx, Index tau,
                                            Scheme scheme) {
  const auto t = static_cast<std::int64_t>(tau);
  const auto r = static_cast<std::int64_t>(n_rx);
  const auto x = static_cast<std::int64_t>(n_tx);
  switch (scheme) {
    case Scheme::digital_ls: return x * r * (6 * t + 2 * (t - 1));
    case Scheme::digital_mmse: return t * r * (6 * r + 2 * (r - 1));
    case Scheme::milac_ls:
    case Scheme::milac_mmse: return 0;
  }
  throw std::invalid_argument("complexity_report_exact: unknown scheme");
}

template <typename T>
std::int64_t complexity_report(const SystemConfig<T>& config, Scheme scheme) {
  config.validate();
  return complexity_report(config.n_tx, config.n_rx, config.tau, scheme);
}

template <typename DA, typename DB>
auto squared_error(const Eigen::MatrixBase<DA>& a,
                   const Eigen::MatrixBase<DB>& b) -> detail::RealOf<DA> {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("squared_error: shape mismatch");
  return (a.derived() - b.derived()).squaredNorm();
}

// NMSE over a trial set as a ratio of Monte Carlo means (mean error energy
// over mean reference energy). Keeps running first and second moments plus
// the cross moment so the standard error of the ratio is available via the
// delta method; merge() combines partial accumulations.
template <typename T = double>
class NmseAccumulator {
 public:
  void add(T error_energy, T reference_energy) {
    n_ += 1;
    const T nf = static_cast<T>(n_);
    const T dx = error_energy - mean_x_;
    const T dy = reference_energy - mean_y_;
    mean_x_ += dx / nf;
    mean_y_ += dy / nf;
    m2x_ += dx * (error_energy - mean_x_);
    m2y_ += dy * (reference_energy - mean_y_);
    cxy_ += dx * (reference_energy - mean_y_);
  }

  template <typename DA, typename DB>
  void add(const Eigen::MatrixBase<DA>& h_true,
           const Eigen::MatrixBase<DB>& h_est) {
    add(squared_error(h_true, h_est), h_true.squaredNorm());
  }

  void merge(const NmseAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const T na = static_cast<T>(n_);
    const T nb = static_cast<T>(o.n_);
    const T nab = na + nb;
    const T dx = o.mean_x_ - mean_x_;
    const T dy = o.mean_y_ - mean_y_;
    m2x_ += o.m2x_ + dx * dx * na * nb / nab;
    m2y_ += o.m2y_ + dy * dy * na * nb / nab;
    cxy_ += o.cxy_ + dx * dy * na * nb / nab;
    mean_x_ += dx * nb / nab;
    mean_y_ += dy * nb / nab;
    n_ += o.n_;
  }

  std::int64_t count() const { return n_; }
  T mean_error_energy() const { return mean_x_; }
  T mean_reference_energy() const { return mean_y_; }

  T value() const {
    if (n_ == 0 || !(mean_y_ > T(0)))
      throw std::domain_error("NmseAccumulator: degenerate trial set");
    return mean_x_ / mean_y_;
  }

  T standard_error() const {
    if (n_ < 2) return T(0);
    const T nf = static_cast<T>(n_);
    const T var_x = m2x_ / (nf - 1);
    const T var_y = m2y_ / (nf - 1);
    const T cov = cxy_ / (nf - 1);
    const T r = value();
    const T v = (var_x - 2 * r * cov + r * r * var_y) / (nf * mean_y_ * mean_y_);
    return std::sqrt(std::max(v, T(0)));
  }

 private:
  std::int64_t n_ = 0;
  T mean_x_ = T(0), mean_y_ = T(0);
  T m2x_ = T(0), m2y_ = T(0), cxy_ = T(0);
};

// Per-chain peak-to-average power ratio over the training slots. All-zero
// chains have no defined PAPR; they are excluded and counted as warnings.
template <typename T>
struct PaprReport {
  RealVector<T> papr;          // one entry per reported chain
  std::vector<Index> chains;   // source row of each entry
  Index zero_chains = 0;
  std::string scheme;

  T max() const {
    if (papr.size() == 0)
      throw std::domain_error("PaprReport: no nonzero chains");
    return papr.maxCoeff();
  }
  T mean() const {
    if (papr.size() == 0)
      throw std::domain_error("PaprReport: no nonzero chains");
    return papr.mean();
  }
};

/// PAPR of each row of `signals` (chains x slots).
template <typename Derived>
auto papr_report(const Eigen::MatrixBase<Derived>& signals, std::string scheme)
    -> PaprReport<detail::RealOf<Derived>> {
  using T = detail::RealOf<Derived>;
  if (signals.cols() < 1)
    throw std::invalid_argument("papr_report: need at least one slot");
  const RealMatrix<T> power = signals.cwiseAbs2();
  PaprReport<T> report;
  report.scheme = std::move(scheme);
  std::vector<T> values;
  for (Index i = 0; i < power.rows(); ++i) {
    const T peak = power.row(i).maxCoeff();
    if (peak == T(0)) {
      ++report.zero_chains;
      continue;
    }
    values.push_back(peak / power.row(i).mean());
    report.chains.push_back(i);
  }
  if (!values.empty())
    report.papr = Eigen::Map<const RealVector<T>>(
        values.data(), static_cast<Index>(values.size()));
  return report;
}

}  // namespace milac
