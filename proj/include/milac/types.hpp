// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).

#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace milac {

using Index = Eigen::Index;

template <typename T>
using Complex = std::complex<T>;
template <typename T>
using ComplexMatrix = Eigen::Matrix<Complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using ComplexVector = Eigen::Matrix<Complex<T>, Eigen::Dynamic, 1>;
template <typename T>
using RealMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using RealVector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using ComplexMatrixXd = ComplexMatrix<double>;
using ComplexVectorXd = ComplexVector<double>;
using RealMatrixXd = RealMatrix<double>;
using RealVectorXd = RealVector<double>;

namespace detail {

template <typename Derived>
using RealOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

// Eigen's rcond estimate can degenerate on exactly singular factors, so the
// U-diagonal pivot ratio is screened as well. NaN-safe.
template <typename Lu, typename T>
bool lu_is_singular(const Lu& lu, T threshold) {
  T min_pivot = std::numeric_limits<T>::max();
  T max_pivot = T(0);
  const auto& pivots = lu.matrixLU().diagonal();
  for (Index i = 0; i < pivots.size(); ++i) {
    const T mag = std::abs(pivots[i]);
    min_pivot = std::min(min_pivot, mag);
    max_pivot = std::max(max_pivot, mag);
  }
  if (!(min_pivot > max_pivot * threshold)) return true;
  return !(lu.rcond() >= threshold);
}

}  // namespace detail

/// (Y/Y0 + I) is numerically singular while evaluating a network.
class SingularNetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Static system parameters of one point-to-point link. The receive side is
// operated with one RF chain per antenna (l_rx = n_rx) and the training
// length is pinned to the number of transmit antennas (tau = n_tx).
template <typename T = double>
struct SystemConfig {
  Index n_tx = 1;  // transmit antennas
  Index n_rx = 1;  // receive antennas
  Index l_tx = 1;  // transmit RF chains, <= n_tx
  Index l_rx = 1;  // receive RF chains, = n_rx
  Index tau = 1;   // training slots, = n_tx

  T p_tx = T(1);                       // total transmit power [W]
  T noise_power = T(1);                // sigma^2 [W]
  T ref_admittance = T(1) / T(50);     // Y0 = 1/Z0 [S]

  SystemConfig() = default;
  SystemConfig(Index n_tx_, Index n_rx_, Index l_tx_, T p_tx_, T noise_power_,
               T ref_admittance_ = T(1) / T(50))
      : n_tx(n_tx_),
        n_rx(n_rx_),
        l_tx(l_tx_),
        l_rx(n_rx_),
        tau(n_tx_),
        p_tx(p_tx_),
        noise_power(noise_power_),
        ref_admittance(ref_admittance_) {
    validate();
  }

  void validate() const {
    if (n_tx < 1 || n_rx < 1 || l_tx < 1 || l_rx < 1 || tau < 1)
      throw std::invalid_argument(
          "SystemConfig: antenna, RF-chain and slot counts must be >= 1");
    if (l_tx > n_tx)
      throw std::invalid_argument("SystemConfig: l_tx must not exceed n_tx");
    if (l_rx != n_rx)
      throw std::invalid_argument(
          "SystemConfig: operated with l_rx = n_rx; got l_rx != n_rx");
    if (tau != n_tx)
      throw std::invalid_argument(
          "SystemConfig: training length is fixed to tau = n_tx");
    if (!(p_tx > T(0)))
      throw std::invalid_argument("SystemConfig: p_tx must be > 0");
    if (!(noise_power > T(0)))
      throw std::invalid_argument("SystemConfig: noise_power must be > 0");
    if (!(ref_admittance > T(0)))
      throw std::invalid_argument("SystemConfig: ref_admittance must be > 0");
  }

  T snr() const { return p_tx / noise_power; }
};

using SystemConfigd = SystemConfig<double>;

}  // namespace milac
