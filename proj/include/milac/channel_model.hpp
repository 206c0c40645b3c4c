// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).
//
// Correlated MIMO channel statistics (exponential model, Kronecker
// eigen-structure) and channel sampling.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "milac/rng.hpp"
#include "milac/types.hpp"

namespace milac {

/// Exponential correlation matrix: entry (i, j) = eps^|i-j|.
template <typename T>
ComplexMatrix<T> exponential_correlation(Index n, T eps) {
  if (n < 1)
    throw std::invalid_argument("exponential_correlation: n must be >= 1");
  if (!(eps >= T(0) && eps < T(1)))
    throw std::invalid_argument(
        "exponential_correlation: eps must lie in [0, 1)");
  RealVector<T> pow_table(n);
  pow_table[0] = T(1);
  for (Index k = 1; k < n; ++k) pow_table[k] = pow_table[k - 1] * eps;
  ComplexMatrix<T> r(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      r(i, j) = Complex<T>(pow_table[std::abs(i - j)], T(0));
  return r;
}

template <typename T>
struct EigenSystem {
  ComplexMatrix<T> vectors;  // unitary; columns are eigenvectors
  RealVector<T> values;      // descending, clamped to >= 0
};

namespace detail {

// First index of maximal magnitude; explicit loop so ties resolve to the
// lowest index on every platform.
template <typename T>
Index argmax_abs(const ComplexVector<T>& v) {
  Index best = 0;
  T best_mag = std::abs(v[0]);
  for (Index i = 1; i < v.size(); ++i) {
    const T mag = std::abs(v[i]);
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  return best;
}

// Rotate each column so its largest-magnitude entry is real positive.
template <typename T>
void fix_eigenvector_phases(ComplexMatrix<T>& u) {
  for (Index j = 0; j < u.cols(); ++j) {
    ComplexVector<T> col = u.col(j);
    const Complex<T> pivot = col[argmax_abs<T>(col)];
    const T mag = std::abs(pivot);
    if (mag > T(0)) u.col(j) *= std::conj(pivot) / mag;
  }
}

template <typename T>
void clamp_spectrum(RealVector<T>& values) {
  const T tol = Eigen::NumTraits<T>::dummy_precision();  // 1e-12 for double
  for (Index i = 0; i < values.size(); ++i) {
    if (values[i] < -tol)
      throw std::domain_error(
          "eigendecompose_correlation: matrix is not positive semidefinite");
    values[i] = std::max(values[i], T(0));
  }
}

}  // namespace detail

// Unitary eigendecomposition of a Hermitian PSD correlation matrix with a
// deterministic ordering: eigenvalues descending, diagonal inputs keep the
// canonical axes, and each eigenvector's largest entry is made real positive.
template <typename Derived>
auto eigendecompose_correlation(const Eigen::MatrixBase<Derived>& r_in)
    -> EigenSystem<detail::RealOf<Derived>> {
  using T = detail::RealOf<Derived>;
  const ComplexMatrix<T> r = r_in.template cast<Complex<T>>();
  const Index n = r.rows();
  if (n < 1 || r.cols() != n)
    throw std::invalid_argument(
        "eigendecompose_correlation: input must be square and nonempty");
  if ((r - r.adjoint()).cwiseAbs().maxCoeff() > T(1e-9))
    throw std::invalid_argument(
        "eigendecompose_correlation: input is not Hermitian (asymmetry beyond "
        "1e-9)");

  EigenSystem<T> sys;
  ComplexMatrix<T> off_diag = r;
  off_diag.diagonal().setZero();
  if (off_diag.cwiseAbs().maxCoeff() == T(0)) {
    // Already diagonal: sort the diagonal, keep canonical basis vectors.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index(0));
    RealVector<T> diag = r.diagonal().real();
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return diag[a] > diag[b]; });
    sys.values.resize(n);
    sys.vectors = ComplexMatrix<T>::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
      sys.values[j] = diag[order[static_cast<std::size_t>(j)]];
      sys.vectors(order[static_cast<std::size_t>(j)], j) = Complex<T>(1, 0);
    }
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<T>> solver(r);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("eigendecompose_correlation: solver failed");
    sys.values = solver.eigenvalues().reverse();
    sys.vectors = solver.eigenvectors().rowwise().reverse();
  }
  detail::clamp_spectrum(sys.values);
  detail::fix_eigenvector_phases(sys.vectors);
  return sys;
}

// Second-order channel statistics. r_v holds the per-entry variances of the
// virtual channel, ordered column-major over (receive, transmit) so that
// r_v[t*n_rx + j] = lambda_tx[t] * lambda_rx[j]. Immutable after
// construction and safe to share across workers.
template <typename T>
struct ChannelModel {
  ComplexMatrix<T> r_tx, r_rx;          // correlation matrices
  ComplexMatrix<T> u_tx, u_rx;          // eigenvector bases
  RealVector<T> lambda_tx, lambda_rx;   // eigenvalues, descending
  RealVector<T> r_v;                    // diag(Lambda_T kron Lambda_R)
  T eps_tx = T(0), eps_rx = T(0);

  Index n_tx() const { return r_tx.rows(); }
  Index n_rx() const { return r_rx.rows(); }
};

template <typename T>
ChannelModel<T> build_channel_model(const SystemConfig<T>& config, T eps_tx,
                                    T eps_rx) {
  config.validate();
  ChannelModel<T> model;
  model.eps_tx = eps_tx;
  model.eps_rx = eps_rx;
  model.r_tx = exponential_correlation<T>(config.n_tx, eps_tx);
  model.r_rx = exponential_correlation<T>(config.n_rx, eps_rx);
  auto sys_tx = eigendecompose_correlation(model.r_tx);
  auto sys_rx = eigendecompose_correlation(model.r_rx);
  model.u_tx = std::move(sys_tx.vectors);
  model.u_rx = std::move(sys_rx.vectors);
  model.lambda_tx = std::move(sys_tx.values);
  model.lambda_rx = std::move(sys_rx.values);
  model.r_v.resize(config.n_tx * config.n_rx);
  for (Index t = 0; t < config.n_tx; ++t)
    for (Index j = 0; j < config.n_rx; ++j)
      model.r_v[t * config.n_rx + j] = model.lambda_tx[t] * model.lambda_rx[j];
  if (!(model.r_v.minCoeff() > T(0)))
    throw std::domain_error(
        "build_channel_model: virtual-channel correlation must be full rank");
  return model;
}

template <typename T>
struct ChannelRealization {
  ComplexMatrix<T> h;    // physical channel, n_rx x n_tx
  ComplexMatrix<T> h_v;  // virtual (eigen-domain) channel
  std::uint64_t seed = 0;
};

/// Deterministic draw: h_v entries are independent CN(0, r_v[k]) filled
/// column-major, and h = u_rx * h_v * u_tx^H.
template <typename T>
ChannelRealization<T> sample_channel(const ChannelModel<T>& model,
                                     std::uint64_t seed) {
  const Index n_tx = model.n_tx();
  const Index n_rx = model.n_rx();
  Rng<T> rng(seed);
  ChannelRealization<T> real;
  real.seed = seed;
  real.h_v.resize(n_rx, n_tx);
  for (Index t = 0; t < n_tx; ++t)
    for (Index j = 0; j < n_rx; ++j)
      real.h_v(j, t) = rng.complex_gaussian(model.r_v[t * n_rx + j]);
  real.h = model.u_rx * real.h_v * model.u_tx.adjoint();
  return real;
}

}  // namespace milac
