// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles. These re-derive expected values through independent
// routes (dense matrices, scalar searches) and must stay decoupled from the
// library's computation paths.

#pragma once

#include <cmath>
#include <functional>

#include "milac/milac.hpp"

namespace milac::testing {

inline ComplexMatrixXd kron(const ComplexMatrixXd& a, const ComplexMatrixXd& b) {
  ComplexMatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexVectorXd vec(const ComplexMatrixXd& m) {
  return Eigen::Map<const ComplexVectorXd>(m.data(), m.size());
}

inline ComplexMatrixXd unvec(const ComplexVectorXd& v, Index rows, Index cols) {
  return Eigen::Map<const ComplexMatrixXd>(v.data(), rows, cols);
}

/// Dense MMSE estimate of the virtual channel: explicitly builds
/// W = X_v^T kron I and inverts the full system, A = R W^H (W R W^H + s2 I)^-1.
inline ComplexMatrixXd dense_mmse_oracle(const ComplexMatrixXd& y,
                                         const ChannelModel<double>& model,
                                         const PowerAllocation<double>& alloc,
                                         double sigma2) {
  const Index n_rx = model.n_rx();
  const Index tau = alloc.p.size();
  ComplexMatrixXd x_v = ComplexMatrixXd::Zero(tau, tau);
  for (Index t = 0; t < tau; ++t)
    x_v(t, t) = std::sqrt(alloc.p[t]);
  const ComplexMatrixXd w =
      kron(x_v.transpose(), ComplexMatrixXd::Identity(n_rx, n_rx));
  const ComplexMatrixXd r_v = model.r_v.cast<Complex<double>>().asDiagonal();
  const ComplexMatrixXd inner =
      w * r_v * w.adjoint() +
      sigma2 * ComplexMatrixXd::Identity(tau * n_rx, tau * n_rx);
  const ComplexMatrixXd a = r_v * w.adjoint() * inner.inverse();
  const ComplexVectorXd y_v = vec((model.u_rx.adjoint() * y).eval());
  return unvec(a * y_v, n_rx, tau);
}

inline double golden_section_min(const std::function<double(double)>& f,
                                 double lo, double hi, double tol = 1e-12) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  while (hi - lo > tol) {
    if (f(c) < f(d)) {
      hi = d;
      d = c;
      c = hi - gr * (hi - lo);
    } else {
      lo = c;
      c = d;
      d = lo + gr * (hi - lo);
    }
  }
  return (lo + hi) / 2.0;
}

/// Brute-force optimum of the two-direction allocation problem: scalar search
/// over p1 with p2 = p_total - p1 (the budget is active because the objective
/// is strictly decreasing in each power). Returns the attained objective.
inline double brute_force_two_direction(const RealVectorXd& r_v, Index n_rx,
                                        double sigma2, double p_total) {
  const auto objective = [&](double p1) {
    const double p2 = p_total - p1;
    double mse = 0.0;
    for (Index j = 0; j < n_rx; ++j) {
      const double r1 = r_v[j];
      const double r2 = r_v[n_rx + j];
      mse += sigma2 * r1 / (sigma2 + p1 * r1);
      mse += sigma2 * r2 / (sigma2 + p2 * r2);
    }
    return mse;
  };
  return objective(golden_section_min(objective, 0.0, p_total));
}

inline ComplexMatrixXd random_complex(Rng<double>& rng, Index rows, Index cols,
                                      double scale = 1.0) {
  ComplexMatrixXd m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
      m(r, c) = scale * Complex<double>(2 * rng.uniform() - 1,
                                        2 * rng.uniform() - 1);
  return m;
}

inline double max_abs_diff(const ComplexMatrixXd& a, const ComplexMatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace milac::testing
