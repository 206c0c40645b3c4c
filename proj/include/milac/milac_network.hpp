// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).
//
// Mapping between admittance matrices and the linear maps they realize, in
// both directions: evaluation extracts the map from (Y/Y0 + I)^-1, synthesis
// produces an admittance matrix whose only nonzero block is -Y0 * map.

#pragma once

#include <cstdio>
#include <ostream>

#include "milac/types.hpp"

namespace milac {

enum class NetworkSide { transmit, receive };
enum class MapRole { precoder, combiner };

// Multiport admittance network with its port partition. Transmit side: the
// first block carries the l_tx RF-chain ports and the second the n_tx
// antenna ports. Receive side: first block n_rx antenna ports, second block
// l_rx RF-chain ports. External reporting uses 1-based port indices.
template <typename T>
struct MilacNetwork {
  ComplexMatrix<T> admittance;  // (first+second) square [S]
  NetworkSide side = NetworkSide::transmit;
  Index ports_first = 0;
  Index ports_second = 0;
  T ref_admittance = T(1) / T(50);

  Index dimension() const { return ports_first + ports_second; }
};

template <typename T>
struct LinearMap {
  ComplexMatrix<T> matrix;  // precoder: n_tx x l_tx; combiner: l_rx x n_rx
  MapRole role = MapRole::precoder;
};

namespace detail {

// Bottom-left block of (Y/Y0 + I)^-1, i.e. rows of the second port block
// against columns of the first. Solves against the leading identity columns
// instead of forming the whole inverse.
template <typename T>
ComplexMatrix<T> evaluate_port_map(const MilacNetwork<T>& net) {
  const Index first = net.ports_first;
  const Index second = net.ports_second;
  const Index dim = first + second;
  if (first < 1 || second < 1 || net.admittance.rows() != dim ||
      net.admittance.cols() != dim)
    throw std::invalid_argument(
        "MilacNetwork: admittance dimension does not match the port split");
  ComplexMatrix<T> m = net.admittance / net.ref_admittance;
  m += ComplexMatrix<T>::Identity(dim, dim);
  const auto lu = m.partialPivLu();
  if (detail::lu_is_singular(lu, T(1e-12)))
    throw SingularNetworkError(
        "MiLAC evaluation: (Y/Y0 + I) is numerically singular (rcond below "
        "1e-12)");
  const ComplexMatrix<T> rhs = ComplexMatrix<T>::Identity(dim, first);
  const ComplexMatrix<T> sol = lu.solve(rhs);
  return sol.bottomRows(second);
}

}  // namespace detail

template <typename T>
LinearMap<T> precoder_from_admittance(const MilacNetwork<T>& net,
                                      const SystemConfig<T>& config) {
  config.validate();
  if (net.side != NetworkSide::transmit)
    throw std::invalid_argument(
        "precoder_from_admittance: network is not transmit-side");
  if (net.ports_first != config.l_tx || net.ports_second != config.n_tx)
    throw std::invalid_argument(
        "precoder_from_admittance: port split must be (l_tx, n_tx)");
  return {detail::evaluate_port_map(net), MapRole::precoder};
}

template <typename T>
LinearMap<T> combiner_from_admittance(const MilacNetwork<T>& net,
                                      const SystemConfig<T>& config) {
  config.validate();
  if (net.side != NetworkSide::receive)
    throw std::invalid_argument(
        "combiner_from_admittance: network is not receive-side");
  if (net.ports_first != config.n_rx || net.ports_second != config.l_rx)
    throw std::invalid_argument(
        "combiner_from_admittance: port split must be (n_rx, l_rx)");
  return {detail::evaluate_port_map(net), MapRole::combiner};
}

namespace detail {

template <typename Derived>
auto synthesize_zero_block_network(const Eigen::MatrixBase<Derived>& map,
                                   detail::RealOf<Derived> y0, NetworkSide side)
    -> MilacNetwork<detail::RealOf<Derived>> {
  using T = detail::RealOf<Derived>;
  if (!map.allFinite())
    throw std::invalid_argument("admittance synthesis: map must be finite");
  if (!(y0 > T(0)))
    throw std::invalid_argument(
        "admittance synthesis: reference admittance must be > 0");
  MilacNetwork<T> net;
  net.side = side;
  net.ports_first = map.cols();
  net.ports_second = map.rows();
  net.ref_admittance = y0;
  const Index dim = net.dimension();
  net.admittance = ComplexMatrix<T>::Zero(dim, dim);
  net.admittance.bottomLeftCorner(map.rows(), map.cols()) =
      -y0 * map.template cast<Complex<T>>();
  return net;
}

}  // namespace detail

/// Admittance network realizing precoder `f` (n_tx x l_tx): the only nonzero
/// block is the bottom-left -y0 * f. Round-trips through
/// precoder_from_admittance exactly up to solver rounding.
template <typename Derived>
auto admittance_for_precoder(const Eigen::MatrixBase<Derived>& f,
                             detail::RealOf<Derived> y0)
    -> MilacNetwork<detail::RealOf<Derived>> {
  return detail::synthesize_zero_block_network(f, y0, NetworkSide::transmit);
}

/// Mirror case for a combiner `g` (l_rx x n_rx).
template <typename Derived>
auto admittance_for_combiner(const Eigen::MatrixBase<Derived>& g,
                             detail::RealOf<Derived> y0)
    -> MilacNetwork<detail::RealOf<Derived>> {
  return detail::synthesize_zero_block_network(g, y0, NetworkSide::receive);
}

namespace detail {

inline void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v + 0.0);  // normalize -0
  out += buf;
}

}  // namespace detail

/// CSV dump of the admittance matrix: header names 1-based port indices,
/// each complex entry is written as a re,im pair, rows in row-major order.
template <typename T>
void write_admittance_csv(const MilacNetwork<T>& net, std::ostream& out) {
  const Index dim = net.dimension();
  if (net.admittance.rows() != dim || net.admittance.cols() != dim)
    throw std::invalid_argument(
        "write_admittance_csv: admittance dimension does not match the port "
        "split");
  std::string line = "port";
  for (Index j = 0; j < dim; ++j) {
    line += ",y" + std::to_string(j + 1) + "_re,y" + std::to_string(j + 1) +
            "_im";
  }
  out << line << "\n";
  for (Index i = 0; i < dim; ++i) {
    line = std::to_string(i + 1);
    for (Index j = 0; j < dim; ++j) {
      line += ',';
      detail::append_g17(line, static_cast<double>(net.admittance(i, j).real()));
      line += ',';
      detail::append_g17(line, static_cast<double>(net.admittance(i, j).imag()));
    }
    out << line << "\n";
  }
}

}  // namespace milac
