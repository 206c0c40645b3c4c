// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "milac/types.hpp"

namespace milac {

// splitmix64 finalizer, used to derive independent substream seeds from a
// base seed without correlated low bits.
inline std::uint64_t split_mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return split_mix64(base ^ split_mix64(stream));
}

// mt19937_64 with Box-Muller transforms. Uniform variates are built from the
// raw 64-bit output so the stream is identical across standard-library
// implementations; complex Gaussians are drawn as two independent real
// Gaussians with variance/2 each.
template <typename T = double>
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  T uniform() { return static_cast<T>((gen_() >> 11) * 0x1.0p-53); }

  /// One draw of CN(0, variance).
  Complex<T> complex_gaussian(T variance) {
    const T u1 = static_cast<T>(((gen_() >> 11) + 1) * 0x1.0p-53);  // (0, 1]
    const T u2 = uniform();
    const T mag = std::sqrt(-variance * std::log(u1));
    const T ang = T(2) * std::numbers::pi_v<T> * u2;
    return Complex<T>(mag * std::cos(ang), mag * std::sin(ang));
  }

  /// Matrix of i.i.d. CN(0, variance) entries, filled column-major so that
  /// draws line up with the column-major vectorization order.
  ComplexMatrix<T> complex_gaussian_matrix(Index rows, Index cols, T variance) {
    ComplexMatrix<T> m(rows, cols);
    for (Index c = 0; c < cols; ++c)
      for (Index r = 0; r < rows; ++r) m(r, c) = complex_gaussian(variance);
    return m;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace milac
