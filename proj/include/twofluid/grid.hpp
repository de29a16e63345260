// Periodic grid over [0, 2*pi*L)^dim with integer wavevectors m/L.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace twofluid {

struct PeriodicGrid {
  int dim = 2;   // 2 or 3
  int n = 64;    // points per axis, even
  double L = 1;  // half-period scale

  PeriodicGrid() = default;
  PeriodicGrid(int dim_, int n_, double L_) : dim(dim_), n(n_), L(L_) {
    validate();
  }

  void validate() const {
    if (dim != 2 && dim != 3)
      throw std::invalid_argument("PeriodicGrid: dim must be 2 or 3");
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument("PeriodicGrid: n must be even and >= 4");
    if (!(L > 0)) throw std::invalid_argument("PeriodicGrid: L must be > 0");
  }

  std::size_t size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(n);
    return s;
  }

  double box_length() const { return 2.0 * M_PI * L; }
  double cell_volume() const {
    return std::pow(box_length() / n, dim);
  }
  double box_volume() const { return std::pow(box_length(), dim); }

  // Signed integer mode of axis index i in [0, n).
  int mode_of(int i) const { return (i <= n / 2) ? i : i - n; }

  double k_min_pos() const { return 1.0 / L; }
  double k_nyquist() const { return (n / 2) / L; }

  // Per-axis signed modes in FFT storage order.
  std::vector<int> axis_modes() const {
    std::vector<int> m(n);
    for (int i = 0; i < n; ++i) m[i] = mode_of(i);
    return m;
  }
};

// Visits every mode of a spectral array in flat (row-major, last axis
// fastest) order. The callback receives (flat_index, kx, ky, kz, m2) where
// m2 is the integer squared mode |m|^2 and k = m / L.
template <class F>
inline void for_each_mode(const PeriodicGrid& g, F&& f) {
  const double invL = 1.0 / g.L;
  const int n = g.n;
  if (g.dim == 2) {
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0) {
      const int m0 = g.mode_of(i0);
      for (int i1 = 0; i1 < n; ++i1, ++idx) {
        const int m1 = g.mode_of(i1);
        f(idx, m0 * invL, m1 * invL, 0.0,
          static_cast<long long>(m0) * m0 + static_cast<long long>(m1) * m1);
      }
    }
  } else {
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0) {
      const int m0 = g.mode_of(i0);
      for (int i1 = 0; i1 < n; ++i1) {
        const int m1 = g.mode_of(i1);
        for (int i2 = 0; i2 < n; ++i2, ++idx) {
          const int m2 = g.mode_of(i2);
          f(idx, m0 * invL, m1 * invL, m2 * invL,
            static_cast<long long>(m0) * m0 + static_cast<long long>(m1) * m1 +
                static_cast<long long>(m2) * m2);
        }
      }
    }
  }
}

}  // namespace twofluid
