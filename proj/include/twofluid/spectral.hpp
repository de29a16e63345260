// Spectral-space utilities: derivative multipliers, dealiasing, norms.
#pragma once

#include <complex>
#include <vector>

#include "twofluid/grid.hpp"

namespace twofluid {

using Complex = std::complex<double>;
using SpectralField = std::vector<Complex>;
using RealField = std::vector<double>;

// d/dx_axis as the multiplier i*k_axis. The Nyquist mode has no consistent
// sign for odd derivatives and is zeroed.
inline void derivative(const SpectralField& in, const PeriodicGrid& g, int axis,
                       SpectralField& out) {
  out.resize(in.size());
  const int nyq = g.n / 2;
  for_each_mode(g, [&](std::size_t idx, double kx, double ky, double kz,
                       long long) {
    const double k[3] = {kx, ky, kz};
    const double ka = k[axis];
    const bool at_nyq = std::abs(ka) * g.L >= nyq - 0.5;
    out[idx] = at_nyq ? Complex(0.0, 0.0) : Complex(0.0, ka) * in[idx];
  });
}

// Zeroes every mode with any axis index above fraction * n/2.
inline void dealias(SpectralField& spec, const PeriodicGrid& g,
                    double fraction) {
  const double cutoff = fraction * (g.n / 2);
  const double c2 = cutoff * cutoff * g.L * g.L;  // compare squared modes
  for_each_mode(g, [&](std::size_t idx, double kx, double ky, double kz,
                       long long) {
    if (kx * kx * g.L * g.L > c2 || ky * ky * g.L * g.L > c2 ||
        kz * kz * g.L * g.L > c2)
      spec[idx] = 0.0;
  });
}

// L2 norm over the box, by Parseval.
inline double l2_norm(const SpectralField& spec, const PeriodicGrid& g) {
  double s = 0.0;
  for (const auto& v : spec) s += std::norm(v);
  return std::sqrt(s * g.box_volume());
}

inline double l2_norm(const RealField& f, const PeriodicGrid& g) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s * g.cell_volume());
}

inline double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace twofluid
