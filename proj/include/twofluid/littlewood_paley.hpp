// Discrete Littlewood-Paley analysis on the periodic grid.
//
// The dyadic shells are built from a smooth radial cutoff chi with
// chi = 1 for r <= 3/4 and chi = 0 for r >= 1, so that
// phi(r) = chi(r/2) - chi(r) is supported in the annulus 3/4 <= r <= 2 and
// sum_q phi(2^-q r) telescopes exactly to 1 for every r > 0 covered by the
// shell range. Homogeneous norms ignore the zero mode; the mean is tracked
// separately.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "twofluid/grid.hpp"
#include "twofluid/spectral.hpp"

namespace twofluid {
namespace lp {

inline double ramp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Smooth step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
  const double a = ramp(t);
  const double b = ramp(1.0 - t);
  return a / (a + b);
}

inline double chi(double r) { return 1.0 - smooth_step((r - 0.75) * 4.0); }

inline double phi(double r) { return chi(0.5 * r) - chi(r); }

// Outer radius of the support of phi.
inline constexpr double kShellOuter = 2.0;
// Inner radius of the support of phi.
inline constexpr double kShellInner = 0.75;

}  // namespace lp

struct DyadicPartition {
  int q_min = 0;       // covering range: partition of unity holds on all
  int q_max = 0;       // nonzero grid modes for q in [q_min, q_max]
  int interior_lo = 0; // shells whose neighbours fit well inside the grid
  int interior_hi = -1;
  int j0 = 0;          // default low/high threshold shell
  double k_min_pos = 0.0;
  double k_nyquist = 0.0;

  int shells() const { return q_max - q_min + 1; }
  int interior_count() const { return std::max(0, interior_hi - interior_lo + 1); }
  bool in_range(int q) const { return q >= q_min && q <= q_max; }
};

inline DyadicPartition build_partition(const PeriodicGrid& g) {
  g.validate();
  DyadicPartition p;
  p.k_min_pos = g.k_min_pos();
  p.k_nyquist = g.k_nyquist();
  const double k_corner = std::sqrt(static_cast<double>(g.dim)) * p.k_nyquist;

  // Full shells fit their annulus inside the resolved band.
  int full = 0;
  for (int q = -80; q <= 80; ++q) {
    const double lo = lp::kShellInner * std::ldexp(1.0, q);
    const double hi = lp::kShellOuter * std::ldexp(1.0, q);
    if (lo >= p.k_min_pos && hi <= p.k_nyquist) ++full;
  }
  if (full < 3)
    throw std::invalid_argument(
        "build_partition: grid resolves fewer than 3 full dyadic shells");

  p.q_min = static_cast<int>(std::floor(std::log2(p.k_min_pos)));
  while (std::ldexp(1.0, p.q_min) > p.k_min_pos) --p.q_min;
  p.q_max = static_cast<int>(std::ceil(std::log2(k_corner * 2.0 / 3.0)));
  while (std::ldexp(1.0, -(p.q_max + 1)) * k_corner > 0.75) ++p.q_max;

  p.interior_lo = p.q_max + 1;
  p.interior_hi = p.q_min - 1;
  for (int q = p.q_min; q <= p.q_max; ++q) {
    const bool low_ok =
        lp::kShellInner * std::ldexp(1.0, q - 1) >= p.k_min_pos;
    const bool high_ok =
        lp::kShellOuter * std::ldexp(1.0, q + 1) <= (2.0 / 3.0) * p.k_nyquist;
    if (low_ok && high_ok) {
      p.interior_lo = std::min(p.interior_lo, q);
      p.interior_hi = std::max(p.interior_hi, q);
    }
  }
  p.j0 = (p.interior_count() >= 4) ? p.interior_hi
                                   : (p.q_min + p.q_max) / 2;
  return p;
}

// Per-shell L2 amplitudes of one field (or of several stacked components).
struct ShellSpectrum {
  int q_min = 0;
  std::vector<double> a;  // a[j] = || shell (q_min + j) ||_{L2}
  double mean = 0.0;

  int q_max() const { return q_min + static_cast<int>(a.size()) - 1; }
  double amp(int q) const {
    if (q < q_min || q > q_max()) return 0.0;
    return a[static_cast<std::size_t>(q - q_min)];
  }
};

namespace lp {

// Accumulates |w(k)|^2 |fhat|^2 into the (at most two) shells containing |k|.
class ShellAccumulator {
 public:
  ShellAccumulator(const DyadicPartition& p, const PeriodicGrid& g)
      : part_(p), grid_(g), sums_(p.shells(), 0.0) {}

  void add(double kmag, double weighted_sq) {
    if (kmag <= 0.0 || weighted_sq == 0.0) return;
    const int q_hi =
        static_cast<int>(std::floor(std::log2(kmag / kShellInner)));
    for (int q = q_hi - 1; q <= q_hi + 1; ++q) {
      if (q < part_.q_min || q > part_.q_max) continue;
      const double w = phi(std::ldexp(kmag, -q));
      if (w > 0.0)
        sums_[static_cast<std::size_t>(q - part_.q_min)] += w * w * weighted_sq;
    }
  }

  ShellSpectrum finish(double mean) const {
    ShellSpectrum s;
    s.q_min = part_.q_min;
    s.a.resize(sums_.size());
    const double vol = grid_.box_volume();
    for (std::size_t j = 0; j < sums_.size(); ++j)
      s.a[j] = std::sqrt(sums_[j] * vol);
    s.mean = mean;
    return s;
  }

 private:
  const DyadicPartition& part_;
  const PeriodicGrid& grid_;
  std::vector<double> sums_;
};

}  // namespace lp

// Shell amplitudes of a single scalar field given by its coefficients.
inline ShellSpectrum shell_spectrum(const SpectralField& spec,
                                    const PeriodicGrid& g,
                                    const DyadicPartition& part) {
  lp::ShellAccumulator acc(part, g);
  for_each_mode(g, [&](std::size_t idx, double kx, double ky, double kz,
                       long long m2) {
    if (m2 == 0) return;
    const double kmag = std::sqrt(kx * kx + ky * ky + kz * kz);
    acc.add(kmag, std::norm(spec[idx]));
  });
  return acc.finish(spec.empty() ? 0.0 : spec[0].real());
}

// Frequency projection onto one dyadic shell.
inline void shell_project(const SpectralField& in, const PeriodicGrid& g,
                          const DyadicPartition& part, int q,
                          SpectralField& out) {
  if (!part.in_range(q))
    throw std::out_of_range("shell_project: shell index outside partition");
  out.resize(in.size());
  for_each_mode(g, [&](std::size_t idx, double kx, double ky, double kz,
                       long long m2) {
    if (m2 == 0) {
      out[idx] = 0.0;
      return;
    }
    const double kmag = std::sqrt(kx * kx + ky * ky + kz * kz);
    out[idx] = in[idx] * lp::phi(std::ldexp(kmag, -q));
  });
}

enum class ShellSum { L1, LInf };

inline double besov_norm(const ShellSpectrum& s, double smoothness,
                         ShellSum r) {
  double total = 0.0;
  for (std::size_t j = 0; j < s.a.size(); ++j) {
    const double v =
        s.a[j] * std::pow(2.0, smoothness * (s.q_min + static_cast<int>(j)));
    total = (r == ShellSum::L1) ? total + v : std::max(total, v);
  }
  return total;
}

// Truncated sums matching the low/high notation: low sums q <= j0 and high
// sums q >= j0 (both include the threshold shell).
inline double besov_norm_low(const ShellSpectrum& s, double smoothness,
                             int j0) {
  double total = 0.0;
  for (int q = s.q_min; q <= std::min(j0, s.q_max()); ++q)
    total += std::pow(2.0, smoothness * q) * s.amp(q);
  return total;
}

inline double besov_norm_high(const ShellSpectrum& s, double smoothness,
                              int j0) {
  double total = 0.0;
  for (int q = std::max(j0, s.q_min); q <= s.q_max(); ++q)
    total += std::pow(2.0, smoothness * q) * s.amp(q);
  return total;
}

inline double besov_norm(const SpectralField& spec, const PeriodicGrid& g,
                         const DyadicPartition& part, double smoothness,
                         ShellSum r) {
  return besov_norm(shell_spectrum(spec, g, part), smoothness, r);
}

// Splits a field into (low, high) parts about shell j0: low carries shells
// q <= j0 via the multiplier chi(|k| / 2^{j0+1}), high is the remainder with
// the mean removed, so low + high = f - mean exactly.
inline void low_high_split(const SpectralField& in, const PeriodicGrid& g,
                           const DyadicPartition& part, int j0,
                           SpectralField& low, SpectralField& high) {
  if (!part.in_range(j0))
    throw std::out_of_range("low_high_split: threshold outside partition");
  low.resize(in.size());
  high.resize(in.size());
  for_each_mode(g, [&](std::size_t idx, double kx, double ky, double kz,
                       long long m2) {
    if (m2 == 0) {
      low[idx] = 0.0;
      high[idx] = 0.0;
      return;
    }
    const double kmag = std::sqrt(kx * kx + ky * ky + kz * kz);
    const Complex lo = in[idx] * lp::chi(std::ldexp(kmag, -(j0 + 1)));
    low[idx] = lo;
    high[idx] = in[idx] - lo;
  });
}

enum class TimeAgg { Integral, Sup };

// Chemin-Lerner norm of a uniformly sampled time series of shell spectra:
// per-shell time aggregation (trapezoid integral or sup) before the ell^1
// shell sum.
inline double chemin_lerner_norm(const std::vector<ShellSpectrum>& series,
                                 const std::vector<double>& times,
                                 double smoothness, TimeAgg agg) {
  if (series.empty() || series.size() != times.size())
    throw std::domain_error("chemin_lerner_norm: empty or mismatched series");
  const int q_min = series.front().q_min;
  const int q_max = series.front().q_max();
  double total = 0.0;
  for (int q = q_min; q <= q_max; ++q) {
    double acc = 0.0;
    if (agg == TimeAgg::Sup) {
      for (const auto& s : series) acc = std::max(acc, s.amp(q));
    } else {
      for (std::size_t i = 0; i + 1 < series.size(); ++i)
        acc += 0.5 * (series[i].amp(q) + series[i + 1].amp(q)) *
               (times[i + 1] - times[i]);
    }
    total += std::pow(2.0, smoothness * q) * acc;
  }
  return total;
}

}  // namespace twofluid
