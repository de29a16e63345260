// Decay experiments: the time-weighted functionals X(t) and D(t), power-law
// exponent fits, Lp decay series and the convolution-decay sanity check.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "twofluid/littlewood_paley.hpp"
#include "twofluid/solver.hpp"

namespace twofluid {

// Per-shell L2 amplitudes of the weighted tuple
//   U = ((sqrt(beta1)+Lambda) c+, u+, (sqrt(beta4)+Lambda) c-, u-),
// optionally filtered by the multiplier |xi|^2.
inline ShellSpectrum weighted_shell_spectrum(const SpectralState& st,
                                             const LinearCoefficients& co,
                                             const DyadicPartition& part,
                                             bool lambda2 = false) {
  const double sb1 = std::sqrt(co.beta1);
  const double sb4 = std::sqrt(co.beta4);
  lp::ShellAccumulator acc(part, st.grid);
  const int dim = st.grid.dim;
  for_each_mode(st.grid, [&](std::size_t idx, double kx, double ky, double kz,
                             long long m2) {
    if (m2 == 0) return;
    const double kmag = std::sqrt(kx * kx + ky * ky + kz * kz);
    double w = (sb1 + kmag) * (sb1 + kmag) * std::norm(st.c_plus[idx]) +
               (sb4 + kmag) * (sb4 + kmag) * std::norm(st.c_minus[idx]);
    for (int a = 0; a < dim; ++a)
      w += std::norm(st.u_plus[a][idx]) + std::norm(st.u_minus[a][idx]);
    if (lambda2) w *= kmag * kmag * kmag * kmag;
    acc.add(kmag, w);
  });
  return acc.finish(0.0);
}

// Shell-amplitude time series of a trajectory; the basis for X(t) and D(t).
struct ShellSeries {
  std::vector<double> times;
  std::vector<ShellSpectrum> weighted;  // shells of U
  std::vector<ShellSpectrum> lambda2;   // shells of Lambda^2 U
  int j0 = 0;

  void push(double t, const SpectralState& st, const LinearCoefficients& co,
            const DyadicPartition& part) {
    times.push_back(t);
    weighted.push_back(weighted_shell_spectrum(st, co, part, false));
    lambda2.push_back(weighted_shell_spectrum(st, co, part, true));
  }
};

// X(t): Chemin-Lerner sup norm at regularity N/2-1 plus the time-integrated
// norm at N/2+1, evaluated on the window [0, t] for every sample t.
inline std::vector<double> eval_X(const ShellSeries& s, int dim) {
  if (s.times.empty()) throw std::domain_error("eval_X: empty trajectory");
  const double s_low = 0.5 * dim - 1.0;
  const double s_high = 0.5 * dim + 1.0;
  const int q_min = s.weighted.front().q_min;
  const int q_max = s.weighted.front().q_max();
  const std::size_t nq = static_cast<std::size_t>(q_max - q_min + 1);

  std::vector<double> running_sup(nq, 0.0), running_int(nq, 0.0);
  std::vector<double> X;
  X.reserve(s.times.size());
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    for (int q = q_min; q <= q_max; ++q) {
      const std::size_t j = static_cast<std::size_t>(q - q_min);
      const double a = s.weighted[i].amp(q);
      running_sup[j] = std::max(running_sup[j], a);
      if (i > 0)
        running_int[j] += 0.5 * (s.weighted[i - 1].amp(q) + a) *
                          (s.times[i] - s.times[i - 1]);
    }
    double sup_part = 0.0, int_part = 0.0;
    for (int q = q_min; q <= q_max; ++q) {
      const std::size_t j = static_cast<std::size_t>(q - q_min);
      sup_part += std::pow(2.0, s_low * q) * running_sup[j];
      int_part += std::pow(2.0, s_high * q) * running_int[j];
    }
    X.push_back(sup_part + int_part);
  }
  return X;
}

// D(t): sup over an s-grid of the <tau>-weighted running sup of low-frequency
// Besov norms, plus the tau^alpha-weighted high-frequency norm of Lambda^2 U
// (per-shell sup by default, plain sup-in-time behind the flag).
inline std::vector<double> eval_D(const ShellSeries& s, int dim,
                                  double epsilon,
                                  const std::vector<double>& s_samples,
                                  bool chemin_lerner_high = true) {
  if (s.times.empty()) throw std::domain_error("eval_D: empty trajectory");
  if (s_samples.empty())
    throw std::domain_error("eval_D: empty regularity sample grid");
  for (double sv : s_samples)
    if (!(sv > epsilon - 0.5 * dim) || sv > 2.0)
      throw std::domain_error(
          "eval_D: s sample outside (epsilon - N/2, 2]");
  const double alpha = 0.5 * dim + 0.5 - epsilon;
  const double s_high = 0.5 * dim - 1.0;
  const int j0 = s.j0;

  const int q_min = s.lambda2.front().q_min;
  const int q_max = s.lambda2.front().q_max();

  std::vector<double> low_sup(s_samples.size(), 0.0);
  std::vector<double> high_shell_sup(
      static_cast<std::size_t>(std::max(0, q_max - std::max(j0, q_min) + 1)),
      0.0);
  double high_plain_sup = 0.0;

  std::vector<double> D;
  D.reserve(s.times.size());
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double t = s.times[i];
    const double bracket = std::sqrt(1.0 + t * t);
    for (std::size_t m = 0; m < s_samples.size(); ++m) {
      const double sv = s_samples[m];
      const double w = std::pow(bracket, 0.5 * dim + 0.5 * sv);
      low_sup[m] =
          std::max(low_sup[m], w * besov_norm_low(s.weighted[i], sv, j0));
    }
    const double talpha = std::pow(t, alpha);
    for (int q = std::max(j0, q_min); q <= q_max; ++q) {
      auto& cell = high_shell_sup[static_cast<std::size_t>(q - std::max(j0, q_min))];
      cell = std::max(cell, talpha * s.lambda2[i].amp(q));
    }
    high_plain_sup = std::max(
        high_plain_sup, talpha * besov_norm_high(s.lambda2[i], s_high, j0));

    const double low = *std::max_element(low_sup.begin(), low_sup.end());
    double high = 0.0;
    if (chemin_lerner_high) {
      for (int q = std::max(j0, q_min); q <= q_max; ++q)
        high += std::pow(2.0, s_high * q) *
                high_shell_sup[static_cast<std::size_t>(q - std::max(j0, q_min))];
    } else {
      high = high_plain_sup;
    }
    D.push_back(low + high);
  }
  return D;
}

struct DecayFit {
  std::string label;
  double slope = 0.0;
  double intercept = 0.0;  // natural log of the prefactor
  double t1 = 0.0, t2 = 0.0;
  double residual = 0.0;  // RMS of log residuals
  double theory_slope = 0.0;
  double relative_gap = 0.0;
  int samples = 0;
};

// Least squares of log(value) against log(t) over [t1, t2].
inline DecayFit fit_power_law(const std::vector<double>& times,
                              const std::vector<double>& values, double t1,
                              double t2, double theory_slope = 0.0,
                              const std::string& label = "") {
  if (!(t1 < t2)) throw std::domain_error("fit_power_law: need t1 < t2");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size() && i < values.size(); ++i) {
    if (times[i] < t1 || times[i] > t2) continue;
    if (!(values[i] > 0.0))
      throw std::domain_error(
          "fit_power_law: nonpositive value inside the fit window");
    xs.push_back(std::log(times[i]));
    ys.push_back(std::log(values[i]));
  }
  if (xs.size() < 8)
    throw std::domain_error("fit_power_law: fewer than 8 samples in window");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  DecayFit f;
  f.label = label;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  f.t1 = t1;
  f.t2 = t2;
  f.samples = static_cast<int>(xs.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  f.theory_slope = theory_slope;
  f.relative_gap = (theory_slope != 0.0)
                       ? std::abs(f.slope - theory_slope) / std::abs(theory_slope)
                       : std::abs(f.slope);
  return f;
}

// Admissibility of the Lq-Lr decay request. The p = 2 case follows the
// fractional L2 range for the mass components (inclusive upper end); p > 2
// uses the strict Gagliardo-Nirenberg range, which is empty-ish in
// dimension 2.
inline double lp_index(double p, double k, int dim) {
  return k + dim * (0.5 - 1.0 / p);
}

inline bool lp_admissible(double p, double k, int dim) {
  if (!(p >= 2.0)) return false;
  if (p == 2.0) return k > -0.5 * dim && k <= std::min(2.0, 0.5 * dim);
  const double v = lp_index(p, k, dim);
  return v > -0.5 * dim && v < std::min(2.0, 0.5 * dim - 1.0);
}

// Fractional L2 range of the per-group decay statement: the mass components
// admit s up to min(2, N/2), the velocities up to min(2, N/2 - 1).
inline bool fractional_l2_admissible(double s, int dim, bool velocity) {
  const double top =
      velocity ? std::min(2.0, 0.5 * dim - 1.0) : std::min(2.0, 0.5 * dim);
  return s > -0.5 * dim && s <= top;
}

inline double lp_theory_slope(double p, double k, int dim) {
  return -0.5 * dim * (1.0 - 1.0 / p) - 0.5 * k;
}

// || Lambda^k (c+, u+, c-, u-) ||_{Lp} of one state (p = inf via the grid
// max). Lambda acts as the radial multiplier |xi|^k. The spatial mean is
// excluded for every k: on the torus it is the nondecaying background, the
// proxy for fields vanishing at infinity.
inline double lp_norm(const SpectralState& st, const SpectralTransform& fft,
                      double p, double k) {
  const PeriodicGrid& g = st.grid;
  const std::size_t sz = g.size();
  std::vector<const SpectralField*> comps = {&st.c_plus, &st.c_minus};
  for (int a = 0; a < g.dim; ++a) comps.push_back(&st.u_plus[a]);
  for (int a = 0; a < g.dim; ++a) comps.push_back(&st.u_minus[a]);

  RealField mag_sq(sz, 0.0);
  SpectralField tmp(sz);
  RealField phys;
  for (const auto* c : comps) {
    for_each_mode(g, [&](std::size_t idx, double kx, double ky, double kz,
                         long long m2) {
      if (m2 == 0) {
        tmp[idx] = 0.0;
        return;
      }
      const double kmag = std::sqrt(kx * kx + ky * ky + kz * kz);
      tmp[idx] = (k == 0.0) ? (*c)[idx] : (*c)[idx] * std::pow(kmag, k);
    });
    fft.to_physical(tmp, phys);
    for (std::size_t x = 0; x < sz; ++x) mag_sq[x] += phys[x] * phys[x];
  }
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : mag_sq) m = std::max(m, v);
    return std::sqrt(m);
  }
  double acc = 0.0;
  for (double v : mag_sq) acc += std::pow(std::sqrt(v), p);
  return std::pow(acc * g.cell_volume(), 1.0 / p);
}

struct LpSeries {
  double p = 2.0;
  double k = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  DecayFit fit;
};

// Lp decay over a stored trajectory plus the exponent fit.
inline LpSeries lp_decay(const std::vector<SpectralState>& traj,
                         const std::vector<double>& times,
                         const SpectralTransform& fft, double p, double k,
                         double t1, double t2, bool force = false) {
  if (traj.empty() || traj.size() != times.size())
    throw std::domain_error("lp_decay: empty or mismatched trajectory");
  const int dim = traj.front().grid.dim;
  if (!force && !lp_admissible(p, k, dim))
    throw std::domain_error("lp_decay: (p, k) outside the admissible range");
  LpSeries s;
  s.p = p;
  s.k = k;
  s.times = times;
  for (const auto& st : traj) s.values.push_back(lp_norm(st, fft, p, k));
  s.fit = fit_power_law(times, s.values, t1, t2, lp_theory_slope(p, k, dim),
                        "Lp[p=" + std::to_string(p) + ";k=" + std::to_string(k) +
                            "]");
  return s;
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double fa, double fm,
                               double fb, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-11) {
  if (!(b > a)) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

struct ConvolutionCheck {
  std::vector<double> times;
  std::vector<double> ratios;  // integral * (1+t)^{min(r1, r2)}
  double max_ratio = 0.0;
};

// Numerical check of the convolution-decay inequality
//   int_0^t (1+t-tau)^{-r1} (1+tau)^{-r2} dtau <= C (1+t)^{-min(r1,r2)}.
inline ConvolutionCheck convolution_inequality_check(
    double r1, double r2, const std::vector<double>& t_grid) {
  if (!(std::max(r1, r2) > 1.0))
    throw std::domain_error(
        "convolution_inequality_check: need max(r1, r2) > 1");
  ConvolutionCheck out;
  for (double t : t_grid) {
    const auto f = [&](double tau) {
      return std::pow(1.0 + t - tau, -r1) * std::pow(1.0 + tau, -r2);
    };
    // Split at the midpoint; both endpoints can be peaked.
    const double integral = detail::integrate(f, 0.0, 0.5 * t) +
                            detail::integrate(f, 0.5 * t, t);
    const double ratio = integral * std::pow(1.0 + t, std::min(r1, r2));
    out.times.push_back(t);
    out.ratios.push_back(ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

// Metric for the Picard iteration: final value of the X functional of the
// trajectory difference.
inline std::function<double(const std::vector<SpectralState>&,
                            const std::vector<SpectralState>&,
                            const std::vector<double>&)>
make_x_metric(const LinearCoefficients& co, const DyadicPartition& part) {
  return [co, part](const std::vector<SpectralState>& a,
                    const std::vector<SpectralState>& b,
                    const std::vector<double>& times) {
    ShellSeries series;
    series.j0 = part.j0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      SpectralState diff = a[i];
      for (std::size_t x = 0; x < diff.c_plus.size(); ++x) {
        diff.c_plus[x] -= b[i].c_plus[x];
        diff.c_minus[x] -= b[i].c_minus[x];
      }
      for (int ax = 0; ax < diff.grid.dim; ++ax)
        for (std::size_t x = 0; x < diff.u_plus[ax].size(); ++x) {
          diff.u_plus[ax][x] -= b[i].u_plus[ax][x];
          diff.u_minus[ax][x] -= b[i].u_minus[ax][x];
        }
      series.times.push_back(times[i]);
      series.weighted.push_back(
          weighted_shell_spectrum(diff, co, part, false));
      series.lambda2.push_back(ShellSpectrum{part.q_min, {}, 0.0});
    }
    return eval_X(series, a.front().grid.dim).back();
  };
}

}  // namespace twofluid
