// Per-wavevector analysis of the linearized system.
//
// The compressible part couples (c+, d+, c-, d-) with d = |D|^{-1} div u
// through a real 4x4 matrix A(|xi|); the divergence-free part of each
// velocity decays by a pure heat factor. A xi-dependent quadratic Lyapunov
// form equivalent to the mode energy decays like exp(-C |xi|^2 t), which is
// what the dissipation margin below quantifies.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twofluid/closure.hpp"
#include "twofluid/littlewood_paley.hpp"
#include "twofluid/matexp.hpp"

namespace twofluid {

using Mode = Eigen::Vector4cd;  // (c+_hat, d+_hat, c-_hat, d-_hat)

struct SymbolMatrix {
  double xi = 0.0;
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
};

// d/dt (c+, d+, c-, d-) = A(|xi|) (c+, d+, c-, d-).
inline SymbolMatrix compressible_symbol(double xi,
                                        const LinearCoefficients& co) {
  if (!(xi >= 0.0) || !std::isfinite(xi))
    throw std::domain_error("compressible_symbol: |xi| must be finite and >= 0");
  SymbolMatrix s;
  s.xi = xi;
  const double xi2 = xi * xi;
  const double xi3 = xi2 * xi;
  s.A(0, 1) = -xi;
  s.A(1, 0) = co.beta1 * xi + xi3;
  s.A(1, 1) = -co.nu_plus() * xi2;
  s.A(1, 2) = co.beta2 * xi;
  s.A(2, 3) = -xi;
  s.A(3, 0) = co.beta3 * xi;
  s.A(3, 2) = co.beta4 * xi + xi3;
  s.A(3, 3) = -co.nu_minus() * xi2;
  return s;
}

struct LyapunovWeights {
  double delta = 0.0;
};

inline LyapunovWeights lyapunov_weights(const LinearCoefficients& co) {
  return {std::min({1.0 / 3.0, co.nu_plus(), co.nu_minus()})};
}

// Matrix of the Lyapunov quadratic form L^2(xi) = v* M v.
inline Eigen::Matrix4d lyapunov_matrix(double xi, const LinearCoefficients& co,
                                       const LyapunovWeights& w) {
  const double xi2 = xi * xi;
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M(0, 0) = co.beta1 + xi2 + w.delta * co.nu_plus() * xi2;
  M(2, 2) = co.beta4 + xi2 + w.delta * co.nu_minus() * xi2;
  M(0, 2) = M(2, 0) = co.beta2;
  M(1, 1) = 1.0;
  M(3, 3) = 1.0;
  M(0, 1) = M(1, 0) = -w.delta * xi;
  M(2, 3) = M(3, 2) = -w.delta * xi;
  return M;
}

// Matrix of the mode energy E = (beta1+xi^2)|c+|^2 + (beta4+xi^2)|c-|^2
// + |d+|^2 + |d-|^2.
inline Eigen::Matrix4d energy_matrix(double xi, const LinearCoefficients& co) {
  Eigen::Matrix4d E = Eigen::Matrix4d::Zero();
  E(0, 0) = co.beta1 + xi * xi;
  E(2, 2) = co.beta4 + xi * xi;
  E(1, 1) = 1.0;
  E(3, 3) = 1.0;
  return E;
}

inline double quadratic_form(const Eigen::Matrix4d& Q, const Mode& v) {
  return (v.adjoint() * Q * v)(0).real();
}

inline double lyapunov_value(const Mode& mode, double xi,
                             const LinearCoefficients& co,
                             const LyapunovWeights& w) {
  return quadratic_form(lyapunov_matrix(xi, co, w), mode);
}

inline double energy_value(const Mode& mode, double xi,
                           const LinearCoefficients& co) {
  return quadratic_form(energy_matrix(xi, co), mode);
}

// Largest C >= 0 such that d/dt L^2 + C |xi|^2 L^2 <= 0 as a quadratic form,
// i.e. minus the top generalized eigenvalue of (A^T M + M A) against
// |xi|^2 M. A nonpositive value is a reportable finding, not an error.
inline double lyapunov_dissipation_margin(double xi,
                                          const LinearCoefficients& co,
                                          const LyapunovWeights& w) {
  if (!(xi > 0.0))
    throw std::domain_error("lyapunov_dissipation_margin: |xi| must be > 0");
  const Eigen::Matrix4d A = compressible_symbol(xi, co).A;
  const Eigen::Matrix4d M = lyapunov_matrix(xi, co, w);
  const Eigen::Matrix4d S = A.transpose() * M + M * A;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix4d> solver(
      S, (xi * xi) * M, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("lyapunov_dissipation_margin: eigensolver failed");
  return -solver.eigenvalues().maxCoeff();
}

// Constants of the equivalence c1 E <= L^2 <= c2 E.
inline std::pair<double, double> lyapunov_equivalence(
    double xi, const LinearCoefficients& co, const LyapunovWeights& w) {
  const Eigen::Matrix4d M = lyapunov_matrix(xi, co, w);
  const Eigen::Matrix4d E = energy_matrix(xi, co);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix4d> solver(
      M, E, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("lyapunov_equivalence: eigensolver failed");
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

// exp(t A(|xi|)) applied to one mode.
inline Mode evolve_mode(const Mode& mode0, double xi,
                        const LinearCoefficients& co, double t) {
  if (t < 0.0) throw std::domain_error("evolve_mode: t must be >= 0");
  if (xi == 0.0 || t == 0.0) return mode0;
  const Eigen::Matrix4d P = expm(t * compressible_symbol(xi, co).A);
  return P * mode0;
}

enum class Phase { Plus, Minus };

// Divergence-free velocity part: exact heat decay.
inline std::complex<double> incompressible_evolve(std::complex<double> u_hat,
                                                  double xi,
                                                  const LinearCoefficients& co,
                                                  double t, Phase phase) {
  const double nu1 = (phase == Phase::Plus) ? co.nu1_plus : co.nu1_minus;
  return u_hat * std::exp(-nu1 * xi * xi * t);
}

// Radial spectral profile of the weighted initial mode vector. `amplitude`
// gives |U0_hat|(r); the four compressible components split it evenly, so
// ((sqrt(beta1)+r) c+, d+, (sqrt(beta4)+r) c-, d-) each carry amplitude/2.
struct RadialProfile {
  std::function<double(double)> amplitude;
  int q0 = 0;  // largest low shell; the profile should cover r <= 2^q0

  static RadialProfile flat(int q0_) {
    const double rc = std::ldexp(1.0, q0_);
    return {[rc](double r) { return r <= rc ? 1.0 : 0.0; }, q0_};
  }
  static RadialProfile band(double r_lo, double r_hi, int q0_) {
    return {[r_lo, r_hi](double r) { return (r >= r_lo && r <= r_hi) ? 1.0 : 0.0; },
            q0_};
  }
};

namespace detail {

// 64-point Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
// iteration on the Legendre polynomial.
inline const std::vector<std::pair<double, double>>& gauss_legendre_64() {
  static const std::vector<std::pair<double, double>> table = [] {
    const int n = 64;
    std::vector<std::pair<double, double>> t(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      t[static_cast<std::size_t>(i)] = {x, 2.0 / ((1.0 - x * x) * pp * pp)};
    }
    return t;
  }();
  return table;
}

inline double sphere_area(int dim) {
  return dim == 2 ? 2.0 * M_PI : 4.0 * M_PI;
}

}  // namespace detail

// Low-frequency Besov norm of the semigroup applied to a radial profile,
// by composite Gauss-Legendre quadrature in log |xi| (64 nodes per dyadic
// interval, intervals q in [q_lo, q0+2]). Returns one norm per entry of
// `times`; shells q <= q0 enter the ell^1 sum.
inline std::vector<double> semigroup_besov_decay(
    const RadialProfile& profile, double smoothness,
    const std::vector<double>& times, int dim, const LinearCoefficients& co,
    int q_lo = -20, int nodes_per_shell = 64) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("semigroup_besov_decay: dim must be 2 or 3");
  if (!profile.amplitude)
    throw std::invalid_argument("semigroup_besov_decay: profile must be set");
  const int q0 = profile.q0;
  if (q_lo >= q0)
    throw std::invalid_argument("semigroup_besov_decay: empty shell range");

  const double sb1 = std::sqrt(co.beta1);
  const double sb4 = std::sqrt(co.beta4);

  struct Node {
    double r;
    double weight;  // quadrature weight including r^dim measure factor
    Mode v0;
    Eigen::Matrix4d A;
  };
  std::vector<Node> nodes;
  const auto& gl = detail::gauss_legendre_64();
  const double ln2 = std::log(2.0);
  for (int j = q_lo; j <= q0 + 2; ++j) {
    const double y_lo = j * ln2, y_hi = (j + 1) * ln2;
    const int reps = std::max(1, nodes_per_shell / 64);
    for (int rep = 0; rep < reps; ++rep) {
      const double a = y_lo + (y_hi - y_lo) * rep / reps;
      const double b = y_lo + (y_hi - y_lo) * (rep + 1) / reps;
      for (const auto& [x, w] : gl) {
        const double y = 0.5 * (a + b) + 0.5 * (b - a) * x;
        const double r = std::exp(y);
        const double g = profile.amplitude(r);
        Node node;
        node.r = r;
        // dr = r dy; surface measure r^{dim-1}.
        node.weight = 0.5 * (b - a) * w * detail::sphere_area(dim) *
                      std::pow(r, dim);
        using Cd = std::complex<double>;
        node.v0 = Mode(Cd(g / (2.0 * (sb1 + r))), Cd(g / 2.0),
                       Cd(g / (2.0 * (sb4 + r))), Cd(g / 2.0));
        node.A = compressible_symbol(r, co).A;
        nodes.push_back(node);
      }
    }
  }

  std::vector<double> norms;
  norms.reserve(times.size());
  const int shells = q0 - q_lo;  // sum over q in (q_lo, q0]
  for (double t : times) {
    if (t < 0.0) throw std::domain_error("semigroup_besov_decay: t >= 0");
    std::vector<double> shell_sq(static_cast<std::size_t>(shells), 0.0);
    for (const auto& node : nodes) {
      Mode v = node.v0;
      if (t > 0.0) v = expm(t * node.A) * v;
      const double w_sq = std::norm((sb1 + node.r) * v(0)) + std::norm(v(1)) +
                          std::norm((sb4 + node.r) * v(2)) + std::norm(v(3));
      if (w_sq == 0.0) continue;
      for (int q = q_lo + 1; q <= q0; ++q) {
        const double ph = lp::phi(std::ldexp(node.r, -q));
        if (ph > 0.0)
          shell_sq[static_cast<std::size_t>(q - q_lo - 1)] +=
              node.weight * ph * ph * w_sq;
      }
    }
    double norm = 0.0;
    for (int q = q_lo + 1; q <= q0; ++q)
      norm += std::pow(2.0, smoothness * q) *
              std::sqrt(shell_sq[static_cast<std::size_t>(q - q_lo - 1)]);
    norms.push_back(norm);
  }
  return norms;
}

}  // namespace twofluid
