// Pressure-equilibrium closure for the two-phase mixture.
//
// Given the phase masses (R+, R-) = (alpha+ rho+, alpha- rho-), the volume
// constraint alpha+ + alpha- = 1 together with pressure equality
// P+(rho+) = P-(rho-) determines the phase densities, the volume fractions,
// the sound speeds and the mixture coefficient C^2. Everything downstream
// (linear coefficients, nonlinear source coefficients) is evaluated through
// this map.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "twofluid/params.hpp"

namespace twofluid {

struct ClosureState {
  double R_plus = 1.0;
  double R_minus = 1.0;
  double rho_plus = 2.0;
  double rho_minus = 2.0;
  double alpha_plus = 0.5;
  double alpha_minus = 0.5;
  double s2_plus = 0.0;   // squared sound speed of phase +
  double s2_minus = 0.0;  // squared sound speed of phase -
  double C2 = 0.0;        // mixture coefficient
};

struct LinearCoefficients {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double beta4 = 0.0;
  double nu1_plus = 0.0;
  double nu1_minus = 0.0;
  double nu2_plus = 0.0;
  double nu2_minus = 0.0;

  double nu_plus() const { return nu1_plus + nu2_plus; }
  double nu_minus() const { return nu1_minus + nu2_minus; }
};

// Values of the nine nonlinear coefficient functions at one (c+, c-).
struct PointwiseThermo {
  double g_plus = 0.0;
  double g_minus = 0.0;
  double gtilde = 0.0;  // shared between the phases
  double h_plus = 0.0;
  double h_minus = 0.0;
  double k_plus = 0.0;
  double k_minus = 0.0;
  double l_plus = 0.0;
  double l_minus = 0.0;
};

namespace detail {

// phi(rho) = P+(rho) - P-(R- rho / (rho - R+)); strictly increasing on
// (R+, +inf), so the root is unique and bracketing cannot fail.
inline double closure_phi(double rho, double R_plus, double R_minus,
                          double gamma_plus, double gamma_minus) {
  const double rho_m = R_minus * rho / (rho - R_plus);
  return std::pow(rho, gamma_plus) - std::pow(rho_m, gamma_minus);
}

inline double closure_phi_prime(double rho, double R_plus, double R_minus,
                                double gamma_plus, double gamma_minus) {
  const double rho_m = R_minus * rho / (rho - R_plus);
  const double s2p = gamma_plus * std::pow(rho, gamma_plus - 1.0);
  const double s2m = gamma_minus * std::pow(rho_m, gamma_minus - 1.0);
  const double d = rho - R_plus;
  return s2p + s2m * R_plus * R_minus / (d * d);
}

}  // namespace detail

// Solves phi(rho+) = 0 for rho+ in (R+, +inf) with |phi| <= 1e-12.
// Safeguarded Newton: steps leaving the current bracket fall back to
// bisection. An optional initial guess (e.g. the previous time step's value
// at the same grid point) shortens the iteration.
inline double solve_rho_plus(double R_plus, double R_minus,
                             const ModelParams& params,
                             double initial_guess = 0.0) {
  if (!(R_plus > 0.0) || !(R_minus > 0.0))
    throw std::domain_error("solve_rho_plus: phase masses must be positive");
  const double gp = params.gamma_plus;
  const double gm = params.gamma_minus;
  const double tol = 1e-12;

  double lo = R_plus * (1.0 + 1e-12);
  const double gmax = std::max(gp, gm);
  double hi =
      R_plus + R_minus * std::max(1.0, std::pow(R_plus + R_minus, gmax)) * 1e3;

  auto phi = [&](double r) {
    return detail::closure_phi(r, R_plus, R_minus, gp, gm);
  };
  auto dphi = [&](double r) {
    return detail::closure_phi_prime(r, R_plus, R_minus, gp, gm);
  };

  double flo = phi(lo);
  double fhi = phi(hi);
  if (flo >= 0.0) return lo;  // root pinned against the lower bracket end
  if (fhi <= 0.0)
    throw ConvergenceError("solve_rho_plus: bracket does not straddle a root",
                           lo, hi);

  double x = (initial_guess > lo && initial_guess < hi) ? initial_guess
                                                        : 0.5 * (lo + hi);
  double fx = phi(x);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(fx) <= tol) return x;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    const double d = dphi(x);
    double next = x - fx / d;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
    fx = phi(x);
  }
  if (std::abs(fx) <= tol) return x;
  throw ConvergenceError("solve_rho_plus: no convergence to tolerance", lo,
                         hi);
}

// Full closure at one (R+, R-).
inline ClosureState closure_state(double R_plus, double R_minus,
                                  const ModelParams& params,
                                  double initial_guess = 0.0) {
  ClosureState st;
  st.R_plus = R_plus;
  st.R_minus = R_minus;
  st.rho_plus = solve_rho_plus(R_plus, R_minus, params, initial_guess);
  st.rho_minus = R_minus * st.rho_plus / (st.rho_plus - R_plus);
  st.alpha_plus = R_plus / st.rho_plus;
  st.alpha_minus = 1.0 - st.alpha_plus;
  st.s2_plus = params.gamma_plus * std::pow(st.rho_plus, params.gamma_plus - 1.0);
  st.s2_minus =
      params.gamma_minus * std::pow(st.rho_minus, params.gamma_minus - 1.0);
  st.C2 = st.s2_minus * st.s2_plus /
          (st.alpha_minus * st.rho_plus * st.s2_plus +
           st.alpha_plus * st.rho_minus * st.s2_minus);
  return st;
}

// Coefficients of the reformulated system, evaluated at equilibrium
// (R+, R-) = (1, 1).
inline LinearCoefficients equilibrium_coefficients(const ModelParams& params) {
  params.validate();
  const ClosureState eq = closure_state(1.0, 1.0, params);
  LinearCoefficients c;
  c.beta1 = eq.C2 * eq.rho_minus / eq.rho_plus;
  c.beta2 = eq.C2;
  c.beta3 = eq.C2;
  c.beta4 = eq.C2 * eq.rho_plus / eq.rho_minus;
  c.nu1_plus = params.mu_plus / eq.rho_plus;
  c.nu1_minus = params.mu_minus / eq.rho_minus;
  c.nu2_plus = (params.mu_plus + params.lambda_plus) / eq.rho_plus;
  c.nu2_minus = (params.mu_minus + params.lambda_minus) / eq.rho_minus;
  return c;
}

// Caches the equilibrium reference values so that per-grid-point evaluation
// of the coefficient functions costs one closure solve.
class ClosureEvaluator {
 public:
  explicit ClosureEvaluator(const ModelParams& params)
      : params_(params), eq_(closure_state(1.0, 1.0, params)) {
    g_plus_eq_ = eq_.C2 * eq_.rho_minus / eq_.rho_plus;
    g_minus_eq_ = eq_.C2 * eq_.rho_plus / eq_.rho_minus;
  }

  const ClosureState& equilibrium() const { return eq_; }
  const ModelParams& params() const { return params_; }

  // Coefficient functions at a perturbed state. `rho_warm`, when positive,
  // seeds the Newton iteration and receives the converged density.
  PointwiseThermo at(double c_plus, double c_minus,
                     double* rho_warm = nullptr) const {
    if (!(c_plus > -1.0) || !(c_minus > -1.0))
      throw std::domain_error("pointwise_thermo: c must stay above -1");
    const double guess = (rho_warm && *rho_warm > 0.0) ? *rho_warm : 0.0;
    const ClosureState pt =
        closure_state(1.0 + c_plus, 1.0 + c_minus, params_, guess);
    if (rho_warm) *rho_warm = pt.rho_plus;

    PointwiseThermo v;
    v.g_plus = pt.C2 * pt.rho_minus / pt.rho_plus - g_plus_eq_;
    v.g_minus = pt.C2 * pt.rho_plus / pt.rho_minus - g_minus_eq_;
    v.gtilde = pt.C2 - eq_.C2;
    v.h_plus = pt.C2 * pt.alpha_minus / ((1.0 + c_plus) * pt.s2_minus);
    v.h_minus = -pt.C2 / (pt.rho_minus * pt.s2_minus);
    v.k_plus = -pt.C2 / ((1.0 + c_minus) * pt.s2_plus * pt.rho_plus);
    v.k_minus = pt.alpha_plus * pt.C2 / ((1.0 + c_minus) * pt.s2_plus);
    v.l_plus = 1.0 / pt.rho_plus - 1.0 / eq_.rho_plus;
    v.l_minus = 1.0 / pt.rho_minus - 1.0 / eq_.rho_minus;
    return v;
  }

 private:
  ModelParams params_;
  ClosureState eq_;
  double g_plus_eq_ = 0.0;
  double g_minus_eq_ = 0.0;
};

inline PointwiseThermo pointwise_thermo(double c_plus, double c_minus,
                                        const ModelParams& params) {
  return ClosureEvaluator(params).at(c_plus, c_minus);
}

}  // namespace twofluid
