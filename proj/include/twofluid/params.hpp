// Model parameters for the two-phase system: adiabatic exponents, viscosities
// and capillary coefficients. Pressure laws are P(rho) = rho^gamma (unit
// pressure constants) and the capillary coefficients are normalized to 1.
#pragma once

#include <stdexcept>
#include <string>

namespace twofluid {

struct ModelParams {
  int dim = 2;  // spatial dimension, 2 or 3

  double gamma_plus = 2.0;
  double gamma_minus = 2.0;
  double mu_plus = 1.0;
  double mu_minus = 1.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double sigma_plus = 1.0;   // fixed by normalization
  double sigma_minus = 1.0;  // fixed by normalization

  void validate() const {
    if (dim != 2 && dim != 3)
      throw std::invalid_argument("ModelParams: dim must be 2 or 3");
    if (!(gamma_plus > 1.0) || !(gamma_minus > 1.0))
      throw std::invalid_argument("ModelParams: gamma must be > 1");
    if (!(mu_plus > 0.0) || !(mu_minus > 0.0))
      throw std::invalid_argument("ModelParams: mu must be > 0");
    if (!(lambda_plus + 2.0 * mu_plus > 0.0) ||
        !(lambda_minus + 2.0 * mu_minus > 0.0))
      throw std::invalid_argument("ModelParams: lambda + 2 mu must be > 0");
    if (sigma_plus != 1.0 || sigma_minus != 1.0)
      throw std::invalid_argument("ModelParams: sigma is fixed to 1");
  }
};

// Thrown when an iterative solve fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double lo, double hi)
      : std::runtime_error(what + " [last bracket (" + std::to_string(lo) +
                           ", " + std::to_string(hi) + ")]"),
        bracket_lo(lo),
        bracket_hi(hi) {}
  double bracket_lo;
  double bracket_hi;
};

// Thrown when a time integration detects non-finite values or blow-up.
class NumericalAbort : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace twofluid
