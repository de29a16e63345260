#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "oracles.hpp"
#include "twofluid/closure.hpp"

using namespace twofluid;
using Catch::Approx;

namespace {
ModelParams make_params(double gp, double gm, double mu = 1.0,
                        double la = 0.0) {
  ModelParams p;
  p.gamma_plus = gp;
  p.gamma_minus = gm;
  p.mu_plus = p.mu_minus = mu;
  p.lambda_plus = p.lambda_minus = la;
  return p;
}
}  // namespace

TEST_CASE("symmetric closure solves to rho = 2") {
  const auto p = make_params(2.0, 2.0);
  CHECK(solve_rho_plus(1.0, 1.0, p) == Approx(2.0).margin(1e-12));

  // symmetry holds for any mass level and any shared gamma
  for (double r : {0.25, 0.7, 1.3, 2.5}) {
    for (double g : {1.4, 2.0, 3.0}) {
      const auto st = closure_state(r, r, make_params(g, g));
      CHECK(st.rho_plus == Approx(2.0 * r).margin(1e-11));
      CHECK(st.alpha_plus == Approx(0.5).margin(1e-12));
    }
  }
}

TEST_CASE("asymmetric closure root matches the bisection oracle") {
  const auto p = make_params(2.0, 3.0);
  const double from_oracle = oracles::bisect(
      [](double r) { return oracles::closure_residual(r, 1.0, 1.0, 2.0, 3.0); },
      1.0 + 1e-9, 1e3);
  const double rho = solve_rho_plus(1.0, 1.0, p);
  CHECK(rho == Approx(from_oracle).margin(1e-10));
  // frozen from the oracle
  CHECK(rho == Approx(2.324717957244746).margin(1e-11));
}

TEST_CASE("degenerate masses are rejected") {
  const auto p = make_params(2.0, 2.0);
  CHECK_THROWS_AS(solve_rho_plus(1.0, 0.0, p), std::domain_error);
  CHECK_THROWS_AS(solve_rho_plus(0.0, 1.0, p), std::domain_error);
  CHECK_THROWS_AS(solve_rho_plus(-1.0, 1.0, p), std::domain_error);
}

TEST_CASE("closure state at equilibrium, symmetric gammas") {
  const auto st = closure_state(1.0, 1.0, make_params(2.0, 2.0));
  CHECK(st.rho_plus == Approx(2.0).margin(1e-12));
  CHECK(st.rho_minus == Approx(2.0).margin(1e-12));
  CHECK(st.alpha_plus == Approx(0.5).margin(1e-12));
  CHECK(st.s2_plus == Approx(4.0).margin(1e-11));
  CHECK(st.C2 == Approx(2.0).margin(1e-11));
}

TEST_CASE("volume-fraction identity holds after the solve") {
  const auto p = make_params(2.0, 3.0);
  const auto st = closure_state(1.0, 1.0, p);
  CHECK(std::abs(st.R_plus / st.rho_plus + st.R_minus / st.rho_minus - 1.0) <=
        1e-12);
  // frozen C^2(1,1) for this parameter pair
  CHECK(st.C2 == Approx(3.2706935737704262).margin(1e-10));
}

TEST_CASE("pressure equality and identity on random inputs") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> gam(1.0 + 1e-3, 4.0);
  std::uniform_real_distribution<double> mass(0.5, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = make_params(gam(rng), gam(rng));
    const double Rp = mass(rng), Rm = mass(rng);
    const auto st = closure_state(Rp, Rm, p);
    const double pres_p = std::pow(st.rho_plus, p.gamma_plus);
    const double pres_m = std::pow(st.rho_minus, p.gamma_minus);
    CHECK(std::abs(pres_p - pres_m) <= 1e-10);
    CHECK(std::abs(Rp / st.rho_plus + Rm / st.rho_minus - 1.0) <= 1e-12);
    CHECK(st.alpha_plus > 0.0);
    CHECK(st.alpha_plus < 1.0);
    CHECK(st.C2 > 0.0);
  }
}

TEST_CASE("closure residual is strictly increasing past R_plus") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> gam(1.0 + 1e-3, 4.0);
  std::uniform_real_distribution<double> mass(0.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const double gp = gam(rng), gm = gam(rng);
    const double Rp = mass(rng), Rm = mass(rng);
    double prev = -1e300;
    for (int i = 1; i <= 60; ++i) {
      const double rho = Rp * (1.0 + 0.2 * i);
      const double v = oracles::closure_residual(rho, Rp, Rm, gp, gm);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("equilibrium coefficients, symmetric case") {
  const auto co = equilibrium_coefficients(make_params(2.0, 2.0, 1.0, 0.0));
  CHECK(co.beta1 == Approx(2.0).margin(1e-11));
  CHECK(co.beta2 == Approx(2.0).margin(1e-11));
  CHECK(co.beta3 == Approx(2.0).margin(1e-11));
  CHECK(co.beta4 == Approx(2.0).margin(1e-11));
  CHECK(co.nu1_plus == Approx(0.5).margin(1e-12));
  CHECK(co.nu2_plus == Approx(0.5).margin(1e-12));
  CHECK(co.nu_plus() == Approx(1.0).margin(1e-12));
}

TEST_CASE("beta identities") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> gam(1.0 + 1e-3, 4.0);
  std::uniform_real_distribution<double> visc(0.5, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto co = equilibrium_coefficients(
        make_params(gam(rng), gam(rng), visc(rng), 0.5 * visc(rng)));
    CHECK(co.beta2 == co.beta3);  // exact by construction
    CHECK(std::abs(co.beta2 * co.beta2 - co.beta1 * co.beta4) <= 1e-12);
    CHECK(co.nu1_plus > 0.0);
    CHECK(co.nu2_minus > 0.0);
  }
  const auto co23 = equilibrium_coefficients(make_params(2.0, 3.0));
  CHECK(co23.beta2 == Approx(3.2706935737704262).margin(1e-10));
}

TEST_CASE("coefficient functions vanish at the origin") {
  const auto v = pointwise_thermo(0.0, 0.0, make_params(2.0, 3.0, 1.3, 0.2));
  CHECK(v.g_plus == 0.0);
  CHECK(v.g_minus == 0.0);
  CHECK(v.gtilde == 0.0);
  CHECK(v.l_plus == 0.0);
  CHECK(v.l_minus == 0.0);
}

TEST_CASE("coefficient values at equilibrium, symmetric case") {
  const auto v = pointwise_thermo(0.0, 0.0, make_params(2.0, 2.0, 1.0, 0.0));
  // C^2 alpha- / s-^2 = 2 * 0.5 / 4 and -C^2 / (s+^2 rho+) = -2 / 8
  CHECK(v.h_plus == Approx(0.25).margin(1e-12));
  CHECK(v.k_plus == Approx(-0.25).margin(1e-12));
  CHECK(v.h_minus == Approx(-0.25).margin(1e-12));
  CHECK(v.k_minus == Approx(0.25).margin(1e-12));
}

TEST_CASE("coefficient functions are continuous at the origin") {
  const auto p = make_params(2.4, 1.7, 0.9, 0.1);
  const auto at0 = pointwise_thermo(0.0, 0.0, p);
  for (double sp : {1e-8, -1e-8}) {
    for (double sm : {1e-8, -1e-8}) {
      const auto v = pointwise_thermo(sp, sm, p);
      CHECK(std::abs(v.g_plus - at0.g_plus) <= 1e-6);
      CHECK(std::abs(v.gtilde - at0.gtilde) <= 1e-6);
      CHECK(std::abs(v.h_plus - at0.h_plus) <= 1e-6);
      CHECK(std::abs(v.k_minus - at0.k_minus) <= 1e-6);
      CHECK(std::abs(v.l_minus - at0.l_minus) <= 1e-6);
    }
  }
}

TEST_CASE("g_plus agrees with its numerical linearization") {
  const auto p = make_params(2.0, 2.0);
  // central differences of the underlying closure map at the origin
  const double h = 1e-5;
  auto G = [&](double cp, double cm) {
    const auto st = closure_state(1.0 + cp, 1.0 + cm, p);
    return st.C2 * st.rho_minus / st.rho_plus;
  };
  const double d1 = (G(h, 0.0) - G(-h, 0.0)) / (2.0 * h);
  const double d2 = (G(0.0, h) - G(0.0, -h)) / (2.0 * h);
  const double eps = 0.01;
  const auto v = pointwise_thermo(eps, -eps, p);
  const double linear = d1 * eps - d2 * eps;
  CHECK(std::abs(v.g_plus - linear) <= 5.0 * eps * eps);
}

TEST_CASE("perturbations below -1 are rejected") {
  const auto p = make_params(2.0, 2.0);
  CHECK_THROWS_AS(pointwise_thermo(-1.0, 0.0, p), std::domain_error);
  CHECK_THROWS_AS(pointwise_thermo(0.0, -1.5, p), std::domain_error);
}

TEST_CASE("warm-started evaluation matches the cold path") {
  const auto p = make_params(2.2, 2.9, 1.1, 0.3);
  ClosureEvaluator ev(p);
  double warm = ev.equilibrium().rho_plus;
  const auto a = ev.at(0.02, -0.015, &warm);
  const auto b = pointwise_thermo(0.02, -0.015, p);
  CHECK(a.g_plus == Approx(b.g_plus).margin(1e-13));
  CHECK(a.h_minus == Approx(b.h_minus).margin(1e-13));
  CHECK(warm == Approx(closure_state(1.02, 0.985, p).rho_plus).margin(1e-10));
}
