#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "rce/cases.hpp"
#include "rce/reduction.hpp"

using namespace rce;

namespace {
const Window kW{0.5, 10.0};
}

TEST_CASE("general Riccati reduction produces the canonical pair") {
  // zdot = -z^2 + 2/t^2
  GeneralRiccati g = make_polynomial_case();
  ReducedRce r = reduce_general_riccati(g, kW);
  CHECK(r.omega01(3.0) == doctest::Approx(1.0));
  CHECK(r.omega02(1.0) == doctest::Approx(2.0));
  CHECK(r.omega02(2.0) == doctest::Approx(0.5));
  CHECK(r.eta(1.0) == doctest::Approx(0.0));

  // zdot = -z^2 + 4
  GeneralRiccati c{CoefficientFn::from_constant(-1.0), CoefficientFn::from_constant(0.0),
                   CoefficientFn::from_constant(4.0)};
  ReducedRce rc = reduce_general_riccati(c, {0.0, 8.0});
  CHECK(rc.omega01(0.3) == doctest::Approx(1.0));
  CHECK(rc.omega02(0.3) == doctest::Approx(4.0));

  // s1 = 2 shifts: eta = 1, omega02 = 0 - (-1)(1) - 0 = 1
  GeneralRiccati s{CoefficientFn::from_constant(-1.0), CoefficientFn::from_constant(2.0),
                   CoefficientFn::from_constant(0.0)};
  ReducedRce rs = reduce_general_riccati(s, {0.0, 8.0});
  CHECK(rs.eta(0.1) == doctest::Approx(1.0));
  CHECK(rs.omega01(0.1) == doctest::Approx(1.0));
  CHECK(rs.omega02(0.1) == doctest::Approx(1.0));
  CHECK(rs.sigma0(0.1) == doctest::Approx(1.0));

  // omega01 must be positive on the window
  GeneralRiccati bad{CoefficientFn::from_constant(1.0), CoefficientFn::from_constant(0.0),
                     CoefficientFn::from_constant(4.0)};
  CHECK_THROWS_AS(reduce_general_riccati(bad, {0.0, 1.0}), ReductionError);
}

TEST_CASE("scalar systems reduce by the companion formulas") {
  // Bessel N=5: omega02 = (4*25-1)/(4 t^2) - 1, eta = -1/(2t)
  ScalarSystem b = make_bessel(5);
  ReducedRce r = scalar_system_to_rce(b, kW);
  CHECK(r.omega01(2.0) == doctest::Approx(1.0));
  CHECK(r.omega02(1.0) == doctest::Approx(99.0 / 4.0 - 1.0));
  CHECK(r.omega02(2.0) == doctest::Approx(99.0 / 16.0 - 1.0));
  CHECK(r.eta(2.0) == doctest::Approx(-0.25));
  CHECK(r.alpha(2.0) == doctest::Approx(0.25));
  CHECK(r.sigma0(2.0) == doctest::Approx(-0.25));

  // Mathieu: omega02 = a0 + q cos t
  ScalarSystem m = make_mathieu(-3.0, 1.0);
  ReducedRce rm = scalar_system_to_rce(m, {0.0, 10.0});
  CHECK(rm.omega02(0.0) == doctest::Approx(-2.0));
  CHECK(rm.omega02(M_PI) == doctest::Approx(-4.0));
  CHECK(rm.eta(1.0) == doctest::Approx(0.0));

  // oscillator: omega02 = t^2 - N
  ScalarSystem q = make_qho(5);
  ReducedRce rq = scalar_system_to_rce(q, {-5.0, 5.0});
  CHECK(rq.omega02(0.0) == doctest::Approx(-5.0));
  CHECK(rq.omega02(3.0) == doctest::Approx(4.0));
}

TEST_CASE("state matrices reduce consistently with their companion forms") {
  // [[0,1],[4,0]] is the companion of ydotdot = 4y
  StateMatrix2x2 m{CoefficientFn::from_constant(0.0), CoefficientFn::from_constant(1.0),
                   CoefficientFn::from_constant(4.0), CoefficientFn::from_constant(0.0)};
  ReducedRce r = state_matrix_to_rce(m, {0.0, 4.0});
  CHECK(r.omega01(1.0) == doctest::Approx(1.0));
  CHECK(r.omega02(1.0) == doctest::Approx(4.0));
  CHECK(r.eta(1.0) == doctest::Approx(0.0));
  CHECK(r.alpha(1.0) == doctest::Approx(0.0));

  // [[1,1],[0,1]]: alpha = 0, eta = 1, omega02 = 0
  StateMatrix2x2 u{CoefficientFn::from_constant(1.0), CoefficientFn::from_constant(1.0),
                   CoefficientFn::from_constant(0.0), CoefficientFn::from_constant(1.0)};
  ReducedRce ru = state_matrix_to_rce(u, {0.0, 4.0});
  CHECK(ru.alpha(1.0) == doctest::Approx(0.0));
  CHECK(ru.eta(1.0) == doctest::Approx(1.0));
  CHECK(ru.omega02(1.0) == doctest::Approx(0.0));
  CHECK(ru.omega01(1.0) == doctest::Approx(1.0));

  // a12 that vanishes in the window is rejected
  StateMatrix2x2 bad{CoefficientFn::from_constant(0.0), CoefficientFn::parse("t-1"),
                     CoefficientFn::from_constant(1.0), CoefficientFn::from_constant(0.0)};
  CHECK_THROWS_AS(state_matrix_to_rce(bad, {0.0, 4.0}), ReductionError);
}

TEST_CASE("companion round-trip matches the scalar reduction pointwise") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 12; ++trial) {
    double c1 = coef(rng), c0 = coef(rng), amp = coef(rng);
    Expr t = Expr::time();
    Expr r1e = Expr::constant(c1) + Expr::constant(amp) * sin(t);
    Expr r0e = Expr::constant(c0) + Expr::constant(0.5 * amp) * cos(t);
    ScalarSystem s{CoefficientFn(r1e), CoefficientFn(r0e)};
    ReducedRce direct = scalar_system_to_rce(s, {0.0, 6.0});
    ReducedRce via = state_matrix_to_rce(companion(s), {0.0, 6.0});
    for (int k = 0; k <= 40; ++k) {
      double tt = 6.0 * k / 40.0;
      CHECK(direct.omega02(tt) == doctest::Approx(via.omega02(tt)).epsilon(1e-12));
      CHECK(direct.eta(tt) == doctest::Approx(via.eta(tt)).epsilon(1e-12));
      CHECK(direct.alpha(tt) == doctest::Approx(via.alpha(tt)).epsilon(1e-12));
    }
  }
}

TEST_CASE("shift correctness: known solutions satisfy the reduced equation") {
  // z = 2/t and z = -1/t solve zdot = -z^2 + 2/t^2; with eta = 0, nu = z
  GeneralRiccati g = make_polynomial_case();
  ReducedRce r = reduce_general_riccati(g, kW);
  for (double t = 0.5; t <= 10.0; t += 0.5) {
    double z1 = 2.0 / t, dz1 = -2.0 / (t * t);
    CHECK(std::abs(dz1 - r.rhs(z1 - r.eta(t), t)) < 1e-12);
    double z2 = -1.0 / t, dz2 = 1.0 / (t * t);
    CHECK(std::abs(dz2 - r.rhs(z2 - r.eta(t), t)) < 1e-12);
  }
}

TEST_CASE("constant-coefficient characteristic pairs") {
  LtiPair p = lti_characteristic_pair(1.0, 0.0, -4.0);
  CHECK(p.lambdaR == doctest::Approx(0.0));
  CHECK(p.lambdaI == doctest::Approx(2.0));
  CHECK_FALSE(p.imaginary);
  CHECK_FALSE(p.degenerate);

  p = lti_characteristic_pair(1.0, 2.0, 5.0);
  CHECK(p.lambdaR == doctest::Approx(-1.0));
  CHECK(p.lambdaI == doctest::Approx(2.0));
  CHECK(p.imaginary);
  // polynomial-root oracle: both roots satisfy l^2 + 2l + 5 = 0
  std::complex<double> l1{p.lambdaR, p.lambdaI};
  CHECK(std::abs(l1 * l1 + 2.0 * l1 + 5.0) < 1e-12);

  p = lti_characteristic_pair(1.0, 2.0, 1.0);
  CHECK(p.lambdaR == doctest::Approx(-1.0));
  CHECK(p.lambdaI == doctest::Approx(0.0));
  CHECK(p.degenerate);

  CHECK_THROWS_AS(lti_characteristic_pair(0.0, 1.0, 1.0), ReductionError);
}

TEST_CASE("characteristic roots satisfy the quadratic to machine precision") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> coef(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    double a = coef(rng), b = coef(rng), c = coef(rng);
    if (std::abs(a) < 1e-3) continue;
    LtiPair p = lti_characteristic_pair(a, b, c);
    std::complex<double> li = p.imaginary ? std::complex<double>(0.0, p.lambdaI)
                                          : std::complex<double>(p.lambdaI, 0.0);
    for (double sgn : {1.0, -1.0}) {
      std::complex<double> l = p.lambdaR + sgn * li;
      CHECK(std::abs(a * l * l + b * l + c) <=
            1e-12 * (std::abs(a) + std::abs(b) + std::abs(c)) * (1.0 + std::norm(l)));
    }
  }
}
