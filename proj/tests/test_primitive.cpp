#include <doctest.h>

#include <cmath>
#include <random>

#include "rce/cases.hpp"
#include "rce/primitive.hpp"

using namespace rce;

namespace {

ReducedRce constant_rce(double omega02, Window w = {0.0, 8.0}) {
  GeneralRiccati g{CoefficientFn::from_constant(-1.0), CoefficientFn::from_constant(0.0),
                   CoefficientFn::from_constant(omega02)};
  return reduce_general_riccati(g, w);
}

GridPtr make_grid(double t0, double t1, std::size_t n) {
  return std::make_shared<TimeGrid>(TimeGrid::uniform(t0, t1, n));
}

RceTrajectory trajectory_from(GridPtr grid, const std::function<double(double)>& f) {
  RceTrajectory traj;
  traj.grid = grid;
  traj.real_valued = true;
  traj.values.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) traj.values[i] = f((*grid)[i]);
  traj.variable_log.push_back({grid->front(), grid->back(), VariableTag::Direct});
  return traj;
}

void check_pair_close(const PrimitivePair& pair, const std::function<double(double)>& nuR,
                      const std::function<double(double)>& nuI, double tol) {
  double worstR = 0.0, worstI = 0.0;
  for (std::size_t i = 0; i < pair.grid->size(); ++i) {
    double t = (*pair.grid)[i];
    worstR = std::max(worstR, std::abs(pair.nuR[i] - nuR(t)));
    worstI = std::max(worstI, std::abs(pair.nuI[i] - nuI(t)));
  }
  CHECK(worstR < tol);
  CHECK(worstI < tol);
}

}  // namespace

TEST_CASE("decomposition of a constant-coefficient member recovers (0, 2)") {
  ReducedRce r = constant_rce(4.0);
  auto grid = make_grid(0.0, 8.0, 801);

  SUBCASE("generic tanh member") {
    RceTrajectory nu =
        trajectory_from(grid, [](double t) { return 2.0 * std::tanh(2.0 * t - 1.0); });
    PrimitivePair pair = decompose_to_primitive(r, nu, PairKind::Real);
    check_pair_close(pair, [](double) { return 0.0; }, [](double) { return 2.0; }, 1e-8);
  }
  SUBCASE("fixed point input is returned unchanged") {
    RceTrajectory nu = trajectory_from(grid, [](double) { return 2.0; });
    PrimitivePair pair = decompose_to_primitive(r, nu, PairKind::Real);
    check_pair_close(pair, [](double) { return 0.0; }, [](double) { return 2.0; }, 1e-9);
  }
  SUBCASE("input with an escape event is re-based past the pole") {
    RceTrajectory nu = integrate_rce(r, -3.0, grid);
    REQUIRE(nu.escape_events.size() == 1);
    PrimitivePair pair = decompose_to_primitive(r, nu, PairKind::Real);
    check_pair_close(pair, [](double) { return 0.0; }, [](double) { return 2.0; }, 1e-7);
  }
}

TEST_CASE("decomposition of the polynomial case recovers (1/2t, 3/2t)") {
  GeneralRiccati g = make_polynomial_case();
  ReducedRce r = reduce_general_riccati(g, {0.5, 10.0});
  auto grid = make_grid(0.5, 10.0, 1201);
  RceTrajectory nu = trajectory_from(grid, [](double t) {
    return (2.0 * t * t * t - 1.0) / (t * (t * t * t + 1.0));
  });
  PrimitivePair pair = decompose_to_primitive(r, nu, PairKind::Real);
  check_pair_close(
      pair, [](double t) { return 0.5 / t; }, [](double t) { return 1.5 / t; }, 1e-6);

  // structural relation and solution property of both members
  auto res9 = eq9_residual(r, pair);
  for (std::size_t i = 2; i + 2 < grid->size(); ++i) CHECK(res9[i] < 1e-6);
  auto plus = rce_residual(r, *grid, pair.attractor());
  auto minus = rce_residual(r, *grid, pair.separatrix());
  for (std::size_t i = 2; i + 2 < grid->size(); ++i) {
    CHECK(plus[i] < 1e-5);
    CHECK(minus[i] < 1e-5);
  }
}

TEST_CASE("complementary solution subtracts twice the intrinsic component") {
  ReducedRce r = constant_rce(4.0);
  auto grid = make_grid(0.0, 6.0, 601);
  PrimitivePair pair;
  pair.grid = grid;
  pair.kind = PairKind::Real;
  pair.nuR.assign(grid->size(), 0.0);
  pair.nuI.assign(grid->size(), 2.0);

  RceTrajectory nu1 = trajectory_from(grid, [](double) { return 2.0; });
  auto nu2 = complementary_of(r, nu1, pair);
  for (double v : nu2) CHECK(v == doctest::Approx(-2.0));

  // polynomial case: 2/t - 2*(3/2t) = -1/t
  GeneralRiccati g = make_polynomial_case();
  ReducedRce rp = reduce_general_riccati(g, {0.5, 10.0});
  auto pgrid = make_grid(0.5, 10.0, 801);
  PrimitivePair ppair;
  ppair.grid = pgrid;
  ppair.kind = PairKind::Real;
  ppair.nuR.resize(pgrid->size());
  ppair.nuI.resize(pgrid->size());
  for (std::size_t i = 0; i < pgrid->size(); ++i) {
    ppair.nuR[i] = 0.5 / (*pgrid)[i];
    ppair.nuI[i] = 1.5 / (*pgrid)[i];
  }
  RceTrajectory known = trajectory_from(pgrid, [](double t) { return 2.0 / t; });
  auto other = complementary_of(rp, known, ppair);
  for (std::size_t i = 0; i < pgrid->size(); ++i)
    CHECK(other[i] == doctest::Approx(-1.0 / (*pgrid)[i]).epsilon(1e-10));

  // a non-solution input is rejected
  RceTrajectory junk = trajectory_from(pgrid, [](double t) { return std::sin(3.0 * t); });
  CHECK_THROWS_AS(complementary_of(rp, junk, ppair), PrimitiveError);
}

TEST_CASE("forward probe search finds the constant attractor") {
  ReducedRce r = constant_rce(4.0);
  auto grid = make_grid(0.0, 8.0, 801);
  ForwardSearchResult res = find_primitive_forward(r, {0.0, 1.0, 5.0}, grid);
  REQUIRE(res.outcome == ForwardSearchOutcome::Attractor);
  REQUIRE(res.pair.has_value());
  CHECK(res.pair->kind == PairKind::Real);
  check_pair_close(*res.pair, [](double) { return 0.0; }, [](double) { return 2.0; }, 1e-8);
}

TEST_CASE("forward probe search tracks the decaying attractor 2/t") {
  GeneralRiccati g = make_polynomial_case();
  ReducedRce r = reduce_general_riccati(g, {1.0, 50.0});
  auto grid = make_grid(1.0, 50.0, 2001);
  ForwardSearchResult res = find_primitive_forward(r, {0.0, 1.0, 3.0}, grid);
  REQUIRE(res.outcome == ForwardSearchOutcome::Attractor);
  REQUIRE(res.pair.has_value());
  check_pair_close(
      *res.pair, [](double t) { return 0.5 / t; }, [](double t) { return 1.5 / t; }, 2e-5);
}

TEST_CASE("no attractor is reported when the primitive pair is complex") {
  ReducedRce r = constant_rce(-4.0, {0.0, 10.0});
  auto grid = make_grid(0.0, 10.0, 1001);
  ForwardSearchResult res = find_primitive_forward(r, {-1.0, 0.0, 1.0}, grid);
  CHECK(res.outcome == ForwardSearchOutcome::NoAttractor);
}

TEST_CASE("backward propagation splits the complex fixed point exactly") {
  ReducedRce r = constant_rce(-4.0, {0.0, 10.0});
  auto grid = make_grid(0.0, 10.0, 501);
  BackwardResult res = find_primitive_backward(r, {0.0, 2.0}, 10.0, grid);
  CHECK(res.pair.kind == PairKind::Imaginary);
  check_pair_close(res.pair, [](double) { return 0.0; }, [](double) { return 2.0; }, 1e-9);
  CHECK(res.eq9_max_residual < 1e-7);
  CHECK(res.conjugate_forward_ok);
}

TEST_CASE("default backward guess is the frozen fixed point") {
  ReducedRce r = constant_rce(-4.0, {0.0, 10.0});
  std::complex<double> guess = default_backward_guess(r, 10.0);
  CHECK(guess.real() == doctest::Approx(0.0));
  CHECK(guess.imag() == doctest::Approx(2.0));
  ReducedRce pos = constant_rce(4.0);
  CHECK_THROWS_AS(default_backward_guess(pos, 1.0), PrimitiveError);
}

TEST_CASE("round trip: family member to pair and back (constant case)") {
  ReducedRce r = constant_rce(4.0);
  auto grid = make_grid(0.0, 8.0, 801);
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> kdist(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    double K = kdist(rng);
    bool coth = trial % 2 == 1;
    auto member = [&](double t) {
      double x = 2.0 * t - K;
      return coth ? 2.0 / std::tanh(x) : 2.0 * std::tanh(x);
    };
    if (coth && K >= 0.0) continue;  // keep the pole outside the window
    RceTrajectory nu = trajectory_from(grid, member);
    PrimitivePair pair = decompose_to_primitive(r, nu, PairKind::Real);
    check_pair_close(pair, [](double) { return 0.0; }, [](double) { return 2.0; }, 1e-6);
  }
}

TEST_CASE("intrinsic component never vanishes on bounded-coefficient windows") {
  ReducedRce r = constant_rce(4.0);
  auto grid = make_grid(0.0, 8.0, 401);
  ForwardSearchResult res = find_primitive_forward(r, {0.0, 1.0, 5.0}, grid);
  REQUIRE(res.pair.has_value());
  double mn = 1e300;
  for (double v : res.pair->nuI) mn = std::min(mn, v);
  CHECK(mn > 0.0);
}
