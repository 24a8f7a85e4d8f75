#include <doctest.h>

#include <cmath>

#include "rce/cases.hpp"
#include "rce/ode.hpp"
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

}  // namespace

TEST_CASE("bounded solution reproduces the closed form 2 tanh(2t)") {
  ReducedRce r = constant_rce(4.0);
  auto grid = make_grid(0.0, 4.0, 801);
  RceTrajectory traj = integrate_rce(r, 0.0, grid);
  CHECK(traj.real_valued);
  CHECK(traj.escape_events.empty());
  double worst = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double expect = 2.0 * std::tanh(2.0 * (*grid)[i]);
    worst = std::max(worst, std::abs(traj.values[i].real() - expect));
  }
  CHECK(worst < 1e-6);
  CHECK(traj.values[grid->index_of(1.0)].real() == doctest::Approx(2.0 * std::tanh(2.0)).epsilon(1e-6));
}

TEST_CASE("fixed points are preserved") {
  ReducedRce r = constant_rce(4.0);
  auto grid = make_grid(0.0, 6.0, 601);
  RceTrajectory attractor = integrate_rce(r, 2.0, grid);
  RceTrajectory separatrix = integrate_rce(r, -2.0, grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    CHECK(std::abs(attractor.values[i].real() - 2.0) < 1e-7);
    CHECK(std::abs(separatrix.values[i].real() + 2.0) < 2e-4);  // unstable direction drifts last
  }
  CHECK(attractor.escape_events.empty());
}

TEST_CASE("time-varying attractor 2/t is tracked over a long window") {
  GeneralRiccati g = make_polynomial_case();
  ReducedRce r = reduce_general_riccati(g, {1.0, 10.0});
  auto grid = make_grid(1.0, 10.0, 1001);
  RceTrajectory traj = integrate_rce(r, 2.0, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i)
    worst = std::max(worst, std::abs(traj.values[i].real() - 2.0 / (*grid)[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("escape through the pole lands at t = K/2 and re-enters from above") {
  // ic -3 selects 2 coth(2t - K) with K = log(5)/2; escape at K/2
  ReducedRce r = constant_rce(4.0);
  auto grid = make_grid(0.0, 4.0, 2001);
  RceTrajectory traj = integrate_rce(r, -3.0, grid);
  REQUIRE(traj.escape_events.size() == 1);
  double t_escape = traj.escape_events[0].t_escape;
  CHECK(t_escape == doctest::Approx(0.25 * std::log(5.0)).epsilon(1e-8));

  // left of the event the solution dives to -inf, right of it re-enters from
  // +inf; both sides match 2 coth(2(t - t_escape))
  std::size_t before = grid->lower_index(t_escape - 0.01);
  std::size_t after = grid->lower_index(t_escape + 0.01) + 1;
  CHECK(traj.values[before].real() < -50.0);
  CHECK(traj.values[after].real() > 50.0);
  for (std::size_t idx : {before, after}) {
    double expect = 2.0 / std::tanh(2.0 * ((*grid)[idx] - t_escape));
    CHECK(traj.values[idx].real() == doctest::Approx(expect).epsilon(1e-4));
  }

  // converges to the attractor afterwards: 2 coth(2*4 - K)
  double expect_end = 2.0 / std::tanh(8.0 - 0.5 * std::log(5.0));
  CHECK(traj.values.back().real() == doctest::Approx(expect_end).epsilon(1e-9));

  // the variable log shows a reciprocal stretch around the pole
  bool saw_reciprocal = false;
  for (const auto& seg : traj.variable_log)
    if (seg.tag == VariableTag::Reciprocal) saw_reciprocal = true;
  CHECK(saw_reciprocal);
}

TEST_CASE("repeated escape events for a negative constant coefficient") {
  // nudot = -nu^2 - 4 has no real fixed points: poles every pi/2
  ReducedRce r = constant_rce(-4.0, {0.0, 5.0});
  auto grid = make_grid(0.0, 5.0, 2001);
  RceTrajectory traj = integrate_rce(r, 0.0, grid);
  REQUIRE(traj.escape_events.size() >= 3);
  // nu = -2 tan(2t): poles at pi/4 + k pi/2
  for (std::size_t k = 0; k < traj.escape_events.size(); ++k) {
    double expect = M_PI / 4.0 + static_cast<double>(k) * M_PI / 2.0;
    CHECK(traj.escape_events[k].t_escape == doctest::Approx(expect).epsilon(1e-7));
  }
}

TEST_CASE("event refinement reaches the stated bracket width") {
  ReducedRce r = constant_rce(4.0);
  auto grid = make_grid(0.0, 2.0, 501);
  RceTrajectory traj = integrate_rce(r, -3.0, grid);
  auto events = detect_escape_events(traj);
  REQUIRE(events.size() == 1);
  CHECK(std::abs(events[0].t_escape - 0.25 * std::log(5.0)) <= 1e-8 * (1.0 + events[0].t_escape));
}

TEST_CASE("residuals of the integrated trajectory satisfy the field") {
  GeneralRiccati g = make_polynomial_case();
  ReducedRce r = reduce_general_riccati(g, {1.0, 6.0});
  auto grid = make_grid(1.0, 6.0, 2001);
  RceTrajectory traj = integrate_rce(r, 1.0, grid);
  std::vector<double> nu(grid->size());
  for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = traj.values[i].real();
  auto res = rce_residual(r, *grid, nu);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < res.size(); ++i) worst = std::max(worst, res[i]);
  CHECK(worst < 1e-5);  // sampled via the cubic dense output
}

TEST_CASE("reciprocal handoff keeps nu * w = 1") {
  ReducedRce r = constant_rce(4.0);
  RceFlow flow = rce_flow(r, -3.0, 0.0, 2.0);
  REQUIRE(flow.segments.size() == 3);
  // adjacent steps across a mode switch hold reciprocal states
  std::size_t checked = 0;
  for (std::size_t i = 0; i + 1 < flow.steps.size(); ++i) {
    const DenseStep& a = flow.steps[i];
    const DenseStep& b = flow.steps[i + 1];
    if (a.tag == b.tag) continue;
    ++checked;
    CHECK(a.step.y1[0] * b.step.y0[0] == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(checked == 2);
}

TEST_CASE("backward integration retraces a forward trajectory") {
  ReducedRce r = constant_rce(4.0);
  auto grid = make_grid(0.0, 2.0, 201);
  RceTrajectory fwd = integrate_rce(r, 0.5, grid);
  double end_value = fwd.values.back().real();
  RceTrajectory back = integrate_rce(r, end_value, grid, {}, Direction::Backward);
  // within 100x the integration tolerance away from events
  CHECK(std::abs(back.values.front().real() - 0.5) < 1e-6);
}

TEST_CASE("complex initial data stays complex and bounded for the imaginary pair") {
  // nudot = -nu^2 - 4: fixed points +-2j
  ReducedRce r = constant_rce(-4.0, {0.0, 10.0});
  auto grid = make_grid(0.0, 10.0, 501);
  RceTrajectory traj = integrate_rce(r, {0.0, 2.0}, grid);
  CHECK_FALSE(traj.real_valued);
  for (const auto& v : traj.values) {
    CHECK(std::abs(v.real()) < 1e-7);
    CHECK(v.imag() == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("coefficient singularities inside the window are reported") {
  ScalarSystem b = make_bessel(2);
  ReducedRce r = scalar_system_to_rce(b, {-1.0, 1.0});
  auto grid = make_grid(-1.0, 1.0, 101);
  CHECK_THROWS_AS(integrate_rce(r, 0.5, grid), IntegrationError);
}

TEST_CASE("fundamental matrix propagation matches the constant-coefficient exponential") {
  // A = [[0,1],[4,0]]: Phi(t) has cosh/sinh blocks with rate 2
  auto A = [](double) -> Mat2 { return {{{0.0, 1.0}, {4.0, 0.0}}}; };
  Mat2 phi = integrate_fundamental2(A, 0.0, 1.0);
  CHECK(phi[0][0] == doctest::Approx(std::cosh(2.0)).epsilon(1e-9));
  CHECK(phi[0][1] == doctest::Approx(0.5 * std::sinh(2.0)).epsilon(1e-9));
  CHECK(phi[1][0] == doctest::Approx(2.0 * std::sinh(2.0)).epsilon(1e-9));
  CHECK(phi[1][1] == doctest::Approx(std::cosh(2.0)).epsilon(1e-9));
  CHECK(mat2_det(phi) == doctest::Approx(1.0).epsilon(1e-10));

  auto mu = mat2_eigenvalues(phi);
  CHECK(std::abs(mu[0] - std::exp(2.0)) < 1e-8);
  CHECK(std::abs(mu[1] - std::exp(-2.0)) < 1e-8);
}
