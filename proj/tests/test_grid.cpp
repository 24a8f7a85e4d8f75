#include <doctest.h>

#include <cmath>
#include <memory>

#include "rce/grid.hpp"

using namespace rce;

TEST_CASE("grid construction and sample lookup") {
  TimeGrid g = TimeGrid::uniform(0.0, 1.0, 101);
  CHECK(g.size() == 101);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(g.index_of(0.37) == 37);
  CHECK_THROWS_AS(g.index_of(0.375), std::out_of_range);

  TimeGrid lg = TimeGrid::log_spaced(0.01, 100.0, 5);
  CHECK(lg[0] == doctest::Approx(0.01));
  CHECK(lg[2] == doctest::Approx(1.0));
  CHECK(lg[4] == doctest::Approx(100.0));
}

TEST_CASE("five point derivatives are fourth order") {
  TimeGrid g = TimeGrid::uniform(0.0, 3.0, 301);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::sin(2.0 * g[i]);
  auto d = derivative_samples(g, v);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(d[i] - 2.0 * std::cos(2.0 * g[i])));
  CHECK(worst < 1e-6);

  // exact for cubics, including the one-sided ends
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = g[i] * g[i] * g[i];
  d = derivative_samples(g, v);
  for (std::size_t i : {std::size_t(0), std::size_t(150), g.size() - 1})
    CHECK(d[i] == doctest::Approx(3.0 * g[i] * g[i]).epsilon(1e-10));
}

TEST_CASE("derivatives handle log-spaced grids") {
  TimeGrid g = TimeGrid::log_spaced(0.01, 10.0, 400);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::log(g[i]);
  auto d = derivative_samples(g, v);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(d[i] - 1.0 / g[i]) * g[i]);  // relative to 1/t
  CHECK(worst < 1e-5);
}

TEST_CASE("cumulative integration is fourth order and base-anchored") {
  TimeGrid g = TimeGrid::uniform(0.0, 6.283185307179586, 1001);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::cos(g[i]);
  auto I = cumulative_integral(g, v, 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(I[i] - std::sin(g[i])));
  CHECK(worst < 1e-10);

  // anchored mid-grid: zero there, consistent elsewhere
  auto J = cumulative_integral(g, v, 500);
  CHECK(J[500] == 0.0);
  CHECK(J[0] == doctest::Approx(std::sin(g[0]) - std::sin(g[500])).epsilon(1e-9));
}

TEST_CASE("interpolation reproduces smooth functions between samples") {
  TimeGrid g = TimeGrid::uniform(0.0, 2.0, 201);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::exp(g[i]);
  CHECK(interp_samples(g, v, 0.7355) == doctest::Approx(std::exp(0.7355)).epsilon(1e-8));
  CHECK(interp_samples(g, v, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(interp_samples(g, v, 2.5), std::out_of_range);
}

TEST_CASE("finite difference weights reproduce node-exact derivatives") {
  std::vector<double> nodes{-2.0, -1.0, 0.0, 1.0, 2.0};
  auto w = fd_weights(0.0, nodes, 1);
  // classic (1, -8, 0, 8, -1)/12
  CHECK(w[0] == doctest::Approx(1.0 / 12.0));
  CHECK(w[1] == doctest::Approx(-8.0 / 12.0));
  CHECK(w[2] == doctest::Approx(0.0));
  CHECK(w[3] == doctest::Approx(8.0 / 12.0));
  CHECK(w[4] == doctest::Approx(-1.0 / 12.0));
}
