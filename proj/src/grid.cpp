#include "rce/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rce {

TimeGrid::TimeGrid(std::vector<double> times, Direction direction)
    : times_(std::move(times)), direction_(direction) {
  if (times_.size() < 2) throw std::invalid_argument("grid needs at least two samples");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1]))
      throw std::invalid_argument("grid times must be strictly increasing");
}

TimeGrid TimeGrid::uniform(double t0, double t1, std::size_t n, Direction direction) {
  if (!(t1 > t0) || n < 2) throw std::invalid_argument("bad uniform grid parameters");
  std::vector<double> ts(n);
  for (std::size_t i = 0; i < n; ++i)
    ts[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  ts.back() = t1;
  return TimeGrid(std::move(ts), direction);
}

TimeGrid TimeGrid::log_spaced(double t0, double t1, std::size_t n, Direction direction) {
  if (!(t0 > 0.0) || !(t1 > t0) || n < 2) throw std::invalid_argument("bad log grid parameters");
  std::vector<double> ts(n);
  double l0 = std::log(t0), l1 = std::log(t1);
  for (std::size_t i = 0; i < n; ++i)
    ts[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
  ts.front() = t0;
  ts.back() = t1;
  return TimeGrid(std::move(ts), direction);
}

std::size_t TimeGrid::index_of(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times_.begin());
  auto close = [&](std::size_t j) {
    if (j >= times_.size()) return false;
    double spacing = j + 1 < times_.size() ? times_[j + 1] - times_[j]
                                           : times_[j] - times_[j - 1];
    return std::abs(times_[j] - t) <= 1e-9 * (1.0 + std::abs(t)) + 1e-6 * spacing;
  };
  if (close(i)) return i;
  if (i > 0 && close(i - 1)) return i - 1;
  throw std::out_of_range("time is not a grid sample");
}

std::size_t TimeGrid::lower_index(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 1 : static_cast<std::size_t>(it - times_.begin());
  if (i >= times_.size()) i = times_.size() - 1;
  return i - 1;
}

std::vector<double> fd_weights(double z, const std::vector<double>& nodes, int order) {
  // Fornberg (1988), weights for derivatives 0..order at z; returns row `order`.
  const int n = static_cast<int>(nodes.size()) - 1;
  const int m = order;
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n) + 1,
                                     std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0;
    double c5 = c4;
    c4 = nodes[static_cast<std::size_t>(i)] - z;
    for (int j = 0; j < i; ++j) {
      double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
              c1 *
              (k * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
               c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) /
              c2;
        c[static_cast<std::size_t>(i)][0] = -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
            (c4 * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
             k * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)]) /
            c3;
      c[static_cast<std::size_t>(j)][0] = c4 * c[static_cast<std::size_t>(j)][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = c[i][static_cast<std::size_t>(m)];
  return w;
}

namespace {

// window of `width` node indices around i, clamped to the grid
std::pair<std::size_t, std::size_t> stencil_window(std::size_t i, std::size_t n, std::size_t width) {
  std::size_t half = width / 2;
  std::size_t lo = i > half ? i - half : 0;
  if (lo + width > n) lo = n - width;
  return {lo, lo + width};
}

}  // namespace

std::vector<double> derivative_samples(const TimeGrid& grid, const std::vector<double>& values) {
  const std::size_t n = grid.size();
  if (values.size() != n) throw std::invalid_argument("sample count mismatch");
  const std::size_t width = std::min<std::size_t>(5, n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [lo, hi] = stencil_window(i, n, width);
    std::vector<double> nodes(grid.times().begin() + static_cast<std::ptrdiff_t>(lo),
                              grid.times().begin() + static_cast<std::ptrdiff_t>(hi));
    std::vector<double> w = fd_weights(grid[i], nodes, 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) acc += w[j] * values[lo + j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> cumulative_integral(const TimeGrid& grid, const std::vector<double>& values,
                                        std::size_t base_index) {
  const std::size_t n = grid.size();
  if (values.size() != n) throw std::invalid_argument("sample count mismatch");
  if (base_index >= n) throw std::out_of_range("base index outside grid");
  // integral over [t_i, t_{i+1}] of the cubic through 4 surrounding nodes,
  // evaluated with 3-point Gauss-Legendre (exact for cubics)
  static const double gl_x[3] = {-0.774596669241483377, 0.0, 0.774596669241483377};
  static const double gl_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<double> increments(n - 1);
  const std::size_t width = std::min<std::size_t>(4, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto [lo, hi] = stencil_window(i, n - 1, width - 1);  // pick lo so {lo..lo+3} straddles [i, i+1]
    lo = i > 0 ? i - 1 : 0;
    if (lo + width > n) lo = n - width;
    hi = lo + width;
    double a = grid[i], b = grid[i + 1];
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int q = 0; q < 3; ++q) {
      double x = mid + half * gl_x[q];
      // Lagrange interpolation on nodes [lo, hi)
      double s = 0.0;
      for (std::size_t j = lo; j < hi; ++j) {
        double l = 1.0;
        for (std::size_t k = lo; k < hi; ++k) {
          if (k == j) continue;
          l *= (x - grid[k]) / (grid[j] - grid[k]);
        }
        s += l * values[j];
      }
      acc += gl_w[q] * s;
    }
    increments[i] = half * acc;
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = base_index; i + 1 < n; ++i) out[i + 1] = out[i] + increments[i];
  for (std::size_t i = base_index; i > 0; --i) out[i - 1] = out[i] - increments[i - 1];
  return out;
}

double interp_samples(const TimeGrid& grid, const std::vector<double>& values, double t) {
  const std::size_t n = grid.size();
  if (values.size() != n) throw std::invalid_argument("sample count mismatch");
  if (t < grid.front() - 1e-12 || t > grid.back() + 1e-12)
    throw std::out_of_range("interpolation time outside grid");
  std::size_t i = grid.lower_index(t);
  const std::size_t width = std::min<std::size_t>(4, n);
  std::size_t lo = i > 0 ? i - 1 : 0;
  if (lo + width > n) lo = n - width;
  double s = 0.0;
  for (std::size_t j = lo; j < lo + width; ++j) {
    double l = 1.0;
    for (std::size_t k = lo; k < lo + width; ++k) {
      if (k == j) continue;
      l *= (t - grid[k]) / (grid[j] - grid[k]);
    }
    s += l * values[j];
  }
  return s;
}

}  // namespace rce
