#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace rce {

enum class Direction { Forward, Backward };

/// Strictly increasing sample times. Backward integrations still store their
/// samples in ascending order; `direction` records how they were produced.
class TimeGrid {
 public:
  TimeGrid(std::vector<double> times, Direction direction = Direction::Forward);

  static TimeGrid uniform(double t0, double t1, std::size_t n,
                          Direction direction = Direction::Forward);
  /// Geometrically spaced samples; requires 0 < t0 < t1. Used where the
  /// dynamics have a 1/t scale (Bessel-style windows).
  static TimeGrid log_spaced(double t0, double t1, std::size_t n,
                             Direction direction = Direction::Forward);

  std::size_t size() const { return times_.size(); }
  double operator[](std::size_t i) const { return times_[i]; }
  double front() const { return times_.front(); }
  double back() const { return times_.back(); }
  Direction direction() const { return direction_; }
  const std::vector<double>& times() const { return times_; }

  /// Index of the sample equal to t (within a spacing-relative tolerance);
  /// throws std::out_of_range when t is not a grid sample.
  std::size_t index_of(double t) const;
  /// Largest i with times[i] <= t (clamped to [0, size-2]).
  std::size_t lower_index(double t) const;

 private:
  std::vector<double> times_;
  Direction direction_;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

struct SampledFn {
  GridPtr grid;
  std::vector<double> values;
};

/// First derivative of sampled data by 5-point finite differences with
/// node-exact weights (handles nonuniform spacing; ends use one-sided stencils).
std::vector<double> derivative_samples(const TimeGrid& grid, const std::vector<double>& values);

/// Cumulative integral from samples, fourth order: each interval integrates
/// the local cubic through the four surrounding nodes. Result is zero at
/// `base_index`.
std::vector<double> cumulative_integral(const TimeGrid& grid, const std::vector<double>& values,
                                        std::size_t base_index = 0);

/// Local cubic interpolation of sampled data at an arbitrary time inside the grid.
double interp_samples(const TimeGrid& grid, const std::vector<double>& values, double t);

/// Finite-difference weights for the m-th derivative at `z` from the given
/// nodes (Fornberg's recursion).
std::vector<double> fd_weights(double z, const std::vector<double>& nodes, int order);

}  // namespace rce
