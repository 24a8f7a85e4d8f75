#pragma once

#include "rce/timedomain.hpp"

namespace rce {

class FloquetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean over the last complete period covered by the grid.
double dc_average(const TimeGrid& grid, const std::vector<double>& values, double T);
std::complex<double> dc_average(const TimeGrid& grid,
                                const std::vector<std::complex<double>>& values, double T);

struct PeriodicityReport {
  bool periodic = false;
  double deviation = 0.0;   // sup |nu(t+T) - nu(t)| over the last period (masked near poles)
  double event_offset = 0.0;  // worst alignment of escape-event times modulo T
};

/// Checks nu(t+T) == nu(t) over the final period of the trajectory; escape
/// events are compared through their times modulo T and the surrounding
/// samples are masked. Requires at least three periods of data.
PeriodicityReport check_rce_periodicity(const RceTrajectory& traj, double T,
                                        double tol = 1e-4, double value_mask = 1e3);

struct FloquetResult {
  double T = 0.0;
  std::complex<double> r1, r2;  // period averages of the primitive dynamic eigenvalues
  Mat2 monodromy{};             // direct state-space integration over one post-transient period
  std::array<std::complex<double>, 2> multipliers{};
  double multiplier_product_error = 0.0;  // |mu1 mu2 - e^{(r1+r2) T}| / |mu1 mu2|
  double det_vs_trace_error = 0.0;        // |det M - e^{int tr A}| / |det M|
  double modulus_agreement = 0.0;         // worst | |e^{r T}| - |mu| | / |mu|, moduli sorted
  bool phase_convention_flagged = false;  // monodromy phase and DC phase differ by ~pi
  bool coefficients_periodic = false;
  bool q_periodic = false;
  double q_deviation = 0.0;
  bool rce_periodic = false;
  double rce_deviation = 0.0;
};

/// Full periodic-coefficient analysis: DC averages of the primitive dynamic
/// eigenvalues over the last complete period, an independently integrated
/// monodromy matrix, and the cross-checks between the two exponent routes.
FloquetResult floquet_exponents(const std::function<Mat2(double)>& A, const ReducedRce& r,
                                const PrimitivePair& pair, double T,
                                const IntegratorOptions& opts = {});

/// Initial value of the periodic RCE solution at t0, from the eigendirections
/// of the monodromy matrix: nu = x2/x1 + alpha on an invariant ray. For
/// imaginary-kind systems this returns the complex value with positive
/// imaginary part; for real-kind systems the direction of the larger
/// multiplier (the attractor).
std::complex<double> periodic_primitive_ic(const std::function<Mat2(double)>& A,
                                           const ReducedRce& r, double t0, double T,
                                           const IntegratorOptions& opts = {});

/// Builds the full imaginary-kind primitive pair of a T-periodic system by
/// propagating the monodromy eigendirection across the grid.
PrimitivePair periodic_pair_from_monodromy(const std::function<Mat2(double)>& A,
                                           const ReducedRce& r, GridPtr grid, double T,
                                           const IntegratorOptions& opts = {});

}  // namespace rce
