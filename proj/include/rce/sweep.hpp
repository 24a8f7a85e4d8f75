#pragma once

#include <string>

#include "rce/floquet.hpp"
#include "rce/phaseportrait.hpp"

namespace rce {

/// Batch analysis over a Mathieu-style (a0, q) grid. Each point runs the full
/// pipeline independently with fixed probe sets, so two runs of the same spec
/// produce bitwise-identical tables regardless of the worker count.
struct SweepSpec {
  std::vector<double> a0_values;
  std::vector<double> q_values{1.0};
  Window window{0.0, 12.0 * M_PI};
  std::size_t grid_samples = 3001;
  double period = 2.0 * M_PI;
  IntegratorOptions ode;
  int threads = 0;  // 0 = hardware concurrency
};

struct SweepRow {
  double a0 = 0.0, q = 0.0;
  std::string status;  // ok | inconclusive | error
  std::string label;   // attractor | attractor_periodic_escape | no_attractor_bounded | repetitive_escape
  std::string kind;    // real | imaginary | unknown
  std::string predisposition;
  double dc_intrinsic = 0.0;      // DC(nuI) (real) or DC(nuIm) (imaginary)
  double dc_real_component = 0.0; // DC(nuR)
  double r1_re = 0.0, r1_im = 0.0;
  double multiplier_mod1 = 0.0, multiplier_mod2 = 0.0;
  double escape_cadence = 0.0;
  bool rce_periodic = false;
  double rce_deviation = 0.0;
  bool half_period_antisymmetric = false;  // multipliers negative real (2T time-domain periodicity)
  std::string error;
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_jsonl(const std::vector<SweepRow>& rows);

/// Bisection along a0 (fixed q) for the attractor <-> no-attractor transition,
/// reported to the stated resolution. Measured, not asserted.
double refine_attractor_boundary(double q, double a0_with_attractor, double a0_without,
                                 double resolution, const SweepSpec& base);

}  // namespace rce
