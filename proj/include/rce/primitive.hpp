#pragma once

#include <optional>

#include "rce/ode.hpp"

namespace rce {

class PrimitiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PairKind { Real, Imaginary };

/// The distinguished complementary pair nuR +- nuI. For the imaginary kind
/// nuI stores the magnitude of the purely imaginary intrinsic component and
/// the members are nuR +- j*nuI. Sign normalization: nuI > 0.
struct PrimitivePair {
  GridPtr grid;
  std::vector<double> nuR;
  std::vector<double> nuI;
  PairKind kind = PairKind::Real;

  std::vector<double> attractor() const;   // nuR + nuI (real kind)
  std::vector<double> separatrix() const;  // nuR - nuI (real kind)
};

/// Pointwise defect of the structural relation nuR = -nuIdot/(2 omega01 nuI),
/// normalized by (1 + |nuR|). The logarithmic derivative of nuI is formed on
/// the grid, so boundary samples carry one-sided stencil error.
std::vector<double> eq9_residual(const ReducedRce& r, const PrimitivePair& pair);

/// |nudot + omega01 nu^2 - omega02| / (1 + |nu|^2) at interior samples,
/// with the time derivative taken by finite differences.
std::vector<double> rce_residual(const ReducedRce& r, const TimeGrid& grid,
                                 const std::vector<double>& nu);
std::vector<double> rce_residual(const ReducedRce& r, const TimeGrid& grid,
                                 const std::vector<std::complex<double>>& nu);

/// Scratch from the decomposition: the two anchored integrating-factor
/// integrals and the member-selection constant (always -2, the choice that
/// maps an arbitrary solution onto the primitive).
struct DecompositionScratch {
  SampledFn g;
  SampledFn g_p;
  double k1_used = -2.0;
};

struct DecompositionOptions {
  DecompositionOptions() {
    ode.rtol = 1e-10;
    ode.atol = 1e-13;
  }
  IntegratorOptions ode;
  /// e-folds of integrating-factor decay required beyond each window edge
  /// before the anchored constants are trusted.
  double anchor_log = 34.0;
  double extension_span_cap = 5000.0;  // in units of the window span
};

/// Extracts the primitive pair from one arbitrary sampled solution.
/// Real kind: two anchored first-order quadratures (the p-function route)
/// plus stable-direction window extensions. Imaginary kind: the phase between
/// consecutive escape events is pinned to a half-turn and the intrinsic
/// magnitude is found by shooting, after which the complex primitive is
/// propagated across the window.
PrimitivePair decompose_to_primitive(const ReducedRce& r, const RceTrajectory& nu,
                                     std::optional<PairKind> kind_hint = {},
                                     const DecompositionOptions& opts = {},
                                     DecompositionScratch* scratch = nullptr);

/// nu1 - 2*nuI: the complementary solution through the pair's intrinsic
/// component. The input must itself satisfy the RCE residual test.
std::vector<double> complementary_of(const ReducedRce& r, const RceTrajectory& nu1,
                                     const PrimitivePair& pair, double residual_tol = 1e-4);

enum class ForwardSearchOutcome { Attractor, NoAttractor, Inconclusive };

struct ForwardSearchResult {
  ForwardSearchOutcome outcome = ForwardSearchOutcome::Inconclusive;
  std::optional<PrimitivePair> pair;
  /// Set when probes converged onto a periodic attractor that itself carries
  /// escape events; the pair is then not extracted.
  bool attractor_has_escapes = false;
  std::optional<RceTrajectory> attractor_trajectory;
  std::vector<RceTrajectory> probes;
  std::string detail;
};

struct ForwardSearchOptions {
  IntegratorOptions ode;
  double convergence_tol = 1e-6;  // trailing-window sup distance
  double trailing_fraction = 0.2;
  double value_mask = 1e3;  // samples beyond this are treated as pole neighborhoods
};

/// Probes the RCE forward from several initial conditions. Pairwise
/// convergence over the trailing window certifies a real primitive pair
/// (an attractor); the pair is then recovered by decomposition. No
/// convergence signals a complex primitive.
ForwardSearchResult find_primitive_forward(const ReducedRce& r, const std::vector<double>& probe_ics,
                                           GridPtr grid, const ForwardSearchOptions& opts = {});

struct BackwardResult {
  PrimitivePair pair;
  double eq9_max_residual = 0.0;
  bool conjugate_forward_ok = false;
  double conjugate_max_deviation = 0.0;
};

/// Frozen-coefficient guess +j*sqrt(-omega02(t_far)); requires omega02 < 0 there.
std::complex<double> default_backward_guess(const ReducedRce& r, double t_far);

/// Back-propagates a complex guess from t_start_far across the window and
/// splits the trajectory into (nuR, nuIm). The conjugate is re-integrated
/// forward as an independent check that it also solves the RCE.
BackwardResult find_primitive_backward(const ReducedRce& r, std::complex<double> guess,
                                       double t_start_far, GridPtr grid,
                                       const IntegratorOptions& opts = {});

}  // namespace rce
