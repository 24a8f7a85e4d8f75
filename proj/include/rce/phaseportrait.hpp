#pragma once

#include "rce/primitive.hpp"

namespace rce {

class PortraitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PortraitKind { AttractorSeparatrix, RepetitiveEscape, Degenerate, Inconclusive };
enum class Predisposition { StableCapable, EscapePredisposed, Mixed };

const char* portrait_kind_name(PortraitKind k);
const char* predisposition_name(Predisposition p);

struct PortraitReport {
  PortraitKind kind = PortraitKind::Inconclusive;
  Predisposition predisposition = Predisposition::Mixed;
  std::vector<double> attractor;   // nuR + nuI samples (real kind)
  std::vector<double> separatrix;  // nuR - nuI samples (real kind)
  double escape_cadence = 0.0;     // mean gap between events (imaginary kind)
  bool attractor_has_escapes = false;
  std::string detail;
};

struct PortraitOptions {
  IntegratorOptions ode;
  double probe_delta_factor = 0.1;  // delta = factor * |nuI| for the near-primitive probes
  double convergence_eps = 1e-3;
};

/// Classifies the flow around a known primitive pair: real pairs give the
/// attractor/separatrix picture (verified by probes on both sides of the
/// separatrix), imaginary pairs give parallel flow with repeated escapes.
PortraitReport classify_portrait(const ReducedRce& r, const PrimitivePair& pair,
                                 const PortraitOptions& opts = {});

/// Sign test on (omega01, omega02): omega02 <= 0 throughout predisposes the
/// flow to finite escape, omega02 >= 0 throughout permits asymptotic
/// stability, anything else is mixed.
Predisposition sign_predisposition(const ReducedRce& r, const Window& w);

/// First time after which the trajectory from `ic` stays inside the band
/// |nu - attractor| < eps*(1 + |attractor|) for the rest of the window,
/// reported as elapsed time from the window start.
double measure_rce_transient(const ReducedRce& r, const PrimitivePair& pair, double ic, double eps,
                             const IntegratorOptions& opts = {});

}  // namespace rce
