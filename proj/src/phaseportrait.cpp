#include "rce/phaseportrait.hpp"

#include <algorithm>
#include <cmath>

namespace rce {

const char* portrait_kind_name(PortraitKind k) {
  switch (k) {
    case PortraitKind::AttractorSeparatrix: return "attractor_separatrix";
    case PortraitKind::RepetitiveEscape: return "repetitive_escape";
    case PortraitKind::Degenerate: return "degenerate";
    case PortraitKind::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* predisposition_name(Predisposition p) {
  switch (p) {
    case Predisposition::StableCapable: return "stable_capable";
    case Predisposition::EscapePredisposed: return "escape_predisposed";
    case Predisposition::Mixed: return "mixed";
  }
  return "?";
}

Predisposition sign_predisposition(const ReducedRce& r, const Window& w) {
  const int n = 1024;
  bool any_pos = false, any_neg = false;
  for (int i = 0; i <= n; ++i) {
    double t = w.t0 + (w.t1 - w.t0) * i / static_cast<double>(n);
    double v;
    try {
      v = r.omega02(t);
    } catch (const EvalError&) {
      continue;
    }
    if (v > 0.0) any_pos = true;
    if (v < 0.0) any_neg = true;
  }
  if (any_pos && any_neg) return Predisposition::Mixed;
  if (any_neg) return Predisposition::EscapePredisposed;
  return Predisposition::StableCapable;
}

PortraitReport classify_portrait(const ReducedRce& r, const PrimitivePair& pair,
                                 const PortraitOptions& opts) {
  const TimeGrid& g = *pair.grid;
  PortraitReport rep;
  rep.predisposition = sign_predisposition(r, Window{g.front(), g.back()});

  double min_nuI = *std::min_element(pair.nuI.begin(), pair.nuI.end());
  if (!(min_nuI > 1e-12)) {
    rep.kind = PortraitKind::Degenerate;
    rep.detail = "intrinsic component vanishes on the grid";
    return rep;
  }

  if (pair.kind == PairKind::Imaginary) {
    rep.kind = PortraitKind::RepetitiveEscape;
    // escape cadence from a representative real trajectory
    try {
      RceTrajectory probe = integrate_rce(r, pair.nuR.front(), pair.grid, opts.ode);
      if (probe.escape_events.size() >= 2) {
        double total = probe.escape_events.back().t_escape - probe.escape_events.front().t_escape;
        rep.escape_cadence = total / static_cast<double>(probe.escape_events.size() - 1);
      }
      rep.detail = std::to_string(probe.escape_events.size()) + " escape events observed";
    } catch (const IntegrationError& e) {
      rep.detail = std::string("cadence probe failed: ") + e.what();
    }
    return rep;
  }

  rep.attractor = pair.attractor();
  rep.separatrix = pair.separatrix();
  double nuI0 = pair.nuI.front();
  double delta = opts.probe_delta_factor * nuI0;
  double sep0 = rep.separatrix.front(), att0 = rep.attractor.front();
  const double ics[6] = {sep0 + delta, sep0 - delta,       att0 + delta,
                         att0 - delta, att0 + 5.0 * nuI0,  sep0 - 5.0 * nuI0};
  const bool below_separatrix[6] = {false, true, false, false, false, true};

  std::size_t tail = std::max<std::size_t>(4, g.size() / 5);
  bool ok = true;
  std::string why;
  for (int k = 0; k < 6 && ok; ++k) {
    RceTrajectory traj;
    try {
      traj = integrate_rce(r, ics[k], pair.grid, opts.ode);
    } catch (const IntegrationError& e) {
      ok = false;
      why = std::string("probe did not complete: ") + e.what();
      break;
    }
    // below the separatrix: exactly one escape before convergence
    if (below_separatrix[k] && traj.escape_events.empty()) {
      ok = false;
      why = "below-separatrix probe did not escape";
      break;
    }
    double sup = 0.0;
    std::size_t used = 0;
    for (std::size_t i = g.size() - tail; i < g.size(); ++i) {
      double v = traj.values[i].real();
      if (std::abs(v) > 1e3 || std::abs(rep.attractor[i]) > 1e3) continue;
      ++used;
      sup = std::max(sup,
                     std::abs(v - rep.attractor[i]) / (1.0 + std::abs(rep.attractor[i])));
    }
    if (used < tail / 2 || sup > opts.convergence_eps) {
      ok = false;
      why = "probe failed to converge to the attractor (sup " + std::to_string(sup) + ")";
    }
  }
  if (!ok) {
    rep.kind = PortraitKind::Inconclusive;
    rep.detail = why;
    return rep;
  }
  rep.kind = PortraitKind::AttractorSeparatrix;
  for (const double v : rep.attractor)
    if (std::abs(v) > 1e6) rep.attractor_has_escapes = true;
  return rep;
}

double measure_rce_transient(const ReducedRce& r, const PrimitivePair& pair, double ic, double eps,
                             const IntegratorOptions& opts) {
  if (pair.kind != PairKind::Real) throw PortraitError("transient is defined for real pairs");
  const TimeGrid& g = *pair.grid;
  RceTrajectory traj = integrate_rce(r, ic, pair.grid, opts);
  std::vector<double> attractor = pair.attractor();
  std::vector<double> nu(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) nu[i] = traj.values[i].real();

  auto inside = [&](std::size_t i) {
    double band = eps * (1.0 + std::abs(attractor[i]));
    return std::abs(nu[i] - attractor[i]) < band;
  };
  std::size_t first_bad_from_end = g.size();  // index of last violation
  for (std::size_t i = g.size(); i-- > 0;) {
    if (!inside(i)) {
      first_bad_from_end = i;
      break;
    }
  }
  if (first_bad_from_end == g.size()) return 0.0;  // inside the band throughout
  if (first_bad_from_end + 1 >= g.size())
    throw PortraitError("trajectory never settles inside the band within the window");
  std::size_t k = first_bad_from_end;
  // refine the crossing between samples k and k+1
  double lo = g[k], hi = g[k + 1];
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    double a = interp_samples(g, attractor, mid);
    double v = interp_samples(g, nu, mid);
    bool in = std::abs(v - a) < eps * (1.0 + std::abs(a));
    if (in) hi = mid; else lo = mid;
    if (hi - lo < 1e-10 * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi) - g.front();
}

}  // namespace rce
