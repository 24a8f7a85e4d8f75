#include "rce/primitive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rce {

namespace {

constexpr double kGl3X[3] = {-0.774596669241483377, 0.0, 0.774596669241483377};
constexpr double kGl3W[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

// integral of 2*omega01(t)*Re(nu(t)) over one accepted direct step
double step_log_increment(const ReducedRce& r, const RkStep<2>& s) {
  double mid = 0.5 * (s.t0 + s.t1), half = 0.5 * (s.t1 - s.t0);
  double acc = 0.0;
  for (int q = 0; q < 3; ++q) {
    double t = mid + half * kGl3X[q];
    acc += kGl3W[q] * 2.0 * r.omega01(t) * hermite_eval(s, t)[0];
  }
  return half * acc;
}

/// Dense record of a scalar linear integration.
struct Dense1 {
  std::vector<RkStep<1>> steps;
  bool forward = true;

  double eval(double t) const {
    auto cmp = [this](const RkStep<1>& s, double tt) { return forward ? s.t1 < tt : s.t1 > tt; };
    auto it = std::lower_bound(steps.begin(), steps.end(), t, cmp);
    if (it == steps.end()) it = std::prev(it);
    return hermite_eval(*it, t)[0];
  }
};

// pdot = 2 omega01 (nu_src p - 1), p(t_from) = 0.  This is the linear
// constraint whose particular solution generates complementary members; the
// anchor point is chosen so the neglected homogeneous mode has decayed by
// e^{-anchor_log} everywhere it is used.
Dense1 solve_p(const ReducedRce& r, const std::function<double(double)>& nu_src, double t_from,
               double t_to, const IntegratorOptions& opts) {
  Dense1 out;
  out.forward = t_to > t_from;
  std::array<double, 1> y{0.0};
  AdaptiveRk45<1>::integrate(
      [&](double t, const std::array<double, 1>& p) -> std::array<double, 1> {
        double w1 = r.omega01(t);
        return {2.0 * w1 * (nu_src(t) * p[0] - 1.0)};
      },
      t_from, y, t_to, opts,
      [&](const RkStep<1>& s) {
        out.steps.push_back(s);
        return true;
      });
  if (out.steps.empty()) throw PrimitiveError("empty integrating-factor solve");
  return out;
}

struct Extension {
  RceFlow flow;
  bool anchor_reached = false;
};

// Extends the solution forward past the window until the integrating factor
// has decayed enough to anchor the first p-solve.
Extension extend_forward(const ReducedRce& r, std::complex<double> x0, double a, double t1,
                         double t_cap, double anchor, const IntegratorOptions& opts) {
  Extension ext;
  double log_acc = 0.0;
  double window_max = 0.0;
  bool reached = false;
  ext.flow = rce_flow(r, x0, a, t_cap, opts, [&](const DenseStep& d) {
    log_acc += step_log_increment(r, d.step);
    if (d.step.t1 <= t1 || d.step.t0 < t1) window_max = std::max(window_max, log_acc);
    if (d.step.t1 > t1 && log_acc - window_max >= anchor) {
      reached = true;
      return false;
    }
    return true;
  });
  ext.anchor_reached = reached;
  return ext;
}

}  // namespace

std::vector<double> PrimitivePair::attractor() const {
  std::vector<double> out(nuR.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = nuR[i] + nuI[i];
  return out;
}

std::vector<double> PrimitivePair::separatrix() const {
  std::vector<double> out(nuR.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = nuR[i] - nuI[i];
  return out;
}

std::vector<double> eq9_residual(const ReducedRce& r, const PrimitivePair& pair) {
  const TimeGrid& g = *pair.grid;
  std::vector<double> log_nuI(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    log_nuI[i] = pair.nuI[i] > 0.0 ? std::log(pair.nuI[i]) : quiet_nan();
  std::vector<double> dlog = derivative_samples(g, log_nuI);
  std::vector<double> res(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(dlog[i])) {
      res[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    double w1 = r.omega01(g[i]);
    res[i] = std::abs(pair.nuR[i] + dlog[i] / (2.0 * w1)) / (1.0 + std::abs(pair.nuR[i]));
  }
  return res;
}

std::vector<double> rce_residual(const ReducedRce& r, const TimeGrid& grid,
                                 const std::vector<double>& nu) {
  std::vector<double> d = derivative_samples(grid, nu);
  std::vector<double> res(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid[i];
    res[i] = std::abs(d[i] + r.omega01(t) * nu[i] * nu[i] - r.omega02(t)) /
             (1.0 + nu[i] * nu[i]);
  }
  return res;
}

std::vector<double> rce_residual(const ReducedRce& r, const TimeGrid& grid,
                                 const std::vector<std::complex<double>>& nu) {
  std::vector<double> re(grid.size()), im(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    re[i] = nu[i].real();
    im[i] = nu[i].imag();
  }
  std::vector<double> dre = derivative_samples(grid, re);
  std::vector<double> dim = derivative_samples(grid, im);
  std::vector<double> res(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid[i];
    std::complex<double> rhs = -r.omega01(t) * nu[i] * nu[i] + r.omega02(t);
    res[i] = std::abs(std::complex<double>(dre[i], dim[i]) - rhs) / (1.0 + std::norm(nu[i]));
  }
  return res;
}

// ---------------------------------------------------------------------------
// decomposition

namespace {

// First clean sample index at or after time `t_after` with a moderate value.
std::size_t clean_sample_after(const RceTrajectory& nu, double t_after, double mask) {
  const TimeGrid& g = *nu.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < t_after) continue;
    if (std::abs(nu.values[i]) <= mask) return i;
  }
  throw PrimitiveError("no pole-free stretch after the last escape event");
}

PrimitivePair decompose_real(const ReducedRce& r, const RceTrajectory& nu,
                             const DecompositionOptions& opts, DecompositionScratch* scratch) {
  const TimeGrid& g = *nu.grid;
  const double t0 = g.front(), t1 = g.back();
  const double span = t1 - t0;
  IntegratorOptions ode = opts.ode;

  // base point: after the last escape event of the input, re-based further if
  // the forward extension runs into another pole
  double t_after = t0;
  if (!nu.escape_events.empty())
    t_after = nu.escape_events.back().t_escape + 1e-9 * (1.0 + std::abs(t1));
  std::size_t base_idx = clean_sample_after(nu, t_after, 1e3);
  double a = g[base_idx];
  std::complex<double> x0 = nu.values[base_idx];

  Extension fwd;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 8) throw PrimitiveError("could not find an escape-free forward stretch");
    fwd = extend_forward(r, x0, a, t1, a + opts.extension_span_cap * span, opts.anchor_log + 10.0,
                         ode);
    // events inside the run force a re-base after the last re-entry
    if (fwd.flow.events.empty()) break;
    double t_re = fwd.flow.segments.back().t_begin;  // last switch-back
    bool found = false;
    double step_t = t_re;
    for (const DenseStep& d : fwd.flow.steps) {
      if (d.tag == VariableTag::Direct && d.step.t1 > t_re &&
          std::abs(std::complex<double>(d.step.y1[0], d.step.y1[1])) <= 1e3) {
        step_t = d.step.t1;
        x0 = {d.step.y1[0], d.step.y1[1]};
        found = true;
        break;
      }
    }
    if (!found) throw PrimitiveError("trajectory does not settle after its escape event");
    a = step_t;
  }
  const double t_ext = fwd.flow.t_stop;

  // first p-solve, anchored at the far end; yields the separatrix member
  Dense1 p1 = solve_p(
      r, [&](double t) { return fwd.flow.eval(t).real(); }, t_ext, a, ode);
  auto nu_minus_on = [&](double t) { return fwd.flow.eval(t).real() - 2.0 / p1.eval(t); };
  double nm_a = nu_minus_on(a);
  if (!std::isfinite(nm_a)) throw PrimitiveError("integrating factor degenerated at the base point");

  // the minus member integrates stably backward; extend it below the window
  // until the accumulated log integrating factor exceeds its in-window
  // maximum by the anchor margin
  Extension bwd;
  {
    double t_floor = a - opts.extension_span_cap * span;
    double lo_domain = std::max(r.omega01.domain().lo, r.omega02.domain().lo);
    if (std::isfinite(lo_domain)) t_floor = std::max(t_floor, lo_domain);
    for (double s : r.singular_points)
      if (s < a) t_floor = std::max(t_floor, s + 1e-6 * (a - s));
    IntegratorOptions bopts = ode;
    bopts.escape_cap = 1e9;  // large |nu| here means a coefficient singularity, not a pole
    double log_acc = 0.0;    // oriented integral of 2 omega01 nu_minus from a
    double window_max = 0.0;
    bool reached = false;
    bwd.flow = rce_flow(r, nm_a, a, t_floor, bopts, [&](const DenseStep& d) {
      log_acc += step_log_increment(r, d.step);
      if (d.step.t1 >= t0) window_max = std::max(window_max, log_acc);
      if (d.step.t1 < t0 && log_acc - window_max >= opts.anchor_log + 10.0) {
        reached = true;
        return false;
      }
      return true;
    });
    bwd.anchor_reached = reached;
  }
  const double t_pre = bwd.flow.t_stop;

  auto nu_minus_any = [&](double t) {
    return t < a ? bwd.flow.eval(t).real() : nu_minus_on(std::min(t, t_ext));
  };

  // second p-solve, anchored below the window; its reciprocal is -nuI
  Dense1 p2 = solve_p(r, nu_minus_any, t_pre, t1, ode);

  PrimitivePair pair;
  pair.grid = nu.grid;
  pair.kind = PairKind::Real;
  pair.nuR.resize(g.size());
  pair.nuI.resize(g.size());
  if (scratch) {
    scratch->g = {nu.grid, std::vector<double>(g.size(), quiet_nan())};
    scratch->g_p = {nu.grid, std::vector<double>(g.size(), quiet_nan())};
    scratch->k1_used = -2.0;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    double t = g[i];
    double w = p2.eval(t);
    double nm = nu_minus_any(t);
    if (!(w < 0.0)) throw PrimitiveError("decomposition produced a nonpositive intrinsic value");
    pair.nuI[i] = -1.0 / w;
    pair.nuR[i] = nm + pair.nuI[i];
    if (scratch) {
      if (t >= a && t <= t_ext) scratch->g.values[i] = p1.eval(t);
      scratch->g_p.values[i] = w;
    }
  }
  return pair;
}

// Imaginary kind: every real solution is the cot form of the pair, so the
// phase advances by exactly a half turn between consecutive escape events.
// Shooting on (phase, magnitude) at the midpoint of one inter-event stretch
// pins the intrinsic component; the complex primitive is then propagated
// across the whole window.
PrimitivePair decompose_imaginary(const ReducedRce& r, const RceTrajectory& nu,
                                  const DecompositionOptions& opts) {
  const TimeGrid& g = *nu.grid;
  IntegratorOptions ode = opts.ode;

  // complex input is already a primitive trajectory; split it
  if (!nu.real_valued) {
    PrimitivePair pair;
    pair.grid = nu.grid;
    pair.kind = PairKind::Imaginary;
    pair.nuR.resize(g.size());
    pair.nuI.resize(g.size());
    double sign = 0.0;
    for (const auto& v : nu.values) sign += v.imag();
    sign = sign >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      pair.nuR[i] = nu.values[i].real();
      pair.nuI[i] = sign * nu.values[i].imag();
      if (!(pair.nuI[i] > 0.0))
        throw PrimitiveError("complex trajectory touches the real axis");
    }
    return pair;
  }

  // re-integrate the member from a clean mid-window sample for dense data
  std::size_t mid_idx = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = g.size() / 4; i < 3 * g.size() / 4; ++i) {
    double m = std::abs(nu.values[i]);
    if (m < best) {
      best = m;
      mid_idx = i;
    }
  }
  std::complex<double> x_mid = nu.values[mid_idx].real();
  RceFlow left = rce_flow(r, x_mid, g[mid_idx], g.front(), ode);
  RceFlow right = rce_flow(r, x_mid, g[mid_idx], g.back(), ode);
  std::vector<double> events;
  for (const auto& e : left.events) events.push_back(e.t_escape);
  for (const auto& e : right.events) events.push_back(e.t_escape);
  std::sort(events.begin(), events.end());
  if (events.size() < 2)
    throw PrimitiveError(
        "imaginary-kind decomposition needs at least two escape events in the window");

  // widest inter-event stretch
  std::size_t k_best = 0;
  for (std::size_t k = 0; k + 1 < events.size(); ++k)
    if (events[k + 1] - events[k] > events[k_best + 1] - events[k_best]) k_best = k;
  const double tau1 = events[k_best], tau2 = events[k_best + 1];
  const double gap = tau2 - tau1;
  const double delta = 1e-6 * gap;
  auto nu_data = [&](double t) {
    return (t < g[mid_idx] ? left.eval(t) : right.eval(t)).real();
  };

  const double t_star = 0.5 * (tau1 + tau2);
  // state u = (nuIm, psi): nuImdot = -2 w1 nuIm (nu - nuIm cot psi), psidot = w1 nuIm
  auto field = [&](double t, const std::array<double, 2>& u) -> std::array<double, 2> {
    double w1 = r.omega01(t);
    double nuR_local = nu_data(t) - u[0] / std::tan(u[1]);
    return {-2.0 * w1 * u[0] * nuR_local, w1 * u[0]};
  };
  auto shoot = [&](double m_star, double psi_star, double& res1, double& res2) {
    std::array<double, 2> u{m_star, psi_star};
    std::array<double, 2> ul = u;
    AdaptiveRk45<2>::integrate(field, t_star, u, tau1 + delta, ode, [&](const RkStep<2>& s) {
      ul = s.y1;
      return true;
    });
    std::array<double, 2> ur = u;
    AdaptiveRk45<2>::integrate(field, t_star, u, tau2 - delta, ode, [&](const RkStep<2>& s) {
      ur = s.y1;
      return true;
    });
    res1 = ul[1] - delta * r.omega01(tau1 + delta) * ul[0];          // psi(tau1) = 0
    res2 = ur[1] + delta * r.omega01(tau2 - delta) * ur[0] - M_PI;   // psi(tau2) = pi
  };

  double m_star = M_PI / (r.omega01(t_star) * gap);
  double psi_star = 0.5 * M_PI;
  double r1 = 0, r2 = 0;
  shoot(m_star, psi_star, r1, r2);
  for (int it = 0; it < 60; ++it) {
    if (std::abs(r1) + std::abs(r2) < 1e-11) break;
    double dm = 1e-7 * (1.0 + std::abs(m_star));
    double dp = 1e-7;
    double a1, a2, b1, b2;
    shoot(m_star + dm, psi_star, a1, a2);
    shoot(m_star, psi_star + dp, b1, b2);
    double j11 = (a1 - r1) / dm, j12 = (b1 - r1) / dp;
    double j21 = (a2 - r2) / dm, j22 = (b2 - r2) / dp;
    double det = j11 * j22 - j12 * j21;
    if (det == 0.0) break;
    double step_m = (-r1 * j22 + r2 * j12) / det;
    double step_p = (-j11 * r2 + j21 * r1) / det;
    double damp = 1.0;
    if (m_star + step_m <= 0.0) damp = 0.5 * m_star / std::abs(step_m);
    m_star += damp * step_m;
    psi_star = std::clamp(psi_star + damp * step_p, 1e-6, M_PI - 1e-6);
    shoot(m_star, psi_star, r1, r2);
  }
  if (std::abs(r1) + std::abs(r2) > 1e-7)
    throw PrimitiveError("phase shooting for the imaginary intrinsic did not converge");

  std::complex<double> prim{nu_data(t_star) - m_star / std::tan(psi_star), m_star};
  RceFlow pl = rce_flow(r, prim, t_star, g.front(), ode);
  RceFlow pr = rce_flow(r, prim, t_star, g.back(), ode);

  PrimitivePair pair;
  pair.grid = nu.grid;
  pair.kind = PairKind::Imaginary;
  pair.nuR.resize(g.size());
  pair.nuI.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::complex<double> v = g[i] < t_star ? pl.eval(g[i]) : pr.eval(g[i]);
    pair.nuR[i] = v.real();
    pair.nuI[i] = v.imag();
    if (!(pair.nuI[i] > 0.0))
      throw PrimitiveError("propagated primitive touched the real axis");
  }
  return pair;
}

}  // namespace

PrimitivePair decompose_to_primitive(const ReducedRce& r, const RceTrajectory& nu,
                                     std::optional<PairKind> kind_hint,
                                     const DecompositionOptions& opts,
                                     DecompositionScratch* scratch) {
  PairKind kind;
  if (kind_hint) {
    kind = *kind_hint;
  } else {
    // attractor present <=> real primitive pair
    ForwardSearchOptions fopts;
    fopts.ode = opts.ode;
    auto probe = find_primitive_forward(r, {0.0, 1.0, -1.0}, nu.grid, fopts);
    kind = probe.outcome == ForwardSearchOutcome::Attractor ? PairKind::Real : PairKind::Imaginary;
  }
  return kind == PairKind::Real ? decompose_real(r, nu, opts, scratch)
                                : decompose_imaginary(r, nu, opts);
}

std::vector<double> complementary_of(const ReducedRce& r, const RceTrajectory& nu1,
                                     const PrimitivePair& pair, double residual_tol) {
  const TimeGrid& g = *nu1.grid;
  std::vector<double> values(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) values[i] = nu1.values[i].real();
  std::vector<double> res = rce_residual(r, g, values);
  for (std::size_t i = 2; i + 2 < g.size(); ++i) {
    if (std::abs(values[i]) > 1e3) continue;  // pole neighborhood
    bool near_pole = false;
    for (const auto& e : nu1.escape_events)
      if (std::abs(g[i] - e.t_escape) < 0.02 * (g.back() - g.front())) near_pole = true;
    if (near_pole) continue;
    if (res[i] > residual_tol)
      throw PrimitiveError("input does not satisfy the RCE residual test");
  }
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = values[i] - 2.0 * pair.nuI[i];
  return out;
}

ForwardSearchResult find_primitive_forward(const ReducedRce& r,
                                           const std::vector<double>& probe_ics, GridPtr grid,
                                           const ForwardSearchOptions& opts) {
  ForwardSearchResult res;
  std::vector<std::size_t> ok_probe;
  std::size_t blowups = 0;
  for (double ic : probe_ics) {
    try {
      res.probes.push_back(integrate_rce(r, ic, grid, opts.ode));
      ok_probe.push_back(res.probes.size() - 1);
    } catch (const IntegrationError& e) {
      ++blowups;
      res.detail += std::string("probe failed: ") + e.what() + "; ";
    }
  }
  if (ok_probe.size() < 2) {
    res.outcome = ForwardSearchOutcome::Inconclusive;
    res.detail += blowups == probe_ics.size() ? "all probes escaped without return" : "too few probes";
    return res;
  }

  const std::size_t n = grid->size();
  const std::size_t tail = std::max<std::size_t>(4, static_cast<std::size_t>(opts.trailing_fraction * n));
  bool converged = true;
  for (std::size_t ia = 0; ia < ok_probe.size() && converged; ++ia) {
    for (std::size_t ib = ia + 1; ib < ok_probe.size() && converged; ++ib) {
      const auto& A = res.probes[ok_probe[ia]].values;
      const auto& B = res.probes[ok_probe[ib]].values;
      std::size_t used = 0;
      double sup = 0.0;
      for (std::size_t k = n - tail; k < n; ++k) {
        double va = A[k].real(), vb = B[k].real();
        if (std::abs(va) > opts.value_mask || std::abs(vb) > opts.value_mask) continue;
        ++used;
        sup = std::max(sup, std::abs(va - vb) / (1.0 + std::min(std::abs(va), std::abs(vb))));
      }
      if (used < tail / 2 || sup > opts.convergence_tol) converged = false;
    }
  }
  if (!converged) {
    res.outcome = ForwardSearchOutcome::NoAttractor;
    return res;
  }

  // favor a probe without escape events for the pair extraction
  std::size_t chosen = ok_probe[0];
  for (std::size_t i : ok_probe)
    if (res.probes[i].escape_events.size() < res.probes[chosen].escape_events.size()) chosen = i;
  res.outcome = ForwardSearchOutcome::Attractor;
  res.attractor_trajectory = res.probes[chosen];
  double tail_start = (*grid)[n - tail];
  for (const auto& e : res.probes[chosen].escape_events)
    if (e.t_escape >= tail_start) res.attractor_has_escapes = true;
  try {
    DecompositionOptions dopts;
    dopts.ode = opts.ode;
    res.pair = decompose_to_primitive(r, res.probes[chosen], PairKind::Real, dopts);
  } catch (const PrimitiveError& e) {
    res.detail += std::string("pair extraction failed: ") + e.what();
    res.pair.reset();
  }
  return res;
}

std::complex<double> default_backward_guess(const ReducedRce& r, double t_far) {
  double w2 = r.omega02(t_far);
  if (!(w2 < 0.0))
    throw PrimitiveError("no frozen-coefficient guess: omega02(t_far) is not negative");
  return {0.0, std::sqrt(-w2)};
}

BackwardResult find_primitive_backward(const ReducedRce& r, std::complex<double> guess,
                                       double t_start_far, GridPtr grid,
                                       const IntegratorOptions& opts) {
  if (guess.imag() == 0.0) throw PrimitiveError("backward guess must be complex");
  const TimeGrid& g = *grid;
  if (t_start_far < g.front())
    throw PrimitiveError("t_start_far must not precede the analysis window");
  RceFlow back = rce_flow(r, guess, t_start_far, g.front(), opts);
  std::optional<RceFlow> fwd;
  if (t_start_far < g.back()) fwd = rce_flow(r, guess, t_start_far, g.back(), opts);

  BackwardResult out;
  out.pair.grid = grid;
  out.pair.kind = PairKind::Imaginary;
  out.pair.nuR.resize(g.size());
  out.pair.nuI.resize(g.size());
  double sign = guess.imag() > 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::complex<double> v = g[i] <= t_start_far ? back.eval(g[i]) : fwd->eval(g[i]);
    out.pair.nuR[i] = v.real();
    out.pair.nuI[i] = sign * v.imag();
    if (!(out.pair.nuI[i] > 0.0))
      throw PrimitiveError("back-propagated trajectory touched the real axis; enlarge t_start_far");
  }

  std::vector<double> res = eq9_residual(r, out.pair);
  for (std::size_t i = 2; i + 2 < g.size(); ++i) out.eq9_max_residual = std::max(out.eq9_max_residual, res[i]);

  // conjugate check: the mirrored trajectory must solve the RCE forward
  std::complex<double> c0{out.pair.nuR.front(), -sign * out.pair.nuI.front()};
  RceFlow conj_flow = rce_flow(r, c0, g.front(), g.back(), opts);
  double max_dev = 0.0;
  for (std::size_t k = 0; k < 33; ++k) {
    std::size_t i = k * (g.size() - 1) / 32;
    std::complex<double> expect{out.pair.nuR[i], -sign * out.pair.nuI[i]};
    std::complex<double> got = conj_flow.eval(g[i]);
    max_dev = std::max(max_dev, std::abs(got - expect) / (1.0 + std::abs(expect)));
  }
  out.conjugate_max_deviation = max_dev;
  out.conjugate_forward_ok = max_dev <= 1e-4;
  return out;
}

}  // namespace rce
