#include "rce/floquet.hpp"

#include <algorithm>
#include <cmath>

namespace rce {

double dc_average(const TimeGrid& grid, const std::vector<double>& values, double T) {
  double t_end = grid.back();
  double t_begin = t_end - T;
  if (t_begin < grid.front() - 1e-9 * (1.0 + std::abs(grid.front())))
    throw FloquetError("window shorter than one period");
  std::vector<double> I = cumulative_integral(grid, values, 0);
  double total = I.back() - interp_samples(grid, I, t_begin);
  return total / T;
}

std::complex<double> dc_average(const TimeGrid& grid,
                                const std::vector<std::complex<double>>& values, double T) {
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  return {dc_average(grid, re, T), dc_average(grid, im, T)};
}

PeriodicityReport check_rce_periodicity(const RceTrajectory& traj, double T, double tol,
                                        double value_mask) {
  const TimeGrid& g = *traj.grid;
  if (g.back() - g.front() < 3.0 * T - 1e-9)
    throw FloquetError("periodicity check needs at least three periods");
  PeriodicityReport rep;
  std::vector<double> re(g.size()), im(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    re[i] = traj.values[i].real();
    im[i] = traj.values[i].imag();
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double t = g[i];
    if (t < g.back() - T) continue;
    double t_prev = t - T;
    std::complex<double> now = traj.values[i];
    std::complex<double> before{interp_samples(g, re, t_prev), interp_samples(g, im, t_prev)};
    if (std::abs(now) > value_mask || std::abs(before) > value_mask) continue;
    bool near_event = false;
    for (const auto& e : traj.escape_events) {
      if (std::abs(t - e.t_escape) < 0.01 * T || std::abs(t_prev - e.t_escape) < 0.01 * T)
        near_event = true;
    }
    if (near_event) continue;
    sup = std::max(sup, std::abs(now - before) / (1.0 + std::abs(before)));
  }
  rep.deviation = sup;

  // escape events must repeat with the period
  double worst_offset = 0.0;
  for (const auto& e : traj.escape_events) {
    if (e.t_escape + T > g.back()) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& n : traj.escape_events) best = std::min(best, std::abs(n.t_escape - (e.t_escape + T)));
    worst_offset = std::max(worst_offset, best);
  }
  rep.event_offset = worst_offset;
  rep.periodic = sup <= tol && worst_offset <= tol * (1.0 + T);
  return rep;
}

namespace {

bool coefficients_are_periodic(const ReducedRce& r, double T, double t_lo, double t_hi) {
  const int n = 64;
  for (int i = 0; i <= n; ++i) {
    double t = t_lo + (t_hi - T - t_lo) * i / static_cast<double>(n);
    for (const CoefficientFn* c : {&r.omega01, &r.omega02, &r.alpha, &r.sigma0}) {
      double a = (*c)(t), b = (*c)(t + T);
      if (std::abs(a - b) > 1e-8 * (1.0 + std::abs(a))) return false;
    }
  }
  return true;
}

}  // namespace

std::complex<double> periodic_primitive_ic(const std::function<Mat2(double)>& A,
                                           const ReducedRce& r, double t0, double T,
                                           const IntegratorOptions& opts) {
  Mat2 M = integrate_fundamental2(A, t0, t0 + T, opts);
  auto mu = mat2_eigenvalues(M);
  double alpha0 = r.alpha(t0);
  auto direction = [&](const std::complex<double>& m) -> std::complex<double> {
    // eigenvector of [[M11, M12],[M21, M22]] for eigenvalue m: (M12, m - M11)
    if (std::abs(M[0][1]) > 1e-300) return (m - M[0][0]) / M[0][1] + alpha0;
    return M[1][0] / (m - M[1][1]) + alpha0;  // fallback via the second row
  };
  if (std::abs(mu[0].imag()) > 1e-12 * std::abs(mu[0])) {
    std::complex<double> nu0 = direction(mu[0]);
    if (nu0.imag() < 0.0) nu0 = std::conj(nu0);
    return nu0;
  }
  // real multipliers: the larger one is the attractor direction
  std::complex<double> m = std::abs(mu[0]) >= std::abs(mu[1]) ? mu[0] : mu[1];
  return direction(m);
}

PrimitivePair periodic_pair_from_monodromy(const std::function<Mat2(double)>& A,
                                           const ReducedRce& r, GridPtr grid, double T,
                                           const IntegratorOptions& opts) {
  const TimeGrid& g = *grid;
  std::complex<double> nu0 = periodic_primitive_ic(A, r, g.front(), T, opts);
  if (std::abs(nu0.imag()) <= 1e-10)
    throw FloquetError("monodromy eigendirection is real; no imaginary-kind periodic primitive");
  RceFlow flow = rce_flow(r, nu0, g.front(), g.back(), opts);
  PrimitivePair pair;
  pair.grid = grid;
  pair.kind = PairKind::Imaginary;
  pair.nuR.resize(g.size());
  pair.nuI.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::complex<double> v = flow.eval(g[i]);
    pair.nuR[i] = v.real();
    pair.nuI[i] = v.imag();
    if (!(pair.nuI[i] > 0.0)) throw FloquetError("periodic primitive touched the real axis");
  }
  return pair;
}

FloquetResult floquet_exponents(const std::function<Mat2(double)>& A, const ReducedRce& r,
                                const PrimitivePair& pair, double T,
                                const IntegratorOptions& opts) {
  const TimeGrid& g = *pair.grid;
  FloquetResult out;
  out.T = T;
  out.coefficients_periodic = coefficients_are_periodic(r, T, g.front(), g.back());
  if (!out.coefficients_periodic)
    throw FloquetError("coefficients are not periodic with the stated period");
  if (g.back() - g.front() < 2.0 * T) throw FloquetError("window must cover two periods");

  EigenvaluePair lambda = dynamic_eigenvalues(r, pair);
  out.r1 = dc_average(g, lambda.lambda1, T);
  out.r2 = dc_average(g, lambda.lambda2, T);

  // independently integrated monodromy over the last full period
  double t_star = g.back() - T;
  out.monodromy = integrate_fundamental2(A, t_star, t_star + T, opts);
  out.multipliers = mat2_eigenvalues(out.monodromy);

  std::complex<double> product = out.multipliers[0] * out.multipliers[1];
  std::complex<double> predicted = std::exp((out.r1 + out.r2) * T);
  out.multiplier_product_error = std::abs(product - predicted) / std::abs(product);

  // Abel: det of the monodromy equals e^{int tr A} over the period
  std::vector<double> tr(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) tr[i] = mat2_trace(A(g[i]));
  double tr_int = dc_average(g, tr, T) * T;
  out.det_vs_trace_error = std::abs(mat2_det(out.monodromy) - std::exp(tr_int)) /
                           std::abs(mat2_det(out.monodromy));

  // moduli comparison (sorted), phases checked for the half-turn convention
  double e1 = std::abs(std::exp(out.r1 * T)), e2 = std::abs(std::exp(out.r2 * T));
  double m1 = std::abs(out.multipliers[0]), m2 = std::abs(out.multipliers[1]);
  if ((e1 < e2) != (m1 < m2)) std::swap(m1, m2);
  out.modulus_agreement =
      std::max(std::abs(e1 - m1) / std::max(m1, 1e-300), std::abs(e2 - m2) / std::max(m2, 1e-300));
  double phase_mono = std::arg(out.multipliers[0]);
  double phase_dc = std::remainder(out.r1.imag() * T, 2.0 * M_PI);
  double phase_gap = std::abs(std::remainder(phase_mono - phase_dc, 2.0 * M_PI));
  out.phase_convention_flagged = std::abs(phase_gap - M_PI) < 0.2;

  // periodicity of the primitive pair itself
  {
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double t = g[i];
      if (t < g.back() - T) continue;
      double prevR = interp_samples(g, pair.nuR, t - T);
      double prevI = interp_samples(g, pair.nuI, t - T);
      if (std::abs(pair.nuR[i]) > 1e3 || std::abs(prevR) > 1e3) continue;
      sup = std::max(sup, std::abs(pair.nuR[i] - prevR) / (1.0 + std::abs(prevR)));
      sup = std::max(sup, std::abs(pair.nuI[i] - prevI) / (1.0 + std::abs(prevI)));
    }
    out.rce_deviation = sup;
    out.rce_periodic = sup <= 1e-4;
  }

  // Q(t) = V(t) diag(e^{p1}, e^{p2}) with the DC ramps removed
  {
    std::vector<double> l1re(g.size()), l1im(g.size()), l2re(g.size()), l2im(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      l1re[i] = lambda.lambda1[i].real();
      l1im[i] = lambda.lambda1[i].imag();
      l2re[i] = lambda.lambda2[i].real();
      l2im[i] = lambda.lambda2[i].imag();
    }
    std::vector<double> P1re = cumulative_integral(g, l1re), P1im = cumulative_integral(g, l1im);
    std::vector<double> P2re = cumulative_integral(g, l2re), P2im = cumulative_integral(g, l2im);
    auto q_entry = [&](std::size_t i) -> std::array<std::complex<double>, 4> {
      double t = g[i];
      std::complex<double> p1{P1re[i] - out.r1.real() * (t - g.front()),
                              P1im[i] - out.r1.imag() * (t - g.front())};
      std::complex<double> p2{P2re[i] - out.r2.real() * (t - g.front()),
                              P2im[i] - out.r2.imag() * (t - g.front())};
      std::complex<double> e1c = std::exp(p1), e2c = std::exp(p2);
      double alpha = r.alpha(t);
      std::complex<double> nu1, nu2;
      if (pair.kind == PairKind::Real) {
        nu1 = pair.nuR[i] + pair.nuI[i];
        nu2 = pair.nuR[i] - pair.nuI[i];
      } else {
        nu1 = {pair.nuR[i], pair.nuI[i]};
        nu2 = std::conj(nu1);
      }
      return {e1c, e2c, (nu1 - alpha) * e1c, (nu2 - alpha) * e2c};
    };
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double t = g[i];
      if (t < g.back() - T) continue;
      double t_prev = t - T;
      std::size_t j = g.lower_index(t_prev);
      // compare against the nearest sample one period back (grids are fine
      // enough that the sample offset is negligible for the verdict)
      if (std::abs(g[j] - t_prev) > std::abs(g[j + 1] - t_prev)) ++j;
      auto now = q_entry(i), before = q_entry(j);
      for (int kk = 0; kk < 4; ++kk) {
        double scale = 1.0 + std::abs(before[kk]);
        sup = std::max(sup, std::abs(now[kk] - before[kk]) / scale);
      }
    }
    out.q_deviation = sup;
    out.q_periodic = sup <= 1e-3;
  }
  return out;
}

}  // namespace rce
