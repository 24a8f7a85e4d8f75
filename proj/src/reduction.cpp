#include "rce/reduction.hpp"

#include <algorithm>
#include <cmath>

namespace rce {

namespace {

std::vector<double> merge_singular(std::initializer_list<const CoefficientFn*> coeffs) {
  std::vector<double> pts;
  for (const CoefficientFn* c : coeffs)
    pts.insert(pts.end(), c->singular_points().begin(), c->singular_points().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

bool near_singular(double t, const std::vector<double>& pts) {
  for (double p : pts)
    if (std::abs(t - p) <= 1e-9 * (1.0 + std::abs(p))) return true;
  return false;
}

// Samples omega01 on the window (skipping declared singular points) and
// rejects reductions where it is not strictly positive; sign-changing
// omega01 systems are out of scope.
void check_omega01_positive(const CoefficientFn& omega01, const Window& w,
                            const std::vector<double>& singular) {
  const int n = 1024;
  for (int i = 0; i <= n; ++i) {
    double t = w.t0 + (w.t1 - w.t0) * i / static_cast<double>(n);
    if (near_singular(t, singular)) continue;
    double v;
    try {
      v = omega01(t);
    } catch (const EvalError&) {
      continue;
    }
    if (!(v > 0.0))
      throw ReductionError("omega01 is not strictly positive on the window (t = " +
                           std::to_string(t) + ")");
  }
}

}  // namespace

ReducedRce reduce_general_riccati(const GeneralRiccati& g, const Window& window) {
  std::vector<double> singular = merge_singular({&g.s2, &g.s1, &g.s0});
  // eta = -s1/(2 s2); omega01 = -s2; omega02 = s0 - s2 eta^2 - etadot
  Expr eta_e = simplify(-g.s1.value() / (Expr::constant(2.0) * g.s2.value()));
  CoefficientFn eta(eta_e, g.s2.domain(), singular);
  Expr omega01_e = simplify(-g.s2.value());
  Expr omega02_e =
      simplify(g.s0.value() - g.s2.value() * pow(eta_e, Rational(2, 1)) - eta.derivative());
  ReducedRce r{CoefficientFn(omega01_e, g.s2.domain(), singular),
               CoefficientFn(omega02_e, g.s0.domain(), singular),
               eta,
               CoefficientFn::from_constant(0.0),
               CoefficientFn(simplify(omega01_e * eta_e), g.s2.domain(), singular),
               window,
               {}};
  r.singular_points = merge_singular({&r.omega01, &r.omega02, &r.eta, &r.sigma0});
  check_omega01_positive(r.omega01, window, r.singular_points);
  return r;
}

ReducedRce scalar_system_to_rce(const ScalarSystem& s, const Window& window) {
  std::vector<double> singular = merge_singular({&s.r1, &s.r0});
  Expr half = Expr::constant(0.5);
  Expr eta_e = simplify(-(half * s.r1.value()));
  Expr alpha_e = simplify(half * s.r1.value());
  // omega02 = r1dot/2 + r1^2/4 - r0
  Expr omega02_e = simplify(half * s.r1.derivative() +
                            Expr::constant(0.25) * pow(s.r1.value(), Rational(2, 1)) -
                            s.r0.value());
  ReducedRce r{CoefficientFn::from_constant(1.0),
               CoefficientFn(omega02_e, s.r0.domain(), singular),
               CoefficientFn(eta_e, s.r1.domain(), singular),
               CoefficientFn(alpha_e, s.r1.domain(), singular),
               CoefficientFn(eta_e, s.r1.domain(), singular),  // sigma0 = 1 * eta
               window,
               {}};
  r.singular_points = merge_singular({&r.omega01, &r.omega02, &r.eta, &r.sigma0});
  return r;
}

ReducedRce state_matrix_to_rce(const StateMatrix2x2& m, const Window& window) {
  std::vector<double> singular = merge_singular({&m.a11, &m.a12, &m.a21, &m.a22});
  Expr two_a12 = Expr::constant(2.0) * m.a12.value();
  Expr eta_e = simplify((m.a11.value() + m.a22.value()) / two_a12);
  Expr alpha_e = simplify((m.a11.value() - m.a22.value()) / two_a12);
  CoefficientFn alpha(alpha_e, m.a12.domain(), singular);
  // omega02 = alphadot + a12 alpha^2 + a21
  Expr omega02_e = simplify(alpha.derivative() +
                            m.a12.value() * pow(alpha_e, Rational(2, 1)) + m.a21.value());
  Expr omega01_e = m.a12.value();
  ReducedRce r{CoefficientFn(omega01_e, m.a12.domain(), singular),
               CoefficientFn(omega02_e, m.a21.domain(), singular),
               CoefficientFn(eta_e, m.a12.domain(), singular),
               alpha,
               CoefficientFn(simplify(omega01_e * eta_e), m.a12.domain(), singular),
               window,
               {}};
  r.singular_points = merge_singular({&r.omega01, &r.omega02, &r.eta, &r.alpha, &r.sigma0});
  check_omega01_positive(r.omega01, window, r.singular_points);
  return r;
}

LtiPair lti_characteristic_pair(double a, double b, double c) {
  if (a == 0.0) throw ReductionError("leading coefficient must be nonzero");
  double lambdaR = -b / (2.0 * a);
  double radicand = b * b / (4.0 * a * a) - c / a;
  LtiPair p{};
  p.lambdaR = lambdaR;
  p.imaginary = radicand < 0.0;
  p.lambdaI = std::sqrt(std::abs(radicand));
  p.degenerate = radicand == 0.0;
  return p;
}

StateMatrix2x2 companion(const ScalarSystem& s) {
  return StateMatrix2x2{CoefficientFn::from_constant(0.0), CoefficientFn::from_constant(1.0),
                        CoefficientFn(simplify(-s.r0.value()), s.r0.domain()),
                        CoefficientFn(simplify(-s.r1.value()), s.r1.domain())};
}

}  // namespace rce
