#include "rce/cases.hpp"

#include <cmath>
#include <stdexcept>

namespace rce {

ScalarSystem make_bessel(int N) {
  if (N < 1) throw std::invalid_argument("Bessel order must be a positive integer");
  Expr t = Expr::time();
  Expr r1 = Expr::constant(1.0) / t;
  Expr r0 = Expr::constant(1.0) -
            Expr::constant(static_cast<double>(N) * N) / pow(t, Rational(2, 1));
  return ScalarSystem{CoefficientFn(r1, {}, {0.0}), CoefficientFn(r0, {}, {0.0})};
}

ScalarSystem make_qho(int N) {
  if (N < 1 || N % 2 == 0)
    throw std::invalid_argument("oscillator index must be an odd positive integer");
  Expr t = Expr::time();
  Expr r0 = Expr::constant(static_cast<double>(N)) - pow(t, Rational(2, 1));
  return ScalarSystem{CoefficientFn::from_constant(0.0), CoefficientFn(r0)};
}

ScalarSystem make_mathieu(double a0, double q) {
  Expr t = Expr::time();
  Expr r0 = -(Expr::constant(a0) + Expr::constant(q) * cos(t));
  return ScalarSystem{CoefficientFn::from_constant(0.0), CoefficientFn(r0)};
}

GeneralRiccati make_polynomial_case() {
  Expr t = Expr::time();
  Expr s0 = Expr::constant(2.0) / pow(t, Rational(2, 1));
  return GeneralRiccati{CoefficientFn::from_constant(-1.0), CoefficientFn::from_constant(0.0),
                        CoefficientFn(s0, {}, {0.0})};
}

double polynomial_case_closed_form(double C, double t) {
  return (2.0 * t * t * t - C) / (t * (t * t * t + C));
}

Window recommended_window_bessel() { return {0.01, 100.0}; }
Window recommended_window_qho() { return {-5.0, 5.0}; }
Window recommended_window_mathieu() { return {0.0, 12.0 * M_PI}; }

double oracle_bessel_first_kind(int N, double t) {
  if (t < 0.0) throw std::invalid_argument("series oracle needs t >= 0");
  double half = 0.5 * t;
  // leading term (t/2)^N / N!
  double term = 1.0;
  for (int i = 1; i <= N; ++i) term *= half / static_cast<double>(i);
  double sum = term;
  for (int k = 1; k <= 200; ++k) {
    term *= -(half * half) / (static_cast<double>(k) * static_cast<double>(k + N));
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) return sum;
  }
  if (std::abs(term) > 1e-12 * std::abs(sum))
    throw std::domain_error("Bessel series did not converge; restrict t to <= 30");
  return sum;
}

std::vector<double> oracle_bessel_zeros(int N, double t_max) {
  std::vector<double> zeros;
  const double step = 0.05;
  double prev_t = 0.5, prev_v = oracle_bessel_first_kind(N, prev_t);
  for (double t = prev_t + step; t <= t_max; t += step) {
    double v = oracle_bessel_first_kind(N, t);
    if ((prev_v <= 0.0) != (v <= 0.0)) {
      double lo = prev_t, hi = t, flo = prev_v;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = oracle_bessel_first_kind(N, mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-12 * (1.0 + mid)) break;
      }
      zeros.push_back(0.5 * (lo + hi));
    }
    prev_t = t;
    prev_v = v;
  }
  return zeros;
}

double oracle_hermite_wavefunction(int k, double t) {
  if (k < 0) throw std::invalid_argument("Hermite index must be nonnegative");
  double h_prev = 1.0;       // H_0
  double h = 2.0 * t;        // H_1
  if (k == 0) h = h_prev;
  for (int i = 1; i < k; ++i) {
    double h_next = 2.0 * t * h - 2.0 * static_cast<double>(i) * h_prev;
    h_prev = h;
    h = h_next;
  }
  return h * std::exp(-0.5 * t * t);
}

}  // namespace rce
