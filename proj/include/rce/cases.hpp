#pragma once

#include "rce/reduction.hpp"

namespace rce {

/// ydotdot + (1/t) ydot + (1 - N^2/t^2) y = 0, singular at t = 0.
ScalarSystem make_bessel(int N);

/// ydotdot + (N - t^2) y = 0 with N an odd positive integer.
ScalarSystem make_qho(int N);

/// ydotdot - (a0 + q cos t) y = 0.
ScalarSystem make_mathieu(double a0, double q);

/// zdot = -z^2 + 2/t^2: the explicitly solvable case with known solutions
/// -1/t and 2/t.
GeneralRiccati make_polynomial_case();

/// General solution of the polynomial case, (2t^3 - C)/(t(t^3 + C)).
double polynomial_case_closed_form(double C, double t);

Window recommended_window_bessel();
Window recommended_window_qho();
Window recommended_window_mathieu();

/// Power series for the Bessel function of the first kind, truncated when the
/// terms drop below 1e-16 of the partial sum. Validated to t <= 30.
double oracle_bessel_first_kind(int N, double t);

/// Positive zeros of the series oracle below t_max, bisection refined.
std::vector<double> oracle_bessel_zeros(int N, double t_max);

/// H_k(t) e^{-t^2/2} with the physicists' three-term recurrence.
double oracle_hermite_wavefunction(int k, double t);

}  // namespace rce
