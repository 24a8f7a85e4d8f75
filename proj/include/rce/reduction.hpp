#pragma once

#include <stdexcept>

#include "rce/expr.hpp"

namespace rce {

struct Window {
  double t0;
  double t1;
};

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// zdot = s2*z^2 + s1*z + s0, with s2 nonzero on the analysis window.
struct GeneralRiccati {
  CoefficientFn s2, s1, s0;
};

/// ydotdot + r1*ydot + r0*y = 0.
struct ScalarSystem {
  CoefficientFn r1, r0;
};

/// xdot = A(t) x with A = [[a11, a12], [a21, a22]], a12 nonzero on the window.
struct StateMatrix2x2 {
  CoefficientFn a11, a12, a21, a22;
};

/// The canonical reduced form nudot = -omega01*nu^2 + omega02 with the shift
/// eta (z = nu + eta), the skew term alpha (nonzero only for state-matrix
/// inputs), and the eigenvalue offset sigma0 = omega01*eta.
struct ReducedRce {
  CoefficientFn omega01, omega02, eta, alpha, sigma0;
  Window window;
  std::vector<double> singular_points;  // union over all coefficients

  double rhs(double nu, double t) const { return -omega01(t) * nu * nu + omega02(t); }
};

/// Characteristic pair of a*l^2 + b*l + c: roots lambdaR +- lambdaI where
/// lambdaI is real or purely imaginary (stored as a magnitude with a flag).
struct LtiPair {
  double lambdaR;
  double lambdaI;       // magnitude of the +- part
  bool imaginary;       // true when the radicand is negative
  bool degenerate;      // repeated root (lambdaI == 0); downstream rejects it
};

ReducedRce reduce_general_riccati(const GeneralRiccati& g, const Window& window);
ReducedRce scalar_system_to_rce(const ScalarSystem& s, const Window& window);
ReducedRce state_matrix_to_rce(const StateMatrix2x2& m, const Window& window);
LtiPair lti_characteristic_pair(double a, double b, double c);

/// Companion form [[0, 1], [-r0, -r1]] of a scalar system.
StateMatrix2x2 companion(const ScalarSystem& s);

}  // namespace rce
