#pragma once

#include "rce/family.hpp"

namespace rce {

class TimeDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dynamic eigenvalues of the primitive members, lambda = sigma0 + omega01*nu
/// with nu = nuR +- nuI (real pair) or nuR +- j*nuIm (imaginary pair).
struct EigenvaluePair {
  GridPtr grid;
  std::vector<std::complex<double>> lambda1, lambda2;
  PairKind kind = PairKind::Real;
};

EigenvaluePair dynamic_eigenvalues(const ReducedRce& r, const PrimitivePair& pair);

/// lambda(t) = sigma0 + omega01 * member value for one family member.
std::vector<double> member_eigenvalue(const ReducedRce& r, const FamilySolution& f,
                                      const PhaseAccumulator& phi);

enum class TimeBranch { Cosh, Sinh, Cos, Sin };

const char* time_branch_name(TimeBranch b);

/// y = A * g * f(phi - K) with envelope g = e^{int sigma0}/sqrt(nuI)
/// (nuIm for the imaginary kind). cosh/sinh pair with real pairs,
/// cos/sin with imaginary ones.
struct TimeDomainSolution {
  GridPtr grid;
  double A = 1.0;
  TimeBranch f = TimeBranch::Cosh;
  double K = 0.0;
  std::vector<double> envelope;
  std::vector<double> y;
};

TimeDomainSolution reconstruct_time_domain(const ReducedRce& r, const PrimitivePair& pair,
                                           const PhaseAccumulator& phi, TimeBranch branch,
                                           double K, double A);

/// |ydotdot + r1 ydot + r0 y| from 5-point stencil derivatives (raw, callers
/// choose the normalization).
std::vector<double> scalar_ode_residual(const ScalarSystem& s, const TimeGrid& grid,
                                        const std::vector<double>& y);
std::vector<double> derivative2_samples(const TimeGrid& grid, const std::vector<double>& values);

std::function<Mat2(double)> state_matrix_fn(const StateMatrix2x2& m);
std::function<Mat2(double)> state_matrix_fn(const ScalarSystem& s);

/// phi(t) = V(t) diag(e^{int lambda1}, e^{int lambda2}) built from two family
/// members (Eqs. of the fundamental-matrix form); the exponentials are the
/// closed-form time-domain factors normalized to 1 at the accumulator base,
/// which stays finite through member escape events where lambda itself blows
/// up.
struct FundamentalMatrix {
  GridPtr grid;
  std::vector<Mat2> phi;
  std::vector<double> y1, y2;    // normalized exponential factors
  std::vector<double> nu1, nu2;  // member samples
  double base_time = 0.0;
};

FundamentalMatrix fundamental_matrix(const ReducedRce& r, const PrimitivePair& pair,
                                     const PhaseAccumulator& phi, Branch branch1, double K1,
                                     Branch branch2, double K2);

/// max over samples of ||phidot - A phi|| / (1 + ||phi||), stencil derivative.
double fundamental_residual(const std::function<Mat2(double)>& A, const FundamentalMatrix& fm);

}  // namespace rce
