#pragma once

#include "rce/primitive.hpp"

namespace rce {

class FamilyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Accumulated phase phi_f = integral of omega01*nuI from base_time (where it
/// is zero). For the imaginary kind this holds phi_fm = integral of
/// omega01*nuIm. Strictly increasing whenever omega01*nuI > 0.
struct PhaseAccumulator {
  SampledFn phi;
  double base_time = 0.0;
  std::size_t base_index = 0;
  PairKind kind = PairKind::Real;
};

PhaseAccumulator phase_accumulator(const ReducedRce& r, const PrimitivePair& pair,
                                   double base_time);

enum class Branch { Tanh, Coth, Tan, Cot, PrimitivePlus, PrimitiveMinus };

const char* branch_name(Branch b);
Branch branch_from_name(const std::string& name);

/// One member of the solution continuum: nuR + nuI*{tanh|coth}(phi - K) for a
/// real pair, nuR + nuIm*{-tan|cot}(phi_m - K) for an imaginary one. The
/// primitive branches are the K -> infinity members. K is relative to the
/// accumulator's base_time: rebasing shifts every K by the phase of the old
/// base.
struct FamilySolution {
  PrimitivePair pair;
  Branch branch = Branch::Tanh;
  double K = 0.0;
};

/// Evaluates one member at a grid sample. Branch poles return huge values of
/// the correct sign; they are escape samples, not errors.
double family_eval(const FamilySolution& f, const PhaseAccumulator& phi, double t);

std::vector<double> family_values(const FamilySolution& f, const PhaseAccumulator& phi);

/// Times where the branch function has a pole inside the window (escape
/// events of the member), refined by bisection on the interpolated phase.
std::vector<double> family_escape_times(const FamilySolution& f, const PhaseAccumulator& phi);

/// Unique (branch, K) through a given initial condition. Real pairs follow the
/// trichotomy in |u| = |ic - nuR|/nuI: inside the strip is tanh, outside is
/// coth, on the boundary the primitive branches. Imaginary pairs always fit
/// the cot branch.
FamilySolution fit_branch_and_K(const PrimitivePair& pair, const PhaseAccumulator& phi,
                                double ic_value, double ic_time);

/// Member as a trajectory (samples clamped at the report cap, escape events
/// filled in) so family and integrator outputs compare directly.
RceTrajectory family_trajectory(const FamilySolution& f, const PhaseAccumulator& phi,
                                double report_cap = 1e12);

/// Convenience constant for polynomial-case comparisons: C = e^{2K} on the
/// tanh branch and -e^{2K} on the coth branch.
double family_polynomial_C(const FamilySolution& f);

struct GeneralZSolution {
  FamilySolution family;
  GridPtr grid;
  std::vector<double> z;  // eta + member values
};

/// Un-reduced solution z = eta + nu of the original equation.
GeneralZSolution general_z_solution(const ReducedRce& r, const FamilySolution& f,
                                    const PhaseAccumulator& phi);

}  // namespace rce
