#include "rce/family.hpp"

#include <algorithm>
#include <cmath>

namespace rce {

PhaseAccumulator phase_accumulator(const ReducedRce& r, const PrimitivePair& pair,
                                   double base_time) {
  const TimeGrid& g = *pair.grid;
  std::size_t base_index = g.index_of(base_time);
  std::vector<double> integrand(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) integrand[i] = r.omega01(g[i]) * pair.nuI[i];
  PhaseAccumulator acc;
  acc.phi = {pair.grid, cumulative_integral(g, integrand, base_index)};
  acc.base_time = g[base_index];
  acc.base_index = base_index;
  acc.kind = pair.kind;
  return acc;
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Tanh: return "tanh";
    case Branch::Coth: return "coth";
    case Branch::Tan: return "tan";
    case Branch::Cot: return "cot";
    case Branch::PrimitivePlus: return "primitive_plus";
    case Branch::PrimitiveMinus: return "primitive_minus";
  }
  return "?";
}

Branch branch_from_name(const std::string& name) {
  if (name == "tanh") return Branch::Tanh;
  if (name == "coth") return Branch::Coth;
  if (name == "tan") return Branch::Tan;
  if (name == "cot") return Branch::Cot;
  if (name == "primitive_plus") return Branch::PrimitivePlus;
  if (name == "primitive_minus") return Branch::PrimitiveMinus;
  throw FamilyError("unknown branch name: " + name);
}

namespace {

bool branch_matches_kind(Branch b, PairKind kind) {
  switch (b) {
    case Branch::Tanh:
    case Branch::Coth:
      return kind == PairKind::Real;
    case Branch::Tan:
    case Branch::Cot:
      return kind == PairKind::Imaginary;
    default:
      return true;
  }
}

double eval_at_index(const FamilySolution& f, const PhaseAccumulator& phi, std::size_t i) {
  double nuR = f.pair.nuR[i];
  double nuI = f.pair.nuI[i];
  double x = phi.phi.values[i] - f.K;
  switch (f.branch) {
    case Branch::Tanh:
      return nuR + nuI * std::tanh(x);
    case Branch::Coth: {
      double th = std::tanh(x);
      if (th == 0.0) return std::numeric_limits<double>::infinity();
      return nuR + nuI / th;
    }
    case Branch::Tan:
      return nuR - nuI * std::tan(x);
    case Branch::Cot: {
      double tn = std::tan(x);
      if (tn == 0.0) return std::numeric_limits<double>::infinity();
      return nuR + nuI / tn;
    }
    case Branch::PrimitivePlus:
      return nuR + nuI;
    case Branch::PrimitiveMinus:
      return nuR - nuI;
  }
  return 0.0;
}

}  // namespace

double family_eval(const FamilySolution& f, const PhaseAccumulator& phi, double t) {
  if (!branch_matches_kind(f.branch, f.pair.kind))
    throw FamilyError("branch does not match the pair kind");
  return eval_at_index(f, phi, f.pair.grid->index_of(t));
}

std::vector<double> family_values(const FamilySolution& f, const PhaseAccumulator& phi) {
  if (!branch_matches_kind(f.branch, f.pair.kind))
    throw FamilyError("branch does not match the pair kind");
  std::vector<double> out(f.pair.grid->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval_at_index(f, phi, i);
  return out;
}

std::vector<double> family_escape_times(const FamilySolution& f, const PhaseAccumulator& phi) {
  std::vector<double> out;
  const TimeGrid& g = *f.pair.grid;
  const std::vector<double>& p = phi.phi.values;
  auto crossings_of = [&](double level) {
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      double a = p[i] - level, b = p[i + 1] - level;
      if (a == 0.0) out.push_back(g[i]);
      if ((a < 0.0) == (b < 0.0) || b == 0.0) continue;
      double lo = g[i], hi = g[i + 1];
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double v = interp_samples(g, p, mid) - level;
        if ((v < 0.0) == (a < 0.0)) lo = mid; else hi = mid;
        if (hi - lo <= 1e-12 * (1.0 + std::abs(mid))) break;
      }
      out.push_back(0.5 * (lo + hi));
    }
  };
  switch (f.branch) {
    case Branch::Coth:
      crossings_of(f.K);
      break;
    case Branch::Cot:
    case Branch::Tan: {
      // poles of cot at phase = K + k*pi, of tan at K + pi/2 + k*pi
      double offset = f.branch == Branch::Cot ? 0.0 : 0.5 * M_PI;
      double lo = *std::min_element(p.begin(), p.end());
      double hi = *std::max_element(p.begin(), p.end());
      long k_lo = static_cast<long>(std::floor((lo - f.K - offset) / M_PI)) - 1;
      long k_hi = static_cast<long>(std::ceil((hi - f.K - offset) / M_PI)) + 1;
      for (long k = k_lo; k <= k_hi; ++k) {
        double level = f.K + offset + static_cast<double>(k) * M_PI;
        if (level > lo && level < hi) crossings_of(level);
      }
      break;
    }
    default:
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

FamilySolution fit_branch_and_K(const PrimitivePair& pair, const PhaseAccumulator& phi,
                                double ic_value, double ic_time) {
  std::size_t i = pair.grid->index_of(ic_time);
  double nuR = pair.nuR[i], nuI = pair.nuI[i];
  double phi0 = phi.phi.values[i];
  double u = (ic_value - nuR) / nuI;
  FamilySolution f;
  f.pair = pair;
  if (pair.kind == PairKind::Imaginary) {
    // tan and cot are the same member set; cot is the canonical branch
    f.branch = Branch::Cot;
    f.K = phi0 - std::atan2(1.0, u);
    return f;
  }
  if (std::abs(u - 1.0) <= 1e-12) {
    f.branch = Branch::PrimitivePlus;
    f.K = std::numeric_limits<double>::infinity();
  } else if (std::abs(u + 1.0) <= 1e-12) {
    f.branch = Branch::PrimitiveMinus;
    f.K = std::numeric_limits<double>::infinity();
  } else if (std::abs(u) < 1.0) {
    f.branch = Branch::Tanh;
    f.K = phi0 - std::atanh(u);
  } else {
    f.branch = Branch::Coth;
    f.K = phi0 - std::atanh(1.0 / u);
  }
  return f;
}

RceTrajectory family_trajectory(const FamilySolution& f, const PhaseAccumulator& phi,
                                double report_cap) {
  RceTrajectory traj;
  traj.grid = f.pair.grid;
  traj.real_valued = true;
  std::vector<double> vals = family_values(f, phi);
  traj.values.resize(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    double v = vals[i];
    if (!std::isfinite(v) || std::abs(v) > report_cap)
      v = std::copysign(report_cap, std::isfinite(v) ? v : 1.0);
    traj.values[i] = v;
  }
  for (double te : family_escape_times(f, phi)) traj.escape_events.push_back({te});
  traj.variable_log.push_back({traj.grid->front(), traj.grid->back(), VariableTag::Direct});
  return traj;
}

double family_polynomial_C(const FamilySolution& f) {
  if (f.branch == Branch::Tanh) return std::exp(2.0 * f.K);
  if (f.branch == Branch::Coth) return -std::exp(2.0 * f.K);
  throw FamilyError("C is defined for the tanh and coth branches");
}

GeneralZSolution general_z_solution(const ReducedRce& r, const FamilySolution& f,
                                    const PhaseAccumulator& phi) {
  GeneralZSolution out;
  out.family = f;
  out.grid = f.pair.grid;
  out.z = family_values(f, phi);
  for (std::size_t i = 0; i < out.z.size(); ++i) out.z[i] += r.eta((*out.grid)[i]);
  return out;
}

}  // namespace rce
