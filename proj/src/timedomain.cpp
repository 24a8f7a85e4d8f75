#include "rce/timedomain.hpp"

#include <algorithm>
#include <cmath>

namespace rce {

EigenvaluePair dynamic_eigenvalues(const ReducedRce& r, const PrimitivePair& pair) {
  const TimeGrid& g = *pair.grid;
  EigenvaluePair out;
  out.grid = pair.grid;
  out.kind = pair.kind;
  out.lambda1.resize(g.size());
  out.lambda2.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double t = g[i];
    double s0 = r.sigma0(t), w1 = r.omega01(t);
    if (pair.kind == PairKind::Real) {
      out.lambda1[i] = s0 + w1 * (pair.nuR[i] + pair.nuI[i]);
      out.lambda2[i] = s0 + w1 * (pair.nuR[i] - pair.nuI[i]);
    } else {
      out.lambda1[i] = std::complex<double>(s0 + w1 * pair.nuR[i], w1 * pair.nuI[i]);
      out.lambda2[i] = std::conj(out.lambda1[i]);
    }
  }
  return out;
}

std::vector<double> member_eigenvalue(const ReducedRce& r, const FamilySolution& f,
                                      const PhaseAccumulator& phi) {
  std::vector<double> nu = family_values(f, phi);
  const TimeGrid& g = *f.pair.grid;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    double t = g[i];
    nu[i] = r.sigma0(t) + r.omega01(t) * nu[i];
  }
  return nu;
}

const char* time_branch_name(TimeBranch b) {
  switch (b) {
    case TimeBranch::Cosh: return "cosh";
    case TimeBranch::Sinh: return "sinh";
    case TimeBranch::Cos: return "cos";
    case TimeBranch::Sin: return "sin";
  }
  return "?";
}

TimeDomainSolution reconstruct_time_domain(const ReducedRce& r, const PrimitivePair& pair,
                                           const PhaseAccumulator& phi, TimeBranch branch,
                                           double K, double A) {
  bool hyperbolic = branch == TimeBranch::Cosh || branch == TimeBranch::Sinh;
  if (hyperbolic != (pair.kind == PairKind::Real))
    throw TimeDomainError("time branch does not match the pair kind");
  const TimeGrid& g = *pair.grid;
  std::vector<double> sigma0(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sigma0[i] = r.sigma0(g[i]);
  std::vector<double> S = cumulative_integral(g, sigma0, phi.base_index);

  TimeDomainSolution out;
  out.grid = pair.grid;
  out.A = A;
  out.f = branch;
  out.K = K;
  out.envelope.resize(g.size());
  out.y.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(pair.nuI[i] > 0.0)) throw TimeDomainError("intrinsic component must stay positive");
    out.envelope[i] = std::exp(S[i]) / std::sqrt(pair.nuI[i]);
    double x = phi.phi.values[i] - K;
    double f = branch == TimeBranch::Cosh  ? std::cosh(x)
               : branch == TimeBranch::Sinh ? std::sinh(x)
               : branch == TimeBranch::Cos  ? std::cos(x)
                                            : std::sin(x);
    out.y[i] = A * out.envelope[i] * f;
  }
  return out;
}

std::vector<double> derivative2_samples(const TimeGrid& grid, const std::vector<double>& values) {
  const std::size_t n = grid.size();
  const std::size_t width = std::min<std::size_t>(5, n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t half = width / 2;
    std::size_t lo = i > half ? i - half : 0;
    if (lo + width > n) lo = n - width;
    std::vector<double> nodes(grid.times().begin() + static_cast<std::ptrdiff_t>(lo),
                              grid.times().begin() + static_cast<std::ptrdiff_t>(lo + width));
    std::vector<double> w = fd_weights(grid[i], nodes, 2);
    double acc = 0.0;
    for (std::size_t j = 0; j < width; ++j) acc += w[j] * values[lo + j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> scalar_ode_residual(const ScalarSystem& s, const TimeGrid& grid,
                                        const std::vector<double>& y) {
  std::vector<double> d1 = derivative_samples(grid, y);
  std::vector<double> d2 = derivative2_samples(grid, y);
  std::vector<double> res(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid[i];
    res[i] = std::abs(d2[i] + s.r1(t) * d1[i] + s.r0(t) * y[i]);
  }
  return res;
}

std::function<Mat2(double)> state_matrix_fn(const StateMatrix2x2& m) {
  return [m](double t) -> Mat2 {
    return {{{m.a11(t), m.a12(t)}, {m.a21(t), m.a22(t)}}};
  };
}

std::function<Mat2(double)> state_matrix_fn(const ScalarSystem& s) {
  return [s](double t) -> Mat2 {
    return {{{0.0, 1.0}, {-s.r0(t), -s.r1(t)}}};
  };
}

namespace {

// Closed-form time-domain factor e^{int lambda} of one member, normalized to
// 1 at the base sample: g(t) f(phi - K) / (g(b) f(phi_b - K)).
std::vector<double> member_exponential(const PrimitivePair& pair, const PhaseAccumulator& phi,
                                       const std::vector<double>& envelope, Branch branch,
                                       double K) {
  const std::size_t n = pair.grid->size();
  std::vector<double> out(n);
  auto f_of = [&](std::size_t i) {
    double x = phi.phi.values[i] - K;
    switch (branch) {
      case Branch::Tanh: return std::cosh(x);
      case Branch::Coth: return std::sinh(x);
      case Branch::Cot: return std::sin(x);
      case Branch::Tan: return std::cos(x);
      case Branch::PrimitivePlus: return std::exp(x);
      case Branch::PrimitiveMinus: return std::exp(-x);
    }
    return 1.0;
  };
  double denom = envelope[phi.base_index] * f_of(phi.base_index);
  if (denom == 0.0 || !std::isfinite(denom))
    throw TimeDomainError("member escapes at the accumulator base time; move the base");
  for (std::size_t i = 0; i < n; ++i) out[i] = envelope[i] * f_of(i) / denom;
  return out;
}

}  // namespace

FundamentalMatrix fundamental_matrix(const ReducedRce& r, const PrimitivePair& pair,
                                     const PhaseAccumulator& phi, Branch branch1, double K1,
                                     Branch branch2, double K2) {
  const TimeGrid& g = *pair.grid;
  std::vector<double> sigma0(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sigma0[i] = r.sigma0(g[i]);
  std::vector<double> S = cumulative_integral(g, sigma0, phi.base_index);
  std::vector<double> envelope(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(pair.nuI[i] > 0.0)) throw TimeDomainError("intrinsic component must stay positive");
    envelope[i] = std::exp(S[i]) / std::sqrt(pair.nuI[i]);
  }

  FamilySolution m1{pair, branch1, K1};
  FamilySolution m2{pair, branch2, K2};
  FundamentalMatrix fm;
  fm.grid = pair.grid;
  fm.base_time = phi.base_time;
  fm.nu1 = family_values(m1, phi);
  fm.nu2 = family_values(m2, phi);
  fm.y1 = member_exponential(pair, phi, envelope, branch1, K1);
  fm.y2 = member_exponential(pair, phi, envelope, branch2, K2);

  fm.phi.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double nu_diff = fm.nu1[i] - fm.nu2[i];
    if (nu_diff == 0.0) throw TimeDomainError("degenerate eigenvector matrix: nu1 == nu2");
    double alpha = r.alpha(g[i]);
    fm.phi[i] = Mat2{{{fm.y1[i], fm.y2[i]},
                      {(fm.nu1[i] - alpha) * fm.y1[i], (fm.nu2[i] - alpha) * fm.y2[i]}}};
  }
  return fm;
}

double fundamental_residual(const std::function<Mat2(double)>& A, const FundamentalMatrix& fm) {
  const TimeGrid& g = *fm.grid;
  double worst = 0.0;
  std::vector<double> comp(g.size());
  std::array<std::array<std::vector<double>, 2>, 2> d;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      for (std::size_t i = 0; i < g.size(); ++i) comp[i] = fm.phi[i][a][b];
      d[a][b] = derivative_samples(g, comp);
    }
  for (std::size_t i = 2; i + 2 < g.size(); ++i) {
    Mat2 At = A(g[i]);
    double norm = 1.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) norm = std::max(norm, std::abs(fm.phi[i][a][b]));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double rhs = At[a][0] * fm.phi[i][0][b] + At[a][1] * fm.phi[i][1][b];
        worst = std::max(worst, std::abs(d[a][b][i] - rhs) / norm);
      }
  }
  return worst;
}

}  // namespace rce
