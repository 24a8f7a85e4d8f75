#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rce/grid.hpp"
#include "rce/reduction.hpp"

namespace rce {

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double at_time)
      : std::runtime_error(what + " (at t = " + std::to_string(at_time) + ")"), t_(at_time) {}
  double at_time() const noexcept { return t_; }

 private:
  double t_;
};

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double escape_cap = 1e6;    // |nu| at which integration switches to w = 1/nu
  double report_cap = 1e12;   // samples beyond this magnitude are clamped
  double max_step = 0.0;      // 0 = no cap; set when dense-output accuracy matters
  long max_steps = 20000000;
};

template <std::size_t N>
struct RkStep {
  double t0, t1;
  std::array<double, N> y0, y1, f0, f1;
};

/// Cubic Hermite interpolation inside an accepted step.
template <std::size_t N>
std::array<double, N> hermite_eval(const RkStep<N>& s, double t) {
  double h = s.t1 - s.t0;
  double th = (t - s.t0) / h;
  double th2 = th * th, th3 = th2 * th;
  double h00 = 2 * th3 - 3 * th2 + 1;
  double h10 = th3 - 2 * th2 + th;
  double h01 = -2 * th3 + 3 * th2;
  double h11 = th3 - th2;
  std::array<double, N> y;
  for (std::size_t i = 0; i < N; ++i)
    y[i] = h00 * s.y0[i] + h * h10 * s.f0[i] + h01 * s.y1[i] + h * h11 * s.f1[i];
  return y;
}

/// Embedded Dormand-Prince 5(4) with PI step-size control. Complex states are
/// carried as real component pairs by the callers.
template <std::size_t N>
class AdaptiveRk45 {
 public:
  using State = std::array<double, N>;
  using Rhs = std::function<State(double, const State&)>;
  /// Accepted steps are handed to `on_step`; returning false stops the run.
  static void integrate(const Rhs& f, double t0, const State& y0, double t1,
                        const IntegratorOptions& opts,
                        const std::function<bool(const RkStep<N>&)>& on_step);
};

enum class VariableTag { Direct, Reciprocal };

struct EscapeEvent {
  double t_escape;
};

struct TrajectorySegment {
  double t_begin, t_end;  // in integration order
  VariableTag tag;
};

struct DenseStep {
  RkStep<2> step;
  VariableTag tag;  // Reciprocal steps store w = 1/nu
};

/// Full record of one RCE flow: accepted steps (in integration order, possibly
/// decreasing in time), pole continuations, and refined escape events.
class RceFlow {
 public:
  std::vector<DenseStep> steps;
  std::vector<EscapeEvent> events;        // ascending in time
  std::vector<TrajectorySegment> segments;
  bool real_valued = false;
  double t_start = 0, t_stop = 0;

  std::complex<double> eval(double t) const;
  bool covers(double t) const;
};

/// Integrates the reduced RCE from `t_from` to `t_to` (either direction).
/// When |nu| exceeds the escape cap the run switches to the reciprocal
/// variable w = 1/nu (wdot = omega01 - omega02 w^2), carries w through zero,
/// records the refined escape event, and switches back; real trajectories
/// stay exactly real. `monitor`, when set, sees every accepted direct-mode
/// step and may stop the run early by returning false.
RceFlow rce_flow(const ReducedRce& r, std::complex<double> ic, double t_from, double t_to,
                 const IntegratorOptions& opts = {},
                 const std::function<bool(const DenseStep&)>& monitor = {});

struct RceTrajectory {
  GridPtr grid;
  std::vector<std::complex<double>> values;  // clamped at the report cap
  std::vector<EscapeEvent> escape_events;
  std::vector<TrajectorySegment> variable_log;
  bool real_valued = false;
};

RceTrajectory integrate_rce(const ReducedRce& r, std::complex<double> ic, GridPtr grid,
                            const IntegratorOptions& opts = {},
                            Direction direction = Direction::Forward);

std::vector<EscapeEvent> detect_escape_events(const RceTrajectory& traj);

using Mat2 = std::array<std::array<double, 2>, 2>;
using Vec2 = std::array<double, 2>;

Vec2 mat2_apply(const Mat2& m, const Vec2& v);
Mat2 mat2_mul(const Mat2& a, const Mat2& b);
Mat2 mat2_inverse(const Mat2& m);
double mat2_det(const Mat2& m);
double mat2_trace(const Mat2& m);

/// Eigenvalues of a real 2x2 matrix (possibly a conjugate pair).
std::array<std::complex<double>, 2> mat2_eigenvalues(const Mat2& m);

/// Propagates the fundamental matrix of xdot = A(t) x from t0 to t1
/// (Phi(t0) = I).
Mat2 integrate_fundamental2(const std::function<Mat2(double)>& A, double t0, double t1,
                            const IntegratorOptions& opts = {});

}  // namespace rce
