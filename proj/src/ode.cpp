#include "rce/ode.hpp"

#include <algorithm>
#include <limits>

namespace rce {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

}  // namespace

template <std::size_t N>
void AdaptiveRk45<N>::integrate(const Rhs& f, double t0, const State& y0, double t1,
                                const IntegratorOptions& opts,
                                const std::function<bool(const RkStep<N>&)>& on_step) {
  if (t0 == t1) return;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  State y = y0;
  State k1 = f(t, y);
  double h = dir * std::min(0.01 * std::abs(t1 - t0), 0.1);
  double err_prev = 1.0;
  long steps = 0;
  bool rejected = false;

  auto finite = [](const State& s) {
    for (double v : s)
      if (!std::isfinite(v)) return false;
    return true;
  };
  if (!finite(k1)) throw IntegrationError("field evaluation is not finite", t);

  while (dir * (t1 - t) > 0) {
    if (++steps > opts.max_steps) throw IntegrationError("step budget exhausted", t);
    if (opts.max_step > 0.0 && std::abs(h) > opts.max_step) h = dir * opts.max_step;
    if (dir * (t + h) > dir * t1) h = t1 - t;
    double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (std::abs(h) < h_floor) throw IntegrationError("step size underflow", t);

    State k2, k3, k4, k5, k6, k7, y5;
    State tmp;
    auto axpy = [&](const State& base, std::initializer_list<std::pair<double, const State*>> terms) {
      State r = base;
      for (auto& [c, v] : terms)
        for (std::size_t i = 0; i < N; ++i) r[i] += h * c * (*v)[i];
      return r;
    };
    tmp = axpy(y, {{A21, &k1}});
    k2 = f(t + C2 * h, tmp);
    tmp = axpy(y, {{A31, &k1}, {A32, &k2}});
    k3 = f(t + C3 * h, tmp);
    tmp = axpy(y, {{A41, &k1}, {A42, &k2}, {A43, &k3}});
    k4 = f(t + C4 * h, tmp);
    tmp = axpy(y, {{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}});
    k5 = f(t + C5 * h, tmp);
    tmp = axpy(y, {{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}});
    k6 = f(t + h, tmp);
    y5 = axpy(y, {{B1, &k1}, {B3, &k3}, {B4, &k4}, {B5, &k5}, {B6, &k6}});
    k7 = f(t + h, y5);

    if (!finite(y5) || !finite(k7)) {
      h *= 0.25;
      rejected = true;
      continue;
    }

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
      double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(N));

    if (err <= 1.0) {
      RkStep<N> step{t, t + h, y, y5, k1, k7};
      t += h;
      y = y5;
      k1 = k7;  // FSAL
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                   std::pow(std::max(err_prev, 1e-10), 0.4 / 5.0);
      fac = std::min(rejected ? 1.0 : 6.0, std::max(0.2, fac));
      h *= fac;
      err_prev = std::max(err, 1e-10);
      rejected = false;
      if (!on_step(step)) return;
    } else {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
      rejected = true;
    }
  }
}

template class AdaptiveRk45<1>;
template class AdaptiveRk45<2>;
template class AdaptiveRk45<3>;
template class AdaptiveRk45<4>;

// ---------------------------------------------------------------------------
// RCE flow with pole continuation

namespace {

struct RceField {
  const ReducedRce* r;

  std::array<double, 2> direct(double t, const std::array<double, 2>& y) const {
    double w1, w2;
    try {
      w1 = r->omega01(t);
      w2 = r->omega02(t);
    } catch (const EvalError& e) {
      throw IntegrationError(std::string("coefficient undefined: ") + e.what(), t);
    }
    // nudot = -omega01 nu^2 + omega02, complex state as (re, im)
    double re = y[0], im = y[1];
    return {-w1 * (re * re - im * im) + w2, -w1 * 2.0 * re * im};
  }

  std::array<double, 2> reciprocal(double t, const std::array<double, 2>& y) const {
    double w1, w2;
    try {
      w1 = r->omega01(t);
      w2 = r->omega02(t);
    } catch (const EvalError& e) {
      throw IntegrationError(std::string("coefficient undefined: ") + e.what(), t);
    }
    // wdot = omega01 - omega02 w^2
    double re = y[0], im = y[1];
    return {w1 - w2 * (re * re - im * im), -w2 * 2.0 * re * im};
  }
};

double abs2(const std::array<double, 2>& y) { return std::hypot(y[0], y[1]); }

// Bisection on the Hermite interpolant for the zero crossing of w (real part).
double refine_crossing(const RkStep<2>& s) {
  double lo = s.t0, hi = s.t1;
  if (lo > hi) std::swap(lo, hi);
  double flo = hermite_eval(s, lo)[0];
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-9 * (1.0 + std::abs(mid))) return mid;
    double fm = hermite_eval(s, mid)[0];
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::complex<double> RceFlow::eval(double t) const {
  if (steps.empty()) throw std::out_of_range("empty flow");
  // steps are ordered in integration direction; locate by time
  const bool fwd = t_stop >= t_start;
  auto cmp = [fwd](const DenseStep& s, double tt) {
    return fwd ? s.step.t1 < tt : s.step.t1 > tt;
  };
  auto it = std::lower_bound(steps.begin(), steps.end(), t, cmp);
  if (it == steps.end()) it = std::prev(it);
  const DenseStep& d = *it;
  double lo = std::min(d.step.t0, d.step.t1), hi = std::max(d.step.t0, d.step.t1);
  if (t < lo - 1e-9 * (1 + std::abs(t)) || t > hi + 1e-9 * (1 + std::abs(t)))
    throw std::out_of_range("time outside integrated range");
  auto y = hermite_eval(d.step, t);
  std::complex<double> v{y[0], y[1]};
  if (d.tag == VariableTag::Reciprocal) {
    if (v == std::complex<double>(0.0, 0.0))
      return {std::numeric_limits<double>::infinity(), 0.0};
    v = 1.0 / v;
  }
  return v;
}

bool RceFlow::covers(double t) const {
  double lo = std::min(t_start, t_stop), hi = std::max(t_start, t_stop);
  return t >= lo - 1e-9 * (1 + std::abs(t)) && t <= hi + 1e-9 * (1 + std::abs(t));
}

RceFlow rce_flow(const ReducedRce& r, std::complex<double> ic, double t_from, double t_to,
                 const IntegratorOptions& opts,
                 const std::function<bool(const DenseStep&)>& monitor) {
  for (double s : r.singular_points) {
    double lo = std::min(t_from, t_to), hi = std::max(t_from, t_to);
    if (s > lo && s < hi)
      throw IntegrationError("integration range spans a declared coefficient singularity", s);
  }
  RceFlow flow;
  flow.real_valued = ic.imag() == 0.0;
  flow.t_start = t_from;
  flow.t_stop = t_from;

  RceField field{&r};
  const double dir = t_to > t_from ? 1.0 : -1.0;
  double t = t_from;
  std::array<double, 2> y{ic.real(), ic.imag()};
  VariableTag mode = VariableTag::Direct;
  double segment_begin = t;
  bool stopped = false;
  const double span = std::abs(t_to - t_from);

  auto push_segment = [&](double t_end) {
    if (t_end != segment_begin) flow.segments.push_back({segment_begin, t_end, mode});
    segment_begin = t_end;
  };

  while (dir * (t_to - t) > 1e-14 * (1.0 + std::abs(t)) && !stopped) {
    if (mode == VariableTag::Direct) {
      bool switch_to_reciprocal = false;
      AdaptiveRk45<2>::integrate(
          [&](double tt, const std::array<double, 2>& yy) { return field.direct(tt, yy); }, t, y,
          t_to, opts,
          [&](const RkStep<2>& s) {
            flow.steps.push_back({s, VariableTag::Direct});
            t = s.t1;
            y = s.y1;
            flow.t_stop = t;
            if (monitor && !monitor(flow.steps.back())) {
              stopped = true;
              return false;
            }
            if (abs2(y) >= opts.escape_cap) {
              switch_to_reciprocal = true;
              return false;
            }
            return true;
          });
      if (!stopped && switch_to_reciprocal) {
        push_segment(t);
        double n2 = y[0] * y[0] + y[1] * y[1];
        y = {y[0] / n2, -y[1] / n2};  // w = 1/nu
        mode = VariableTag::Reciprocal;
      } else {
        break;  // reached t_to or monitor stop
      }
    } else {
      bool switch_back = false;
      double entered_at = t;
      bool crossed = false;
      AdaptiveRk45<2>::integrate(
          [&](double tt, const std::array<double, 2>& yy) { return field.reciprocal(tt, yy); }, t,
          y, t_to, opts,
          [&](const RkStep<2>& s) {
            flow.steps.push_back({s, VariableTag::Reciprocal});
            if (flow.real_valued && (s.y0[0] <= 0.0) != (s.y1[0] <= 0.0)) {
              flow.events.push_back({refine_crossing(s)});
              crossed = true;
            }
            t = s.t1;
            y = s.y1;
            flow.t_stop = t;
            if (abs2(y) >= 1.0 / opts.escape_cap) {
              switch_back = true;
              return false;
            }
            return true;
          });
      if (switch_back) {
        push_segment(t);
        double n2 = y[0] * y[0] + y[1] * y[1];
        y = {y[0] / n2, -y[1] / n2};  // nu = 1/w
        mode = VariableTag::Direct;
      } else if (dir * (t_to - t) > 1e-14 * (1.0 + std::abs(t))) {
        throw IntegrationError("reciprocal variable stalled near a pole", t);
      }
      if (!crossed && std::abs(t - entered_at) > 0.25 * span && dir * (t_to - t) > 0)
        throw IntegrationError("blow-up without return from the pole region", t);
    }
  }
  push_segment(flow.t_stop);
  std::sort(flow.events.begin(), flow.events.end(),
            [](const EscapeEvent& a, const EscapeEvent& b) { return a.t_escape < b.t_escape; });
  return flow;
}

RceTrajectory integrate_rce(const ReducedRce& r, std::complex<double> ic, GridPtr grid,
                            const IntegratorOptions& opts, Direction direction) {
  double t_from = direction == Direction::Forward ? grid->front() : grid->back();
  double t_to = direction == Direction::Forward ? grid->back() : grid->front();
  RceFlow flow = rce_flow(r, ic, t_from, t_to, opts);

  RceTrajectory traj;
  traj.grid = grid;
  traj.real_valued = flow.real_valued;
  traj.escape_events = flow.events;
  traj.variable_log = flow.segments;
  traj.values.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    std::complex<double> v = flow.eval((*grid)[i]);
    double mag = std::abs(v);
    if (!std::isfinite(mag) || mag > opts.report_cap) {
      double phase_re = v.real(), phase_im = v.imag();
      double m = std::max(std::abs(phase_re), std::abs(phase_im));
      if (m == 0.0 || !std::isfinite(m))
        v = {opts.report_cap, 0.0};
      else
        v = {phase_re / m * opts.report_cap, phase_im / m * opts.report_cap};
    }
    traj.values[i] = v;
  }
  return traj;
}

std::vector<EscapeEvent> detect_escape_events(const RceTrajectory& traj) {
  return traj.escape_events;  // refined during integration, ascending
}

// ---------------------------------------------------------------------------
// 2x2 helpers

Vec2 mat2_apply(const Mat2& m, const Vec2& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

Mat2 mat2_mul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

double mat2_det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

double mat2_trace(const Mat2& m) { return m[0][0] + m[1][1]; }

Mat2 mat2_inverse(const Mat2& m) {
  double d = mat2_det(m);
  if (d == 0.0) throw std::domain_error("singular 2x2 matrix");
  return {{{m[1][1] / d, -m[0][1] / d}, {-m[1][0] / d, m[0][0] / d}}};
}

std::array<std::complex<double>, 2> mat2_eigenvalues(const Mat2& m) {
  double tr = mat2_trace(m), det = mat2_det(m);
  std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det, 0.0));
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

Mat2 integrate_fundamental2(const std::function<Mat2(double)>& A, double t0, double t1,
                            const IntegratorOptions& opts) {
  if (t0 == t1) return Mat2{{{1, 0}, {0, 1}}};
  std::array<double, 4> y{1, 0, 0, 1};  // columns of Phi: (y0,y2) and (y1,y3)
  AdaptiveRk45<4>::integrate(
      [&](double t, const std::array<double, 4>& s) -> std::array<double, 4> {
        Mat2 a = A(t);
        return {a[0][0] * s[0] + a[0][1] * s[2], a[0][0] * s[1] + a[0][1] * s[3],
                a[1][0] * s[0] + a[1][1] * s[2], a[1][0] * s[1] + a[1][1] * s[3]};
      },
      t0, y, t1, opts, [&](const RkStep<4>& s) {
        y = s.y1;
        return true;
      });
  return Mat2{{{y[0], y[1]}, {y[2], y[3]}}};
}

}  // namespace rce
