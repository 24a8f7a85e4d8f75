#include "rce/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "rce/cases.hpp"

namespace rce {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SweepRow analyze_point(double a0, double q, const SweepSpec& spec) {
  SweepRow row;
  row.a0 = a0;
  row.q = q;
  try {
    ScalarSystem sys = make_mathieu(a0, q);
    ReducedRce r = scalar_system_to_rce(sys, spec.window);
    auto grid = std::make_shared<TimeGrid>(
        TimeGrid::uniform(spec.window.t0, spec.window.t1, spec.grid_samples));
    auto A = state_matrix_fn(sys);
    row.predisposition = predisposition_name(sign_predisposition(r, spec.window));

    ForwardSearchOptions fopts;
    fopts.ode = spec.ode;
    ForwardSearchResult fw = find_primitive_forward(r, {-3.0, -1.0, 0.0, 1.0, 3.0}, grid, fopts);

    if (fw.outcome == ForwardSearchOutcome::Inconclusive) {
      row.status = "inconclusive";
      row.label = "inconclusive";
      row.kind = "unknown";
      row.error = fw.detail;
      return row;
    }

    if (fw.outcome == ForwardSearchOutcome::Attractor) {
      row.kind = "real";
      bool escapes = fw.attractor_has_escapes || !fw.pair;
      row.label = escapes ? "attractor_periodic_escape" : "attractor";
      if (fw.attractor_trajectory) {
        PeriodicityReport pr = check_rce_periodicity(*fw.attractor_trajectory, spec.period);
        row.rce_periodic = pr.periodic;
        row.rce_deviation = pr.deviation;
        if (fw.attractor_trajectory->escape_events.size() >= 2) {
          const auto& ev = fw.attractor_trajectory->escape_events;
          row.escape_cadence =
              (ev.back().t_escape - ev.front().t_escape) / static_cast<double>(ev.size() - 1);
        }
      }
      // monodromy over the last period is available in both subcases
      double t_star = spec.window.t1 - spec.period;
      Mat2 M = integrate_fundamental2(A, t_star, t_star + spec.period, spec.ode);
      auto mu = mat2_eigenvalues(M);
      row.multiplier_mod1 = std::abs(mu[0]);
      row.multiplier_mod2 = std::abs(mu[1]);
      row.half_period_antisymmetric =
          std::abs(mu[0].imag()) < 1e-8 * std::abs(mu[0]) && mu[0].real() < 0.0;
      if (!escapes && fw.pair) {
        row.dc_intrinsic = dc_average(*grid, fw.pair->nuI, spec.period);
        row.dc_real_component = dc_average(*grid, fw.pair->nuR, spec.period);
        FloquetResult fl = floquet_exponents(A, r, *fw.pair, spec.period, spec.ode);
        row.r1_re = fl.r1.real();
        row.r1_im = fl.r1.imag();
      } else {
        // DC averages through the escape events come from the monodromy route
        std::complex<double> mu_big = std::abs(mu[0]) >= std::abs(mu[1]) ? mu[0] : mu[1];
        row.r1_re = std::log(std::abs(mu_big)) / spec.period;
        row.r1_im = std::arg(mu_big) / spec.period;
      }
      row.status = "ok";
      return row;
    }

    // no attractor: imaginary kind, primitive from the monodromy eigendirection
    row.kind = "imaginary";
    row.label = row.predisposition == std::string("escape_predisposed") ? "repetitive_escape"
                                                                        : "no_attractor_bounded";
    PrimitivePair pair = periodic_pair_from_monodromy(A, r, grid, spec.period, spec.ode);
    row.dc_intrinsic = dc_average(*grid, pair.nuI, spec.period);
    row.dc_real_component = dc_average(*grid, pair.nuR, spec.period);
    FloquetResult fl = floquet_exponents(A, r, pair, spec.period, spec.ode);
    row.r1_re = fl.r1.real();
    row.r1_im = fl.r1.imag();
    row.multiplier_mod1 = std::abs(fl.multipliers[0]);
    row.multiplier_mod2 = std::abs(fl.multipliers[1]);
    row.rce_periodic = fl.rce_periodic;
    row.rce_deviation = fl.rce_deviation;
    // cadence of a representative real solution
    try {
      RceTrajectory probe = integrate_rce(r, pair.nuR.front(), grid, spec.ode);
      if (probe.escape_events.size() >= 2) {
        const auto& ev = probe.escape_events;
        row.escape_cadence =
            (ev.back().t_escape - ev.front().t_escape) / static_cast<double>(ev.size() - 1);
      }
    } catch (const IntegrationError&) {
    }
    row.status = "ok";
    return row;
  } catch (const std::exception& e) {
    row.status = "error";
    row.error = e.what();
    return row;
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  std::vector<std::pair<double, double>> points;
  for (double q : spec.q_values)
    for (double a0 : spec.a0_values) points.emplace_back(a0, q);
  std::vector<SweepRow> rows(points.size());

  unsigned n_threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, points.size() == 0 ? 1 : points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      rows[i] = analyze_point(points[i].first, points[i].second, spec);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "a0,q,status,label,kind,predisposition,dc_intrinsic,dc_real_component,r1_re,r1_im,"
         "multiplier_mod1,multiplier_mod2,escape_cadence,rce_periodic,rce_deviation,"
         "half_period_antisymmetric,error\n";
  for (const SweepRow& r : rows) {
    out << fmt17(r.a0) << ',' << fmt17(r.q) << ',' << r.status << ',' << r.label << ',' << r.kind
        << ',' << r.predisposition << ',' << fmt17(r.dc_intrinsic) << ','
        << fmt17(r.dc_real_component) << ',' << fmt17(r.r1_re) << ',' << fmt17(r.r1_im) << ','
        << fmt17(r.multiplier_mod1) << ',' << fmt17(r.multiplier_mod2) << ','
        << fmt17(r.escape_cadence) << ',' << (r.rce_periodic ? 1 : 0) << ','
        << fmt17(r.rce_deviation) << ',' << (r.half_period_antisymmetric ? 1 : 0) << ','
        << '"' << r.error << '"' << '\n';
  }
  return out.str();
}

std::string sweep_jsonl(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  for (const SweepRow& r : rows) {
    out << "{\"schema\":1,\"a0\":" << fmt17(r.a0) << ",\"q\":" << fmt17(r.q) << ",\"status\":\""
        << r.status << "\",\"label\":\"" << r.label << "\",\"kind\":\"" << r.kind
        << "\",\"predisposition\":\"" << r.predisposition
        << "\",\"dc_intrinsic\":" << fmt17(r.dc_intrinsic)
        << ",\"dc_real_component\":" << fmt17(r.dc_real_component)
        << ",\"r1\":[" << fmt17(r.r1_re) << ',' << fmt17(r.r1_im) << "]"
        << ",\"multiplier_moduli\":[" << fmt17(r.multiplier_mod1) << ',' << fmt17(r.multiplier_mod2)
        << "],\"escape_cadence\":" << fmt17(r.escape_cadence)
        << ",\"rce_periodic\":" << (r.rce_periodic ? "true" : "false")
        << ",\"rce_deviation\":" << fmt17(r.rce_deviation)
        << ",\"half_period_antisymmetric\":" << (r.half_period_antisymmetric ? "true" : "false")
        << ",\"error\":\"" << r.error << "\"}\n";
  }
  return out.str();
}

double refine_attractor_boundary(double q, double a0_with_attractor, double a0_without,
                                 double resolution, const SweepSpec& base) {
  auto has_attractor = [&](double a0) {
    SweepRow row = analyze_point(a0, q, base);
    return row.kind == "real";
  };
  double lo = a0_with_attractor, hi = a0_without;
  while (std::abs(hi - lo) > resolution) {
    double mid = 0.5 * (lo + hi);
    if (has_attractor(mid)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rce
