#pragma once

// Check registry: the numbered acceptance criteria plus extra invariants.
// Every check carries its measured value and bound so reports can be
// read by people and parsed by scripts alike.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sqt/analytic.hpp"
#include "sqt/bouncer_grav.hpp"
#include "sqt/bouncer_harm.hpp"
#include "sqt/config.hpp"
#include "sqt/csv.hpp"
#include "sqt/experiments.hpp"
#include "sqt/grid_oracle.hpp"
#include "sqt/specfun.hpp"

namespace sqt {

enum class Relation { Below, AtMost, Above, AtLeast, Within };

struct CheckResult {
  std::string name;
  double measured = 0.0;
  Relation relation = Relation::Below;
  double lo = 0.0;  // the bound; lower end for Within
  double hi = 0.0;  // upper end for Within
  bool overridable = true;  // false for orderings and runtime budgets
  bool pass = false;

  void evaluate() {
    switch (relation) {
      case Relation::Below: pass = measured < lo; break;
      case Relation::AtMost: pass = measured <= lo; break;
      case Relation::Above: pass = measured > lo; break;
      case Relation::AtLeast: pass = measured >= lo; break;
      case Relation::Within: pass = measured >= lo && measured <= hi; break;
    }
    if (!std::isfinite(measured)) pass = false;
  }

  std::string tolerance_text() const {
    switch (relation) {
      case Relation::Below: return "<" + format17(lo);
      case Relation::AtMost: return "<=" + format17(lo);
      case Relation::Above: return ">" + format17(lo);
      case Relation::AtLeast: return ">=" + format17(lo);
      case Relation::Within: return "[" + format17(lo) + "," + format17(hi) + "]";
    }
    return "?";
  }
};

inline CheckResult make_check(std::string name, double measured, Relation rel, double lo, double hi = 0.0,
                              bool overridable = true) {
  CheckResult c{std::move(name), measured, rel, lo, hi, overridable, false};
  c.evaluate();
  return c;
}

struct Criterion {
  int id = 0;  // 0 for invariants outside the numbered list
  std::string title;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }
};

/// Tolerance overrides: a global value for every overridable upper bound,
/// and per-check values for any overridable single bound.
struct ToleranceOverrides {
  std::optional<double> global;
  std::map<std::string, double> per_check;

  static ToleranceOverrides from_config(const Config& cfg) {
    ToleranceOverrides o;
    for (const auto& [k, v] : cfg.entries()) {
      if (k == "tol" && v != "none") o.global = detail::parse_double(k, v);
      if (k.rfind("tol.", 0) == 0) o.per_check[k.substr(4)] = detail::parse_double(k, v);
    }
    return o;
  }

  void apply(Criterion& c) const {
    for (auto& chk : c.checks) {
      if (!chk.overridable || chk.relation == Relation::Within) continue;
      if (auto it = per_check.find(chk.name); it != per_check.end()) {
        chk.lo = it->second;
      } else if (global && (chk.relation == Relation::Below || chk.relation == Relation::AtMost)) {
        chk.lo = *global;
      }
      chk.evaluate();
    }
  }
};

namespace detail {

inline std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

template <class F>
Criterion timed(int id, std::string title, double budget_seconds, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  Criterion c;
  c.id = id;
  c.title = std::move(title);
  body(c.checks);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0.0)
    c.checks.push_back(make_check("criterion" + std::to_string(id) + ".runtime_seconds", c.seconds, Relation::Below,
                                  budget_seconds, 0.0, false));
  return c;
}

// Deterministic, well-spread sample points in [0, 1): the golden-ratio
// Weyl sequence.
inline std::vector<double> weyl_points(int n, double offset = 0.5) {
  std::vector<double> out(n);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int k = 0; k < n; ++k) out[k] = std::fmod(offset + (k + 1) * phi, 1.0);
  return out;
}

// Golden-section refinement of a bracketed minimum.
template <class F>
std::pair<double, double> refine_minimum(F&& f, double a, double b, double tol = 1e-7) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, f(t)};
}

inline std::pair<double, double> column_minimum(const std::vector<double>& t, const std::vector<double>& v) {
  const auto it = std::min_element(v.begin(), v.end());
  return {t[it - v.begin()], *it};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// numbered criteria

inline Criterion criterion_wkb() {
  return detail::timed(1, "WKB accuracy of the bouncer spectrum", 1.0, [](auto& out) {
    const auto& roots = shared_airy_roots();
    auto rel = [&](int n) { return std::abs(wkb_energy(n) + roots.root(n)) / std::abs(roots.root(n)); };
    out.push_back(make_check("wkb.n1_relative_error", rel(1), Relation::Within, 0.005, 0.010));
    out.push_back(make_check("wkb.n10_relative_error", rel(10), Relation::Below, 5e-4));
  });
}

inline Criterion criterion_classical_averages() {
  return detail::timed(2, "classical bouncer averages", 1.0, [](auto& out) {
    double closed = 0.0, numeric = 0.0;
    for (double z : {0.5, 1.0, 5.0, 12.3}) {
      const ClassicalBouncer cb(z, GravUnits::kDimensionlessG);
      // exact integral of the fall z - g t^2/2 over the first half period, doubled by symmetry
      const double half = 0.5 * cb.period();
      const double integral = 2.0 * (z * half - cb.g() * half * half * half / 6.0);
      closed = std::max(closed, std::abs(integral / cb.period() - classical_time_average(cb)) / z);
      numeric = std::max(numeric, std::abs(classical_time_average_numeric(cb) - 2.0 / 3.0 * z) / z);
    }
    out.push_back(make_check("classical.time_average_closed_form", closed, Relation::Below, 1e-12));
    out.push_back(make_check("classical.time_average_quadrature", numeric, Relation::Below, 1e-8));
    const double ens = classical_averages(GaussianMixedParams(5.0, 1.0)).ensemble_average;
    out.push_back(make_check("classical.ensemble_average_z0_5", std::abs(ens - 10.0 / 3.0), Relation::Below, 1e-8));
  });
}

inline Criterion criterion_spectral_bouncer() {
  return detail::timed(3, "spectral bouncer mean height and first bounce", 120.0, [](auto& out) {
    const GaussianMixedParams packet(5.0, 1.0);
    const double tau = ClassicalBouncer(5.0, GravUnits::kDimensionlessG).period();
    std::map<double, double> first_min;
    for (double eps : {0.01, 0.5, 1.0}) {
      const auto st = expand_gaussian(eps, packet);
      const GravQuadratureGrid q(st);
      const int n = 3000;
      const double h = 6.0 * tau / n;
      double sum = 0.0, prev = q.position_expectation(0.0), fmin = 0.0;
      bool found = false;
      sum += 0.5 * prev;
      for (int i = 1; i <= n; ++i) {
        const double z = q.position_expectation(i * h);
        sum += (i == n ? 0.5 : 1.0) * z;
        if (!found && z > prev && i >= 2) {
          found = true;
          fmin = detail::refine_minimum([&](double t) { return q.position_expectation(t); }, (i - 2) * h, i * h).second;
        }
        prev = z;
      }
      out.push_back(make_check("spectral.time_mean_" + detail::eps_column(eps), sum / n, Relation::Within, 3.0, 3.7));
      first_min[eps] = found ? fmin : NAN;
    }
    out.push_back(make_check("spectral.first_minimum_eps0.01_minus_eps1", first_min[0.01] - first_min[1.0],
                             Relation::Below, 0.0, 0.0, false));
  });
}

inline Criterion criterion_scaling_identity() {
  return detail::timed(4, "scaling identity of the scaled density matrix", 5.0, [](auto& out) {
    double free_err = 0.0, lin_err = 0.0, harm_err = 0.0;
    for (double eps : {0.04, 0.25, 0.81}) {
      const double s = std::sqrt(eps);
      // free: 5 x 5 x 5 grid in (x, y, t) for a kicked mixed packet
      const ClosedFormDensity fe(Free{}, Regime(eps), GaussianMixedParams(1.0, 0.5, 0.6, 0.3));
      const ClosedFormDensity f1(Free{}, Regime(1.0), GaussianMixedParams(1.0 / s, 0.5 / s, 0.6, 0.3));
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
          for (int k = 0; k < 5; ++k) {
            const double x = -0.2 + 0.35 * i, y = -0.1 + 0.3 * j, t = 0.2 + 0.45 * k;
            const auto a = free_density_value(fe, x, y, t);
            const auto b = free_density_value(f1, x / s, y / s, t / s) / s;
            free_err = std::max(free_err, std::abs(a - b) / std::abs(b));
          }
      // uniform field and trap: 25 positions x 5 times of density and current
      const GaussianMixedParams p(1.0, 0.4, 0.0, 0.3), pu(1.0 / s, 0.4 / s, 0.0, 0.3);
      const ClosedFormDensity le(Linear{1.5}, Regime(eps), p), l1(Linear{1.5 * s}, Regime(1.0), pu);
      const ClosedFormDensity he(Harmonic{2.0}, Regime(eps), p), h1(Harmonic{2.0 * s}, Regime(1.0), pu);
      for (int it = 0; it < 5; ++it)
        for (int ix = 0; ix < 25; ++ix) {
          const double t = 0.15 + 0.3 * it, x = -0.5 + 0.1 * ix;
          const double xl = x - 0.75 * t * t;
          const auto a = linear_pd_pcd(le, xl, t), b = linear_pd_pcd(l1, xl / s, t / s);
          lin_err = std::max({lin_err, std::abs(a.density - b.density / s) / a.density,
                              std::abs(a.current - b.current / s) / std::max(std::abs(a.current), 1e-300)});
          const auto c = harmonic_pd_pcd(he, x, t), d = harmonic_pd_pcd(h1, x / s, t / s);
          harm_err = std::max({harm_err, std::abs(c.density - d.density / s) / c.density,
                               std::abs(c.current - d.current / s) / std::max(std::abs(c.current), 1e-300)});
        }
    }
    out.push_back(make_check("scaling.free_density_matrix", free_err, Relation::Below, 1e-10));
    out.push_back(make_check("scaling.linear_density_current", lin_err, Relation::Below, 1e-10));
    out.push_back(make_check("scaling.harmonic_density_current", harm_err, Relation::Below, 1e-10));
  });
}

inline Criterion criterion_oracle() {
  return detail::timed(5, "grid Crank-Nicolson oracle equivalence", 300.0, [](auto& out) {
    const auto s = run_oracle_summary(experiment_defaults("oracle"));
    out.push_back(make_check("oracle.free_density_l2", s.free_density_l2, Relation::Below, 1e-6));
    out.push_back(make_check("oracle.grav_density_l2_t5", s.grav_density_l2, Relation::Below, 1e-5));
    out.push_back(make_check("oracle.harmonic_position_relative", s.harm_max_relative, Relation::Below, 1e-4));
  });
}

inline Criterion criterion_ehrenfest() {
  return detail::timed(6, "Ehrenfest relation with the wall term", 120.0, [](auto& out) {
    std::vector<double> grid;
    for (int i = 0; i <= 1571; ++i) grid.push_back(1e-3 * i);  // one <z> period, bounce at pi/4
    for (double eps : {1.0, 0.5, 0.01}) {
      const auto rep = ehrenfest_check(harmonic_bouncer(eps, GaussianMixedParams(5.0, 1.0)), grid);
      out.push_back(make_check("ehrenfest.residual_" + detail::eps_column(eps), rep.max_momentum_residual,
                               Relation::Below, 1e-5));
      out.push_back(make_check("ehrenfest.residual_without_force_" + detail::eps_column(eps),
                               rep.max_momentum_residual_no_force, Relation::Above, 1e-2));
    }
  });
}

inline Criterion criterion_wall_force() {
  return detail::timed(7, "non-classical wall force properties", 60.0, [](auto& out) {
    for (double eps : {1.0, 0.5, 0.01}) {
      const auto st = harmonic_bouncer(eps, GaussianMixedParams(5.0, 1.0));
      const double period = std::numbers::pi / st.omega();
      double fmin = INFINITY;
      for (int i = 0; i <= 4000; ++i) fmin = std::min(fmin, nonclassical_force(st, 2.0 * period * i / 4000).f_nc);
      double per = 0.0, agree = 0.0;
      for (double u : detail::weyl_points(50)) {
        const double t = 10.0 * u;
        const auto f = nonclassical_force(st, t);
        per = std::max(per, std::abs(nonclassical_force(st, t + period).f_nc - f.f_nc) / f.f_nc);
        agree = std::max(agree, std::abs(f.f_nc_closed - f.f_nc) / f.f_nc);
      }
      const std::string tag = detail::eps_column(eps);
      out.push_back(make_check("wall_force.minimum_" + tag, fmin, Relation::AtLeast, 0.0, 0.0, false));
      out.push_back(make_check("wall_force.period_mismatch_" + tag, per, Relation::Below, 1e-9));
      out.push_back(make_check("wall_force.closed_vs_derivative_" + tag, agree, Relation::Below, 1e-7));
    }
  });
}

inline Criterion criterion_fig1() {
  return detail::timed(8, "half-space reflection ordering", 120.0, [](auto& out) {
    Config cfg = experiment_defaults("fig1");
    cfg.set("samples", "1201");
    const auto series = run_fig1(cfg);
    const auto t = series[0].column("t");
    const double dt = t[1] - t[0];
    const auto q0 = detail::column_minimum(t, series[0].column("lambda=0"));
    const auto q7 = detail::column_minimum(t, series[0].column("lambda=0.7"));
    const auto c0 = detail::column_minimum(t, series[2].column("lambda=0"));
    const auto c7 = detail::column_minimum(t, series[2].column("lambda=0.7"));
    out.push_back(make_check("fig1.quantum_minus_classical_reflection_time", q0.first - c0.first, Relation::Below,
                             0.0, 0.0, false));
    out.push_back(make_check("fig1.quantum_minus_classical_minimum_height", q0.second - c0.second, Relation::Above,
                             0.0, 0.0, false));
    out.push_back(make_check("fig1.impure_minus_pure_reflection_time", q7.first - q0.first, Relation::Below, 0.0,
                             0.0, false));
    out.push_back(make_check("fig1.classical_reflection_time_spread", std::abs(c7.first - c0.first),
                             Relation::AtMost, dt, 0.0, false));
  });
}

inline Criterion criterion_momentum_limit() {
  return detail::timed(9, "momentum distributions in the classical limit", 1.0, [](auto& out) {
    double sp = 0.0, st = 0.0, dirac = 0.0;
    for (double lam : {0.0, 0.7}) {
      const GaussianMixedParams p(5.0, 1.0, -1.0, lam);
      const ClosedFormDensity q(Free{}, Regime(1e-12), p), c(Free{}, Classical{}, p);
      sp = std::max(sp, std::get<GaussianMomentum>(momentum_pd(q)).width);
      for (double t : {0.5, 2.0, 12.0, 100.0}) {
        const auto d = actual_momentum_distribution(q, t);
        st = std::max(st, is_dirac(d) ? 0.0 : std::get<GaussianMomentum>(d).width);
      }
      const auto m = momentum_pd(c), a = actual_momentum_distribution(c, 3.0);
      const bool ok = is_dirac(m) && is_dirac(a) && std::get<DiracMomentum>(m).at == p.p0() &&
                      std::get<DiracMomentum>(a).at == p.p0();
      dirac = std::max(dirac, ok ? 0.0 : 1.0);
    }
    out.push_back(make_check("momentum.sigma_p_eps1e-12", sp, Relation::Below, 1e-5));
    out.push_back(make_check("momentum.actual_width_eps1e-12", st, Relation::Below, 1e-5));
    out.push_back(make_check("momentum.classical_kind_not_dirac", dirac, Relation::AtMost, 0.0, 0.0, false));
  });
}

inline std::vector<std::function<Criterion()>> acceptance_criteria() {
  return {criterion_wkb,    criterion_classical_averages, criterion_spectral_bouncer,
          criterion_scaling_identity, criterion_oracle, criterion_ehrenfest,
          criterion_wall_force, criterion_fig1, criterion_momentum_limit};
}

// ---------------------------------------------------------------------------
// invariants beyond the numbered criteria

inline Criterion invariant_checks() {
  return detail::timed(0, "module invariants", 0.0, [](auto& out) {
    out.push_back(make_check("airy.ai_at_zero", std::abs(airy_ai(0.0) - 0.35502805388781723926), Relation::Below, 1e-15));
    out.push_back(make_check("airy.first_root_residual", std::abs(airy_ai(shared_airy_roots().root(1))), Relation::Below,
                             1e-12));
    {
      double drift = 0.0;
      for (double eps : {1.0, 0.1}) {
        const auto st = expand_gaussian(eps, GaussianMixedParams(5.0, 1.0));
        const GravQuadratureGrid q(st);
        const double n0 = q.norm(0.0);
        for (double t = 1.0; t <= 20.0; t += 1.0) drift = std::max(drift, std::abs(q.norm(t) - n0));
      }
      out.push_back(make_check("grav.norm_drift", drift, Relation::Below, 1e-10));
    }
    {
      const auto st = expand_gaussian(1.0, GaussianMixedParams(8.0, 1.0), 1e-10);
      out.push_back(make_check("grav.energy_far_packet", std::abs(energy_expectation(st) - 8.25), Relation::Below, 1e-7));
    }
    {
      double drift = 0.0;
      const auto hs = harmonic_bouncer(0.5, GaussianMixedParams(5.0, 1.0));
      const HarmonicQuadrature q(hs);
      const double n0 = q.moments(0.0).norm;
      for (double t = 0.25; t <= 10.0; t += 0.25) drift = std::max(drift, std::abs(q.moments(t).norm - n0));
      out.push_back(make_check("harmonic.norm_drift", drift, Relation::Below, 1e-8));
    }
    {
      const auto g = grid::Grid1D::half_line(20.0, 1024);
      auto st = grid::load(g, [](double z) { return std::exp(-(z - 5.0) * (z - 5.0) / 4.0); }, 0.7, 0.5);
      const double n0 = grid::observables(st).norm;
      grid::Propagator(g, 0.7, 0.5, [](double z) { return z; }, 1e-3).run(st, 10000);
      out.push_back(make_check("grid.unitarity_10k_steps", std::abs(grid::observables(st).norm - n0) / n0,
                               Relation::Below, 1e-9));
    }
    {
      const ClosedFormDensity cf(Free{}, Regime(1.0), GaussianMixedParams(5.0, 1.0, -1.0));
      auto err = [&](double dz, double dt) {
        const int n = static_cast<int>(std::lround(40.0 / dz)) + 1;
        const grid::Grid1D g(-15.0, 25.0, n);
        auto st = grid::load(
            g, [](double x) { return std::exp(-(x - 5.0) * (x - 5.0) / 4.0 - std::complex<double>(0, x - 5.0)) *
                                     std::pow(2 * std::numbers::pi, -0.25); },
            1.0, 1.0);
        grid::PropagatorOptions o;
        o.stencil = grid::Stencil::Standard;
        st = grid::propagate(st, Free{}, dt, static_cast<int>(std::lround(1.0 / dt)), o);
        return grid::density_l2_error(st, [&](double x) { return position_pd(cf, x, 1.0); });
      };
      out.push_back(make_check("grid.second_order_ratio", err(0.04, 4e-3) / err(0.02, 2e-3), Relation::Within, 3.5, 4.5));
    }
    {
      double worst = INFINITY;
      for (double eps : {1.0, 0.3}) {
        const ClosedFormDensity cf(Free{}, Regime(eps), GaussianMixedParams(0.0, 1.0, 0.5, 0.4));
        for (double t : {0.0, 1.0, 5.0})
          worst = std::min(worst, free_moments(cf, t).uncertainty_product - 0.5 * cf.scaled_hbar());
      }
      out.push_back(make_check("free.uncertainty_bound_margin", worst, Relation::AtLeast, 0.0, 0.0, false));
    }
  });
}

// ---------------------------------------------------------------------------
// reporting

inline void print_machine_line(std::ostream& os, const CheckResult& c) {
  os << "CHECK name=" << c.name << " measured=" << format17(c.measured) << " tolerance=" << c.tolerance_text()
     << " result=" << (c.pass ? "PASS" : "FAIL") << '\n';
}

inline void print_report(std::ostream& os, const std::vector<Criterion>& results) {
  int failed = 0, total = 0;
  for (const auto& cr : results) {
    os << (cr.id ? "Criterion " + std::to_string(cr.id) : std::string("Invariants")) << ": " << cr.title << "  ["
       << (cr.pass() ? "PASS" : "FAIL") << ", " << detail::format_seconds(cr.seconds) << "]\n";
    for (const auto& c : cr.checks) {
      ++total;
      failed += c.pass ? 0 : 1;
      os << "  " << (c.pass ? "ok   " : "FAIL ") << c.name << "  measured " << format17(c.measured) << "  required "
         << c.tolerance_text() << '\n';
    }
  }
  os << '\n' << total - failed << " of " << total << " checks passed\n\n";
  for (const auto& cr : results)
    for (const auto& c : cr.checks) print_machine_line(os, c);
}

}  // namespace sqt
