#pragma once

// Figure and oracle experiments. Each run resolves its parameters from a
// Config (defaults from experiment_defaults), validates them by building
// the domain objects up front, then fills one or more TimeSeries.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "sqt/analytic.hpp"
#include "sqt/bouncer_grav.hpp"
#include "sqt/bouncer_harm.hpp"
#include "sqt/config.hpp"
#include "sqt/csv.hpp"
#include "sqt/errors.hpp"
#include "sqt/grid_oracle.hpp"

namespace sqt {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"fig1", "fig2", "fig3", "fig4", "fig5", "oracle"};
  return names;
}

/// Default configuration of an experiment; also the set of keys it accepts.
inline Config experiment_defaults(const std::string& name) {
  // six classical bounces of the default packet (period 2 sqrt(z0) for g = 2)
  const std::string six_bounces = detail::format_double(12.0 * std::sqrt(5.0));
  if (name == "fig1")
    return {{"eps", "1"},      {"mass", "1"},  {"hbar", "1"},     {"sigma0", "1"},
            {"x0", "5"},       {"p0", "-1"},   {"lambda", "0,0.7"}, {"t_start", "0"},
            {"t_end", "12"},   {"samples", "241"}};
  if (name == "fig2")
    return {{"eps", "0.01,0.1,0.5,0.8"}, {"sigma0", "1"}, {"z0", "5"}, {"expansion_tol", "1e-8"},
            {"captured_fraction", "0.99"}};
  if (name == "fig3")
    return {{"eps", "0.1,0.5,1"}, {"sigma0", "1"},   {"z0", "5"},          {"times", "5,10,15,20"},
            {"z_max", "15"},      {"samples", "601"}, {"expansion_tol", "1e-8"}};
  if (name == "fig4")
    return {{"eps", "0.01,0.5,1"}, {"sigma0", "1"}, {"z0", "5"},           {"t_start", "0"},
            {"t_end", six_bounces}, {"samples", "1201"}, {"expansion_tol", "1e-8"}};
  if (name == "fig5")
    return {{"eps", "1,0.5,0.01"}, {"sigma0", "1"},  {"z0", "5"},
            {"t_start", "0"},      {"t_end", detail::format_double(std::numbers::pi)}, {"samples", "1201"}};
  if (name == "oracle")
    return {{"eps", "1,0.5,0.01"}, {"sigma0", "1"},       {"z0", "5"},
            {"free_x0", "5"},      {"free_p0", "-1"},     {"free_dz", "0.01"},
            {"free_dt", "1e-4"},   {"free_t", "2"},       {"grav_points", "8192"},
            {"grav_dt", "1e-4"},   {"grav_t", "5"},       {"harm_points", "8192"},
            {"harm_dt", "2.5e-5"}, {"harm_t_end", "3"},   {"harm_samples", "301"}};
  throw config_error("unknown experiment '" + name + "'");
}

/// Defaults, then the file config, then command-line overrides.
inline Config resolve_config(const std::string& name, const Config& file, const Config& overrides) {
  Config cfg = experiment_defaults(name);
  cfg.merge(file);
  cfg.merge(overrides);
  return cfg;
}

namespace detail {

// Runs f with argument-validation errors reported as configuration errors.
template <class F>
auto validated(const std::string& experiment, F&& f) {
  try {
    return f();
  } catch (const config_error&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw config_error(experiment + ": " + e.what());
  }
}

inline std::vector<double> time_grid(const Config& cfg) {
  const double a = cfg.get_double("t_start"), b = cfg.get_double("t_end");
  const int n = cfg.get_int("samples");
  if (!(b > a)) throw config_error("time grid: t_end must exceed t_start");
  if (n < 2) throw config_error("time grid: samples must be >= 2");
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = i + 1 == n ? b : a + (b - a) * i / (n - 1);
  return t;
}

inline std::vector<double> eps_list(const Config& cfg) {
  auto eps = cfg.get_list("eps");
  validated("eps", [&] {
    for (double e : eps) (void)Regime(e);  // (0, 1]
    return 0;
  });
  return eps;
}

inline std::string eps_column(double eps) { return "eps=" + format_double(eps); }

inline TimeSeries make_series(const std::string& name, const std::string& experiment, const Config& cfg,
                              const std::string& units, std::vector<std::string> columns) {
  TimeSeries ts;
  ts.name = name;
  ts.columns = std::move(columns);
  ts.metadata.emplace_back("experiment", experiment);
  ts.metadata.emplace_back("units", units);
  for (const auto& [k, v] : cfg.entries()) ts.metadata.emplace_back(k, v);
  return ts;
}

inline constexpr const char* kNaturalUnits = "natural units, hbar and m as configured";
inline constexpr const char* kGravUnits = "gravitational units hbar=1 m=1/2 g=2";
inline constexpr const char* kHarmUnits = "harmonic units hbar=1 m=1/4 omega=2, time in 2/omega";

}  // namespace detail

// ---------------------------------------------------------------------------

/// Half-space reflection of a kicked packet: <x> and Delta x, quantum and
/// classical, one column per impurity.
inline std::vector<TimeSeries> run_fig1(const Config& cfg) {
  const auto t = detail::time_grid(cfg);
  const auto lambdas = cfg.get_list("lambda");
  std::vector<ClosedFormDensity> quantum, classical;
  detail::validated("fig1", [&] {
    const Regime regime(cfg.get_double("eps"), cfg.get_double("hbar"), cfg.get_double("mass"));
    for (double lam : lambdas) {
      const GaussianMixedParams p(cfg.get_double("x0"), cfg.get_double("sigma0"), cfg.get_double("p0"), lam);
      if (!(p.x0() > 0.0)) throw std::invalid_argument("x0 must be positive (wall at x = 0)");
      quantum.emplace_back(HalfSpaceFree{}, regime, p);
      classical.emplace_back(HalfSpaceFree{}, Classical{regime.hbar(), regime.mass()}, p);
    }
    return 0;
  });
  std::vector<std::string> cols{"t"};
  for (double lam : lambdas) cols.push_back("lambda=" + detail::format_double(lam));
  auto qm = detail::make_series("fig1_quantum_mean", "fig1", cfg, detail::kNaturalUnits, cols);
  auto qd = detail::make_series("fig1_quantum_dispersion", "fig1", cfg, detail::kNaturalUnits, cols);
  auto cm = detail::make_series("fig1_classical_mean", "fig1", cfg, detail::kNaturalUnits, cols);
  auto cdsp = detail::make_series("fig1_classical_dispersion", "fig1", cfg, detail::kNaturalUnits, cols);
  for (double ti : t) {
    std::vector<double> a{ti}, b{ti}, c{ti}, d{ti};
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      const auto q = halfspace_observables(quantum[k], ti);
      const auto cl = halfspace_observables(classical[k], ti);
      a.push_back(q.mean);
      b.push_back(q.dispersion);
      c.push_back(cl.mean);
      d.push_back(cl.dispersion);
    }
    qm.add_row(std::move(a));
    qd.add_row(std::move(b));
    cm.add_row(std::move(c));
    cdsp.add_row(std::move(d));
  }
  return {qm, qd, cm, cdsp};
}

/// Smallest K with sum_{n<=K} |C_n|^2 >= fraction * half-line norm.
inline int modes_for_fraction(const std::vector<double>& weights, double half_norm, double fraction) {
  double s = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    s += weights[n];
    if (s >= fraction * half_norm) return static_cast<int>(n + 1);
  }
  return -1;
}

/// Expansion weights |C_n|^2 of the bouncer packet, one column per eps.
inline std::vector<TimeSeries> run_fig2(const Config& cfg) {
  const auto eps = detail::eps_list(cfg);
  const double tol = cfg.get_double("expansion_tol");
  const double fraction = cfg.get_double("captured_fraction");
  if (!(fraction > 0.0 && fraction < 1.0)) throw config_error("fig2: captured_fraction must lie in (0, 1)");
  const GaussianMixedParams packet = detail::validated(
      "fig2", [&] { return GaussianMixedParams(cfg.get_double("z0"), cfg.get_double("sigma0")); });
  std::vector<AirySpectralState> states;
  detail::validated("fig2", [&] {
    for (double e : eps) states.push_back(expand_gaussian(e, packet, tol));
    return 0;
  });
  int n_max = 0;
  for (const auto& s : states) n_max = std::max(n_max, s.truncation());
  std::vector<std::string> cols{"n"};
  for (double e : eps) cols.push_back(detail::eps_column(e));
  auto ts = detail::make_series("fig2_weights", "fig2", cfg, detail::kGravUnits, cols);
  std::vector<std::vector<double>> w(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    for (int n = 1; n <= n_max; ++n) {
      const double c = n <= states[k].truncation()
                           ? states[k].coeffs()[n - 1]
                           : detail::airy_gaussian_overlap(n, states[k].bar_sigma0(), states[k].bar_z0());
      w[k].push_back(c * c);
    }
    ts.metadata.emplace_back("modes_" + detail::format_double(fraction) + "[" + detail::eps_column(eps[k]) + "]",
                             std::to_string(modes_for_fraction(w[k], states[k].initial_norm(), fraction)));
    ts.metadata.emplace_back("truncation[" + detail::eps_column(eps[k]) + "]", std::to_string(states[k].truncation()));
  }
  for (int n = 1; n <= n_max; ++n) {
    std::vector<double> row{static_cast<double>(n)};
    for (const auto& wk : w) row.push_back(wk[n - 1]);
    ts.add_row(std::move(row));
  }
  return {ts};
}

/// Density snapshots |psi(z, t)|^2, one file per eps, one column per time.
inline std::vector<TimeSeries> run_fig3(const Config& cfg) {
  const auto eps = detail::eps_list(cfg);
  const auto times = cfg.get_list("times");
  const double z_max = cfg.get_double("z_max");
  const int n = cfg.get_int("samples");
  if (!(z_max > 0.0) || n < 2) throw config_error("fig3: need z_max > 0 and samples >= 2");
  const GaussianMixedParams packet = detail::validated(
      "fig3", [&] { return GaussianMixedParams(cfg.get_double("z0"), cfg.get_double("sigma0")); });
  std::vector<TimeSeries> out;
  for (double e : eps) {
    const auto st = detail::validated("fig3", [&] { return expand_gaussian(e, packet, cfg.get_double("expansion_tol")); });
    std::vector<std::string> cols{"z"};
    for (double t : times) cols.push_back("t=" + detail::format_double(t));
    auto ts = detail::make_series("fig3_density_eps" + detail::format_double(e), "fig3", cfg, detail::kGravUnits, cols);
    ts.metadata.emplace_back("eps_value", detail::format_double(e));
    for (int i = 0; i < n; ++i) {
      const double z = i + 1 == n ? z_max : z_max * i / (n - 1);
      std::vector<double> row{z};
      for (double t : times) row.push_back(density(st, z, t));
      ts.add_row(std::move(row));
    }
    out.push_back(std::move(ts));
  }
  return out;
}

/// <z>(t) with the classical ensemble average as reference, and |A(t)|^2.
inline std::vector<TimeSeries> run_fig4(const Config& cfg) {
  const auto eps = detail::eps_list(cfg);
  const auto t = detail::time_grid(cfg);
  const GaussianMixedParams packet = detail::validated(
      "fig4", [&] { return GaussianMixedParams(cfg.get_double("z0"), cfg.get_double("sigma0")); });
  std::vector<std::string> pos_cols{"t"}, ac_cols{"t"};
  for (double e : eps) {
    pos_cols.push_back(detail::eps_column(e));
    ac_cols.push_back(detail::eps_column(e));
  }
  pos_cols.push_back("classical_average");
  auto pos = detail::make_series("fig4_position", "fig4", cfg, detail::kGravUnits, pos_cols);
  auto ac = detail::make_series("fig4_autocorrelation", "fig4", cfg, detail::kGravUnits, ac_cols);
  const double reference = classical_averages(packet).ensemble_average;
  std::vector<AirySpectralState> states;
  detail::validated("fig4", [&] {
    for (double e : eps) states.push_back(expand_gaussian(e, packet, cfg.get_double("expansion_tol")));
    return 0;
  });
  std::vector<GravQuadratureGrid> grids;
  for (const auto& s : states) grids.emplace_back(s);
  for (double ti : t) {
    std::vector<double> a{ti}, b{ti};
    for (std::size_t k = 0; k < states.size(); ++k) {
      a.push_back(grids[k].position_expectation(ti));
      b.push_back(std::norm(autocorrelation(states[k], ti)));
    }
    a.push_back(reference);
    pos.add_row(std::move(a));
    ac.add_row(std::move(b));
  }
  return {pos, ac};
}

/// Harmonic bouncer <z>(t) and wall force, one column per eps.
inline std::vector<TimeSeries> run_fig5(const Config& cfg) {
  const auto eps = detail::eps_list(cfg);
  const auto t = detail::time_grid(cfg);
  std::vector<HarmonicBouncerState> states;
  detail::validated("fig5", [&] {
    const GaussianMixedParams packet(cfg.get_double("z0"), cfg.get_double("sigma0"));
    for (double e : eps) states.push_back(harmonic_bouncer(e, packet));
    return 0;
  });
  std::vector<std::string> cols{"t"};
  for (double e : eps) cols.push_back(detail::eps_column(e));
  auto pos = detail::make_series("fig5_position", "fig5", cfg, detail::kHarmUnits, cols);
  auto force = detail::make_series("fig5_wall_force", "fig5", cfg, detail::kHarmUnits, cols);
  for (double ti : t) {
    std::vector<double> a{ti}, b{ti};
    for (const auto& s : states) {
      a.push_back(position_expectation_regular(s, ti));
      b.push_back(nonclassical_force(s, ti).f_nc);
    }
    pos.add_row(std::move(a));
    force.add_row(std::move(b));
  }
  return {pos, force};
}

// ---------------------------------------------------------------------------
// grid oracle comparisons

struct OracleSummary {
  double free_density_l2;
  double grav_density_l2;
  double harm_max_relative;  // max over eps and sample times
  double seconds;
  std::vector<TimeSeries> series;
};

inline OracleSummary run_oracle_summary(const Config& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto eps = detail::eps_list(cfg);
  const double sigma0 = cfg.get_double("sigma0"), z0 = cfg.get_double("z0");
  const GaussianMixedParams bouncer_packet =
      detail::validated("oracle", [&] { return GaussianMixedParams(z0, sigma0); });
  OracleSummary out{};

  // free packet on the full line, natural units
  {
    const double x0 = cfg.get_double("free_x0"), p0 = cfg.get_double("free_p0");
    const double dz = cfg.get_double("free_dz"), dt = cfg.get_double("free_dt"), tf = cfg.get_double("free_t");
    if (!(dz > 0.0 && dt > 0.0 && tf > 0.0)) throw config_error("oracle: free_dz, free_dt, free_t must be positive");
    const ClosedFormDensity cf = detail::validated(
        "oracle", [&] { return ClosedFormDensity(Free{}, Regime(1.0), GaussianMixedParams(x0, sigma0, p0)); });
    const double reach = std::abs(p0) * tf + 15.0 * sigma_t(cf.kind(), cf.params(), tf);
    const double lo = std::min(x0, x0 + p0 * tf) - reach, hi = std::max(x0, x0 + p0 * tf) + reach;
    const int n = static_cast<int>(std::ceil((hi - lo) / dz)) + 1;
    const grid::Grid1D g(lo, lo + (n - 1) * dz, n);
    auto st = grid::load(
        g,
        [&](double x) {
          return std::pow(2 * std::numbers::pi * sigma0 * sigma0, -0.25) *
                 std::exp(-(x - x0) * (x - x0) / (4 * sigma0 * sigma0) + std::complex<double>(0, p0 * (x - x0)));
        },
        1.0, 1.0);
    st = grid::propagate(st, Free{}, dt, static_cast<int>(std::lround(tf / dt)));
    auto closed = [&](double x) { return position_pd(cf, x, tf); };
    out.free_density_l2 = grid::density_l2_error(st, closed);
    auto ts = detail::make_series("oracle_free", "oracle", cfg, detail::kNaturalUnits, {"x", "grid", "closed_form"});
    ts.metadata.emplace_back("density_l2", format17(out.free_density_l2));
    const int stride = std::max(1, g.size() / 2000);
    for (int i = 0; i < g.size(); i += stride) ts.add_row({g.z(i), std::norm(st.psi[i]), closed(g.z(i))});
    out.series.push_back(std::move(ts));
  }

  // gravitational bouncer: grid started from the spectral state's own t = 0 wavefunction
  {
    const int n = cfg.get_int("grav_points");
    const double dt = cfg.get_double("grav_dt"), tf = cfg.get_double("grav_t");
    if (!(dt > 0.0 && tf > 0.0)) throw config_error("oracle: grav_dt and grav_t must be positive");
    const auto sp = detail::validated("oracle", [&] { return expand_gaussian(1.0, bouncer_packet); });
    const auto g = grid::default_half_line(z0, sigma0, sigma0, n);
    auto st = grid::load(g, [&](double z) { return evolve(sp, z, 0.0); }, sp.hbar(), GravUnits::kDimensionlessMass);
    st = grid::propagate(st, Linear{GravUnits::kDimensionlessG}, dt, static_cast<int>(std::lround(tf / dt)));
    std::vector<double> spectral(g.size());
    for (int i = 0; i < g.size(); ++i) spectral[i] = density(sp, g.z(i), tf);
    int idx = 0;
    out.grav_density_l2 = grid::density_l2_error(st, [&](double) { return spectral[idx++]; });
    auto ts = detail::make_series("oracle_grav", "oracle", cfg, detail::kGravUnits, {"z", "grid", "spectral"});
    ts.metadata.emplace_back("density_l2", format17(out.grav_density_l2));
    const int stride = std::max(1, g.size() / 2000);
    for (int i = 0; i < g.size(); i += stride) ts.add_row({g.z(i), std::norm(st.psi[i]), spectral[i]});
    out.series.push_back(std::move(ts));
  }

  // harmonic bouncer <z>(t) against the closed form
  {
    const int n = cfg.get_int("harm_points");
    const double dt = cfg.get_double("harm_dt"), tf = cfg.get_double("harm_t_end");
    const int samples = cfg.get_int("harm_samples");
    if (!(dt > 0.0 && tf > 0.0) || samples < 2) throw config_error("oracle: bad harmonic grid settings");
    const int steps_per_sample = static_cast<int>(std::lround(tf / (samples - 1) / dt));
    if (steps_per_sample < 1) throw config_error("oracle: harm_dt larger than the sample spacing");
    std::vector<std::string> cols{"t"};
    for (double e : eps) {
      cols.push_back("grid_" + detail::eps_column(e));
      cols.push_back("closed_" + detail::eps_column(e));
    }
    auto ts = detail::make_series("oracle_harmonic", "oracle", cfg, detail::kHarmUnits, cols);
    std::vector<std::vector<double>> table(samples, std::vector<double>(1 + 2 * eps.size()));
    for (std::size_t k = 0; k < eps.size(); ++k) {
      const auto hs = detail::validated("oracle", [&] { return harmonic_bouncer(eps[k], bouncer_packet); });
      const auto g = grid::default_half_line(z0, sigma0, sigma0 * hs.kappa(), n);
      const grid::Potential V = grid::potential_of(Harmonic{hs.omega()}, hs.mass());
      auto st = grid::load(g, [&](double z) { return hardwall_wavefunction(hs, z, 0.0); }, hs.hbar(), hs.mass());
      grid::PropagatorOptions opts;
      opts.energy_offset = grid::observables(st, V).energy;
      const grid::Propagator prop(g, hs.hbar(), hs.mass(), V, dt, opts);
      for (int s = 0; s < samples; ++s) {
        if (s > 0) prop.run(st, steps_per_sample);
        const auto o = grid::observables(st, V);
        const double grid_z = o.z_mean * o.norm;  // closed form is not renormalised
        const double closed = position_expectation_closed(hs, st.t);
        table[s][0] = st.t;
        table[s][1 + 2 * k] = grid_z;
        table[s][2 + 2 * k] = closed;
        out.harm_max_relative = std::max(out.harm_max_relative, std::abs(grid_z - closed) / std::abs(closed));
      }
    }
    ts.metadata.emplace_back("max_relative", format17(out.harm_max_relative));
    for (auto& row : table) ts.add_row(std::move(row));
    out.series.push_back(std::move(ts));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline std::vector<TimeSeries> run_oracle(const Config& cfg) { return run_oracle_summary(cfg).series; }

inline std::vector<TimeSeries> run_experiment(const std::string& name, const Config& cfg) {
  if (name == "fig1") return run_fig1(cfg);
  if (name == "fig2") return run_fig2(cfg);
  if (name == "fig3") return run_fig3(cfg);
  if (name == "fig4") return run_fig4(cfg);
  if (name == "fig5") return run_fig5(cfg);
  if (name == "oracle") return run_oracle(cfg);
  throw config_error("unknown experiment '" + name + "'");
}

}  // namespace sqt
