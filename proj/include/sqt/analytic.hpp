#pragma once

// Closed-form evolution of the Gaussian mixed state in free space, the
// half-space behind a hard wall, a uniform field and a harmonic trap.
//
// Every evaluator is parameterised by a RegimeKind: either a scaled Regime
// (any eps in (0,1]) or the classical limit, which is its own set of closed
// forms rather than eps = 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

#include "sqt/errors.hpp"
#include "sqt/quadrature.hpp"
#include "sqt/regime.hpp"

namespace sqt {

struct Free {};
struct HalfSpaceFree {};
struct Linear {
  double g;
};
struct Harmonic {
  double omega;
};
using Scenario = std::variant<Free, Linear, Harmonic, HalfSpaceFree>;

/// Classical limit. hbar only enters through rho_cl = A_cl exp(i S_cl / hbar).
struct Classical {
  double hbar = 1.0;
  double mass = 1.0;
};
using RegimeKind = std::variant<Regime, Classical>;

inline bool is_classical(const RegimeKind& kind) { return std::holds_alternative<Classical>(kind); }

namespace detail {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline double mass_of(const RegimeKind& kind) {
  return std::visit(overloaded{[](const Regime& r) { return r.mass(); },
                               [](const Classical& c) { return c.mass; }},
                    kind);
}

inline const char* scenario_name(const Scenario& s) {
  return std::visit(overloaded{[](const Free&) { return "Free"; },
                               [](const Linear&) { return "Linear"; },
                               [](const Harmonic&) { return "Harmonic"; },
                               [](const HalfSpaceFree&) { return "HalfSpaceFree"; }},
                    s);
}
}  // namespace detail

/// Amplitude and phase of a density-matrix element; value() = A exp(i S/hbar).
struct PolarValue {
  double amplitude;
  double phase;
  std::complex<double> value(double hbar) const {
    return std::polar(amplitude, phase / hbar);
  }
};

/// Evaluator bundle for one scenario, one regime kind and one initial
/// packet.
class ClosedFormDensity {
 public:
  ClosedFormDensity(Scenario scenario, RegimeKind kind, GaussianMixedParams params)
      : scenario_(scenario), kind_(kind), params_(params) {
    std::visit(detail::overloaded{
                   [](const Linear& l) {
                     if (!(l.g > 0.0)) throw std::invalid_argument("Linear: g must be positive");
                   },
                   [](const Harmonic& h) {
                     if (!(h.omega > 0.0))
                       throw std::invalid_argument("Harmonic: omega must be positive");
                   },
                   [](const auto&) {}},
               scenario_);
    const bool needs_rest = std::holds_alternative<Linear>(scenario_) ||
                            std::holds_alternative<Harmonic>(scenario_);
    if (needs_rest && params_.p0() != 0.0)
      throw std::invalid_argument(
          "ClosedFormDensity: the linear and harmonic closed forms assume zero kick momentum "
          "(p0 = 0)");
  }

  const Scenario& scenario() const { return scenario_; }
  const RegimeKind& kind() const { return kind_; }
  const GaussianMixedParams& params() const { return params_; }
  bool classical() const { return is_classical(kind_); }
  double mass() const { return detail::mass_of(kind_); }

  /// Effective Planck constant that divides the phase: hbar*sqrt(eps) in a
  /// scaled regime, the unscaled hbar in the classical limit.
  double phase_hbar() const {
    return std::visit(detail::overloaded{[](const Regime& r) { return r.scaled_hbar(); },
                                         [](const Classical& c) { return c.hbar; }},
                      kind_);
  }

  /// hbar-tilde; throws in the classical limit where it does not exist.
  double scaled_hbar() const {
    if (classical()) throw std::invalid_argument("scaled_hbar: classical kind has no scaled hbar");
    return std::get<Regime>(kind_).scaled_hbar();
  }

  template <class S>
  const S& require(const char* op) const {
    if (!std::holds_alternative<S>(scenario_))
      throw std::invalid_argument(std::string(op) + ": scenario mismatch (have " +
                                  detail::scenario_name(scenario_) + ")");
    return std::get<S>(scenario_);
  }

  void require_scaled(const char* op) const {
    if (classical())
      throw std::invalid_argument(std::string(op) + ": requires a scaled regime");
  }

 private:
  Scenario scenario_;
  RegimeKind kind_;
  GaussianMixedParams params_;
};

// ---------------------------------------------------------------------------
// widths

/// rms width of the free (and uniform-field) packet; constant sigma0 in the
/// classical limit.
inline double sigma_t(const RegimeKind& kind, const GaussianMixedParams& params, double t) {
  if (is_classical(kind)) return params.sigma0();
  const auto& r = std::get<Regime>(kind);
  const double hb = r.scaled_hbar();
  const double s0 = params.sigma0();
  const double m = r.mass();
  return s0 * std::sqrt(1.0 + params.mixing_factor() * hb * hb * t * t / (4.0 * m * m * s0 * s0 * s0 * s0));
}

/// rms width in the harmonic trap. Safe at every t.
inline double harmonic_sigma_t(const RegimeKind& kind, const GaussianMixedParams& params,
                               double omega, double t) {
  const double c = std::cos(omega * t);
  if (is_classical(kind)) return params.sigma0() * std::abs(c);
  const auto& r = std::get<Regime>(kind);
  const double hb = r.scaled_hbar();
  const double s0 = params.sigma0();
  const double m = r.mass();
  const double s = std::sin(omega * t);
  return s0 * std::sqrt(c * c + params.mixing_factor() * hb * hb * s * s /
                                    (4.0 * m * m * s0 * s0 * s0 * s0 * omega * omega));
}

// ---------------------------------------------------------------------------
// free space

/// Amplitude and phase of the freely evolving density matrix.
inline PolarValue free_density(const ClosedFormDensity& cfd, double x, double y, double t) {
  cfd.require<Free>("free_density");
  const auto& p = cfd.params();
  const double m = cfd.mass();
  const double lam = p.impurity();
  const double x0 = p.x0(), p0 = p.p0(), s0 = p.sigma0();
  const double st = sigma_t(cfd.kind(), p, t);
  const double centre = x0 + p0 * t / m;
  const double quad = (x * x + y * y) / (2.0 * (1.0 - lam)) - lam / (1.0 - lam) * x * y +
                      2.0 * x0 * p0 * t / m - centre * (x + y) + x0 * x0 +
                      p0 * p0 * t * t / (m * m);
  const double amp =
      std::exp(-quad / (2.0 * st * st)) / (std::sqrt(2.0 * std::numbers::pi) * st);
  if (cfd.classical()) return {amp, p0 * (x - y)};
  const double hb = cfd.scaled_hbar();
  const double phase = hb * hb * t / (8.0 * m * s0 * s0 * st * st) * p.mixing_factor() *
                           (x * x - y * y - 2.0 * x0 * (x - y)) +
                       s0 * s0 / (st * st) * p0 * (x - y);
  return {amp, phase};
}

inline std::complex<double> free_density_value(const ClosedFormDensity& cfd, double x, double y,
                                               double t) {
  return free_density(cfd, x, y, t).value(cfd.phase_hbar());
}

/// Density matrix in the momentum representation (scaled regime only).
inline std::complex<double> momentum_density_matrix(const ClosedFormDensity& cfd, double p,
                                                    double q, double t) {
  cfd.require<Free>("momentum_density_matrix");
  cfd.require_scaled("momentum_density_matrix");
  const auto& par = cfd.params();
  const double hb = cfd.scaled_hbar();
  const double m = cfd.mass();
  const double lam = par.impurity();
  const double s0 = par.sigma0();
  const double p0 = par.p0();
  const double pre = s0 / hb * std::sqrt(2.0 / std::numbers::pi * (1.0 - lam) / (1.0 + lam));
  const double dp = p - p0, dq = q - p0;
  const double real_exp =
      -s0 * s0 * (dp * dp + dq * dq - 2.0 * lam * dp * dq) / ((1.0 + lam) * hb * hb);
  const double phase = -(p - q) * ((p + q) * t + 2.0 * m * par.x0()) / (2.0 * m * hb);
  return std::polar(pre * std::exp(real_exp), phase);
}

struct GaussianMomentum {
  double mean;
  double width;
  double density(double p) const {
    const double u = (p - mean) / width;
    return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * width);
  }
};
struct DiracMomentum {
  double at;
};
/// Momentum distributions. The classical limit is a symbolic Dirac delta,
/// never a narrow Gaussian.
using MomentumDistribution = std::variant<GaussianMomentum, DiracMomentum>;

inline bool is_dirac(const MomentumDistribution& d) {
  return std::holds_alternative<DiracMomentum>(d);
}

/// Position probability density. Free and uniform-field scenarios share the
/// Gaussian form; the harmonic trap has its own width and centre.
inline double position_pd(const ClosedFormDensity& cfd, double x, double t) {
  const auto& p = cfd.params();
  const double m = cfd.mass();
  double centre = 0.0, width = 0.0;
  if (std::holds_alternative<Free>(cfd.scenario())) {
    centre = p.x0() + p.p0() * t / m;
    width = sigma_t(cfd.kind(), p, t);
  } else if (const auto* lin = std::get_if<Linear>(&cfd.scenario())) {
    centre = p.x0() - 0.5 * lin->g * t * t;
    width = sigma_t(cfd.kind(), p, t);
  } else if (const auto* h = std::get_if<Harmonic>(&cfd.scenario())) {
    centre = p.x0() * std::cos(h->omega * t);
    width = harmonic_sigma_t(cfd.kind(), p, h->omega, t);
    if (width == 0.0)
      throw singular_time_error("position_pd: classical harmonic density collapses at cos(wt)=0", t);
  } else {
    throw std::invalid_argument("position_pd: use halfspace_density for HalfSpaceFree");
  }
  const double u = (x - centre) / width;
  return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * width);
}

/// Measured momentum distribution of the free packet; time independent.
inline MomentumDistribution momentum_pd(const ClosedFormDensity& cfd) {
  cfd.require<Free>("momentum_pd");
  const auto& p = cfd.params();
  if (cfd.classical()) return DiracMomentum{p.p0()};
  const double width =
      cfd.scaled_hbar() / (2.0 * p.sigma0()) * std::sqrt(p.mixing_factor());
  return GaussianMomentum{p.p0(), width};
}

struct FreeMoments {
  double x_mean;
  double x2_mean;
  double p_mean;
  double p2_mean;
  double uncertainty_product;
};

inline FreeMoments free_moments(const ClosedFormDensity& cfd, double t) {
  cfd.require<Free>("free_moments");
  cfd.require_scaled("free_moments");
  const auto& p = cfd.params();
  const double m = cfd.mass();
  const double hb = cfd.scaled_hbar();
  const double k = p.mixing_factor();
  const double st = sigma_t(cfd.kind(), p, t);
  const double xm = p.x0() + p.p0() * t / m;
  const double p2 = p.p0() * p.p0() + hb * hb / (4.0 * p.sigma0() * p.sigma0()) * k;
  const double s0 = p.sigma0();
  const double product =
      0.5 * hb * std::sqrt(k) * std::sqrt(1.0 + k * hb * hb * t * t / (4.0 * m * m * s0 * s0 * s0 * s0));
  return {xm, xm * xm + st * st, p.p0(), p2, product};
}

/// Momentum field d/dx of the phase on the diagonal. In the classical limit
/// every particle carries p0.
inline double momentum_field_free(const ClosedFormDensity& cfd, double x, double t) {
  cfd.require<Free>("momentum_field_free");
  const auto& p = cfd.params();
  if (cfd.classical()) return p.p0();
  const double m = cfd.mass();
  const double hb = cfd.scaled_hbar();
  const double s0 = p.sigma0();
  const double st = sigma_t(cfd.kind(), p, t);
  return p.p0() * s0 * s0 / (st * st) +
         hb * hb * t / (4.0 * m * s0 * s0 * st * st) * p.mixing_factor() * (x - p.x0());
}

/// Dressed trajectory: classical centre path plus the width-driven term.
inline double scaled_trajectory_free(const ClosedFormDensity& cfd, double x_init, double t) {
  cfd.require<Free>("scaled_trajectory_free");
  const auto& p = cfd.params();
  const double m = cfd.mass();
  if (cfd.classical()) return x_init + p.p0() * t / m;
  return p.x0() + p.p0() * t / m + (x_init - p.x0()) * sigma_t(cfd.kind(), p, t) / p.sigma0();
}

/// Distribution of trajectory momenta m * d(sigma_t)/dt induced by the
/// initial position distribution. Reports a Dirac delta once the width
/// underflows 1e-300 (t = 0, or the classical kind).
inline MomentumDistribution actual_momentum_distribution(const ClosedFormDensity& cfd, double t) {
  cfd.require<Free>("actual_momentum_distribution");
  const auto& p = cfd.params();
  if (cfd.classical()) return DiracMomentum{p.p0()};
  const double m = cfd.mass();
  const double hb = cfd.scaled_hbar();
  const double s0 = p.sigma0();
  const double width =
      std::abs(hb * hb * t / (4.0 * m * s0 * s0 * sigma_t(cfd.kind(), p, t)) * p.mixing_factor());
  if (!(width > 1e-300)) return DiracMomentum{p.p0()};
  return GaussianMomentum{p.p0(), width};
}

// ---------------------------------------------------------------------------
// half-space behind a hard wall at x = 0

namespace detail {
// Free-space element of the same packet, used by the image sum.
inline std::complex<double> free_element(const ClosedFormDensity& cfd, double x, double y,
                                         double t) {
  ClosedFormDensity free(Free{}, cfd.kind(), cfd.params());
  return free_density(free, x, y, t).value(cfd.phase_hbar());
}
}  // namespace detail

/// Image-method density matrix for x, y >= 0. In the classical limit the
/// phases carry the unscaled hbar.
inline std::complex<double> halfspace_density(const ClosedFormDensity& cfd, double x, double y,
                                              double t) {
  cfd.require<HalfSpaceFree>("halfspace_density");
  if (x < 0.0 || y < 0.0) throw std::domain_error("halfspace_density: x and y must be >= 0");
  return detail::free_element(cfd, x, y, t) - detail::free_element(cfd, x, -y, t) -
         detail::free_element(cfd, -x, y, t) + detail::free_element(cfd, -x, -y, t);
}

struct HalfSpaceObservables {
  double trace;
  double mean;
  double dispersion;
};

/// Trace, <x> and Delta x of the half-space diagonal by adaptive quadrature.
/// <x> and Delta x are normalised by the trace. The upper limit is 12 widths
/// beyond the farther of the initial and the free-flight centre.
inline HalfSpaceObservables halfspace_observables(const ClosedFormDensity& cfd, double t) {
  cfd.require<HalfSpaceFree>("halfspace_observables");
  const auto& p = cfd.params();
  const double st = sigma_t(cfd.kind(), p, t);
  const double reach = std::max(std::abs(p.x0()), std::abs(p.x0() + p.p0() * t / cfd.mass()));
  const double upper = reach + 12.0 * st;
  quad::AdaptiveOptions opts;
  opts.abs_tol = 1e-12;
  opts.initial_segments = 16;
  auto diag = [&](double x) { return halfspace_density(cfd, x, x, t).real(); };
  const double trace = quad::integrate(diag, 0.0, upper, opts).value;
  const double first = quad::integrate([&](double x) { return x * diag(x); }, 0.0, upper, opts).value;
  const double second =
      quad::integrate([&](double x) { return x * x * diag(x); }, 0.0, upper, opts).value;
  const double mean = first / trace;
  const double var = second / trace - mean * mean;
  return {trace, mean, std::sqrt(std::max(var, 0.0))};
}

// ---------------------------------------------------------------------------
// uniform field V = m g x, zero kick

struct DensityCurrent {
  double density;
  double current;
};

inline DensityCurrent linear_pd_pcd(const ClosedFormDensity& cfd, double x, double t) {
  const auto& lin = cfd.require<Linear>("linear_pd_pcd");
  const auto& p = cfd.params();
  const double P = position_pd(cfd, x, t);
  const double g = lin.g;
  if (cfd.classical()) return {P, -g * t * P};
  const double m = cfd.mass();
  const double hb = cfd.scaled_hbar();
  const double lam = p.impurity();
  const double s0 = p.sigma0();
  const double s04 = s0 * s0 * s0 * s0;
  const double num =
      (2.0 * hb * hb * (1.0 + lam) * (x - p.x0()) -
       g * (hb * hb * t * t * (1.0 + lam) + 8.0 * m * m * s04 * (1.0 - lam))) *
      t;
  const double den = 2.0 * (hb * hb * t * t * (1.0 + lam) + 4.0 * m * m * s04 * (1.0 - lam));
  return {P, num / den * P};
}

inline double linear_trajectory(const ClosedFormDensity& cfd, double x_init, double t) {
  const auto& lin = cfd.require<Linear>("linear_trajectory");
  const double fall = 0.5 * lin.g * t * t;
  if (cfd.classical()) return x_init - fall;
  const auto& p = cfd.params();
  return p.x0() - fall + (x_init - p.x0()) * sigma_t(cfd.kind(), p, t) / p.sigma0();
}

/// Classical amplitude and phase in the uniform field.
inline PolarValue linear_classical_density(const ClosedFormDensity& cfd, double x, double y,
                                           double t) {
  const auto& lin = cfd.require<Linear>("linear_classical_density");
  if (!cfd.classical()) throw std::invalid_argument("linear_classical_density: classical kind only");
  const auto& p = cfd.params();
  const double lam = p.impurity(), x0 = p.x0(), s0 = p.sigma0(), g = lin.g;
  const double gt2 = g * t * t;
  const double num = 2.0 * (x * x + y * y) - 4.0 * lam * x * y - 4.0 * (1.0 - lam) * x0 * (x + y - x0) +
                     gt2 * (1.0 - lam) * (2.0 * (x + y) - 4.0 * x0 + gt2);
  const double amp = std::exp(-num / (8.0 * (1.0 - lam) * s0 * s0)) /
                     (std::sqrt(2.0 * std::numbers::pi) * s0);
  return {amp, -cfd.mass() * g * t * (x - y)};
}

// ---------------------------------------------------------------------------
// harmonic trap V = m w^2 x^2 / 2, zero kick

inline DensityCurrent harmonic_pd_pcd(const ClosedFormDensity& cfd, double x, double t) {
  const auto& h = cfd.require<Harmonic>("harmonic_pd_pcd");
  const auto& p = cfd.params();
  const double w = h.omega;
  const double c = std::cos(w * t), s = std::sin(w * t);
  if (cfd.classical()) {
    if (std::abs(c) < 1e-9)
      throw singular_time_error("harmonic_pd_pcd: classical velocity field singular at cos(wt)=0", t);
    const double P = position_pd(cfd, x, t);
    return {P, -w * std::tan(w * t) * x * P};
  }
  const double P = position_pd(cfd, x, t);
  const double m = cfd.mass();
  const double hb = cfd.scaled_hbar();
  const double lam = p.impurity();
  const double s0 = p.sigma0();
  const double s04 = s0 * s0 * s0 * s0;
  const double num = 2.0 * w * s *
                     (hb * hb * (1.0 + lam) * (x * c - p.x0()) -
                      4.0 * x * (1.0 - lam) * m * m * s04 * w * w * c);
  const double den =
      2.0 * hb * hb * (1.0 + lam) * s * s + 8.0 * (1.0 - lam) * m * m * w * w * s04 * c * c;
  return {P, num / den * P};
}

/// Scaled trajectory x0 cos(wt) + (x_init - x0) sigma_t/sigma0. The
/// classical trajectory is x_init |cos(wt)|.
inline double harmonic_trajectory(const ClosedFormDensity& cfd, double x_init, double t) {
  const auto& h = cfd.require<Harmonic>("harmonic_trajectory");
  const double c = std::cos(h.omega * t);
  if (cfd.classical()) return x_init * std::abs(c);
  const auto& p = cfd.params();
  return p.x0() * c + (x_init - p.x0()) * harmonic_sigma_t(cfd.kind(), p, h.omega, t) / p.sigma0();
}

/// Classical amplitude and phase in the harmonic trap; singular where
/// cos(wt) = 0.
inline PolarValue harmonic_classical_density(const ClosedFormDensity& cfd, double x, double y,
                                             double t) {
  const auto& h = cfd.require<Harmonic>("harmonic_classical_density");
  if (!cfd.classical())
    throw std::invalid_argument("harmonic_classical_density: classical kind only");
  const auto& p = cfd.params();
  const double w = h.omega;
  const double c = std::cos(w * t);
  if (std::abs(c) < 1e-9)
    throw singular_time_error("harmonic_classical_density: |cos(wt)| below 1e-9", t);
  const double lam = p.impurity(), x0 = p.x0(), s0 = p.sigma0();
  const double num = x * x + y * y - 2.0 * lam * x * y - 2.0 * x0 * (1.0 - lam) * c * (x + y) +
                     2.0 * x0 * x0 * (1.0 - lam) * c * c;
  const double amp = std::exp(-num / (4.0 * (1.0 - lam) * s0 * s0 * c * c)) /
                     (std::sqrt(2.0 * std::numbers::pi) * s0 * std::abs(c));
  return {amp, -cfd.mass() * w * (x * x - y * y) * 0.5 * std::tan(w * t)};
}

}  // namespace sqt
