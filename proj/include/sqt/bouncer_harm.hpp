#pragma once

// Harmonic bouncing ball: a Gaussian released in V = m w^2 z^2 / 2 above a
// hard wall at z = 0, solved by the image method.
//
// The free-oscillator packet is evaluated in the form
//   psi = (2 pi s0^2)^(-1/4) D^(-1/2)
//         exp[-m w (k c + i s) z^2 / (2 hb D) + z0 z / (2 s0^2 D) - z0^2 c / (4 s0^2 D)]
// with c = cos wt, s = sin wt, k = hb / (2 m w s0^2) and D = c + i k s. D never
// vanishes, so no time is singular; the cot/csc coefficient form is kept for
// cross-checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sqt/errors.hpp"
#include "sqt/quadrature.hpp"
#include "sqt/regime.hpp"
#include "sqt/specfun.hpp"

namespace sqt {

class HarmonicBouncerState {
 public:
  HarmonicBouncerState(Regime regime, double omega, GaussianMixedParams packet)
      : regime_(regime), omega_(omega), packet_(packet) {
    if (!(omega > 0.0)) throw std::invalid_argument("HarmonicBouncerState: omega must be positive");
    if (!packet.is_pure()) throw std::invalid_argument("HarmonicBouncerState: pure state required");
    if (packet.p0() != 0.0) throw std::invalid_argument("HarmonicBouncerState: zero kick momentum required");
    if (!(packet.x0() > 0.0)) throw std::invalid_argument("HarmonicBouncerState: z0 must be positive");
  }

  const Regime& regime() const { return regime_; }
  double omega() const { return omega_; }
  double sigma0() const { return packet_.sigma0(); }
  double z0() const { return packet_.x0(); }
  double hbar() const { return regime_.scaled_hbar(); }
  double mass() const { return regime_.mass(); }
  /// hbar~ / (2 m w sigma0^2): width ratio at the quarter period.
  double kappa() const { return hbar() / (2.0 * mass() * omega_ * sigma0() * sigma0()); }

  /// Width of the free-oscillator packet.
  double width(double t) const {
    const double c = std::cos(omega_ * t), s = std::sin(omega_ * t), k = kappa();
    return sigma0() * std::sqrt(c * c + k * k * s * s);
  }

  /// Upper end of the half-line integration window.
  double support() const { return z0() + 15.0 * sigma0() * std::max(1.0, kappa()); }

 private:
  Regime regime_;
  double omega_;
  GaussianMixedParams packet_;
};

/// Harmonic units: hbar = 1, m = 1/4, w = 2.
inline HarmonicBouncerState harmonic_bouncer(double eps, const GaussianMixedParams& packet) {
  return HarmonicBouncerState(Regime(eps, HarmUnits::kDimensionlessHbar, HarmUnits::kDimensionlessMass),
                              HarmUnits::kDimensionlessOmega, packet);
}

namespace detail {

struct GaussianExponent {
  std::complex<double> quad;    // coefficient of z^2
  std::complex<double> lin;     // coefficient of z
  std::complex<double> log_pre; // constant term including the D^(-1/2) prefactor
};

inline GaussianExponent sho_exponent(const HarmonicBouncerState& st, double t) {
  using cd = std::complex<double>;
  const double phi = st.omega() * t;
  const double c = std::cos(phi), s = std::sin(phi), k = st.kappa();
  const cd D(c, k * s);
  // arg D continued from 0 at t = 0: same quadrant as phi, within pi of it
  const double a = std::atan2(k * s, c);
  const double theta = a + 2.0 * std::numbers::pi * std::round((phi - a) / (2.0 * std::numbers::pi));
  const double s0 = st.sigma0(), z0 = st.z0();
  const double mw = st.mass() * st.omega();
  GaussianExponent e;
  e.quad = -mw * cd(k * c, s) / (2.0 * st.hbar() * D);
  e.lin = z0 / (2.0 * s0 * s0 * D);
  e.log_pre = -0.25 * std::log(2.0 * std::numbers::pi * s0 * s0) - 0.5 * cd(std::log(std::abs(D)), theta) -
              z0 * z0 * c / (4.0 * s0 * s0 * D);
  return e;
}

}  // namespace detail

/// Free-oscillator packet psi~(z, t) on the full line.
inline std::complex<double> sho_gaussian(const HarmonicBouncerState& st, double z, double t) {
  const auto e = detail::sho_exponent(st, t);
  return std::exp(e.quad * z * z + e.lin * z + e.log_pre);
}

/// First and second z-derivatives of the free-oscillator packet.
struct ComplexJet {
  std::complex<double> value;
  std::complex<double> d1;
  std::complex<double> d2;
};

inline ComplexJet sho_gaussian_jet(const HarmonicBouncerState& st, double z, double t) {
  const auto e = detail::sho_exponent(st, t);
  const auto psi = std::exp(e.quad * z * z + e.lin * z + e.log_pre);
  const auto g = 2.0 * e.quad * z + e.lin;
  return {psi, psi * g, psi * (g * g + 2.0 * e.quad)};
}

struct ShoCoefficients {
  std::complex<double> a0;
  std::complex<double> a1;
  std::complex<double> a2;
};

/// cot/csc coefficients of the propagated Gaussian. a1 carries z0/(2 s0^2),
/// the linear coefficient of the expanded initial exponent.
inline ShoCoefficients sho_coefficients(const HarmonicBouncerState& st, double z, double t) {
  const double phi = st.omega() * t;
  const double s = std::sin(phi);
  if (std::abs(s) < 1e-9) throw singular_time_error("sho_coefficients: |sin(wt)| below 1e-9", t);
  const double cot = std::cos(phi) / s, csc = 1.0 / s;
  const double s0 = st.sigma0(), z0 = st.z0();
  const double mw = st.mass() * st.omega(), hb = st.hbar();
  using cd = std::complex<double>;
  return {cd(-z0 * z0 / (4.0 * s0 * s0), mw * cot / (2.0 * hb) * z * z),
          cd(z0 / (2.0 * s0 * s0), -mw * csc / hb * z),
          cd(1.0 / (4.0 * s0 * s0), -mw * cot / (2.0 * hb))};
}

/// Packet assembled from the coefficients with principal square roots.
/// Within |sin(wt)| < 1e-9 the exact limit (the stable form) is returned.
inline std::complex<double> sho_gaussian_from_coefficients(const HarmonicBouncerState& st, double z,
                                                           double t) {
  const double s = std::sin(st.omega() * t);
  if (std::abs(s) < 1e-9) return sho_gaussian(st, z, t);
  using cd = std::complex<double>;
  const auto a = sho_coefficients(st, z, t);
  const double mw = st.mass() * st.omega();
  const cd pre = std::pow(2.0 * std::numbers::pi * st.sigma0() * st.sigma0(), -0.25) *
                 std::sqrt(mw / (2.0 * std::numbers::pi * cd(0, 1) * st.hbar() * s)) *
                 std::sqrt(std::numbers::pi / a.a2);
  return pre * std::exp(a.a0 + a.a1 * a.a1 / (4.0 * a.a2));
}

/// Psi~(z, t) = psi~(z, t) - psi~(-z, t) on z >= 0, not renormalised.
inline std::complex<double> hardwall_wavefunction(const HarmonicBouncerState& st, double z, double t) {
  if (z < 0.0) throw std::domain_error("hardwall_wavefunction: z must be >= 0");
  if (z == 0.0) return 0.0;
  return sho_gaussian(st, z, t) - sho_gaussian(st, -z, t);
}

inline ComplexJet hardwall_jet(const HarmonicBouncerState& st, double z, double t) {
  if (z < 0.0) throw std::domain_error("hardwall_jet: z must be >= 0");
  const auto p = sho_gaussian_jet(st, z, t);
  const auto m = sho_gaussian_jet(st, -z, t);
  return {z == 0.0 ? std::complex<double>(0.0) : p.value - m.value, p.d1 + m.d1, p.d2 - m.d2};
}

/// dPsi~/dz on the wall, 2 psi~(0) z0 / (2 s0^2 D).
inline std::complex<double> wall_derivative(const HarmonicBouncerState& st, double t) {
  return hardwall_jet(st, 0.0, t).d1;
}

// ---------------------------------------------------------------------------
// half-line moments by quadrature

struct HarmonicMoments {
  double norm;
  double z_mean;
  double p_mean;
  double p2_mean;
  double force_mean;  // <-dV/dz>
};

namespace detail {
inline quad::CompositeRule harmonic_rule(const HarmonicBouncerState& st) {
  const double L = st.support();
  // local wavenumber stays below m w L / hb~
  const double kmax = st.mass() * st.omega() * L / st.hbar();
  const int panels = 200 + static_cast<int>(std::ceil(L * kmax / std::numbers::pi));
  return quad::composite_gauss_legendre(0.0, L, panels);
}
}  // namespace detail

/// Moments of the hard-wall state on a frozen Gauss-Legendre grid.
class HarmonicQuadrature {
 public:
  explicit HarmonicQuadrature(const HarmonicBouncerState& st) : st_(st), rule_(detail::harmonic_rule(st)) {}

  const quad::CompositeRule& rule() const { return rule_; }

  HarmonicMoments moments(double t) const {
    const double hb = st_.hbar();
    const double mw2 = st_.mass() * st_.omega() * st_.omega();
    double n = 0.0, z1 = 0.0, p1 = 0.0, p2 = 0.0;
    for (std::size_t i = 0; i < rule_.size(); ++i) {
      const double z = rule_.nodes[i], w = rule_.weights[i];
      const auto j = hardwall_jet(st_, z, t);
      const double d = std::norm(j.value);
      n += w * d;
      z1 += w * z * d;
      p1 += w * (std::conj(j.value) * j.d1).imag();
      p2 += w * std::norm(j.d1);
    }
    return {n, z1, hb * p1, hb * hb * p2, -mw2 * z1};
  }

  /// Im of 2 hb~ * integral V'(z) Psi dPsi*/dz.
  double potential_variance_term(double t) const {
    const double mw2 = st_.mass() * st_.omega() * st_.omega();
    double acc = 0.0;
    for (std::size_t i = 0; i < rule_.size(); ++i) {
      const double z = rule_.nodes[i];
      const auto j = hardwall_jet(st_, z, t);
      acc += rule_.weights[i] * mw2 * z * (j.value * std::conj(j.d1)).imag();
    }
    return 2.0 * st_.hbar() * acc;
  }

 private:
  HarmonicBouncerState st_;
  quad::CompositeRule rule_;
};

inline double position_expectation_quadrature(const HarmonicBouncerState& st, double t) {
  return HarmonicQuadrature(st).moments(t).z_mean;
}

/// <z>(t) in the regular form
///   mu erf(mu / (sqrt2 sigma)) + k z0 sin(wt) exp(-z0^2 / 2 s0^2) erfi(x),
///   mu = z0 cos(wt), sigma = width(t), x = k z0 sin(wt) / (sqrt2 sigma),
/// with the erfi term fused into its exponential.
inline double position_expectation_regular(const HarmonicBouncerState& st, double t) {
  const double phi = st.omega() * t;
  const double c = std::cos(phi), s = std::sin(phi), k = st.kappa();
  const double z0 = st.z0(), s0 = st.sigma0();
  const double sig = st.width(t);
  const double mu = z0 * c;
  const double x = k * z0 * s / (std::sqrt(2.0) * sig);
  return mu * std::erf(mu / (std::sqrt(2.0) * sig)) +
         k * z0 * s * erfi_scaled(x, -z0 * z0 / (2.0 * s0 * s0));
}

namespace detail {

// The cot/csc closed form, direct evaluation; NaN or inf where the
// trigonometric factors are singular.
inline double position_expectation_cotcsc_raw(const HarmonicBouncerState& st, double t) {
  const double phi = st.omega() * t;
  const double c = std::cos(phi), s = std::sin(phi);
  const double tn = s / c, ct = c / s, cs = 1.0 / s;
  const double m = st.mass(), w = st.omega(), hb = st.hbar(), z0 = st.z0(), s0 = st.sigma0();
  const double s02 = s0 * s0, s04 = s02 * s02;
  const double m2w2 = m * m * w * w;
  const double outer_arg = -2.0 * m2w2 * z0 * z0 * s02 / (4.0 * m2w2 * s04 + hb * hb * tn * tn);
  const double outer = s02 * c * c * (1.0 + hb * hb / (4.0 * m2w2 * s04) * tn * tn);
  const double den = hb * hb + 4.0 * m2w2 * s04 * ct * ct;
  const double erfi_arg = hb * z0 * std::abs(cs) * s / (s0 * std::sqrt(2.0 * hb * hb + 8.0 * m2w2 * s04 * ct * ct));
  const double erfi_log = outer_arg - hb * hb * z0 * z0 / (2.0 * hb * hb * s02 + 8.0 * m2w2 * s04 * s02 * ct * ct);
  const double t1 = 2.0 * hb * m * z0 * w * cs / den * erfi_scaled(erfi_arg, erfi_log);
  // the exponentials of the outer factor and of the erf term cancel
  const double erf_arg = std::sqrt(2.0) * m * z0 * s0 * w * std::abs(cs) * c / std::sqrt(den);
  const double t2 = 4.0 * m2w2 * z0 * s02 * ct * cs / den * std::erf(erf_arg);
  return outer * (t1 + t2);
}

}  // namespace detail

/// <z>(t) from the cot/csc closed form. Where its trigonometric factors are
/// singular (|sin| or |cos| below 1e-9) or the direct value is not finite,
/// the average of the values at t -+ 1e-7 is returned.
inline double position_expectation_closed(const HarmonicBouncerState& st, double t) {
  const double phi = st.omega() * t;
  const bool near_singular = std::abs(std::sin(phi)) < 1e-9 || std::abs(std::cos(phi)) < 1e-9;
  if (!near_singular) {
    const double v = detail::position_expectation_cotcsc_raw(st, t);
    if (std::isfinite(v)) return v;
  }
  const double h = 1e-7;
  return 0.5 * (detail::position_expectation_cotcsc_raw(st, t - h) +
                detail::position_expectation_cotcsc_raw(st, t + h));
}

// ---------------------------------------------------------------------------
// wall force

struct ForceSample {
  double t;
  double f_nc;         // hb~^2/(2m) |dPsi/dz(0)|^2
  double f_nc_closed;  // Gaussian closed form
};

/// Gaussian closed form of the wall force:
///   hb~^2/(2m) * z0^2 exp(-mu^2 / 2 sigma^2) / (sqrt(2 pi) s0^2 sigma^3).
inline double nonclassical_force_closed(const HarmonicBouncerState& st, double t) {
  const double sig = st.width(t);
  const double mu = st.z0() * std::cos(st.omega() * t);
  const double hb = st.hbar(), s0 = st.sigma0(), z0 = st.z0();
  return hb * hb / (2.0 * st.mass()) * z0 * z0 * std::exp(-mu * mu / (2.0 * sig * sig)) /
         (std::sqrt(2.0 * std::numbers::pi) * s0 * s0 * sig * sig * sig);
}

namespace detail {
// Variant with prefactor 4 sqrt(2) in place of 4 sqrt(2/pi): exactly
// sqrt(pi) times nonclassical_force_closed. Used only to pin that ratio.
inline double nonclassical_force_sqrt2_prefactor(const HarmonicBouncerState& st, double t) {
  const double phi = st.omega() * t;
  const double c = std::cos(phi), s = std::sin(phi);
  const double m = st.mass(), w = st.omega(), s0 = st.sigma0(), z0 = st.z0();
  const double eh2 = st.hbar() * st.hbar();
  const double base = eh2 * s * s + 4.0 * m * m * s0 * s0 * s0 * s0 * w * w * c * c;
  // tan^2 in the exponent rewritten over cos^2 so that cos = 0 is finite
  const double expo = -2.0 * m * m * z0 * z0 * s0 * s0 * w * w * c * c / base;
  return eh2 / (2.0 * m) * 4.0 * std::sqrt(2.0) * z0 * z0 * s0 * m * m * m * w * w * w / std::pow(base, 1.5) *
         std::exp(expo);
}
}  // namespace detail

inline ForceSample nonclassical_force(const HarmonicBouncerState& st, double t) {
  const double hb = st.hbar();
  const double f = hb * hb / (2.0 * st.mass()) * std::norm(wall_derivative(st, t));
  return {t, f, nonclassical_force_closed(st, t)};
}

// ---------------------------------------------------------------------------
// Ehrenfest relations

struct EhrenfestReport {
  double max_position_residual;            // |d<z>/dt - <p>/m|
  double max_momentum_residual;            // |d<p>/dt - <-V'> - f_nc|
  double max_momentum_residual_no_force;   // |d<p>/dt - <-V'>|
  double time_of_max_no_force;
  int samples;
};

/// Residuals of the Ehrenfest relations on a uniform time grid, with
/// eighth-order central differences for the time derivatives (the four
/// points at each end only feed the stencils). At small eps the bounce
/// lasts ~sqrt(eps)/omega, so lower orders at dt = 1e-3 leave residuals of
/// order 1e-3 there.
inline EhrenfestReport ehrenfest_check(const HarmonicBouncerState& st, const std::vector<double>& t_grid) {
  if (t_grid.size() < 9) throw std::invalid_argument("ehrenfest_check: need at least 9 times");
  const double dt = t_grid[1] - t_grid[0];
  if (!(dt > 0.0)) throw std::invalid_argument("ehrenfest_check: times must increase");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (std::abs((t_grid[i] - t_grid[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(t_grid[i])))
      throw std::invalid_argument("ehrenfest_check: time grid must be uniform");

  const HarmonicQuadrature q(st);
  std::vector<HarmonicMoments> mom;
  mom.reserve(t_grid.size());
  for (double t : t_grid) mom.push_back(q.moments(t));
  static constexpr double w[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  auto d8 = [&](std::size_t i, auto get) {
    double s = 0.0;
    for (std::size_t k = 1; k <= 4; ++k) s += w[k - 1] * (get(mom[i + k]) - get(mom[i - k]));
    return s / dt;
  };
  EhrenfestReport rep{0.0, 0.0, 0.0, 0.0, 0};
  for (std::size_t i = 4; i + 4 < t_grid.size(); ++i) {
    const double dz = d8(i, [](const HarmonicMoments& m) { return m.z_mean; });
    const double dp = d8(i, [](const HarmonicMoments& m) { return m.p_mean; });
    const double f = nonclassical_force(st, t_grid[i]).f_nc;
    rep.max_position_residual = std::max(rep.max_position_residual, std::abs(dz - mom[i].p_mean / st.mass()));
    rep.max_momentum_residual = std::max(rep.max_momentum_residual, std::abs(dp - mom[i].force_mean - f));
    const double no_force = std::abs(dp - mom[i].force_mean);
    if (no_force > rep.max_momentum_residual_no_force) {
      rep.max_momentum_residual_no_force = no_force;
      rep.time_of_max_no_force = t_grid[i];
    }
    ++rep.samples;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// momentum variance

/// d/dt (<p^2> - <p>^2) from the right-hand side
///   Im{2 hb int V' Psi dPsi* - hb^3 dPsi(0) d2Psi*(0)} - 2 <p> d<p>/dt
/// for an arbitrary half-line state, with d<p>/dt = <-V'> + hb^2/(2m)|dPsi(0)|^2.
/// `jet(z)` returns Psi and its first two z-derivatives.
inline double momentum_variance_rate(const std::function<ComplexJet(double)>& jet,
                                     const std::function<double(double)>& dVdz, double hbar, double mass,
                                     const quad::CompositeRule& rule) {
  double pot = 0.0, force = 0.0, p1 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double z = rule.nodes[i], w = rule.weights[i];
    const auto j = jet(z);
    pot += w * dVdz(z) * (j.value * std::conj(j.d1)).imag();
    force -= w * dVdz(z) * std::norm(j.value);
    p1 += w * (std::conj(j.value) * j.d1).imag();
  }
  const auto wall = jet(0.0);
  const double boundary = -hbar * hbar * hbar * (wall.d1 * std::conj(wall.d2)).imag();
  const double p_mean = hbar * p1;
  const double dp_dt = force + hbar * hbar / (2.0 * mass) * std::norm(wall.d1);
  return 2.0 * hbar * pot + boundary - 2.0 * p_mean * dp_dt;
}

inline double momentum_variance_rate(const HarmonicBouncerState& st, double t) {
  const double mw2 = st.mass() * st.omega() * st.omega();
  return momentum_variance_rate([&](double z) { return hardwall_jet(st, z, t); },
                                [mw2](double z) { return mw2 * z; }, st.hbar(), st.mass(),
                                detail::harmonic_rule(st));
}

}  // namespace sqt
