#pragma once

// Transition parameter, scaled constants and the unit systems used by the
// bouncer solvers. All types validate on construction and are immutable.

#include <cmath>
#include <stdexcept>
#include <string>

namespace sqt {

/// Dynamical regime of the scaled theory: eps in (0,1], eps = 1 is standard
/// quantum mechanics. The classical limit eps -> 0 is singular and is not a
/// Regime; classical results live in dedicated closed forms.
class Regime {
 public:
  Regime(double epsilon, double hbar = 1.0, double mass = 1.0)
      : epsilon_(epsilon), hbar_(hbar), mass_(mass) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
      throw std::invalid_argument("Regime: epsilon must lie in (0, 1], got " +
                                  std::to_string(epsilon));
    if (!(hbar > 0.0) || !std::isfinite(hbar))
      throw std::invalid_argument("Regime: hbar must be positive");
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw std::invalid_argument("Regime: mass must be positive");
  }

  double epsilon() const { return epsilon_; }
  double hbar() const { return hbar_; }
  double mass() const { return mass_; }

  /// hbar * sqrt(eps)
  double scaled_hbar() const { return hbar_ * std::sqrt(epsilon_); }

 private:
  double epsilon_;
  double hbar_;
  double mass_;
};

inline double scaled_hbar(const Regime& regime) { return regime.scaled_hbar(); }

struct ScaledCoords {
  double x;
  double t;
};

/// (x, t) -> (x/sqrt(eps), t/sqrt(eps)); maps the scaled equation onto the
/// standard one.
inline ScaledCoords scale_coords(const Regime& regime, double x, double t) {
  const double s = std::sqrt(regime.epsilon());
  return {x / s, t / s};
}

inline ScaledCoords unscale_coords(const Regime& regime, double x_scaled, double t_scaled) {
  const double s = std::sqrt(regime.epsilon());
  return {x_scaled * s, t_scaled * s};
}

/// Initial Gaussian mixed state: centre, width, kick momentum and impurity.
/// impurity == 0 is a pure state.
class GaussianMixedParams {
 public:
  GaussianMixedParams(double x0, double sigma0, double p0 = 0.0, double impurity = 0.0)
      : x0_(x0), sigma0_(sigma0), p0_(p0), impurity_(impurity) {
    if (!std::isfinite(x0) || !std::isfinite(p0))
      throw std::invalid_argument("GaussianMixedParams: x0 and p0 must be finite");
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
      throw std::invalid_argument("GaussianMixedParams: sigma0 must be positive");
    if (!(impurity >= 0.0 && impurity < 1.0))
      throw std::invalid_argument("GaussianMixedParams: impurity must lie in [0, 1)");
  }

  double x0() const { return x0_; }
  double sigma0() const { return sigma0_; }
  double p0() const { return p0_; }
  double impurity() const { return impurity_; }
  bool is_pure() const { return impurity_ == 0.0; }

  /// (1 + lambda) / (1 - lambda), the factor that multiplies every
  /// spreading term.
  double mixing_factor() const { return (1.0 + impurity_) / (1.0 - impurity_); }

 private:
  double x0_;
  double sigma0_;
  double p0_;
  double impurity_;
};

struct GravBarQuantities {
  double t;
  double z;
  double sigma0;
  double z0;
};

/// Bar variables that reduce the scaled gravitational bouncer to the eps = 1
/// problem: t/eps^(1/6), and lengths over eps^(1/3).
inline GravBarQuantities grav_bar_quantities(double eps, double t, double z, double sigma0,
                                             double z0) {
  if (!(eps > 0.0)) throw std::invalid_argument("grav_bar_quantities: eps must be positive");
  const double len = std::cbrt(eps);
  const double tim = std::pow(eps, 1.0 / 6.0);
  return {t / tim, z / len, sigma0 / len, z0 / len};
}

/// Natural units of a particle of mass m in a uniform field g.
class GravUnits {
 public:
  GravUnits(double g, double hbar = 1.0, double mass = 1.0) : g_(g), hbar_(hbar), mass_(mass) {
    if (!(g > 0.0) || !(hbar > 0.0) || !(mass > 0.0))
      throw std::invalid_argument("GravUnits: g, hbar and mass must be positive");
  }

  double g() const { return g_; }
  double length_unit() const { return std::cbrt(hbar_ * hbar_ / (2.0 * mass_ * mass_ * g_)); }
  double time_unit() const { return std::cbrt(2.0 * hbar_ / (mass_ * g_ * g_)); }
  double energy_unit() const { return std::cbrt(mass_ * g_ * g_ * hbar_ * hbar_ / 2.0); }

  // In these units hbar = 1, m = 1/2 and g = 2, so that the Hamiltonian
  // reads -d^2/dz^2 + z.
  static constexpr double kDimensionlessHbar = 1.0;
  static constexpr double kDimensionlessMass = 0.5;
  static constexpr double kDimensionlessG = 2.0;

 private:
  double g_;
  double hbar_;
  double mass_;
};

/// Natural units of the harmonic bouncer: lengths in sqrt(hbar/(2 m w)),
/// times in 2/w.
class HarmUnits {
 public:
  HarmUnits(double omega, double hbar = 1.0, double mass = 1.0)
      : omega_(omega), hbar_(hbar), mass_(mass) {
    if (!(omega > 0.0) || !(hbar > 0.0) || !(mass > 0.0))
      throw std::invalid_argument("HarmUnits: omega, hbar and mass must be positive");
  }

  double omega() const { return omega_; }
  double length_unit() const { return std::sqrt(hbar_ / (2.0 * mass_ * omega_)); }
  double time_unit() const { return 2.0 / omega_; }

  // hbar = 1, m = 1/4, omega = 2 makes both units equal to one; the
  // Hamiltonian then reads -2 d^2/dz^2 + z^2/2.
  static constexpr double kDimensionlessHbar = 1.0;
  static constexpr double kDimensionlessMass = 0.25;
  static constexpr double kDimensionlessOmega = 2.0;

 private:
  double omega_;
  double hbar_;
  double mass_;
};

}  // namespace sqt
