#pragma once

// Gravitational bouncing ball in the scaled theory, spectral (Airy) solver.
//
// Dimensionless gravitational units throughout: hbar = 1, m = 1/2, g = 2,
// so H = -eps d^2/dz^2 + z on z > 0 with eigenvalues -R_n eps^(1/3). The
// expansion is carried out in bar variables (z/eps^(1/3), t/eps^(1/6)),
// where the coefficients coincide with those of the eps = 1 problem for the
// rescaled packet.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sqt/errors.hpp"
#include "sqt/quadrature.hpp"
#include "sqt/regime.hpp"
#include "sqt/specfun.hpp"

namespace sqt {

inline constexpr int kMaxAiryModes = 5000;

/// Root table shared by every expansion (built once, kMaxAiryModes roots).
inline const AiryRootTable& shared_airy_roots() {
  static const AiryRootTable table(kMaxAiryModes);
  return table;
}

struct ScaledEigensystem {
  double energy;
  std::function<double(double)> eigenfunction;
};

/// n-th eigenpair of -(hbar~^2/2m) d^2/dz^2 + m g z on z > 0.
inline ScaledEigensystem scaled_eigensystem(const Regime& regime, double g, int n) {
  if (n < 1) throw std::invalid_argument("scaled_eigensystem: n must be >= 1");
  if (n > kMaxAiryModes) throw std::invalid_argument("scaled_eigensystem: n exceeds root table");
  if (!(g > 0.0)) throw std::invalid_argument("scaled_eigensystem: g must be positive");
  const double hb = regime.scaled_hbar();
  const double m = regime.mass();
  const double beta = std::cbrt(2.0 * m * m * g / (hb * hb));
  const double r = shared_airy_roots().root(n);
  const double aip = shared_airy_roots().ai_prime_at_root(n);
  const double energy = -r * std::cbrt(0.5 * m * g * g * hb * hb);
  const double norm = std::sqrt(beta) / aip;
  return {energy, [=](double z) { return z == 0.0 ? 0.0 : norm * airy_ai(beta * z + r); }};
}

/// Dimensionless-unit eigenpair: energy -R_n eps^(1/3).
inline ScaledEigensystem scaled_eigensystem(double eps, int n) {
  return scaled_eigensystem(Regime(eps, GravUnits::kDimensionlessHbar, GravUnits::kDimensionlessMass),
                            GravUnits::kDimensionlessG, n);
}

/// WKB level [3 pi (n - 1/4) / 2]^(2/3) in units of (m g^2 hbar^2 / 2)^(1/3).
inline double wkb_energy(int n) {
  if (n < 1) throw std::invalid_argument("wkb_energy: n must be >= 1");
  return std::pow(1.5 * std::numbers::pi * (n - 0.25), 2.0 / 3.0);
}

/// E_{n+1} - E_n of the scaled problem, dimensionless units.
inline double level_spacing(double eps, int n) {
  if (n < 1 || n + 1 > kMaxAiryModes) throw std::invalid_argument("level_spacing: n out of range");
  const Regime regime(eps);
  const auto& roots = shared_airy_roots();
  return std::cbrt(regime.epsilon()) * (roots.root(n) - roots.root(n + 1));
}

/// Pure Gaussian expanded in the scaled Airy eigenbasis. Immutable.
class AirySpectralState {
 public:
  AirySpectralState(double eps, double sigma0, double z0, std::vector<double> coeffs,
                    double initial_norm)
      : eps_(eps), sigma0_(sigma0), z0_(z0), coeffs_(std::move(coeffs)), initial_norm_(initial_norm) {
    const auto& roots = shared_airy_roots();
    captured_norm_ = 0.0;
    energies_.reserve(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      captured_norm_ += coeffs_[i] * coeffs_[i];
      energies_.push_back(-roots.root(static_cast<int>(i) + 1) * std::cbrt(eps_));
    }
  }

  double eps() const { return eps_; }
  double sigma0() const { return sigma0_; }
  double z0() const { return z0_; }
  double length_scale() const { return std::cbrt(eps_); }
  double time_scale() const { return std::pow(eps_, 1.0 / 6.0); }
  double bar_sigma0() const { return sigma0_ / length_scale(); }
  double bar_z0() const { return z0_ / length_scale(); }
  int truncation() const { return static_cast<int>(coeffs_.size()); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<double>& energies() const { return energies_; }
  double root(int n) const { return shared_airy_roots().root(n); }
  double captured_norm() const { return captured_norm_; }
  /// Norm of the initial Gaussian restricted to z >= 0.
  double initial_norm() const { return initial_norm_; }
  double hbar() const { return std::sqrt(eps_); }

  /// Integration window holding every retained mode: highest turning point
  /// plus 15 decay lengths.
  double support() const { return energies_.back() + 15.0 * length_scale(); }

 private:
  double eps_;
  double sigma0_;
  double z0_;
  std::vector<double> coeffs_;
  std::vector<double> energies_;
  double captured_norm_ = 0.0;
  double initial_norm_;
};

namespace detail {

// C_n of the eps = 1 problem for a Gaussian of width s and centre c, by
// adaptive quadrature over [0, c + 12 s].
inline double airy_gaussian_overlap(int n, double s, double c) {
  const auto& roots = shared_airy_roots();
  const double r = roots.root(n);
  const double aip = roots.ai_prime_at_root(n);
  const double upper = c + 12.0 * s;
  const double pre = std::pow(2.0 * std::numbers::pi * s * s, -0.25);
  auto f = [&](double z) {
    const double u = (z - c) / (2.0 * s);
    return airy_ai(z + r) * std::exp(-u * u);
  };
  // Resolve the oscillations of Ai(z + R_n) on the classically allowed part.
  const double wavelength = 2.0 * std::numbers::pi / std::sqrt(std::abs(r) + 1.0);
  quad::AdaptiveOptions opts;
  opts.abs_tol = 1e-12;
  opts.initial_segments = std::max(8, static_cast<int>(std::ceil(2.0 * upper / wavelength)));
  opts.max_segments = 100000;
  return pre * quad::integrate(f, 0.0, upper, opts).value / aip;
}

// sum_{m > n} |R_m|^(-p) for p = 2, 3, 4: table part plus the asymptotic
// integral beyond it (|R_m| ~ x^(2/3), x = 3 pi (m - 1/4) / 2).
inline double inverse_root_power_tail(int n, int p) {
  using Table = std::array<std::vector<double>, 3>;
  static const Table suffix = [] {
    const auto& roots = shared_airy_roots();
    const double a = 1.5 * std::numbers::pi;
    const double x = a * (kMaxAiryModes + 0.5 - 0.25);
    Table out;
    for (int q = 2; q <= 4; ++q) {
      auto& v = out[q - 2];
      v.resize(kMaxAiryModes + 1);
      const double expo = 2.0 * q / 3.0 - 1.0;
      v[kMaxAiryModes] = std::pow(x, -expo) / (a * expo);
      for (int m = kMaxAiryModes; m >= 1; --m) v[m - 1] = v[m] + std::pow(-roots.root(m), -q);
    }
    return out;
  }();
  if (p < 2 || p > 4) throw std::invalid_argument("inverse_root_power_tail: p in {2,3,4}");
  return suffix[p - 2].at(n);
}

}  // namespace detail

/// Weight the expansion leaves in modes above n because the half-line
/// packet jumps to zero at the wall. In bar units the late coefficients
/// follow C_m = psi(0)/E_m + (H psi)(0)/E_m^2 + ..., E_m = |R_m|.
inline double wall_jump_tail(double bar_sigma0, double bar_z0, int n) {
  const double s = bar_sigma0, c = bar_z0;
  const double psi0 = std::pow(2.0 * std::numbers::pi * s * s, -0.25) * std::exp(-c * c / (4.0 * s * s));
  // (H psi)(0) / psi(0) = -psi''(0)/psi(0) for the Gaussian
  const double h = -(c * c / (4.0 * s * s * s * s) - 1.0 / (2.0 * s * s));
  const double tail = detail::inverse_root_power_tail(n, 2) + 2.0 * h * detail::inverse_root_power_tail(n, 3) +
                      h * h * detail::inverse_root_power_tail(n, 4);
  return psi0 * psi0 * std::max(tail, 0.0);
}

/// Expands the pure Gaussian of width sigma0 centred at z0 > 0. Modes are
/// added until sum |C_n|^2, plus the analytic wall-jump tail beyond n,
/// reaches (1 - tol) times the half-line norm of the initial packet. The
/// tail decays like n^(-1/3), so without it tight tolerances are out of
/// reach whenever the packet is not negligible at the wall.
inline AirySpectralState expand_gaussian(double eps, const GaussianMixedParams& packet,
                                         double tol = 1e-8) {
  const Regime regime(eps);
  if (!packet.is_pure()) throw std::invalid_argument("expand_gaussian: pure state required");
  if (packet.p0() != 0.0) throw std::invalid_argument("expand_gaussian: zero kick momentum required");
  if (!(packet.x0() > 0.0)) throw std::invalid_argument("expand_gaussian: z0 must be positive");
  if (!(tol > 0.0 && tol <= 1e-2)) throw std::invalid_argument("expand_gaussian: tol must lie in (0, 1e-2]");

  const double len = std::cbrt(regime.epsilon());
  const double s = packet.sigma0() / len;
  const double c = packet.x0() / len;
  const double half_norm = 0.5 * std::erfc(-c / (std::sqrt(2.0) * s));
  const double target = (1.0 - tol) * half_norm;

  // Energies of the packet spread like its heights. If the highest
  // available level sits below the upper tail, fail before the expensive
  // overlaps; the reported norm is the Gaussian mass below that level.
  const double top = -shared_airy_roots().root(kMaxAiryModes);
  if (top < c + 6.0 * s)
    throw truncation_error("expand_gaussian: packet extends beyond the available modes",
                           0.5 * std::erfc(-(top - c) / (std::sqrt(2.0) * s)), kMaxAiryModes);

  std::vector<double> coeffs;
  double captured = 0.0;
  for (int n = 1; n <= kMaxAiryModes; ++n) {
    const double cn = detail::airy_gaussian_overlap(n, s, c);
    coeffs.push_back(cn);
    captured += cn * cn;
    if (captured + wall_jump_tail(s, c, n) >= target)
      return AirySpectralState(regime.epsilon(), packet.sigma0(), packet.x0(), std::move(coeffs), half_norm);
  }
  throw truncation_error("expand_gaussian: tolerance not reached with the available modes", captured,
                         kMaxAiryModes);
}

/// Large-separation closed form of C_n (lower limit pushed to -infinity),
/// dimensionless units at eps = 1.
inline double expansion_coefficient_far_from_wall(int n, double sigma0, double z0) {
  const auto& roots = shared_airy_roots();
  const double r = roots.root(n);
  const double s2 = sigma0 * sigma0;
  const double s4 = s2 * s2;
  return std::pow(2.0 * std::numbers::pi, 0.25) * std::sqrt(2.0 * sigma0) / roots.ai_prime_at_root(n) *
         airy_ai(z0 + r + s4) * std::exp(s2 * (z0 + r + 2.0 / 3.0 * s4));
}

/// psi~(z, t). Zero on the wall by construction.
inline std::complex<double> evolve(const AirySpectralState& state, double z, double t) {
  if (z < 0.0) throw std::domain_error("evolve: z must be >= 0");
  if (z == 0.0) return 0.0;
  const auto& roots = shared_airy_roots();
  const double zb = z / state.length_scale();
  const double tb = t / state.time_scale();
  std::complex<double> sum = 0.0;
  for (int n = 1; n <= state.truncation(); ++n) {
    const double r = roots.root(n);
    const double basis = airy_ai(zb + r) / roots.ai_prime_at_root(n);
    sum += state.coeffs()[n - 1] * basis * std::polar(1.0, r * tb);
  }
  return sum / std::sqrt(state.length_scale());
}

inline double density(const AirySpectralState& state, double z, double t) {
  return std::norm(evolve(state, z, t));
}

/// Real basis values on a frozen Gauss-Legendre grid over [0, support]; lets
/// repeated <z>(t) and norm evaluations skip the Airy calls.
class GravQuadratureGrid {
 public:
  explicit GravQuadratureGrid(const AirySpectralState& state)
      : state_(state),
        rule_(quad::composite_gauss_legendre(0.0, state.support(), std::max(64, 4 * state.truncation()))) {
    const auto& roots = shared_airy_roots();
    const int n_modes = state.truncation();
    const std::size_t n_nodes = rule_.size();
    basis_.resize(static_cast<std::size_t>(n_modes) * n_nodes);
    const double amp = 1.0 / std::sqrt(state.length_scale());
    for (int n = 1; n <= n_modes; ++n) {
      const double r = roots.root(n);
      const double inv = state.coeffs()[n - 1] * amp / roots.ai_prime_at_root(n);
      for (std::size_t k = 0; k < n_nodes; ++k)
        basis_[(n - 1) * n_nodes + k] = inv * airy_ai(rule_.nodes[k] / state.length_scale() + r);
    }
  }

  const AirySpectralState& state() const { return state_; }
  const quad::CompositeRule& rule() const { return rule_; }

  /// psi~ at every node.
  std::vector<std::complex<double>> wavefunction(double t) const {
    const auto& roots = shared_airy_roots();
    const std::size_t n_nodes = rule_.size();
    std::vector<std::complex<double>> psi(n_nodes);
    const double tb = t / state_.time_scale();
    for (int n = 1; n <= state_.truncation(); ++n) {
      const std::complex<double> ph = std::polar(1.0, roots.root(n) * tb);
      const double* row = &basis_[(n - 1) * n_nodes];
      for (std::size_t k = 0; k < n_nodes; ++k) psi[k] += ph * row[k];
    }
    return psi;
  }

  double norm(double t) const { return moment(t, 0); }
  double position_expectation(double t) const { return moment(t, 1); }

 private:
  double moment(double t, int power) const {
    const auto psi = wavefunction(t);
    double sum = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k)
      sum += rule_.weights[k] * (power == 0 ? 1.0 : rule_.nodes[k]) * std::norm(psi[k]);
    return sum;
  }

  AirySpectralState state_;
  quad::CompositeRule rule_;
  std::vector<double> basis_;
};

/// <z>(t) by quadrature of z |psi~|^2.
inline double position_expectation(const AirySpectralState& state, double t) {
  return GravQuadratureGrid(state).position_expectation(t);
}

/// <z>(t) through the quantum problem in bar variables: eps^(1/3) times
/// <z> of the eps = 1 state built from the rescaled packet, at t/eps^(1/6).
inline double position_expectation_bar(const AirySpectralState& state, double t) {
  const AirySpectralState unit(1.0, state.bar_sigma0(), state.bar_z0(), state.coeffs(), state.initial_norm());
  return state.length_scale() * GravQuadratureGrid(unit).position_expectation(t / state.time_scale());
}

/// A~(t) = <psi~(t)|psi(0)> = sum |C_n|^2 exp(i E_n t / hbar~).
inline std::complex<double> autocorrelation(const AirySpectralState& state, double t) {
  std::complex<double> sum = 0.0;
  const double w = 1.0 / state.hbar();
  for (int n = 0; n < state.truncation(); ++n)
    sum += state.coeffs()[n] * state.coeffs()[n] * std::polar(1.0, state.energies()[n] * t * w);
  return sum;
}

/// sum |C_n|^2 E_n.
inline double energy_expectation(const AirySpectralState& state) {
  double e = 0.0;
  for (int n = 0; n < state.truncation(); ++n) e += state.coeffs()[n] * state.coeffs()[n] * state.energies()[n];
  return e;
}

// ---------------------------------------------------------------------------
// classical bounce

class ClassicalBouncer {
 public:
  ClassicalBouncer(double z_init, double g) : z_init_(z_init), g_(g) {
    if (!(z_init > 0.0)) throw std::invalid_argument("ClassicalBouncer: z_init must be positive");
    if (!(g > 0.0)) throw std::invalid_argument("ClassicalBouncer: g must be positive");
  }
  double z_init() const { return z_init_; }
  double g() const { return g_; }
  double period() const { return 2.0 * std::sqrt(2.0 * z_init_ / g_); }

 private:
  double z_init_;
  double g_;
};

/// Drop from rest, elastic bounce at tau/2, back to the top at tau; repeated
/// with period tau.
inline double classical_bounce(const ClassicalBouncer& cb, double t) {
  const double tau = cb.period();
  double s = std::fmod(t, tau);
  if (s < 0.0) s += tau;
  const double g = cb.g();
  if (s < 0.5 * tau) return cb.z_init() - 0.5 * g * s * s;
  const double u = s - 0.5 * tau;
  return -0.5 * g * u * u + std::sqrt(2.0 * g * cb.z_init()) * u;
}

/// Closed-form time average over one period, (2/3) z_init.
inline double classical_time_average(const ClassicalBouncer& cb) { return 2.0 / 3.0 * cb.z_init(); }

/// Same average by adaptive quadrature of the trajectory.
inline double classical_time_average_numeric(const ClassicalBouncer& cb) {
  const double tau = cb.period();
  quad::AdaptiveOptions opts;
  opts.abs_tol = 1e-13;
  auto z = [&](double t) { return classical_bounce(cb, t); };
  // split at the bounce where the trajectory has a kink
  const double a = quad::integrate(z, 0.0, 0.5 * tau, opts).value;
  const double b = quad::integrate(z, 0.5 * tau, tau, opts).value;
  return (a + b) / tau;
}

struct ClassicalAverages {
  std::function<double(double)> time_average;
  double ensemble_average;
};

/// Per-height time average, and its average over the initial Gaussian
/// position distribution (full line, by quadrature).
inline ClassicalAverages classical_averages(const GaussianMixedParams& packet) {
  const double s = packet.sigma0(), c = packet.x0();
  auto tavg = [](double z_init) { return 2.0 / 3.0 * z_init; };
  auto weight = [=](double z) {
    const double u = (z - c) / s;
    return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * s);
  };
  quad::AdaptiveOptions opts;
  opts.abs_tol = 1e-13;
  opts.initial_segments = 8;
  const double ens =
      quad::integrate([&](double z) { return tavg(z) * weight(z); }, c - 14.0 * s, c + 14.0 * s, opts).value;
  return {tavg, ens};
}

}  // namespace sqt
