#pragma once

// Crank-Nicolson propagation of the scaled Schrodinger equation on a
// uniform 1D grid. Default spatial operator is the Numerov (compact
// fourth-order) Laplacian; the plain three-point stencil is kept for
// convergence studies.

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sqt/analytic.hpp"
#include "sqt/errors.hpp"
#include "sqt/regime.hpp"

namespace sqt::grid {

using cd = std::complex<double>;

enum class Boundary { Dirichlet, Absorbing };
enum class Stencil { Numerov, Standard };

/// Uniform grid including both end points. Dirichlet ends hold psi = 0.
/// Absorbing ends add a quadratic imaginary potential on the outer 10% of
/// the span before the Dirichlet end point. A hard wall at z_min is always
/// Dirichlet.
class Grid1D {
 public:
  Grid1D(double z_min, double z_max, int n_points, Boundary boundary = Boundary::Dirichlet,
         bool wall_at_min = false)
      : z_min_(z_min), z_max_(z_max), n_(n_points), boundary_(boundary), wall_(wall_at_min) {
    if (!(z_max > z_min)) throw std::invalid_argument("Grid1D: need z_max > z_min");
    if (n_points < 5) throw std::invalid_argument("Grid1D: need at least 5 points");
  }

  static Grid1D half_line(double z_max, int n_points, Boundary far = Boundary::Dirichlet) {
    return Grid1D(0.0, z_max, n_points, far, true);
  }

  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  int size() const { return n_; }
  double dz() const { return (z_max_ - z_min_) / (n_ - 1); }
  double z(int i) const { return i + 1 == n_ ? z_max_ : z_min_ + i * dz(); }
  Boundary boundary() const { return boundary_; }
  bool wall_at_min() const { return wall_; }

  /// Imaginary absorbing potential W(z) >= 0 at z (0 outside the layers).
  double absorber(double z, double strength) const {
    if (boundary_ != Boundary::Absorbing) return 0.0;
    const double width = 0.1 * (z_max_ - z_min_);
    double s = 0.0;
    if (z > z_max_ - width) s = (z - (z_max_ - width)) / width;
    if (!wall_ && z < z_min_ + width) s = (z_min_ + width - z) / width;
    return strength * s * s;
  }

 private:
  double z_min_, z_max_;
  int n_;
  Boundary boundary_;
  bool wall_;
};

/// Half-line box [0, z0 + 15 sigma0 max(1, sigma_max/sigma0)] with n points.
inline Grid1D default_half_line(double z0, double sigma0, double sigma_max, int n_points = 8192) {
  const double extent = z0 + 15.0 * sigma0 * std::max(1.0, sigma_max / sigma0);
  return Grid1D::half_line(extent, n_points);
}

struct GridState {
  Grid1D grid;
  std::vector<cd> psi;
  double t = 0.0;
  double hbar = 1.0;  // hbar-tilde
  double mass = 1.0;
};

/// Samples f on the grid; Dirichlet end points are set to zero.
template <class F>
GridState load(const Grid1D& grid, F&& f, double hbar, double mass, double t = 0.0) {
  if (!(hbar > 0.0) || !(mass > 0.0)) throw std::invalid_argument("load: hbar and mass must be positive");
  GridState st{grid, std::vector<cd>(grid.size()), t, hbar, mass};
  for (int i = 1; i + 1 < grid.size(); ++i) st.psi[i] = cd(f(grid.z(i)));
  return st;
}

inline GridState load(const Grid1D& grid, const Regime& regime, const std::function<cd(double)>& f) {
  return load(grid, f, regime.scaled_hbar(), regime.mass());
}

using Potential = std::function<double(double)>;

/// Potential of a closed-form scenario for a particle of the given mass.
/// The half-space case is field free; its wall comes from the grid.
inline Potential potential_of(const Scenario& scenario, double mass) {
  return std::visit(detail::overloaded{
                        [](const Free&) -> Potential { return [](double) { return 0.0; }; },
                        [](const HalfSpaceFree&) -> Potential { return [](double) { return 0.0; }; },
                        [mass](const Linear& l) -> Potential {
                          return [k = mass * l.g](double z) { return k * z; };
                        },
                        [mass](const Harmonic& h) -> Potential {
                          return [k = 0.5 * mass * h.omega * h.omega](double z) { return k * z * z; };
                        }},
                    scenario);
}

struct PropagatorOptions {
  Stencil stencil = Stencil::Numerov;
  /// Peak of the absorbing potential, in units of hbar^2/(2 m width^2).
  double absorber_strength = 200.0;
  /// Constant E0 removed from V during stepping and restored as the exact
  /// phase exp(-i E0 t/hbar). CN phase errors grow as (E dt/hbar)^3, so
  /// centring the spectrum on the packet energy shrinks them. propagate()
  /// uses the initial <H> when unset.
  std::optional<double> energy_offset;
};

/// Time-independent CN step operator, factorised once.
///   (M + i dt/(2 hbar) K) psi' = (M - i dt/(2 hbar) K) psi,
///   K = -hbar^2/(2m dz^2) L + M diag(V - iW)
/// with L = tridiag(1,-2,1) and M = tridiag(1,10,1)/12 (Numerov) or I.
class Propagator {
 public:
  Propagator(const Grid1D& grid, double hbar, double mass, const Potential& V, double dt,
             PropagatorOptions opts = {})
      : grid_(grid), dt_(dt), hbar_(hbar), offset_(opts.energy_offset.value_or(0.0)) {
    if (!(dt > 0.0)) throw std::invalid_argument("Propagator: dt must be positive");
    if (!(hbar > 0.0) || !(mass > 0.0)) throw std::invalid_argument("Propagator: hbar and mass must be positive");
    const int n = grid.size() - 2;  // interior unknowns
    const double dz = grid.dz();
    const double m0 = opts.stencil == Stencil::Numerov ? 10.0 / 12.0 : 1.0;
    const double m1 = opts.stencil == Stencil::Numerov ? 1.0 / 12.0 : 0.0;
    const double kin = hbar * hbar / (2.0 * mass * dz * dz);
    const double width = 0.1 * (grid.z_max() - grid.z_min());
    const double w0 = opts.absorber_strength * hbar * hbar / (2.0 * mass * width * width);
    const cd delta(0.0, dt / (2.0 * hbar));

    std::vector<cd> v(n);
    for (int i = 0; i < n; ++i) {
      const double z = grid.z(i + 1);
      v[i] = cd(V(z) - offset_, -grid.absorber(z, w0));
    }
    diag_a_.resize(n);
    lower_a_.resize(n);
    upper_a_.resize(n);
    diag_b_.resize(n);
    lower_b_.resize(n);
    upper_b_.resize(n);
    for (int i = 0; i < n; ++i) {
      const cd kd = 2.0 * kin + m0 * v[i];
      diag_a_[i] = m0 + delta * kd;
      diag_b_[i] = m0 - delta * kd;
      if (i > 0) {
        const cd ko = -kin + m1 * v[i - 1];
        lower_a_[i] = m1 + delta * ko;
        lower_b_[i] = m1 - delta * ko;
      }
      if (i + 1 < n) {
        const cd ko = -kin + m1 * v[i + 1];
        upper_a_[i] = m1 + delta * ko;
        upper_b_[i] = m1 - delta * ko;
      }
    }
    // Thomas factorisation of the left operator.
    cprime_.resize(n);
    inv_denom_.resize(n);
    cd denom = diag_a_[0];
    for (int i = 0; i < n; ++i) {
      if (i > 0) denom = diag_a_[i] - lower_a_[i] * cprime_[i - 1];
      inv_denom_[i] = 1.0 / denom;
      cprime_[i] = upper_a_[i] * inv_denom_[i];
    }
    rhs_.resize(n);
  }

  double dt() const { return dt_; }

  void step(GridState& st) const {
    const int n = static_cast<int>(rhs_.size());
    const cd* p = st.psi.data() + 1;
    for (int i = 0; i < n; ++i) {
      cd r = diag_b_[i] * p[i];
      if (i > 0) r += lower_b_[i] * p[i - 1];
      if (i + 1 < n) r += upper_b_[i] * p[i + 1];
      rhs_[i] = r;
    }
    rhs_[0] *= inv_denom_[0];
    for (int i = 1; i < n; ++i) rhs_[i] = (rhs_[i] - lower_a_[i] * rhs_[i - 1]) * inv_denom_[i];
    for (int i = n - 2; i >= 0; --i) rhs_[i] -= cprime_[i] * rhs_[i + 1];
    for (int i = 0; i < n; ++i) st.psi[i + 1] = rhs_[i];
    st.t += dt_;
  }

  /// Advances n_steps; throws blowup_error on non-finite amplitudes,
  /// checked every 256 steps and at the end.
  void run(GridState& st, int n_steps) const {
    if (static_cast<int>(st.psi.size()) != grid_.size())
      throw std::invalid_argument("Propagator::run: state lives on a different grid");
    const double t0 = st.t;
    for (int k = 1; k <= n_steps; ++k) {
      step(st);
      if (k % 256 == 0 || k == n_steps) {
        for (const cd& a : st.psi)
          if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw blowup_error("grid propagation produced non-finite amplitudes", k);
      }
    }
    st.t = t0 + n_steps * dt_;  // avoid summed rounding in t
    if (offset_ != 0.0) {
      const cd phase = std::polar(1.0, -offset_ * n_steps * dt_ / hbar_);
      for (cd& a : st.psi) a *= phase;
    }
  }

 private:
  Grid1D grid_;
  double dt_;
  double hbar_;
  double offset_;
  std::vector<cd> diag_a_, lower_a_, upper_a_, diag_b_, lower_b_, upper_b_;
  std::vector<cd> cprime_, inv_denom_;
  mutable std::vector<cd> rhs_;
};

/// True when dt exceeds 10 dz^2 m / hbar. CN stays stable; the flag only
/// signals that high grid modes carry large phase errors.
inline bool exceeds_step_heuristic(const GridState& st, double dt) {
  const double dz = st.grid.dz();
  return dt > 10.0 * dz * dz * st.mass / st.hbar;
}

// ---------------------------------------------------------------------------
// observables

struct Observables {
  double norm;
  double z_mean;
  double p_mean;
  double p_variance;
  double energy;
};

namespace detail {

// Fourth-order centred first and second derivatives; psi outside the grid
// is taken as zero (odd reflection about a Dirichlet end point).
inline cd ghost(const std::vector<cd>& psi, int i) {
  const int n = static_cast<int>(psi.size());
  if (i < 0) return -psi[-i];
  if (i >= n) return -psi[2 * (n - 1) - i];
  return psi[i];
}

inline cd d1(const std::vector<cd>& psi, int i, double dz) {
  return (ghost(psi, i - 2) - 8.0 * ghost(psi, i - 1) + 8.0 * ghost(psi, i + 1) - ghost(psi, i + 2)) /
         (12.0 * dz);
}

inline cd d2(const std::vector<cd>& psi, int i, double dz) {
  return (-ghost(psi, i - 2) + 16.0 * ghost(psi, i - 1) - 30.0 * psi[i] + 16.0 * ghost(psi, i + 1) -
          ghost(psi, i + 2)) /
         (12.0 * dz * dz);
}

}  // namespace detail

/// Trapezoidal moments. <p> and <p^2> use fourth-order centred
/// differences; the energy adds the potential V.
inline Observables observables(const GridState& st, const Potential& V = [](double) { return 0.0; }) {
  const auto& g = st.grid;
  const double dz = g.dz();
  const int n = g.size();
  double norm = 0, zm = 0, ekin = 0, epot = 0;
  cd pm = 0, p2 = 0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 * dz : dz;
    const cd a = st.psi[i];
    const double rho = std::norm(a);
    const double z = g.z(i);
    norm += w * rho;
    zm += w * z * rho;
    epot += w * V(z) * rho;
    if (i == 0 || i + 1 == n) continue;  // Dirichlet end points carry no amplitude
    pm += w * std::conj(a) * detail::d1(st.psi, i, dz);
    p2 += w * std::conj(a) * detail::d2(st.psi, i, dz);
  }
  const double hb = st.hbar;
  const double p_mean = (cd(0, -hb) * pm).real() / norm;
  const double p2_mean = -hb * hb * p2.real() / norm;
  ekin = p2_mean / (2.0 * st.mass);
  return {norm, zm / norm, p_mean, p2_mean - p_mean * p_mean, ekin + epot / norm};
}

inline GridState propagate(GridState state, const Potential& V, double dt, int n_steps,
                           PropagatorOptions opts = {}) {
  if (n_steps < 0) throw std::invalid_argument("propagate: n_steps must be >= 0");
  if (!opts.energy_offset) opts.energy_offset = observables(state, V).energy;
  const Propagator prop(state.grid, state.hbar, state.mass, V, dt, opts);
  prop.run(state, n_steps);
  return state;
}

inline GridState propagate(GridState state, const Scenario& scenario, double dt, int n_steps,
                           PropagatorOptions opts = {}) {
  const Potential V = potential_of(scenario, state.mass);
  return propagate(std::move(state), V, dt, n_steps, opts);
}

struct BoundaryDerivative {
  cd value;
  double error_estimate;  // |fourth-order - third-order| one-sided estimates
  bool coarse;            // estimate above 1e-6 (1 + |value|)
};

/// One-sided derivative at the Dirichlet wall z_min.
inline BoundaryDerivative boundary_derivative(const GridState& st) {
  if (!st.grid.wall_at_min())
    throw std::invalid_argument("boundary_derivative: grid has no wall at z_min");
  const auto& p = st.psi;
  const double dz = st.grid.dz();
  const cd fourth = (-25.0 * p[0] + 48.0 * p[1] - 36.0 * p[2] + 16.0 * p[3] - 3.0 * p[4]) / (12.0 * dz);
  const cd third = (-11.0 * p[0] + 18.0 * p[1] - 9.0 * p[2] + 2.0 * p[3]) / (6.0 * dz);
  const double err = std::abs(fourth - third);
  return {fourth, err, err > 1e-6 * (1.0 + std::abs(fourth))};
}

/// Discrete L2 distance between grid amplitudes and a reference function.
template <class F>
double l2_error(const GridState& st, F&& reference) {
  const auto& g = st.grid;
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double w = (i == 0 || i + 1 == g.size()) ? 0.5 : 1.0;
    s += w * std::norm(st.psi[i] - cd(reference(g.z(i))));
  }
  return std::sqrt(s * g.dz());
}

/// Discrete L2 distance between |psi|^2 and a reference density.
template <class F>
double density_l2_error(const GridState& st, F&& reference) {
  const auto& g = st.grid;
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double w = (i == 0 || i + 1 == g.size()) ? 0.5 : 1.0;
    const double d = std::norm(st.psi[i]) - reference(g.z(i));
    s += w * d * d;
  }
  return std::sqrt(s * g.dz());
}

}  // namespace sqt::grid
