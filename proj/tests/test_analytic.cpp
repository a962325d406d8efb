#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "sqt/analytic.hpp"
#include "sqt/quadrature.hpp"

using cd = std::complex<double>;
using sqt::ClosedFormDensity;
using sqt::GaussianMixedParams;
using sqt::Regime;

namespace {

constexpr double kPi = std::numbers::pi;

// Textbook freely spreading pure Gaussian, written independently of the
// density-matrix closed form.
cd free_packet(double x, double t, double x0, double s0, double p0, double hbar, double m) {
  const cd a(1.0, hbar * t / (2.0 * m * s0 * s0));
  const cd e = (-(x - x0) * (x - x0) / (4.0 * s0 * s0) + cd(0, p0 * (x - x0) / hbar) -
                cd(0, p0 * p0 * t / (2.0 * m * hbar))) /
               a;
  return std::pow(2.0 * kPi * s0 * s0, -0.25) / std::sqrt(a) * std::exp(e);
}

// Initial mixed Gaussian in centre/relative coordinates.
cd initial_mixed(double x, double y, const GaussianMixedParams& p, double hbar) {
  const double R = 0.5 * (x + y), r = x - y;
  const double s0 = p.sigma0();
  const double amp = std::exp(-(R - p.x0()) * (R - p.x0()) / (2 * s0 * s0) -
                              p.mixing_factor() * r * r / (8 * s0 * s0)) /
                     (std::sqrt(2 * kPi) * s0);
  return std::polar(amp, p.p0() * r / hbar);
}

ClosedFormDensity free_scaled(double eps, GaussianMixedParams p, double m = 1.0) {
  return ClosedFormDensity(sqt::Free{}, Regime(eps, 1.0, m), p);
}

}  // namespace

TEST(FreeDensity, InitialConditionIsTheMixedGaussian) {
  const GaussianMixedParams p(1.5, 0.8, -0.7, 0.4);
  const auto cfd = free_scaled(0.3, p);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-2, 5);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng), y = u(rng);
    const cd got = sqt::free_density_value(cfd, x, y, 0.0);
    const cd want = initial_mixed(x, y, p, cfd.scaled_hbar());
    EXPECT_NEAR(std::abs(got - want), 0.0, 1e-14);
  }
}

TEST(FreeDensity, PureStateFactorisesIntoTextbookPacket) {
  const double m = 0.7;
  const GaussianMixedParams p(2.0, 0.6, 1.3, 0.0);
  const auto cfd = free_scaled(0.5, p, m);
  const double hb = cfd.scaled_hbar();
  for (double t : {0.3, 1.0, 4.0}) {
    for (double x : {-1.0, 1.5, 3.0}) {
      for (double y : {0.0, 2.5}) {
        const cd want = free_packet(x, t, 2.0, 0.6, 1.3, hb, m) *
                        std::conj(free_packet(y, t, 2.0, 0.6, 1.3, hb, m));
        EXPECT_NEAR(std::abs(sqt::free_density_value(cfd, x, y, t) - want), 0.0, 1e-13)
            << x << " " << y << " " << t;
      }
    }
  }
}

TEST(FreeDensity, MixedStateSolvesVonNeumannEquation) {
  // i hbar d rho/dt = -(hbar^2/2m)(d^2/dx^2 - d^2/dy^2) rho, by finite differences
  const double m = 1.3;
  const GaussianMixedParams p(0.5, 0.9, 0.8, 0.6);
  const auto cfd = free_scaled(0.4, p, m);
  const double hb = cfd.scaled_hbar();
  auto rho = [&](double x, double y, double t) { return sqt::free_density_value(cfd, x, y, t); };
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  const double h = 1e-3;
  for (int i = 0; i < 40; ++i) {
    const double x = u(rng), y = u(rng), t = 0.1 + 2.0 * std::abs(u(rng));
    const cd dt = (rho(x, y, t + h) - rho(x, y, t - h)) / (2 * h);
    const cd dxx = (rho(x + h, y, t) - 2.0 * rho(x, y, t) + rho(x - h, y, t)) / (h * h);
    const cd dyy = (rho(x, y + h, t) - 2.0 * rho(x, y, t) + rho(x, y - h, t)) / (h * h);
    const cd residual = cd(0, hb) * dt + hb * hb / (2 * m) * (dxx - dyy);
    EXPECT_LT(std::abs(residual), 1e-6) << x << " " << y << " " << t;
  }
}

TEST(FreeDensity, TraceAndMomentsMatchQuadrature) {
  const double m = 1.0;
  const GaussianMixedParams p(5.0, 1.0, -1.0, 0.7);
  const auto cfd = free_scaled(1.0, p, m);
  sqt::quad::AdaptiveOptions opts;
  opts.abs_tol = 1e-13;
  opts.initial_segments = 20;
  for (double t : {0.0, 2.0, 7.5}) {
    const auto mo = sqt::free_moments(cfd, t);
    const double c = 5.0 - t;
    const double st = sqt::sigma_t(cfd.kind(), p, t);
    auto P = [&](double x) { return sqt::free_density_value(cfd, x, x, t).real(); };
    const double lo = c - 14 * st, hi = c + 14 * st;
    EXPECT_NEAR(sqt::quad::integrate(P, lo, hi, opts).value, 1.0, 1e-12);
    EXPECT_NEAR(sqt::quad::integrate([&](double x) { return x * P(x); }, lo, hi, opts).value,
                mo.x_mean, 1e-11);
    EXPECT_NEAR(sqt::quad::integrate([&](double x) { return x * x * P(x); }, lo, hi, opts).value,
                mo.x2_mean, 1e-10);
    EXPECT_NEAR(sqt::position_pd(cfd, 1.234, t), P(1.234), 1e-15);
    // <p^2> from the momentum distribution
    const auto mpd = std::get<sqt::GaussianMomentum>(sqt::momentum_pd(cfd));
    const double p2 = sqt::quad::integrate([&](double q) { return q * q * mpd.density(q); },
                                           -1 - 14 * mpd.width, -1 + 14 * mpd.width, opts)
                          .value;
    EXPECT_NEAR(p2, mo.p2_mean, 1e-11);
    const double dp = std::sqrt(mo.p2_mean - mo.p_mean * mo.p_mean);
    EXPECT_NEAR(mo.uncertainty_product, st * dp, 1e-12);
    EXPECT_GE(mo.uncertainty_product, 0.5 - 1e-15);
  }
}

TEST(FreeDensity, MomentumRepresentationIsFourierTransform) {
  const double m = 1.0;
  const GaussianMixedParams p(1.0, 0.7, 0.5, 0.3);
  const auto cfd = free_scaled(0.6, p, m);
  const double hb = cfd.scaled_hbar();
  const double t = 1.5;
  const double st = sqt::sigma_t(cfd.kind(), p, t);
  const double c = 1.0 + 0.5 * t;
  const auto rule = sqt::quad::composite_gauss_legendre(c - 12 * st, c + 12 * st, 24);
  for (auto [pp, qq] : {std::pair{0.5, 0.5}, std::pair{0.2, 0.9}, std::pair{1.1, 0.3}}) {
    const cd ft = rule([&](double x) {
                    return rule([&](double y) {
                      return std::exp(cd(0, (-pp * x + qq * y) / hb)) *
                             sqt::free_density_value(cfd, x, y, t);
                    });
                  }) /
                  (2 * kPi * hb);
    const cd closed = sqt::momentum_density_matrix(cfd, pp, qq, t);
    EXPECT_NEAR(std::abs(ft - closed), 0.0, 1e-10) << pp << " " << qq;
  }
  // diagonal is the time-independent momentum distribution
  const auto g = std::get<sqt::GaussianMomentum>(sqt::momentum_pd(cfd));
  EXPECT_NEAR(sqt::momentum_density_matrix(cfd, 0.8, 0.8, 3.0).real(), g.density(0.8), 1e-14);
  EXPECT_NEAR(sqt::momentum_density_matrix(cfd, 0.8, 0.8, 3.0).imag(), 0.0, 1e-15);
}

TEST(FreeDensity, MomentumFieldIsPhaseGradientAndDrivesTrajectories) {
  const double m = 0.8;
  const GaussianMixedParams p(2.0, 0.5, -0.4, 0.5);
  const auto cfd = free_scaled(0.7, p, m);
  const double h = 1e-5;
  for (double t : {0.5, 2.0}) {
    for (double x : {1.0, 2.5, 4.0}) {
      const double dS = (sqt::free_density(cfd, x + h, x, t).phase -
                         sqt::free_density(cfd, x - h, x, t).phase) /
                        (2 * h);
      EXPECT_NEAR(sqt::momentum_field_free(cfd, x, t), dS, 1e-8);
    }
    for (double xi : {1.2, 2.0, 3.1}) {
      const double xt = sqt::scaled_trajectory_free(cfd, xi, t);
      const double v = (sqt::scaled_trajectory_free(cfd, xi, t + h) -
                        sqt::scaled_trajectory_free(cfd, xi, t - h)) /
                       (2 * h);
      EXPECT_NEAR(m * v, sqt::momentum_field_free(cfd, xt, t), 1e-8);
    }
  }
  EXPECT_DOUBLE_EQ(sqt::scaled_trajectory_free(cfd, 3.3, 0.0), 3.3);
}

TEST(FreeDensity, ClassicalLimitKinds) {
  const GaussianMixedParams p(5.0, 1.0, -1.0, 0.7);
  const ClosedFormDensity cl(sqt::Free{}, sqt::Classical{}, p);
  EXPECT_TRUE(sqt::is_dirac(sqt::momentum_pd(cl)));
  EXPECT_DOUBLE_EQ(std::get<sqt::DiracMomentum>(sqt::momentum_pd(cl)).at, -1.0);
  EXPECT_TRUE(sqt::is_dirac(sqt::actual_momentum_distribution(cl, 3.0)));
  EXPECT_DOUBLE_EQ(sqt::sigma_t(cl.kind(), p, 100.0), 1.0);
  EXPECT_DOUBLE_EQ(sqt::momentum_field_free(cl, 7.0, 2.0), -1.0);
  EXPECT_DOUBLE_EQ(sqt::scaled_trajectory_free(cl, 5.5, 2.0), 3.5);
  // tiny eps approaches the classical widths
  const auto near = free_scaled(1e-12, p);
  const auto mp = std::get<sqt::GaussianMomentum>(sqt::momentum_pd(near));
  EXPECT_LT(mp.width, 1e-5);
  EXPECT_LT(sqt::sigma_t(near.kind(), p, 12.0) - 1.0, 1e-5);
  const auto am = sqt::actual_momentum_distribution(near, 12.0);
  ASSERT_FALSE(sqt::is_dirac(am));
  EXPECT_LT(std::get<sqt::GaussianMomentum>(am).width, 1e-5);
  EXPECT_TRUE(sqt::is_dirac(sqt::actual_momentum_distribution(near, 0.0)));
  EXPECT_THROW(sqt::free_moments(cl, 1.0), std::invalid_argument);
  EXPECT_THROW(sqt::momentum_density_matrix(cl, 0, 0, 0), std::invalid_argument);
}

TEST(FreeDensity, ActualMomentumDistributionMatchesTrajectoryMomenta) {
  const double m = 1.0;
  const GaussianMixedParams p(0.0, 1.0, 0.3, 0.2);
  const auto cfd = free_scaled(1.0, p, m);
  const double t = 2.0, h = 1e-5;
  // trajectory starting one sigma0 away: its momentum is p0 + one width
  const double v = (sqt::scaled_trajectory_free(cfd, 1.0, t + h) -
                    sqt::scaled_trajectory_free(cfd, 1.0, t - h)) /
                   (2 * h);
  const auto d = std::get<sqt::GaussianMomentum>(sqt::actual_momentum_distribution(cfd, t));
  EXPECT_NEAR(m * v, d.mean + d.width, 1e-8);
}

TEST(HalfSpace, VanishesOnWallAndMatchesImagePacket) {
  const GaussianMixedParams p(1.5, 0.6, -0.8, 0.0);
  const ClosedFormDensity cfd(sqt::HalfSpaceFree{}, Regime(0.5), p);
  const double hb = cfd.scaled_hbar();
  for (double t : {0.0, 1.0, 3.0}) {
    EXPECT_NEAR(std::abs(sqt::halfspace_density(cfd, 0.0, 1.2, t)), 0.0, 1e-16);
    for (double x : {0.3, 1.0, 2.2}) {
      const cd psi = free_packet(x, t, 1.5, 0.6, -0.8, hb, 1.0) - free_packet(-x, t, 1.5, 0.6, -0.8, hb, 1.0);
      EXPECT_NEAR(sqt::halfspace_density(cfd, x, x, t).real(), std::norm(psi), 1e-13);
    }
  }
  EXPECT_THROW(sqt::halfspace_density(cfd, -0.1, 1.0, 0.0), std::domain_error);
}

TEST(HalfSpace, TraceIsOneMinusImageOverlapAndConserved) {
  const GaussianMixedParams p(5.0, 1.0, -1.0, 0.7);
  const ClosedFormDensity cfd(sqt::HalfSpaceFree{}, Regime(1.0), p);
  const double k = p.mixing_factor();
  const double defect = std::exp(-25.0 / 2.0) * std::exp(-2.0 / k) / std::sqrt(k);
  for (double t : {0.0, 3.0, 6.0, 12.0}) {
    const auto obs = sqt::halfspace_observables(cfd, t);
    EXPECT_NEAR(obs.trace, 1.0 - defect, 1e-10) << t;
    EXPECT_GT(obs.mean, 0.0);
    EXPECT_GT(obs.dispersion, 0.0);
  }
  // far from the wall the initial state is the free one
  const auto start = sqt::halfspace_observables(cfd, 0.0);
  EXPECT_NEAR(start.mean, 5.0, 1e-4);  // wall truncates a 5-sigma tail
  EXPECT_NEAR(start.dispersion, 1.0, 1e-4);
  const ClosedFormDensity freecfd(sqt::Free{}, Regime(1.0), p);
  for (double x : {4.75, 5.0, 5.25})
    EXPECT_NEAR(std::abs(sqt::halfspace_density(cfd, x, x + 0.1, 0.0) -
                         sqt::free_density_value(freecfd, x, x + 0.1, 0.0)),
                0.0, 1e-10);
}

TEST(HalfSpace, ClassicalReflectionIndependentOfMixing) {
  for (double lam : {0.0, 0.7}) {
    const ClosedFormDensity cfd(sqt::HalfSpaceFree{}, sqt::Classical{}, GaussianMixedParams(5.0, 1.0, -1.0, lam));
    const auto a = sqt::halfspace_observables(cfd, 5.0);
    const auto b1 = sqt::halfspace_observables(cfd, 4.5);
    const auto b2 = sqt::halfspace_observables(cfd, 5.5);
    EXPECT_NEAR(b1.mean, b2.mean, 1e-9);  // symmetric about the turning time
    EXPECT_LT(a.mean, b1.mean);
  }
}

TEST(Linear, ContinuityAndTrajectoryVelocity) {
  const double m = 0.9, g = 1.7;
  for (double lam : {0.0, 0.5}) {
    const GaussianMixedParams p(4.0, 0.7, 0.0, lam);
    const ClosedFormDensity cfd(sqt::Linear{g}, Regime(0.3, 1.0, m), p);
    const double h = 1e-5;
    for (double t : {0.4, 1.1}) {
      for (double x : {2.0, 3.5, 4.2}) {
        const double dPdt = (sqt::linear_pd_pcd(cfd, x, t + h).density -
                             sqt::linear_pd_pcd(cfd, x, t - h).density) /
                            (2 * h);
        const double dJdx = (sqt::linear_pd_pcd(cfd, x + h, t).current -
                             sqt::linear_pd_pcd(cfd, x - h, t).current) /
                            (2 * h);
        EXPECT_NEAR(dPdt + dJdx, 0.0, 1e-8);
      }
      for (double xi : {3.5, 4.6}) {
        const double xt = sqt::linear_trajectory(cfd, xi, t);
        const double v = (sqt::linear_trajectory(cfd, xi, t + h) - sqt::linear_trajectory(cfd, xi, t - h)) / (2 * h);
        const auto pj = sqt::linear_pd_pcd(cfd, xt, t);
        EXPECT_NEAR(v, pj.current / pj.density, 1e-8);
      }
    }
  }
}

TEST(Linear, ClassicalDensityFallsRigidly) {
  const double g = 2.0;
  const GaussianMixedParams p(3.0, 0.5, 0.0, 0.4);
  const ClosedFormDensity cl(sqt::Linear{g}, sqt::Classical{1.0, 1.0}, p);
  for (double t : {0.0, 0.7, 1.3}) {
    for (double x : {1.0, 2.0, 3.0}) {
      const double fall = 0.5 * g * t * t;
      EXPECT_NEAR(sqt::linear_classical_density(cl, x, x, t).amplitude, sqt::position_pd(cl, x, t), 1e-14);
      // rigid translation of the initial amplitude
      EXPECT_NEAR(sqt::linear_classical_density(cl, x, x + 0.2, t).amplitude,
                  sqt::linear_classical_density(cl, x + fall, x + 0.2 + fall, 0.0).amplitude, 1e-14);
      const auto pj = sqt::linear_pd_pcd(cl, x, t);
      EXPECT_NEAR(pj.current, -g * t * pj.density, 1e-15);
    }
    EXPECT_DOUBLE_EQ(sqt::linear_classical_density(cl, 1.0, 0.5, t).phase, -g * t * 0.5);
  }
  EXPECT_THROW(ClosedFormDensity(sqt::Linear{g}, sqt::Classical{}, GaussianMixedParams(3, 1, 0.5)), std::invalid_argument);
  EXPECT_THROW(ClosedFormDensity(sqt::Linear{0.0}, sqt::Classical{}, p), std::invalid_argument);
}

TEST(Harmonic, ContinuityTrajectoriesAndPeriodicity) {
  const double m = 1.2, w = 1.4;
  const GaussianMixedParams p(2.0, 0.4, 0.0, 0.3);
  const ClosedFormDensity cfd(sqt::Harmonic{w}, Regime(0.5, 1.0, m), p);
  const double h = 1e-5;
  for (double t : {0.3, 1.0, 2.0, kPi / (2 * w)}) {
    for (double x : {-1.5, 0.2, 1.9}) {
      const double dPdt = (sqt::harmonic_pd_pcd(cfd, x, t + h).density -
                           sqt::harmonic_pd_pcd(cfd, x, t - h).density) /
                          (2 * h);
      const double dJdx = (sqt::harmonic_pd_pcd(cfd, x + h, t).current -
                           sqt::harmonic_pd_pcd(cfd, x - h, t).current) /
                          (2 * h);
      EXPECT_NEAR(dPdt + dJdx, 0.0, 1e-7) << x << " " << t;
    }
    for (double xi : {1.7, 2.3}) {
      const double xt = sqt::harmonic_trajectory(cfd, xi, t);
      const double v = (sqt::harmonic_trajectory(cfd, xi, t + h) - sqt::harmonic_trajectory(cfd, xi, t - h)) / (2 * h);
      const auto pj = sqt::harmonic_pd_pcd(cfd, xt, t);
      EXPECT_NEAR(v, pj.current / pj.density, 1e-7);
    }
  }
  EXPECT_NEAR(sqt::harmonic_sigma_t(cfd.kind(), p, w, kPi / w), 0.4, 1e-14);
  EXPECT_NEAR(sqt::position_pd(cfd, 0.7, 2 * kPi / w), sqt::position_pd(cfd, 0.7, 0.0), 1e-13);
}

TEST(Harmonic, ClassicalSingularAtQuarterPeriod) {
  const double w = 2.0;
  const GaussianMixedParams p(1.0, 0.3, 0.0, 0.2);
  const ClosedFormDensity cl(sqt::Harmonic{w}, sqt::Classical{}, p);
  EXPECT_THROW(sqt::harmonic_classical_density(cl, 0.1, 0.1, kPi / (2 * w)), sqt::singular_time_error);
  EXPECT_THROW(sqt::harmonic_pd_pcd(cl, 0.1, kPi / (2 * w)), sqt::singular_time_error);
  EXPECT_NEAR(sqt::harmonic_classical_density(cl, 0.4, 0.4, 0.3).amplitude, sqt::position_pd(cl, 0.4, 0.3), 1e-14);
  EXPECT_DOUBLE_EQ(sqt::harmonic_trajectory(cl, 1.5, kPi / w), 1.5);
  // classical velocity field along the trajectory
  const double h = 1e-6, t = 0.3;
  const double v = (sqt::harmonic_trajectory(cl, 1.1, t + h) - sqt::harmonic_trajectory(cl, 1.1, t - h)) / (2 * h);
  const auto pj = sqt::harmonic_pd_pcd(cl, sqt::harmonic_trajectory(cl, 1.1, t), t);
  EXPECT_NEAR(v, pj.current / pj.density, 1e-8);
}

TEST(ScalingIdentity, FreeDensityMatrix) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (double eps : {0.04, 0.25, 0.81}) {
    const double s = std::sqrt(eps);
    const GaussianMixedParams p(1.0, 0.5, 0.6, 0.3);
    const auto scaled = free_scaled(eps, p);
    const auto unit = free_scaled(1.0, GaussianMixedParams(1.0 / s, 0.5 / s, 0.6, 0.3));
    for (int i = 0; i < 30; ++i) {
      const double x = u(rng), y = u(rng), t = 1.5 + u(rng);
      const cd a = sqt::free_density_value(scaled, x, y, t);
      const cd b = sqt::free_density_value(unit, x / s, y / s, t / s) / s;
      EXPECT_LT(std::abs(a - b), 1e-10 * std::abs(b)) << eps;
    }
  }
}

TEST(ScalingIdentity, LinearAndHarmonicDensityAndCurrent) {
  // 25 positions x 5 times per eps; field strengths scale as g sqrt(eps), w sqrt(eps)
  for (double eps : {0.04, 0.25, 0.81}) {
    const double s = std::sqrt(eps);
    const GaussianMixedParams p(1.0, 0.4, 0.0, 0.3);
    const GaussianMixedParams pu(1.0 / s, 0.4 / s, 0.0, 0.3);
    const ClosedFormDensity lin(sqt::Linear{1.5}, Regime(eps), p);
    const ClosedFormDensity lin1(sqt::Linear{1.5 * s}, Regime(1.0), pu);
    const ClosedFormDensity har(sqt::Harmonic{2.0}, Regime(eps), p);
    const ClosedFormDensity har1(sqt::Harmonic{2.0 * s}, Regime(1.0), pu);
    for (int it = 0; it < 5; ++it) {
      const double t = 0.15 + 0.3 * it;
      for (int ix = 0; ix < 25; ++ix) {
        const double x = -0.5 + 0.1 * ix;
        const auto a = sqt::linear_pd_pcd(lin, x - 0.75 * t * t, t);
        const auto b = sqt::linear_pd_pcd(lin1, (x - 0.75 * t * t) / s, t / s);
        EXPECT_LT(std::abs(a.density - b.density / s), 1e-10 * a.density) << eps;
        EXPECT_LT(std::abs(a.current - b.current / s), 1e-10 * std::abs(a.current) + 1e-300) << eps;
        const auto c = sqt::harmonic_pd_pcd(har, x, t);
        const auto d = sqt::harmonic_pd_pcd(har1, x / s, t / s);
        EXPECT_LT(std::abs(c.density - d.density / s), 1e-10 * c.density) << eps;
        EXPECT_LT(std::abs(c.current - d.current / s), 1e-10 * std::abs(c.current) + 1e-300) << eps;
      }
    }
  }
}

TEST(Validation, ScenarioMismatchAndSingularInputs) {
  const GaussianMixedParams p(1.0, 1.0);
  const ClosedFormDensity lin(sqt::Linear{1.0}, Regime(1.0), p);
  EXPECT_THROW(sqt::free_density(lin, 0, 0, 0), std::invalid_argument);
  EXPECT_THROW(sqt::harmonic_pd_pcd(lin, 0, 0), std::invalid_argument);
  EXPECT_THROW(sqt::halfspace_observables(lin, 0), std::invalid_argument);
  EXPECT_THROW(ClosedFormDensity(sqt::Harmonic{-1.0}, Regime(1.0), p), std::invalid_argument);
  EXPECT_THROW(ClosedFormDensity(sqt::Harmonic{1.0}, Regime(1.0), GaussianMixedParams(1, 1, 0.1)), std::invalid_argument);
  const ClosedFormDensity half(sqt::HalfSpaceFree{}, Regime(1.0), p);
  EXPECT_THROW(sqt::position_pd(half, 1.0, 0.0), std::invalid_argument);
}
