#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "sqt/bouncer_harm.hpp"
#include "sqt/quadrature.hpp"

using cd = std::complex<double>;
using sqt::harmonic_bouncer;

namespace {

constexpr double kPi = std::numbers::pi;
const sqt::GaussianMixedParams kPacket(5.0, 1.0);

double initial_gaussian(double z) { return std::pow(2 * kPi, -0.25) * std::exp(-(z - 5) * (z - 5) / 4.0); }

}  // namespace

TEST(ShoGaussian, InitialStateAndUnitarity) {
  for (double eps : {1.0, 0.5, 0.01}) {
    const auto st = harmonic_bouncer(eps, kPacket);
    for (double z : {-1.0, 2.0, 5.0, 7.3}) EXPECT_NEAR(std::abs(sqt::sho_gaussian(st, z, 0.0) - initial_gaussian(z)), 0.0, 1e-12);
    const auto rule = sqt::quad::composite_gauss_legendre(-30.0, 30.0, 600);
    for (double t : {0.3, 0.785398, 1.9, 4.4}) {
      EXPECT_NEAR(rule([&](double z) { return std::norm(sqt::sho_gaussian(st, z, t)); }), 1.0, 1e-12);
      const double mean = rule([&](double z) { return z * std::norm(sqt::sho_gaussian(st, z, t)); });
      EXPECT_NEAR(mean, 5.0 * std::cos(2.0 * t), 1e-11) << eps << " " << t;
    }
  }
}

TEST(ShoGaussian, SolvesScaledSchrodingerEquation) {
  // i hb psi_t = -hb^2/(2m) psi'' + m w^2 z^2/2 psi, harmonic units m = 1/4, w = 2
  for (double eps : {1.0, 0.3}) {
    const auto st = harmonic_bouncer(eps, kPacket);
    const double hb = st.hbar(), m = st.mass();
    const double h = 1e-4;
    for (double t : {0.2, 0.9, 1.6, 2.5, 3.3, 5.9}) {
      for (double z : {-0.5, 1.0, 4.0}) {
        auto f = [&](double zz, double tt) { return sqt::sho_gaussian(st, zz, tt); };
        const cd dt = (f(z, t + h) - f(z, t - h)) / (2 * h);
        const cd d2 = (f(z + h, t) - 2.0 * f(z, t) + f(z - h, t)) / (h * h);
        const cd res = cd(0, hb) * dt + hb * hb / (2 * m) * d2 - 0.5 * m * 4.0 * z * z * f(z, t);
        EXPECT_LT(std::abs(res), 2e-5 * (1 + std::abs(f(z, t)) * 100)) << eps << " " << t << " " << z;
      }
    }
  }
}

TEST(ShoGaussian, ContinuousThroughHalfAndFullPeriods) {
  const auto st = harmonic_bouncer(0.5, kPacket);
  for (double t : {kPi / 4, kPi / 2, 3 * kPi / 4, kPi, 5 * kPi / 2}) {
    const double h = 1e-9;
    EXPECT_NEAR(std::abs(sqt::sho_gaussian(st, 1.3, t - h) - sqt::sho_gaussian(st, 1.3, t + h)), 0.0, 1e-7) << t;
  }
}

TEST(ShoGaussian, CoefficientFormAgreesAwayFromSingularTimes) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ut(0.01, kPi - 0.01);
  for (double eps : {1.0, 0.5, 0.01}) {
    const auto st = harmonic_bouncer(eps, kPacket);
    for (int i = 0; i < 20; ++i) {
      const double t = ut(rng);
      for (double z : {-2.0, 0.0, 3.0, 5.5}) {
        const cd a = sqt::sho_gaussian(st, z, t);
        const cd b = sqt::sho_gaussian_from_coefficients(st, z, t);
        // principal square roots may differ from the continued branch by a sign
        const double d = std::min(std::abs(a - b), std::abs(a + b));
        EXPECT_LT(d, 1e-10 * std::max(1e-30, std::abs(a))) << eps << " " << t << " " << z;
      }
    }
  }
  const auto st = harmonic_bouncer(1.0, kPacket);
  EXPECT_THROW(sqt::sho_coefficients(st, 1.0, 0.0), sqt::singular_time_error);
  EXPECT_EQ(sqt::sho_gaussian_from_coefficients(st, 1.0, 0.0), sqt::sho_gaussian(st, 1.0, 0.0));
}

TEST(HardWall, OddExtensionNormAndConservation) {
  const auto st = harmonic_bouncer(0.5, kPacket);
  EXPECT_EQ(sqt::hardwall_wavefunction(st, 0.0, 1.7), cd(0.0));
  EXPECT_THROW(sqt::hardwall_wavefunction(st, -0.1, 1.0), std::domain_error);
  EXPECT_EQ(sqt::hardwall_wavefunction(st, 1.2, 0.4), sqt::sho_gaussian(st, 1.2, 0.4) - sqt::sho_gaussian(st, -1.2, 0.4));
  const sqt::HarmonicQuadrature q(st);
  const double expected = 1.0 - std::exp(-12.5);  // image overlap exp(-z0^2 / 2 s0^2)
  EXPECT_NEAR(q.moments(0.0).norm, expected, 1e-12);
  for (double t = 0.0; t <= 10.0; t += 0.37) EXPECT_NEAR(q.moments(t).norm, expected, 1e-10) << t;
  // a packet 7 widths out: defect below 1e-9
  const auto far = harmonic_bouncer(1.0, sqt::GaussianMixedParams(7.0, 1.0));
  EXPECT_NEAR(sqt::HarmonicQuadrature(far).moments(0.0).norm, 1.0, 1e-9);
}

TEST(HardWall, DerivativesMatchFiniteDifferences) {
  const auto st = harmonic_bouncer(0.5, kPacket);
  const double h = 1e-4;
  for (double t : {0.2, 1.1, 2.6}) {
    for (double z : {0.0, 0.7, 3.0}) {
      const auto j = sqt::hardwall_jet(st, z, t);
      auto f = [&](double zz) { return sqt::sho_gaussian(st, zz, t) - sqt::sho_gaussian(st, -zz, t); };
      EXPECT_NEAR(std::abs(j.d1 - (f(z + h) - f(z - h)) / (2 * h)), 0.0, 1e-7);
      EXPECT_NEAR(std::abs(j.d2 - (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h)), 0.0, 1e-5);
    }
    EXPECT_EQ(sqt::hardwall_jet(st, 0.0, t).d2, cd(0.0));
  }
}

TEST(PositionExpectation, ThreeRoutesAgreeAtRandomTimes) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ut(0.0, 6.0);
  for (double eps : {1.0, 0.5, 0.01}) {
    const auto st = harmonic_bouncer(eps, kPacket);
    const sqt::HarmonicQuadrature q(st);
    for (int i = 0; i < 50; ++i) {
      const double t = ut(rng);
      const double quad = q.moments(t).z_mean;
      EXPECT_LT(std::abs(sqt::position_expectation_closed(st, t) - quad), 1e-7 * quad) << eps << " " << t;
      EXPECT_LT(std::abs(sqt::position_expectation_regular(st, t) - quad), 1e-7 * quad) << eps << " " << t;
    }
    // singular times of the cot/csc form
    for (double t : {0.0, kPi / 4, kPi / 2, kPi}) {
      const double quad = q.moments(t).z_mean;
      EXPECT_LT(std::abs(sqt::position_expectation_closed(st, t) - quad), 1e-7 * quad) << eps << " " << t;
    }
  }
}

TEST(PositionExpectation, InitialValueEpsIndependentAndPeriodic) {
  const double ref = sqt::position_expectation_regular(harmonic_bouncer(1.0, kPacket), 0.0);
  for (double eps : {0.5, 0.01}) {
    const auto st = harmonic_bouncer(eps, kPacket);
    EXPECT_NEAR(sqt::position_expectation_regular(st, 0.0), ref, 1e-14);
    for (double t : {0.3, 1.0}) EXPECT_NEAR(sqt::position_expectation_regular(st, t + kPi / 2), sqt::position_expectation_regular(st, t), 1e-12);
  }
}

TEST(PositionExpectation, SmallerEpsBouncesCloserToWall) {
  auto min_over_period = [](double eps) {
    const auto st = harmonic_bouncer(eps, kPacket);
    double lo = 1e300;
    for (double t = 0.0; t <= kPi / 2; t += 1e-3) lo = std::min(lo, sqt::position_expectation_regular(st, t));
    return lo;
  };
  const double m1 = min_over_period(1.0), m05 = min_over_period(0.5), m001 = min_over_period(0.01);
  EXPECT_LT(m05, m1);
  EXPECT_LT(m001, m05);
}

TEST(WallForce, PositivePeriodicAndClosedFormAgrees) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> ut(0.0, 10.0);
  for (double eps : {1.0, 0.5, 0.01}) {
    const auto st = harmonic_bouncer(eps, kPacket);
    const double period = kPi / st.omega();
    for (int i = 0; i < 50; ++i) {
      const double t = ut(rng);
      const auto f = sqt::nonclassical_force(st, t);
      EXPECT_GE(f.f_nc, 0.0);
      EXPECT_LT(std::abs(f.f_nc - f.f_nc_closed), 1e-7 * f.f_nc_closed) << eps << " " << t;
      const double later = sqt::nonclassical_force(st, t + period).f_nc;
      EXPECT_LT(std::abs(later - f.f_nc), 1e-9 * f.f_nc) << eps << " " << t;
      EXPECT_NEAR(sqt::detail::nonclassical_force_sqrt2_prefactor(st, t) / f.f_nc_closed, std::sqrt(kPi), 1e-9);
    }
  }
}

TEST(WallForce, InitialValueFromFiniteDifferences) {
  const auto st = harmonic_bouncer(1.0, kPacket);
  const double h = 1e-5;
  const cd d = (-3.0 * sqt::hardwall_wavefunction(st, 0.0, 0.0) + 4.0 * sqt::hardwall_wavefunction(st, h, 0.0) -
                sqt::hardwall_wavefunction(st, 2 * h, 0.0)) /
               (2 * h);
  const double fd = st.hbar() * st.hbar() / (2 * st.mass()) * std::norm(d);
  EXPECT_NEAR(sqt::nonclassical_force(st, 0.0).f_nc / fd, 1.0, 1e-8);
  // closed form at t = 0: hb^2/(2m) z0^2 exp(-z0^2/2 s0^2) / (sqrt(2 pi) s0^5)
  EXPECT_NEAR(sqt::nonclassical_force_closed(st, 0.0), 2.0 * 25.0 * std::exp(-12.5) / std::sqrt(2 * kPi), 1e-18);
}

TEST(WallForce, ContinuousInEps) {
  const double t = kPi / 2 - 0.05;
  double prev = sqt::nonclassical_force(harmonic_bouncer(0.01, kPacket), t).f_nc;
  for (double eps = 0.0102; eps <= 1.0; eps *= 1.02) {
    const double f = sqt::nonclassical_force(harmonic_bouncer(eps, kPacket), t).f_nc;
    EXPECT_LT(std::abs(f - prev), 0.1 * std::max(f, prev)) << eps;
    prev = f;
  }
}

TEST(Ehrenfest, ResidualsWithAndWithoutWallForce) {
  const auto st = harmonic_bouncer(1.0, kPacket);
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.6 + 1e-3 * i);  // around the bounce at pi/4
  const auto rep = sqt::ehrenfest_check(st, grid);
  EXPECT_EQ(rep.samples, 393);
  EXPECT_LT(rep.max_position_residual, 1e-6);
  EXPECT_LT(rep.max_momentum_residual, 1e-6);
  EXPECT_GT(rep.max_momentum_residual_no_force, 1e-2);
  EXPECT_THROW(sqt::ehrenfest_check(st, {0.0, 0.1, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}), std::invalid_argument);
  EXPECT_THROW(sqt::ehrenfest_check(st, {0.0, 0.1, 0.2}), std::invalid_argument);
}

TEST(Ehrenfest, ResidualShrinksAsEighthPowerOfStep) {
  const auto st = harmonic_bouncer(0.5, kPacket);
  auto residual = [&](double dt) {
    std::vector<double> g;
    for (int i = -4; i <= 4; ++i) g.push_back(0.7 + i * dt);
    return sqt::ehrenfest_check(st, g).max_momentum_residual;
  };
  const double r1 = residual(0.04), r2 = residual(0.02);
  EXPECT_GT(r1 / r2, 180.0);
  EXPECT_LT(r1 / r2, 330.0);
}

TEST(Ehrenfest, SmallEpsBounceResolvedAtMillisecondSteps) {
  const auto st = harmonic_bouncer(0.01, kPacket);
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(0.69 + 1e-3 * i);
  const auto rep = sqt::ehrenfest_check(st, grid);
  EXPECT_LT(rep.max_momentum_residual, 1e-5);
  EXPECT_GT(rep.max_momentum_residual_no_force, 1e-2);
}

TEST(MomentumVariance, MatchesFiniteDifferenceOfVariance) {
  for (double eps : {1.0, 0.5}) {
    const auto st = harmonic_bouncer(eps, kPacket);
    const sqt::HarmonicQuadrature q(st);
    auto var = [&](double t) {
      const auto m = q.moments(t);
      return m.p2_mean - m.p_mean * m.p_mean;
    };
    const double h = 1e-3;
    for (double t : {0.3, 0.7, 0.8, 1.4}) {
      const double fd = (-var(t + 2 * h) + 8 * var(t + h) - 8 * var(t - h) + var(t - 2 * h)) / (12 * h);
      const double rate = sqt::momentum_variance_rate(st, t);
      EXPECT_LT(std::abs(rate - fd), 1e-5 * std::max(1.0, std::abs(fd))) << eps << " " << t;
    }
  }
}

TEST(MomentumVariance, StationaryAndFreeStatesHaveZeroRate) {
  // first odd oscillator eigenstate: a stationary state of the bouncer
  const double m = 0.25, w = 2.0, hb = 1.0;
  const double a = m * w / (2 * hb);
  const double norm = std::sqrt(4.0 * std::sqrt(8 * a * a * a / kPi));  // half-line normalisation
  auto eigen = [&](double z) {
    const double g = std::exp(-a * z * z);
    return sqt::ComplexJet{norm * z * g, norm * (1 - 2 * a * z * z) * g, norm * (4 * a * a * z * z * z - 6 * a * z) * g};
  };
  const auto rule = sqt::quad::composite_gauss_legendre(0.0, 20.0, 100);
  EXPECT_NEAR(rule([&](double z) { return std::norm(eigen(z).value); }), 1.0, 1e-12);
  EXPECT_NEAR(sqt::momentum_variance_rate(eigen, [&](double z) { return m * w * w * z; }, hb, m, rule), 0.0, 1e-12);
  // free packet far from the wall: momentum spread does not change
  const double s0 = 0.5, z0 = 10.0, p0 = 0.7, mf = 1.0, t = 0.8;
  auto free_jet = [&](double z) {
    const cd at(1.0, hb * t / (2 * mf * s0 * s0));
    const cd e = (-(z - z0) * (z - z0) / (4 * s0 * s0) + cd(0, p0 * (z - z0)) - cd(0, p0 * p0 * t / 2)) / at;
    const cd psi = std::pow(2 * kPi * s0 * s0, -0.25) / std::sqrt(at) * std::exp(e);
    const cd g = (-(z - z0) / (2 * s0 * s0) + cd(0, p0)) / at;
    return sqt::ComplexJet{psi, psi * g, psi * (g * g - 1.0 / (2 * s0 * s0 * at))};
  };
  const auto wide = sqt::quad::composite_gauss_legendre(0.0, 25.0, 200);
  EXPECT_NEAR(sqt::momentum_variance_rate(free_jet, [](double) { return 0.0; }, hb, mf, wide), 0.0, 1e-12);
}

TEST(Validation, BadStates) {
  EXPECT_THROW(harmonic_bouncer(1.0, sqt::GaussianMixedParams(5, 1, 0, 0.1)), std::invalid_argument);
  EXPECT_THROW(harmonic_bouncer(1.0, sqt::GaussianMixedParams(-5, 1)), std::invalid_argument);
  EXPECT_THROW(sqt::HarmonicBouncerState(sqt::Regime(1.0), 0.0, kPacket), std::invalid_argument);
}
