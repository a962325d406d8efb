#pragma once

// Airy Ai and Ai', the negative zeros of Ai, erf and an overflow-safe erfi.
//
// Ai/Ai' branches:
//   |x| <= 2        Maclaurin series (no cancellation worth mentioning here)
//   2 < |x| <= 8    Taylor series about the nearest anchor of a 1/4-spaced
//                   table; anchors on the negative side are stepped out from
//                   the origin, anchors on the positive side are stepped in
//                   from the asymptotic value at x = 8 (stable directions)
//   |x| > 8         asymptotic expansions, truncated at the smallest term
// Both switch points are covered by overlap tests.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace sqt {

struct AiryPair {
  double ai;
  double ai_prime;
};

namespace detail {

inline constexpr double kAi0 = 0.355028053887817239260063186004183;
inline constexpr double kAiPrime0 = -0.258819403792806798405183560189203;
inline constexpr double kSeriesLimit = 2.0;
inline constexpr double kAsymptoticLimit = 8.0;
inline constexpr double kAnchorStep = 0.25;

// Power series of the solution of y'' = x y about `centre`, given y and y'
// there, evaluated at centre + h.
inline AiryPair airy_taylor(double centre, double y, double dy, double h) {
  // b[k] coefficients, only the last three are needed.
  double bkm1 = y;            // b0
  double bk = dy;             // b1
  double bkp1 = 0.5 * centre * y;  // b2
  double value = y + dy * h + bkp1 * h * h;
  double deriv = dy + 2.0 * bkp1 * h;
  double hp = h * h;  // h^(k+1) with k = 1
  const double tiny = std::numeric_limits<double>::epsilon() * 1e-3;
  for (int k = 1; k < 200; ++k) {
    // (k+2)(k+1) b[k+2] = centre b[k] + b[k-1]
    const double bnext = (centre * bk + bkm1) / ((k + 2.0) * (k + 1.0));
    const double dterm = (k + 2.0) * bnext * hp;
    hp *= h;
    const double term = bnext * hp;
    value += term;
    deriv += dterm;
    bkm1 = bk;
    bk = bkp1;
    bkp1 = bnext;
    if (k > 4 && std::abs(term) <= tiny * std::abs(value) &&
        std::abs(dterm) <= tiny * std::abs(deriv) && std::abs(bk * hp) <= tiny * std::abs(value))
      break;
  }
  return {value, deriv};
}

inline AiryPair airy_maclaurin(double x) { return airy_taylor(0.0, kAi0, kAiPrime0, x); }

// u_k of the asymptotic expansions, u_0 = 1.
inline const std::array<double, 40>& airy_u() {
  static const std::array<double, 40> u = [] {
    std::array<double, 40> c{};
    c[0] = 1.0;
    for (int k = 1; k < 40; ++k)
      c[k] = c[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
             ((2.0 * k - 1.0) * 216.0 * k);
    return c;
  }();
  return u;
}

inline double airy_v(int k) {
  const auto& u = airy_u();
  return -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u[k];
}

// x > 0, decaying branch.
inline AiryPair airy_asymptotic_positive(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const auto& u = airy_u();
  double sa = 1.0, sd = 1.0;
  double prev_a = 1.0, prev_d = 1.0;
  double zp = 1.0;
  for (int k = 1; k < 40; ++k) {
    zp /= -zeta;
    const double ta = u[k] * zp;
    const double td = airy_v(k) * zp;
    if (std::abs(ta) > std::abs(prev_a) || std::abs(td) > std::abs(prev_d)) break;
    sa += ta;
    sd += td;
    prev_a = ta;
    prev_d = td;
    if (std::abs(ta) < 1e-17 && std::abs(td) < 1e-17) break;
  }
  const double ez = std::exp(-zeta);
  const double q = std::sqrt(std::sqrt(x));
  const double c = 0.5 / std::sqrt(std::numbers::pi);
  return {c * ez / q * sa, -c * q * ez * sd};
}

// x < 0, oscillatory branch.
inline AiryPair airy_asymptotic_negative(double x) {
  const double z = -x;
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const auto& u = airy_u();
  // Even and odd parts of the u and v series in 1/zeta.
  double ue = 1.0, uo = 0.0, ve = 1.0, vo = 0.0;
  double last = 1.0;
  double zp = 1.0;
  for (int k = 1; k < 40; ++k) {
    zp /= zeta;
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    const double tu = sign * u[k] * zp;
    const double tv = sign * airy_v(k) * zp;
    const double mag = std::max(std::abs(tu), std::abs(tv));
    if (mag > last) break;
    if (k % 2 == 0) {
      ue += tu;
      ve += tv;
    } else {
      uo += tu;
      vo += tv;
    }
    last = mag;
    if (mag < 1e-17) break;
  }
  const double phase = zeta + 0.25 * std::numbers::pi;
  const double s = std::sin(phase), c = std::cos(phase);
  const double q = std::sqrt(std::sqrt(z));
  const double rpi = 1.0 / std::sqrt(std::numbers::pi);
  return {rpi / q * (s * ue - c * uo), -rpi * q * (c * ve + s * vo)};
}

struct AnchorTable {
  // anchors at x_k = -8 + k/4, k = 0..64
  static constexpr int kCount = 65;
  std::array<double, kCount> ai{};
  std::array<double, kCount> dai{};

  static double node(int k) { return -kAsymptoticLimit + kAnchorStep * k; }

  AnchorTable() {
    const int zero = kCount / 2;  // node(zero) == 0
    ai[zero] = kAi0;
    dai[zero] = kAiPrime0;
    for (int k = zero - 1; k >= 0; --k) {
      const auto p = airy_taylor(node(k + 1), ai[k + 1], dai[k + 1], -kAnchorStep);
      ai[k] = p.ai;
      dai[k] = p.ai_prime;
    }
    const int last = kCount - 1;
    const auto start = airy_asymptotic_positive(node(last));
    ai[last] = start.ai;
    dai[last] = start.ai_prime;
    for (int k = last - 1; k > zero; --k) {
      const auto p = airy_taylor(node(k + 1), ai[k + 1], dai[k + 1], -kAnchorStep);
      ai[k] = p.ai;
      dai[k] = p.ai_prime;
    }
  }
};

inline const AnchorTable& anchors() {
  static const AnchorTable table;
  return table;
}

inline AiryPair airy_anchored(double x) {
  const auto& tab = anchors();
  int k = static_cast<int>(std::lround((x + kAsymptoticLimit) / kAnchorStep));
  k = std::max(0, std::min(AnchorTable::kCount - 1, k));
  return airy_taylor(AnchorTable::node(k), tab.ai[k], tab.dai[k], x - AnchorTable::node(k));
}

}  // namespace detail

/// Ai(x) and Ai'(x) together; cheaper than two separate calls.
inline AiryPair airy(double x) {
  if (!std::isfinite(x)) throw std::domain_error("airy: non-finite argument");
  const double ax = std::abs(x);
  if (ax <= detail::kSeriesLimit) return detail::airy_maclaurin(x);
  if (ax <= detail::kAsymptoticLimit) return detail::airy_anchored(x);
  return x > 0 ? detail::airy_asymptotic_positive(x) : detail::airy_asymptotic_negative(x);
}

inline double airy_ai(double x) { return airy(x).ai; }
inline double airy_ai_prime(double x) { return airy(x).ai_prime; }

/// Negative zeros of Ai, R_1 > R_2 > ..., with Ai'(R_n) cached alongside.
class AiryRootTable {
 public:
  AiryRootTable() = default;

  explicit AiryRootTable(int n_max) {
    if (n_max < 1) throw std::invalid_argument("airy_roots: n_max must be >= 1");
    roots_.reserve(n_max);
    derivs_.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) {
      const double r = refine(seed(n));
      roots_.push_back(r);
      derivs_.push_back(airy_ai_prime(r));
    }
  }

  /// Asymptotic estimate -[3 pi (4n - 1)/8]^(2/3).
  static double seed(int n) {
    const double t = 3.0 * std::numbers::pi * (4.0 * n - 1.0) / 8.0;
    return -std::pow(t, 2.0 / 3.0);
  }

  int size() const { return static_cast<int>(roots_.size()); }
  /// 1-based, R_1 = -2.338...
  double root(int n) const { return roots_.at(n - 1); }
  double ai_prime_at_root(int n) const { return derivs_.at(n - 1); }
  std::span<const double> roots() const { return roots_; }
  std::span<const double> ai_primes() const { return derivs_; }

 private:
  // Newton on Ai; steps are clipped to a quarter of the local zero spacing
  // so the iteration cannot hop to a neighbouring zero.
  static double refine(double x) {
    const double spacing = std::numbers::pi / std::sqrt(std::abs(x));
    for (int iter = 0; iter < 50; ++iter) {
      const auto p = airy(x);
      double step = p.ai / p.ai_prime;
      const double limit = 0.25 * spacing;
      if (std::abs(step) > limit) step = std::copysign(limit, step);
      x -= step;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) break;
    }
    return x;
  }

  std::vector<double> roots_;
  std::vector<double> derivs_;
};

inline AiryRootTable airy_roots(int n_max) { return AiryRootTable(n_max); }

// ---------------------------------------------------------------------------
// erf, Dawson, erfi

inline double erf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("erf: non-finite argument");
  return std::erf(x);
}

namespace detail {

inline constexpr double kErfiSeriesLimit = 6.0;

// sum_k x^(2k+1) / (k! (2k+1)), all terms positive for x > 0
inline double erfi_series_core(double x) {
  const double x2 = x * x;
  double term = x;  // x^(2k+1)/k!
  double sum = x;
  for (int k = 1; k < 500; ++k) {
    term *= x2 / k;
    const double add = term / (2.0 * k + 1.0);
    sum += add;
    if (add < 1e-17 * sum) break;
  }
  return sum;
}

// Dawson integral for x > kErfiSeriesLimit, asymptotic series.
inline double dawson_asymptotic(double x) {
  const double y = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * (2.0 * k - 1.0) * y;
    if (next > term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / (2.0 * x);
}

// log(erfi(x)) for x > 0.
inline double log_erfi_positive(double x) {
  if (x <= kErfiSeriesLimit) return std::log(2.0 / std::sqrt(std::numbers::pi) * erfi_series_core(x));
  return x * x + std::log(2.0 * dawson_asymptotic(x) / std::sqrt(std::numbers::pi));
}

}  // namespace detail

/// Dawson integral D(x) = exp(-x^2) * integral_0^x exp(t^2) dt.
inline double dawson(double x) {
  if (!std::isfinite(x)) throw std::domain_error("dawson: non-finite argument");
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  const double d = ax <= detail::kErfiSeriesLimit
                       ? std::exp(-ax * ax) * detail::erfi_series_core(ax)
                       : detail::dawson_asymptotic(ax);
  return std::copysign(d, x);
}

/// exp(log_prefactor) * erfi(x), combined in the log domain so that the
/// product stays finite whenever it is representable.
inline double erfi_scaled(double x, double log_prefactor) {
  if (!std::isfinite(x) || !std::isfinite(log_prefactor))
    throw std::domain_error("erfi_scaled: non-finite argument");
  if (x == 0.0) return 0.0;
  const double mag = std::exp(log_prefactor + detail::log_erfi_positive(std::abs(x)));
  return std::copysign(mag, x);
}

inline double erfi(double x) { return erfi_scaled(x, 0.0); }

}  // namespace sqt
