#pragma once

// Numerical integration used by every module: adaptive Gauss-Kronrod (7/15)
// for one-off integrals and fixed composite Gauss-Legendre rules for the
// repeated integrals where a frozen node set keeps results deterministic.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "sqt/errors.hpp"

namespace sqt::quad {

template <typename T>
struct Result {
  T value;
  double error;
  int evaluations;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights at the odd Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename F>
auto kronrod15(F& f, double a, double b) {
  using T = std::decay_t<decltype(f(a))>;
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(centre);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const T sum = f(centre - dx) + f(centre + dx);
    kronrod += sum * kKronrodWeights[j];
    if (j % 2 == 1) gauss += sum * kGaussWeights[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  return Segment<T>{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_segments = 4000;
  int initial_segments = 1;
};

/// Globally adaptive Gauss-Kronrod 7/15 on [a, b]. Bisects the segment with
/// the largest error estimate until the total estimate falls below
/// max(abs_tol, rel_tol*|I|). Throws numeric_error carrying the achieved
/// estimate when max_segments is exhausted.
template <typename F>
auto integrate(F&& f, double a, double b, const AdaptiveOptions& opts = {}) {
  using T = std::decay_t<decltype(f(a))>;
  if (!(std::isfinite(a) && std::isfinite(b)))
    throw std::domain_error("quad::integrate: finite limits required");
  if (a == b) return Result<T>{T{}, 0.0, 0};

  std::priority_queue<detail::Segment<T>> heap;
  T total{};
  double total_err = 0.0;
  int evals = 0;
  const int n0 = std::max(1, opts.initial_segments);
  for (int i = 0; i < n0; ++i) {
    const double lo = a + (b - a) * i / n0;
    const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
    auto seg = detail::kronrod15(f, lo, hi);
    evals += 15;
    total += seg.value;
    total_err += seg.error;
    heap.push(seg);
  }

  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (total_err > target()) {
    if (static_cast<int>(heap.size()) >= opts.max_segments)
      throw numeric_error("quad::integrate: tolerance not reached", total_err);
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw numeric_error("quad::integrate: segment below machine resolution", total_err);
    auto left = detail::kronrod15(f, worst.a, mid);
    auto right = detail::kronrod15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running update.
  T sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return Result<T>{sum, err, evals};
}

/// Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Rule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
  }
  return rule;
}

/// Frozen node set for repeated integrals over one interval: `panels`
/// equal panels each carrying an `order`-point Gauss-Legendre rule.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <typename F>
  auto operator()(F&& f) const {
    using T = std::decay_t<decltype(f(0.0))>;
    T sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }

  std::size_t size() const { return nodes.size(); }
};

inline CompositeRule composite_gauss_legendre(double a, double b, int panels, int order = 16) {
  if (!(b > a)) throw std::invalid_argument("composite_gauss_legendre: need b > a");
  if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: panels >= 1");
  const Rule base = gauss_legendre(order);
  CompositeRule out;
  out.nodes.reserve(static_cast<std::size_t>(panels) * order);
  out.weights.reserve(out.nodes.capacity());
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double centre = a + (p + 0.5) * h;
    for (int k = 0; k < order; ++k) {
      out.nodes.push_back(centre + 0.5 * h * base.nodes[k]);
      out.weights.push_back(0.5 * h * base.weights[k]);
    }
  }
  return out;
}

}  // namespace sqt::quad
