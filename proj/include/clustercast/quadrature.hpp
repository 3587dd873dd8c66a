#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "clustercast/errors.hpp"

namespace clustercast {

/// How higher derivatives of the shot-noise Laplace transform are taken.
enum class DerivativePolicy {
  /// Exact for m <= 2, Richardson-extrapolated differences for m >= 3.
  richardson,
  /// Every order from closed-form derivative integrals.
  analytic,
};

struct QuadratureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  DerivativePolicy derivative_policy = DerivativePolicy::analytic;
};

inline std::vector<FieldError> check(const QuadratureSpec& q) {
  std::vector<FieldError> errs;
  if (!(q.rel_tol > 0.0)) errs.push_back({"rel_tol", "rel_tol must be positive"});
  if (!(q.abs_tol > 0.0)) errs.push_back({"abs_tol", "abs_tol must be positive"});
  if (q.max_subdivisions < 64)
    errs.push_back({"max_subdivisions", "max_subdivisions must be at least 64"});
  return errs;
}

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const noexcept { return error < o.error; }
};

template <class F>
Segment gk15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double value = resk * half;
  const double err = std::abs((resk - resg) * half);
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 15 on a finite interval. The interval with
/// the largest error estimate is bisected until the summed error meets
/// max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureSpec& q) {
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, q);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int intervals = 1;
  const double eps = 50.0 * std::numeric_limits<double>::epsilon();
  while (error > std::max(q.abs_tol, q.rel_tol * std::abs(total))) {
    if (intervals >= q.max_subdivisions) {
      throw QuadratureError("integrate: subdivision limit reached on [" +
                            std::to_string(a) + ", " + std::to_string(b) +
                            "], error estimate " + std::to_string(error));
    }
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.b - worst.a <= eps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      // Interval cannot be split further; accept what we have.
      break;
    }
    heap.pop();
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed the drift of the running update.
  double sum = 0.0, err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, intervals};
}

/// Integral of f over [a, inf) for integrands that decay like t^(-p), p > 1.
///
/// Substitutes t = a * w^(-1/(p-1)), mapping the tail onto w in (0, 1] with
/// an integrand that stays bounded as w -> 0. p = 2 is the plain u = 1/t map.
template <class F>
QuadratureResult integrate_tail(const F& f, double a, double p, const QuadratureSpec& q) {
  if (!(a > 0.0)) throw std::domain_error("integrate_tail: split point must be positive");
  if (!(p > 1.0)) throw std::domain_error("integrate_tail: decay exponent must exceed 1");
  const double inv = 1.0 / (p - 1.0);
  auto g = [&](double w) {
    if (w <= 0.0) return 0.0;
    const double t = a * std::pow(w, -inv);
    const double ft = f(t);
    if (ft == 0.0) return 0.0;
    return ft * t * inv / w;
  };
  return integrate(g, 0.0, 1.0, q);
}

}  // namespace clustercast
