#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clustercast/config.hpp"
#include "clustercast/errors.hpp"
#include "clustercast/quadrature.hpp"

namespace clustercast::analytic {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double rising(int m, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= m + i;
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Integral of g over [lo, hi] in the variable y = log t; hi may be +inf, in
// which case g must decay like t^(-p) and the tail is mapped onto (0, 1].
template <class G>
double integrate_positive_axis(const G& g, double lo, double hi, double p,
                               const QuadratureSpec& q) {
  if (!(hi > lo)) return 0.0;
  auto in_log = [&](double y) {
    const double t = std::exp(y);
    return g(t) * t;
  };
  if (std::isinf(hi)) {
    const double split = std::max(lo, 1.0);
    double head = 0.0;
    if (split > lo) head = integrate(in_log, std::log(lo), std::log(split), q).value;
    return head + integrate_tail(g, split, p, q).value;
  }
  return integrate(in_log, std::log(lo), std::log(hi), q).value;
}

}  // namespace detail

/// Shot-noise kernel 2 * int_inner^outer x [1 - (1 + phi x^-alpha / m)^-m] dx
/// for Nakagami-m marks, written in t = m x^alpha / phi. `inner` may be any
/// value in [0, outer]; `outer` may be +inf.
inline double delta1_span(double phi, double inner, double outer, int m, double alpha,
                          const QuadratureSpec& q = {}) {
  if (!(phi > 0.0)) throw std::domain_error("delta1: phi must be positive");
  if (m < 1) throw std::domain_error("delta1: m must be >= 1");
  if (!(alpha > 2.0)) throw std::domain_error("delta1: alpha must exceed 2");
  if (!(inner >= 0.0) || !(outer >= inner))
    throw std::domain_error("delta1: need 0 <= inner <= outer");
  if (outer == inner) return 0.0;
  const double a = 2.0 / alpha;
  const double pref = a * std::pow(phi / m, a);
  const double t_lo = m * std::pow(inner, alpha) / phi;
  const double t_hi = std::isinf(outer) ? kInf : m * std::pow(outer, alpha) / phi;

  // t^(a-1) * (1 - (t/(1+t))^m), computed without cancellation at large t.
  auto g = [a, m](double t) {
    return std::pow(t, a - 1.0) * -std::expm1(m * std::log1p(-1.0 / (1.0 + t)));
  };

  double integral = 0.0;
  double lo = t_lo;
  if (lo == 0.0) {
    // Near t = 0 the integrand is t^(a-1) minus a regular remainder.
    const double c = std::min(1.0, t_hi);
    auto rem = [a, m](double t) {
      return std::pow(t, a - 1.0 + m) / std::pow(1.0 + t, m);
    };
    integral += std::pow(c, a) / a - integrate(rem, 0.0, c, q).value;
    lo = c;
  }
  integral += detail::integrate_positive_axis(g, lo, t_hi, 2.0 - a, q);
  return pref * integral;
}

/// Delta_1(phi, r): the exponent of the Laplace functional of Poisson shot
/// noise with Nakagami-m marks over the disk of radius r (r >= 1 or +inf).
inline double delta1(double phi, double r, int m, double alpha, const QuadratureSpec& q = {}) {
  if (!(r >= 1.0)) throw std::domain_error("delta1: r must be >= 1");
  return delta1_span(phi, 1.0, r, m, alpha, q);
}

/// n-th derivative in phi of Delta_1(phi, inf), n >= 1.
inline double delta1_derivative(int n, double phi, int m, double alpha,
                                const QuadratureSpec& q = {}) {
  if (n == 0) return delta1(phi, kInf, m, alpha, q);
  if (n < 0) throw std::domain_error("delta1_derivative: negative order");
  if (!(phi > 0.0)) throw std::domain_error("delta1_derivative: phi must be positive");
  const double a = 2.0 / alpha;
  auto g = [a, m, n](double t) {
    return std::pow(t, a - 1.0 - n) * std::exp((m + n) * -std::log1p(1.0 / t));
  };
  const double integral =
      detail::integrate_positive_axis(g, m / phi, kInf, n + 1.0 - a, q);
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  return sign * detail::rising(m, n) * std::pow(phi, -n) * a * std::pow(phi / m, a) *
         integral;
}

/// Delta_2(phi, r): exponent of the moment generating functional,
/// M_I(phi) = exp(pi * Delta_2 * lambda). The MGF of a Gamma(m, 1/m) mark
/// exists only below m, so the kernel is +inf for phi >= m.
inline double delta2(double phi, double r, int m, double alpha, const QuadratureSpec& q = {}) {
  if (!(r >= 1.0) || std::isinf(r)) throw std::domain_error("delta2: r must be finite and >= 1");
  if (!(phi > 0.0) || !(phi < m * std::pow(r, alpha)))
    throw std::domain_error("delta2: phi must lie in (0, m r^alpha)");
  if (r == 1.0) return 0.0;
  if (phi >= m) return kInf;
  const double a = 2.0 / alpha;
  // t^(a-1) * ((t/(t-1))^m - 1) on t > 1.
  auto g = [a, m](double t) {
    return std::pow(t, a - 1.0) * std::expm1(-m * std::log1p(-1.0 / t));
  };
  const double lo = m / phi;
  const double hi = m * std::pow(r, alpha) / phi;
  return a * std::pow(phi / m, a) * detail::integrate_positive_axis(g, lo, hi, 2.0 - a, q);
}

/// Laplace transform E[exp(-phi I)] of the aggregate shot noise from
/// independent PPPs of total intensity `lambda_sum` over the disk of radius r.
inline double laplace_interference(double phi, double lambda_sum, double r, int m,
                                   double alpha, const QuadratureSpec& q = {}) {
  if (!(phi >= 0.0)) throw std::domain_error("laplace_interference: phi must be >= 0");
  if (phi == 0.0 || lambda_sum == 0.0) return 1.0;
  return std::exp(-std::numbers::pi * delta1(phi, r, m, alpha, q) * lambda_sum);
}

/// E[exp(phi I)] for the same shot noise; +inf where it diverges.
inline double moment_generating(double phi, double lambda_sum, double r, int m,
                                double alpha, const QuadratureSpec& q = {}) {
  if (lambda_sum == 0.0) return 1.0;
  return std::exp(std::numbers::pi * delta2(phi, r, m, alpha, q) * lambda_sum);
}

namespace detail {

// Complete Bell polynomials B_0..B_n of the derivatives h', h'', ... of the
// exponent h, so that (e^h)^(j) = e^h * B_j.
inline std::vector<double> bell_from_derivatives(const std::vector<double>& dh) {
  const std::size_t n = dh.size();
  std::vector<double> B(n + 1, 0.0);
  B[0] = 1.0;
  for (std::size_t j = 1; j <= n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < j; ++i)
      acc += binomial(static_cast<int>(j - 1), static_cast<int>(i)) * dh[i] * B[j - 1 - i];
    B[j] = acc;
  }
  return B;
}

// Psi^(n) split as (L, S) with Psi = L * (1 + S), where S collects the
// j >= 1 terms of sum_j (-phi)^j / j! * B_j. Keeping S separate lets callers
// form 1 - Psi without cancellation.
struct PsiParts {
  double laplace;
  double exponent;  // log L
  double tail;      // S
};

inline PsiParts psi_parts(int order, double phi, double lambda_t,
                          const std::vector<double>& delta_derivs) {
  const double c = -std::numbers::pi * lambda_t;
  std::vector<double> dh(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) dh[i] = c * delta_derivs[i + 1];
  const auto B = bell_from_derivatives(dh);
  double tail = 0.0;
  double pw = 1.0;
  for (int j = 1; j <= order; ++j) {
    pw *= -phi / j;
    tail += pw * B[j];
  }
  const double exponent = c * delta_derivs[0];
  return {std::exp(exponent), exponent, tail};
}

// Central n-th difference of f at x with step h.
template <class F>
double central_difference(const F& f, int n, double x, double h) {
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binomial(n, i) * f(x + (0.5 * n - i) * h);
  }
  return acc / std::pow(h, n);
}

}  // namespace detail

/// n-th derivative of f at x: central differences at h, h/2, h/4 combined by
/// two rounds of Richardson extrapolation.
template <class F>
double richardson_derivative(const F& f, int n, double x, double h) {
  if (n == 0) return f(x);
  const double d0 = detail::central_difference(f, n, x, h);
  const double d1 = detail::central_difference(f, n, x, h / 2);
  const double d2 = detail::central_difference(f, n, x, h / 4);
  const double r0 = (4.0 * d1 - d0) / 3.0;
  const double r1 = (4.0 * d2 - d1) / 3.0;
  return (16.0 * r1 - r0) / 15.0;
}

/// Psi^(order)(phi) = (-1)^n phi^(n+1) / n! * d^n/dphi^n [L(phi) / phi], with
/// L(phi) = exp(-pi lambda_t Delta_1(phi, inf)) the Laplace transform of the
/// interference. For order = m - 1 evaluated at m*beta*r^alpha this is the
/// per-attempt success probability under Nakagami-m fading.
inline double psi_derivative(int order, double phi, double lambda_t, int m, double alpha,
                             const QuadratureSpec& q = {}) {
  if (order < 0) throw std::domain_error("psi_derivative: order must be >= 0");
  if (!(phi > 0.0)) throw std::domain_error("psi_derivative: phi must be positive");
  if (lambda_t == 0.0) return 1.0;
  if (order == 0) return std::exp(-std::numbers::pi * lambda_t * delta1(phi, kInf, m, alpha, q));

  if (q.derivative_policy == DerivativePolicy::richardson && order >= 2) {
    QuadratureSpec tight = q;
    tight.rel_tol = std::min(q.rel_tol, 1e-14);
    tight.abs_tol = std::min(q.abs_tol, 1e-300);
    auto g = [&](double x) {
      return std::exp(-std::numbers::pi * lambda_t * delta1(x, kInf, m, alpha, tight)) / x;
    };
    const double deriv = richardson_derivative(g, order, phi, phi * 1e-3);
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(phi, order + 1) / detail::factorial(order) * deriv;
  }

  std::vector<double> derivs(static_cast<std::size_t>(order) + 1);
  for (int i = 0; i <= order; ++i) derivs[i] = delta1_derivative(i, phi, m, alpha, q);
  const auto parts = detail::psi_parts(order, phi, lambda_t, derivs);
  return parts.laplace * (1.0 + parts.tail);
}

/// Bounds on the multicast rate, in bit/s/Hz.
struct RateBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Immutable evaluator of every analytic quantity for one configuration.
/// Delta_1 and its phi-derivatives at phi = m*beta*r^alpha do not depend on
/// lambda_t, so they are memoised per radius; the memo is mutex-guarded and
/// the kernel may be shared between threads.
class AnalyticKernel {
 public:
  explicit AnalyticKernel(NetworkConfig cfg, QuadratureSpec quad = {})
      : cfg_(std::move(cfg)), quad_(quad) {
    require_valid(cfg_);
    auto errs = check(quad_);
    if (!errs.empty()) throw ValidationError(std::move(errs));
  }

  const NetworkConfig& config() const noexcept { return cfg_; }
  const QuadratureSpec& quadrature() const noexcept { return quad_; }

  /// SIR argument at which the success probability is evaluated.
  double phi_at(double r) const { return cfg_.m * cfg_.beta * std::pow(r, cfg_.alpha); }

  /// Probability that a receiver at distance r fails a single attempt.
  /// Distances below 1 take the value at 1 (desired-link clamp).
  double failure_probability(double r, double lambda_t) const {
    if (lambda_t == 0.0) return 0.0;
    const double rr = std::max(r, 1.0);
    const double phi = phi_at(rr);
    const int order = cfg_.m - 1;
    if (order >= 2 && quad_.derivative_policy == DerivativePolicy::richardson) {
      return 1.0 - psi_derivative(order, phi, lambda_t, cfg_.m, cfg_.alpha, quad_);
    }
    const auto& derivs = kernel_derivatives(rr);
    const auto parts = detail::psi_parts(order, phi, lambda_t, derivs);
    // 1 - L (1 + S) = -expm1(log L) - L S
    return -std::expm1(parts.exponent) - parts.laplace * parts.tail;
  }

  /// Connected-receiver intensity at distance r after tau attempts,
  /// via the Nakagami-m success probability Psi^(m-1)(m beta r^alpha).
  double lambda_c(double r, int tau, double lambda_t) const {
    check_radius(r);
    check_tau(tau);
    const double fail = failure_probability(r, lambda_t);
    return cfg_.lambda_r * -std::expm1(tau * std::log(fail));
  }

  /// Rayleigh closed form lambda_r (1 - (1 - exp(-pi Delta_1(beta r^alpha) lambda_t))^tau).
  double lambda_c_rayleigh(double r, int tau, double lambda_t) const {
    check_radius(r);
    check_tau(tau);
    if (lambda_t == 0.0) return cfg_.lambda_r;
    const double d = delta1(cfg_.beta * std::pow(r, cfg_.alpha), kInf, 1, cfg_.alpha, quad_);
    const double fail = -std::expm1(-std::numbers::pi * d * lambda_t);
    return cfg_.lambda_r * (1.0 - std::pow(fail, tau));
  }

  /// E_R[g(R)] for R with density 2r/s^2 on [0, s]; g is read at max(R, 1).
  template <class G>
  double radial_mean(const G& g) const {
    const double s = cfg_.s;
    auto w = [&](double r) { return g(r) * 2.0 * r / (s * s); };
    return g(1.0) / (s * s) + integrate(w, 1.0, s, quad_).value;
  }

  /// E_R[lambda_c(R, tau)] by direct quadrature.
  double mean_lambda_c(int tau, double lambda_t) const {
    check_tau(tau);
    return cfg_.lambda_r * (1.0 - mean_failure_power(tau, lambda_t));
  }

  /// Jensen/Hoelder upper bound lambda_r (1 - (E_R[failure])^tau).
  double mean_lambda_c_upper(int tau, double lambda_t) const {
    check_tau(tau);
    const double mean_fail =
        radial_mean([&](double r) { return failure_probability(r, lambda_t); });
    return cfg_.lambda_r * (1.0 - std::pow(mean_fail, tau));
  }

  /// Multicast outage 1 - exp(-pi s^2 (lambda_r - E_R[lambda_c])).
  double outage_probability(double lambda_t, int tau) const {
    if (!(lambda_t >= 0.0)) throw std::domain_error("outage_probability: lambda_t must be >= 0");
    check_tau(tau);
    if (lambda_t == 0.0 || cfg_.lambda_r == 0.0) return 0.0;
    const double p = -std::expm1(-cfg_.k() * mean_failure_power(tau, lambda_t));
    return std::clamp(p, 0.0, 1.0);
  }

  double outage_probability(double lambda_t) const {
    return outage_probability(lambda_t, cfg_.tau);
  }

  /// Largest lambda_t with outage <= epsilon, by bisection on log lambda_t.
  double solve_max_intensity() const { return solve_max_intensity(cfg_.tau); }

  double solve_max_intensity(int tau) const {
    const double eps = cfg_.epsilon;
    auto excess = [&](double lt) { return outage_probability(lt, tau) - eps; };
    double hi = 1e-3;
    int guard = 0;
    while (excess(hi) <= 0.0) {
      hi *= 10.0;
      if (++guard > 12)
        throw NoSolutionError("solve_max_intensity: outage never reaches epsilon "
                              "(k too small for the target)");
    }
    double lo = hi / 10.0;
    guard = 0;
    while (excess(lo) > 0.0) {
      lo /= 10.0;
      if (++guard > 60) throw NoSolutionError("solve_max_intensity: no lower bracket");
    }
    double llo = std::log(lo), lhi = std::log(hi);
    while (lhi - llo > 1e-12) {
      const double mid = 0.5 * (llo + lhi);
      if (excess(std::exp(mid)) > 0.0) lhi = mid;
      else llo = mid;
    }
    return std::exp(0.5 * (llo + lhi));
  }

  /// Modified kernel [Delta_1(phi, inf) - Delta_1(phi, a_hat)] * prod (1 - 2/(j alpha)).
  double delta1_hat(double phi) const {
    double prod = 1.0;
    for (int j = 1; j < cfg_.m; ++j) prod *= 1.0 - 2.0 / (j * cfg_.alpha);
    return delta1_span(phi, cfg_.a_hat, kInf, cfg_.m, cfg_.alpha, quad_) * prod;
  }

  double eta() const { return 1.0 / delta1_hat(cfg_.beta); }

  /// Single-hop scaling law for the maximum contention intensity.
  double closed_form_max_intensity() const { return closed_form_max_intensity(cfg_.tau); }

  double closed_form_max_intensity(int tau) const {
    check_tau(tau);
    const double s2 = cfg_.s * cfg_.s;
    return eta() * std::pow(cfg_.epsilon * (tau + 1), 1.0 / tau) /
           (std::numbers::pi * s2 * std::pow(cfg_.beta, 2.0 / cfg_.alpha) *
            std::pow(cfg_.k(), 1.0 / tau));
  }

  /// k >= eps^-(tau-1); below it the single-hop scaling law is not claimed.
  bool single_hop_hypothesis_holds() const {
    return cfg_.k() >= std::pow(cfg_.epsilon, -(cfg_.tau - 1.0));
  }

  /// Multihop scaling law with v regions of tau/v attempts each.
  double multihop_closed_form_max_intensity() const {
    const int tau = cfg_.tau, v = cfg_.v;
    if (tau % v != 0) throw std::domain_error("multihop: v must divide tau");
    const double z = static_cast<double>(v) / tau;
    const double rho = std::pow(cfg_.epsilon * (static_cast<double>(tau) / v + 1.0), z) /
                       (static_cast<double>(tau) * tau);
    return eta() * std::pow(cfg_.k(), -z) * std::pow(v, z + 1.0) * tau * tau * rho /
           (std::numbers::pi * cfg_.s * cfg_.s * std::pow(cfg_.beta, 2.0 / cfg_.alpha));
  }

  bool multihop_hypothesis_holds() const {
    return cfg_.k() >=
           cfg_.v / std::pow(cfg_.epsilon, static_cast<double>(cfg_.tau) / cfg_.v - 1.0);
  }

  /// Lower and upper bounds on the multicast rate at the cluster edge.
  RateBounds rate_bounds(double lambda_t) const {
    if (!(lambda_t > 0.0)) throw std::domain_error("rate_bounds: lambda_t must be positive");
    const double base = std::log2(1.0 + 1.0 / (std::numbers::pi * cfg_.s * cfg_.s * lambda_t));
    const double ccdf = max_fading_ccdf(2.0 / (cfg_.alpha - 2.0));
    return {base * ccdf, base + std::log2(mean_max_fading())};
  }

  /// P[H_max > x] for H_max the largest of tau fading powers.
  double max_fading_ccdf(double x) const {
    return -std::expm1(cfg_.tau * std::log1p(-fading_ccdf(x)));
  }

  /// P[H > x] for H ~ Gamma(m, 1/m).
  double fading_ccdf(double x) const {
    if (x <= 0.0) return 1.0;
    const double mx = cfg_.m * x;
    double term = 1.0, sum = 1.0;
    for (int j = 1; j < cfg_.m; ++j) {
      term *= mx / j;
      sum += term;
    }
    return std::exp(-mx) * sum;
  }

  /// E[H_max] = int_0^inf P[H_max > x] dx.
  double mean_max_fading() const {
    auto f = [&](double x) { return max_fading_ccdf(x); };
    return integrate(f, 0.0, 1.0, quad_).value + integrate_tail(f, 1.0, 2.0, quad_).value;
  }

  /// E[log2(1 + H_max s^-alpha / I_0)] through the Laplace transform of I_0:
  /// E[ln(1 + X/I)] = int_0^inf L_I(z) (1 - L_X(z)) / z dz.
  double expected_rate(double lambda_t) const {
    if (!(lambda_t > 0.0)) throw std::domain_error("expected_rate: lambda_t must be positive");
    const double c = std::pow(cfg_.s, -cfg_.alpha);
    QuadratureSpec inner = quad_;
    inner.rel_tol = std::max(quad_.rel_tol, 1e-10);
    // 1 - E[exp(-w H_max)] = w * int_0^inf exp(-w h) P[H_max > h] dh
    auto one_minus_lx = [&](double w) {
      auto f = [&](double h) { return std::exp(-w * h) * max_fading_ccdf(h); };
      return w * (integrate(f, 0.0, 1.0, inner).value + integrate_tail(f, 1.0, 2.0, inner).value);
    };
    auto integrand = [&](double y) {
      const double z = std::exp(y);
      const double exponent =
          std::numbers::pi * lambda_t * delta1(z, kInf, cfg_.m, cfg_.alpha, inner);
      if (exponent > 745.0) return 0.0;
      return std::exp(-exponent) * one_minus_lx(c * z);
    };
    // Below y_lo the integrand is O(c z); above y_hi it is exp(-(> 60)).
    const double y_lo = std::log(1.0 / c) - 40.0;
    double y_hi = std::log(1.0 / c);
    while (std::numbers::pi * lambda_t * delta1(std::exp(y_hi), kInf, cfg_.m, cfg_.alpha, inner) < 60.0)
      y_hi += 1.0;
    return integrate(integrand, y_lo, y_hi, inner).value / std::numbers::ln2;
  }

 private:
  void check_radius(double r) const {
    if (!(r >= 1.0 && r <= cfg_.s)) throw std::domain_error("lambda_c: r must lie in [1, s]");
  }
  static void check_tau(int tau) {
    if (tau < 1) throw std::domain_error("tau must be >= 1");
  }

  double mean_failure_power(int tau, double lambda_t) const {
    if (lambda_t == 0.0) return 0.0;
    return radial_mean(
        [&](double r) { return std::pow(failure_probability(r, lambda_t), tau); });
  }

  const std::vector<double>& kernel_derivatives(double r) const {
    std::lock_guard lock(cache_mutex_);
    auto it = cache_.find(r);
    if (it != cache_.end()) return it->second;
    const double phi = phi_at(r);
    std::vector<double> d(static_cast<std::size_t>(cfg_.m));
    for (int n = 0; n < cfg_.m; ++n) d[n] = delta1_derivative(n, phi, cfg_.m, cfg_.alpha, quad_);
    return cache_.emplace(r, std::move(d)).first->second;
  }

  NetworkConfig cfg_;
  QuadratureSpec quad_;
  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::vector<double>> cache_;
};

/// Convenience wrappers over a fresh kernel.
inline double lambda_c(double r, int tau, const NetworkConfig& cfg, const QuadratureSpec& q = {}) {
  return AnalyticKernel(cfg, q).lambda_c(r, tau, cfg.lambda_t);
}

inline double mean_lambda_c_upper(int tau, const NetworkConfig& cfg, const QuadratureSpec& q = {}) {
  return AnalyticKernel(cfg, q).mean_lambda_c_upper(tau, cfg.lambda_t);
}

inline double outage_probability(double lambda_t, int tau, const NetworkConfig& cfg,
                                 const QuadratureSpec& q = {}) {
  return AnalyticKernel(cfg, q).outage_probability(lambda_t, tau);
}

inline double solve_max_intensity(const NetworkConfig& cfg, const QuadratureSpec& q = {}) {
  return AnalyticKernel(cfg, q).solve_max_intensity();
}

inline double closed_form_max_intensity(const NetworkConfig& cfg, const QuadratureSpec& q = {}) {
  return AnalyticKernel(cfg, q).closed_form_max_intensity();
}

inline double multihop_closed_form_max_intensity(const NetworkConfig& cfg,
                                                 const QuadratureSpec& q = {}) {
  return AnalyticKernel(cfg, q).multihop_closed_form_max_intensity();
}

inline RateBounds rate_bounds(double lambda_t, const NetworkConfig& cfg,
                              const QuadratureSpec& q = {}) {
  return AnalyticKernel(cfg, q).rate_bounds(lambda_t);
}

/// Multicast transmission capacity b * lambda_bar * (1 - eps) / tau.
inline double mtc(const NetworkConfig& cfg, double lambda_bar, double b) {
  if (!(lambda_bar > 0.0) || !(b > 0.0))
    throw std::domain_error("mtc: lambda_bar and b must be positive");
  return b * lambda_bar * (1.0 - cfg.epsilon) / cfg.tau;
}

namespace detail {

// log10 of rho_v * k^(-v/tau) * v^(v/tau + 1): the v-dependent part of the
// multihop capacity scaling (v = 1 gives the single-hop law).
inline double log10_capacity_scaling(int v, int tau, double k, double epsilon) {
  const double z = static_cast<double>(v) / tau;
  return z * std::log10(epsilon * (static_cast<double>(tau) / v + 1.0)) - z * std::log10(k) +
         (z + 1.0) * std::log10(static_cast<double>(v)) - 2.0 * std::log10(static_cast<double>(tau));
}

inline void check_divisor(int v, int tau) {
  if (tau < 1) throw std::domain_error("tau must be >= 1");
  if (v < 1 || v > tau) throw std::domain_error("v must lie in [1, tau]");
  if (tau % v != 0) throw std::domain_error("v must divide tau");
}

}  // namespace detail

/// Multihop-over-single-hop capacity ratio in dB, taken directly from the two
/// scaling laws. Exactly 0 at v = 1.
inline double capacity_gain(int v, int tau, double k, double epsilon) {
  detail::check_divisor(v, tau);
  if (!(k > 0.0)) throw std::domain_error("capacity_gain: k must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("capacity_gain: epsilon in (0,1)");
  return 10.0 * (detail::log10_capacity_scaling(v, tau, k, epsilon) -
                 detail::log10_capacity_scaling(1, tau, k, epsilon));
}

/// Divisors of tau in increasing order: the admissible region counts.
inline std::vector<int> divisors(int tau) {
  std::vector<int> out;
  for (int v = 1; v <= tau; ++v)
    if (tau % v == 0) out.push_back(v);
  return out;
}

/// Region count maximising capacity_gain, by exhaustive search over divisors
/// (ties go to the smaller v).
inline int optimize_tessellation(int tau, double k, double epsilon) {
  if (tau < 1) throw std::domain_error("optimize_tessellation: tau must be >= 1");
  int best = 1;
  double best_gain = 0.0;
  for (int v : divisors(tau)) {
    const double g = capacity_gain(v, tau, k, epsilon);
    if (g > best_gain) {
      best = v;
      best_gain = g;
    }
  }
  return best;
}

/// Second-order condition (1 + tau/v) sqrt((2tau - v)/(2tau + v)) of the
/// capacity-gain concavity argument; must exceed 1.
inline double convexity_certificate(int tau, int v) {
  const double t = tau, w = v;
  return (1.0 + t / w) * std::sqrt((2.0 * t - w) / (2.0 * t + w));
}

/// True when the successive differences change sign at most once, from
/// non-negative to negative.
inline bool is_unimodal(const std::vector<double>& values) {
  bool descending = false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (d < 0.0) descending = true;
    else if (d > 0.0 && descending) return false;
  }
  return true;
}

/// Factor g_a * g_s^(2/alpha) * g_v^(1 - x), x = -1/tau, applied to the
/// single-hop capacity by interference avoidance, interference suppression
/// and area shrinking.
inline double gain_adjusted_mtc(const NetworkConfig& cfg, double g_a, double g_s, double g_v) {
  if (!(g_a >= 1.0) || !(g_s >= 1.0) || !(g_v >= 1.0))
    throw std::domain_error("gain_adjusted_mtc: gains must be >= 1");
  const double x = -1.0 / cfg.tau;
  return g_a * std::pow(g_s, 2.0 / cfg.alpha) * std::pow(g_v, 1.0 - x);
}

}  // namespace clustercast::analytic
