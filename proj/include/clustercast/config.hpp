#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "clustercast/errors.hpp"

namespace clustercast {

/// Parameters of the clustered multicast network.
///
/// Transmitters form a PPP of intensity `lambda_t`; each one multicasts to the
/// receivers of its own cluster, a PPP of intensity `lambda_r` on a disk of
/// radius `s`. A receiver decodes when its SIR reaches `beta`. Fading power is
/// Gamma(m, 1/m) (Nakagami-m amplitude). A packet has `tau` attempts; the
/// multihop scheme splits the cluster into `v` regions with `tau / v`
/// attempts each.
struct NetworkConfig {
  double lambda_t = 0.0;
  double lambda_r = 0.1;
  double s = 5.0;
  double alpha = 4.0;
  double beta = 1.0;
  int m = 1;
  double epsilon = 0.1;
  int tau = 1;
  int v = 1;
  /// Interferer window for simulation; unset means the automatic default.
  std::optional<double> window_radius;
  /// Inner cutoff used by the modified shot-noise kernel, in [0, 1].
  double a_hat = 1.0;

  /// Mean number of intended receivers per cluster.
  double k() const noexcept { return std::numbers::pi * s * s * lambda_r; }

  int attempts_per_region() const noexcept { return tau / v; }
};

/// Window radius that keeps the mean truncated interference tail
/// 2*pi*lambda_t*R^(2-alpha)/(alpha-2) below 1e-4, and never below 10*s.
inline double default_window_radius(double lambda_t, double s, double alpha) {
  const double floor = 10.0 * s;
  if (lambda_t <= 0.0) return floor;
  const double tail_radius =
      std::pow(2.0 * std::numbers::pi * lambda_t / ((alpha - 2.0) * 1e-4),
               1.0 / (alpha - 2.0));
  return std::max(floor, tail_radius);
}

inline double window_radius_for(const NetworkConfig& cfg, double lambda_t) {
  if (cfg.window_radius) return *cfg.window_radius;
  return default_window_radius(lambda_t, cfg.s, cfg.alpha);
}

inline double window_radius_for(const NetworkConfig& cfg) {
  return window_radius_for(cfg, cfg.lambda_t);
}

/// Every constraint violation in `cfg`; empty when valid.
inline std::vector<FieldError> check(const NetworkConfig& cfg) {
  std::vector<FieldError> errs;
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(cfg.lambda_t) || cfg.lambda_t < 0.0)
    errs.push_back({"lambda_t", "lambda_t must be a finite value >= 0"});
  if (!finite(cfg.lambda_r) || cfg.lambda_r < 0.0)
    errs.push_back({"lambda_r", "lambda_r must be a finite value >= 0"});
  if (!finite(cfg.s) || !(cfg.s > 1.0))
    errs.push_back({"s", "s must exceed 1"});
  if (!finite(cfg.alpha) || !(cfg.alpha > 2.0))
    errs.push_back({"alpha", "alpha must exceed 2"});
  if (!finite(cfg.beta) || !(cfg.beta > 0.0))
    errs.push_back({"beta", "beta must be positive"});
  if (cfg.m < 1) errs.push_back({"m", "m must be a positive integer"});
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
    errs.push_back({"epsilon", "epsilon must lie in (0, 1)"});
  if (cfg.tau < 1) errs.push_back({"tau", "tau must be a positive integer"});
  if (cfg.v < 1) {
    errs.push_back({"v", "v must be a positive integer"});
  } else if (cfg.tau >= 1) {
    if (cfg.v > cfg.tau) errs.push_back({"v", "v must not exceed tau"});
    else if (cfg.tau % cfg.v != 0) errs.push_back({"v", "v must divide tau"});
  }
  if (cfg.window_radius &&
      (!finite(*cfg.window_radius) || !(*cfg.window_radius > cfg.s)))
    errs.push_back({"window_radius", "window_radius must exceed s"});
  if (!(cfg.a_hat >= 0.0 && cfg.a_hat <= 1.0))
    errs.push_back({"a_hat", "a_hat must lie in [0, 1]"});
  return errs;
}

inline void require_valid(const NetworkConfig& cfg) {
  auto errs = check(cfg);
  if (!errs.empty()) throw ValidationError(std::move(errs));
}

}  // namespace clustercast
