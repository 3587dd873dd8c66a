#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "clustercast/config.hpp"

namespace clustercast {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator-(Point a, Point b) noexcept {
    return {a.x - b.x, a.y - b.y};
  }
  friend constexpr Point operator+(Point a, Point b) noexcept {
    return {a.x + b.x, a.y + b.y};
  }
  constexpr double norm2() const noexcept { return x * x + y * y; }
  double norm() const noexcept { return std::hypot(x, y); }
};

/// Which side of the SIR a link sits on. The path-loss law is zero inside
/// unit distance; desired links are clamped to 1 there instead so that
/// receivers close to their transmitter are not cut off.
enum class LinkRole { desired, interference };

inline double path_loss(double d, double alpha, LinkRole role) {
  if (!(d >= 0.0)) throw std::domain_error("path_loss: distance must be >= 0");
  if (d < 1.0) return role == LinkRole::desired ? 1.0 : 0.0;
  return std::pow(d, -alpha);
}

/// Path loss from a squared distance; skips the sqrt on the hot path.
inline double path_loss_sq(double d2, double alpha, LinkRole role) noexcept {
  if (d2 < 1.0) return role == LinkRole::desired ? 1.0 : 0.0;
  return std::pow(d2, -0.5 * alpha);
}

/// Fading power gain H ~ Gamma(m, 1/m): unit mean, variance 1/m.
template <class Rng>
double sample_fading_power(int m, Rng& rng) {
  if (m < 1) throw std::domain_error("sample_fading_power: m must be >= 1");
  // Sum of m unit exponentials, scaled; exact for integer shape. One log of
  // the product instead of m logs.
  double acc = 0.0, prod = 1.0;
  for (int i = 0; i < m; ++i) {
    prod *= rng.uniform_pos();
    if ((i & 63) == 63) {  // flush before the product can underflow
      acc -= std::log(prod);
      prod = 1.0;
    }
  }
  return (acc - std::log(prod)) / m;
}

template <class Rng>
std::size_t sample_poisson(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<long long> dist(mean);
  return static_cast<std::size_t>(dist(rng));
}

/// Uniform point in a disk, by rejection from the bounding square (no trig on
/// the hot path).
template <class Rng>
Point sample_in_disk(Point center, double radius, Rng& rng) {
  for (;;) {
    const double x = 2.0 * rng.uniform() - 1.0;
    const double y = 2.0 * rng.uniform() - 1.0;
    if (x * x + y * y < 1.0) return {center.x + radius * x, center.y + radius * y};
  }
}

/// Homogeneous PPP of the given intensity on a disk.
template <class Rng>
std::vector<Point> sample_ppp_disk(double intensity, Point center,
                                   double radius, Rng& rng) {
  const double mean = intensity * std::numbers::pi * radius * radius;
  std::vector<Point> pts(sample_poisson(mean, rng));
  for (auto& p : pts) p = sample_in_disk(center, radius, rng);
  return pts;
}

/// One sampled network seen from the typical transmitter at the origin.
struct NetworkRealization {
  std::vector<Point> receivers;
  std::vector<Point> interferers;
  Point typical_tx{};
};

template <class Rng>
NetworkRealization sample_network(const NetworkConfig& cfg, Rng& rng) {
  require_valid(cfg);
  NetworkRealization net;
  net.receivers = sample_ppp_disk(cfg.lambda_r, {}, cfg.s, rng);
  net.interferers =
      sample_ppp_disk(cfg.lambda_t, {}, window_radius_for(cfg), rng);
  return net;
}

inline double aggregate_interference(Point at, std::span<const Point> interferers,
                                     std::span<const double> fading,
                                     double alpha) {
  if (fading.size() != interferers.size())
    throw std::invalid_argument("aggregate_interference: fading/interferer size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < interferers.size(); ++i)
    sum += fading[i] *
           path_loss_sq((interferers[i] - at).norm2(), alpha, LinkRole::interference);
  return sum;
}

/// SIR at `receiver` for a transmitter at `tx`. Returns +inf when no
/// interferer contributes (empty field, or all within unit distance).
inline double sir_at(Point receiver, Point tx, std::span<const Point> interferers,
                     double fading_signal, std::span<const double> fading_interf,
                     double alpha) {
  const double interference =
      aggregate_interference(receiver, interferers, fading_interf, alpha);
  if (interference == 0.0) return std::numeric_limits<double>::infinity();
  const double signal =
      fading_signal * path_loss_sq((receiver - tx).norm2(), alpha, LinkRole::desired);
  return signal / interference;
}

inline double sir_at(Point receiver, std::span<const Point> interferers,
                     double fading_signal, std::span<const double> fading_interf,
                     double alpha) {
  return sir_at(receiver, Point{}, interferers, fading_signal, fading_interf, alpha);
}

/// One equal-area piece of the cluster disk: either the central disk or an
/// annular sector.
struct Region {
  double r_inner = 0.0;
  double r_outer = 0.0;
  double theta_begin = 0.0;
  double theta_end = 2.0 * std::numbers::pi;

  double area() const noexcept {
    return 0.5 * (theta_end - theta_begin) * (r_outer * r_outer - r_inner * r_inner);
  }

  bool contains(Point p) const noexcept {
    const double r2 = p.norm2();
    if (r2 > r_outer * r_outer) return false;
    if (r_inner == 0.0) return true;
    if (r2 <= r_inner * r_inner) return false;
    double th = std::atan2(p.y, p.x);
    if (th < 0.0) th += 2.0 * std::numbers::pi;
    return th >= theta_begin && th < theta_end;
  }
};

/// Cluster disk split into `v` regions of area pi*s^2/v: region 0 is the
/// central disk holding the transmitter, regions 1..v-1 are equal-angle
/// sectors of the surrounding annulus. The packet visits them in index order.
struct Tessellation {
  int v = 1;
  double s = 0.0;
  std::vector<Region> regions;
  std::vector<int> path_order;

  double core_radius() const noexcept { return regions.front().r_outer; }

  /// Index of the region holding `p`, or -1 outside the cluster disk.
  int region_of(Point p) const noexcept {
    const double r2 = p.norm2();
    if (r2 > s * s) return -1;
    const double rc = core_radius();
    if (v == 1 || r2 <= rc * rc) return 0;
    double th = std::atan2(p.y, p.x);
    if (th < 0.0) th += 2.0 * std::numbers::pi;
    const int sectors = v - 1;
    int j = static_cast<int>(th / (2.0 * std::numbers::pi / sectors));
    if (j >= sectors) j = sectors - 1;
    return 1 + j;
  }
};

inline Tessellation tessellate(double s, int v) {
  if (v < 1) throw std::domain_error("tessellate: v must be >= 1");
  if (!(s > 0.0)) throw std::domain_error("tessellate: s must be positive");
  Tessellation t;
  t.v = v;
  t.s = s;
  const double rc = s / std::sqrt(static_cast<double>(v));
  t.regions.push_back({0.0, v == 1 ? s : rc, 0.0, 2.0 * std::numbers::pi});
  const int sectors = v - 1;
  const double width = sectors > 0 ? 2.0 * std::numbers::pi / sectors : 0.0;
  for (int j = 0; j < sectors; ++j) {
    const double end = j + 1 == sectors ? 2.0 * std::numbers::pi : (j + 1) * width;
    t.regions.push_back({rc, s, j * width, end});
  }
  for (int i = 0; i < v; ++i) t.path_order.push_back(i);
  return t;
}

}  // namespace clustercast
