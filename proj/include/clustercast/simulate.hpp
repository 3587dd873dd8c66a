#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "clustercast/config.hpp"
#include "clustercast/errors.hpp"
#include "clustercast/model.hpp"
#include "clustercast/rng.hpp"

namespace clustercast::sim {

/// Frequency estimate of an outage-type event.
struct OutageEstimate {
  double p_hat = 0.0;
  std::size_t trials = 0;
  double std_err = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline OutageEstimate make_estimate(std::size_t events, std::size_t trials) {
  if (trials == 0) throw std::domain_error("estimate: trials must be positive");
  OutageEstimate e;
  e.trials = trials;
  e.p_hat = static_cast<double>(events) / static_cast<double>(trials);
  e.std_err = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(trials));
  e.ci_low = std::max(0.0, e.p_hat - 1.96 * e.std_err);
  e.ci_high = std::min(1.0, e.p_hat + 1.96 * e.std_err);
  return e;
}

struct TrialPlan {
  std::uint64_t master_seed = 1;
  std::size_t trials = 1000;
  /// Fresh interferer positions on every attempt (independent slots). When
  /// false, positions are drawn once per trial and only fading is redrawn.
  bool resample_interferers_per_slot = true;
  /// By default every receiver draws its own interferer field on each
  /// attempt, so receivers fail independently given their positions (the
  /// thinning assumption behind the analytic outage). When true all
  /// receivers of a cluster hear one common field, which correlates their
  /// failures and lowers the outage.
  bool shared_interference = false;
  unsigned worker_count = 1;
  /// Upper limit on x4 trial escalations inside the max-intensity search.
  int max_escalations = 2;
};

/// Sample mean with its standard error.
struct MeanEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t trials = 0;
};

namespace detail {

// Runs f(i) for every i in [begin, end) on `workers` threads, each taking a
// contiguous block. The first exception thrown by any worker is rethrown.
template <class F>
void for_each_trial(std::size_t begin, std::size_t end, unsigned workers, const F& f) {
  const std::size_t n = end - begin;
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    for (std::size_t i = begin; i < end; ++i) f(i);
    return;
  }
  const std::size_t w = std::min<std::size_t>(workers, n);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t lo = begin + n * t / w;
    const std::size_t hi = begin + n * (t + 1) / w;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Counts trials in [begin, end) for which `event(i)` holds.
template <class F>
std::size_t count_events(std::size_t begin, std::size_t end, unsigned workers, const F& event) {
  std::vector<unsigned char> hit(end - begin, 0);
  for_each_trial(begin, end, workers, [&](std::size_t i) { hit[i - begin] = event(i) ? 1 : 0; });
  std::size_t n = 0;
  for (auto h : hit) n += h;
  return n;
}

// Mean and standard error of per-trial values, summed in trial order so the
// result does not depend on the worker count.
template <class F>
MeanEstimate mean_of(std::size_t trials, unsigned workers, const F& value) {
  if (trials == 0) throw std::domain_error("estimate: trials must be positive");
  std::vector<double> x(trials);
  for_each_trial(0, trials, workers, [&](std::size_t i) { x[i] = value(i); });
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(trials);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double var = trials > 1 ? ss / static_cast<double>(trials - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(trials)), trials};
}

// ell(sqrt(d2)) for interference links, with cheap paths for common alpha.
class InterferenceLoss {
 public:
  explicit InterferenceLoss(double alpha) : half_alpha_(0.5 * alpha) {
    if (alpha == 4.0) mode_ = 4;
    else if (alpha == 3.0) mode_ = 3;
  }
  double operator()(double d2) const noexcept {
    if (d2 < 1.0) return 0.0;
    switch (mode_) {
      case 4: return 1.0 / (d2 * d2);
      case 3: return 1.0 / (d2 * std::sqrt(d2));
      default: return std::exp(-half_alpha_ * std::log(d2));
    }
  }

 private:
  double half_alpha_;
  int mode_ = 0;
};

// Slot numbering inside a trial's counter space.
inline constexpr std::uint64_t kSlotReceivers = 0;
inline constexpr std::uint64_t kSlotFixedField = 1;
inline constexpr std::uint64_t kSlotAttempt0 = 2;

// One cluster seen through its attempts: receivers, which of them hold the
// packet, and the interferer field of the current attempt.
class ClusterRun {
 public:
  ClusterRun(const NetworkConfig& cfg, const TrialPlan& plan, std::size_t trial,
             std::vector<Point> receivers)
      : cfg_(cfg),
        plan_(plan),
        trial_(trial),
        loss_(cfg.alpha),
        radius_(window_radius_for(cfg)),
        receivers_(std::move(receivers)),
        connected_(receivers_.size(), 0) {}

  const std::vector<Point>& receivers() const noexcept { return receivers_; }
  const std::vector<unsigned char>& connected() const noexcept { return connected_; }

  /// One attempt from `tx` to every receiver for which `wanted(j)` holds and
  /// that does not hold the packet yet. Attempts are numbered globally within
  /// the trial so every attempt has its own random substream.
  template <class Wanted>
  void attempt(Point tx, int attempt_index, const Wanted& wanted) {
    bool any = false;
    for (std::size_t j = 0; j < receivers_.size(); ++j)
      if (!connected_[j] && wanted(j)) any = true;
    if (!any) return;

    auto rng = substream(plan_.master_seed, trial_, kSlotAttempt0 + attempt_index);
    if (plan_.shared_interference) load_field(tx, rng, 0);

    for (std::size_t j = 0; j < receivers_.size(); ++j) {
      if (connected_[j] || !wanted(j)) continue;
      if (!plan_.shared_interference) load_field(tx, rng, j);
      const Point rx = receivers_[j];
      const double signal = sample_fading_power(cfg_.m, rng) *
                            path_loss_sq((rx - tx).norm2(), cfg_.alpha, LinkRole::desired);
      const double limit = signal / cfg_.beta;
      double interference = 0.0;
      bool failed = false;
      for (const Point& x : *field_in_use_) {
        const double g = loss_((x - rx).norm2());
        if (g == 0.0) continue;
        interference += sample_fading_power(cfg_.m, rng) * g;
        if (interference > limit) {
          failed = true;  // SIR already below beta; the rest cannot help
          break;
        }
      }
      if (!failed) connected_[j] = 1;
    }
  }

 private:
  template <class Rng>
  void load_field(Point tx, Rng& rng, std::size_t owner) {
    field_in_use_ = &field_;
    if (!(cfg_.lambda_t > 0.0)) {
      field_.clear();
      return;
    }
    if (plan_.resample_interferers_per_slot) {
      field_ = sample_ppp_disk(cfg_.lambda_t, tx, radius_, rng);
      return;
    }
    // Positions fixed for the whole trial, wide enough that every relay
    // position still sees at least the window radius around it. With
    // per-receiver fields each receiver keeps its own.
    if (fixed_.empty()) fixed_.resize(plan_.shared_interference ? 1 : receivers_.size());
    auto& mine = fixed_[owner];
    if (!mine) {
      auto frng = substream(plan_.master_seed, trial_, kSlotFixedField + 0x10000 * owner);
      mine = sample_ppp_disk(cfg_.lambda_t, Point{}, radius_ + cfg_.s, frng);
    }
    field_in_use_ = &*mine;
  }

  const NetworkConfig& cfg_;
  const TrialPlan& plan_;
  std::size_t trial_;
  InterferenceLoss loss_;
  double radius_;
  std::vector<Point> receivers_;
  std::vector<unsigned char> connected_;
  std::vector<Point> field_;
  const std::vector<Point>* field_in_use_ = &field_;
  std::vector<std::optional<std::vector<Point>>> fixed_;
};

inline std::vector<Point> sample_receivers(const NetworkConfig& cfg, const TrialPlan& plan,
                                           std::size_t trial) {
  auto rng = substream(plan.master_seed, trial, kSlotReceivers);
  return sample_ppp_disk(cfg.lambda_r, Point{}, cfg.s, rng);
}

// Outcome of one multihop trial over the tessellation `tess`.
inline bool multihop_trial_outage(const NetworkConfig& cfg, const TrialPlan& plan,
                                  const Tessellation& tess, std::size_t trial) {
  auto rx = sample_receivers(cfg, plan, trial);
  if (rx.empty()) return false;
  const int v = tess.v;
  const int per = cfg.tau / v;
  std::vector<int> region(rx.size());
  std::vector<int> population(static_cast<std::size_t>(v), 0);
  for (std::size_t j = 0; j < rx.size(); ++j) {
    region[j] = tess.region_of(rx[j]);
    ++population[region[j]];
  }
  ClusterRun run(cfg, plan, trial, std::move(rx));
  const auto& conn = run.connected();
  auto relay_rng = substream(plan.master_seed, trial, kSlotAttempt0 + cfg.tau);
  auto everyone = [](std::size_t) { return true; };

  Point tx{};
  int attempt = 0;
  for (int step = 0; step < v; ++step) {
    const int here = tess.path_order[step];
    for (int a = 0; a < per; ++a) run.attempt(tx, attempt++, everyone);
    for (std::size_t j = 0; j < conn.size(); ++j)
      if (region[j] == here && !conn[j]) return true;
    if (step + 1 == v) break;
    const int next = tess.path_order[step + 1];
    if (population[next] == 0) continue;  // nobody to serve; keep the relay
    std::vector<std::size_t> heard;
    for (std::size_t j = 0; j < conn.size(); ++j)
      if (region[j] == next && conn[j]) heard.push_back(j);
    if (heard.empty()) return true;
    const auto pick = static_cast<std::size_t>(relay_rng.uniform() * heard.size());
    tx = run.receivers()[heard[std::min(pick, heard.size() - 1)]];
  }
  return false;
}

inline void require_trials(const TrialPlan& plan) {
  if (plan.trials == 0) throw std::domain_error("trials must be positive");
}

}  // namespace detail

/// Multicast outage frequency: a trial is an outage iff some intended
/// receiver still lacks the packet after tau attempts. Empty clusters are
/// never in outage.
inline OutageEstimate estimate_outage(const NetworkConfig& cfg, const TrialPlan& plan) {
  require_valid(cfg);
  detail::require_trials(plan);
  const auto one_hop = tessellate(cfg.s, 1);
  NetworkConfig c1 = cfg;
  c1.v = 1;
  const auto events = detail::count_events(0, plan.trials, plan.worker_count, [&](std::size_t i) {
    return detail::multihop_trial_outage(c1, plan, one_hop, i);
  });
  return make_estimate(events, plan.trials);
}

/// Multihop multicast outage over the tessellation of the cluster into
/// cfg.v regions, tau/v attempts each, relays chosen uniformly among the
/// receivers of the next region that already hold the packet.
inline OutageEstimate simulate_multihop_outage(const NetworkConfig& cfg, const TrialPlan& plan) {
  if (cfg.v >= 1 && cfg.tau % cfg.v != 0)
    throw std::domain_error("simulate_multihop_outage: v must divide tau");
  require_valid(cfg);
  detail::require_trials(plan);
  const auto tess = tessellate(cfg.s, cfg.v);
  const auto events = detail::count_events(0, plan.trials, plan.worker_count, [&](std::size_t i) {
    return detail::multihop_trial_outage(cfg, plan, tess, i);
  });
  return make_estimate(events, plan.trials);
}

struct ProfilePoint {
  double r = 0.0;
  OutageEstimate connect;  ///< p_hat is the connection frequency
};

/// Connection frequency after tau attempts for probe receivers pinned at
/// each radius (uniform bearing). Probes add no interference.
inline std::vector<ProfilePoint> estimate_connection_profile(const NetworkConfig& cfg,
                                                             const TrialPlan& plan,
                                                             const std::vector<double>& r_grid) {
  require_valid(cfg);
  detail::require_trials(plan);
  for (double r : r_grid)
    if (!(r >= 1.0 && r <= cfg.s))
      throw std::domain_error("estimate_connection_profile: radii must lie in [1, s]");
  const std::size_t n = r_grid.size();
  std::vector<unsigned char> hits(plan.trials * n, 0);
  detail::for_each_trial(0, plan.trials, plan.worker_count, [&](std::size_t i) {
    auto prng = substream(plan.master_seed, i, detail::kSlotReceivers);
    std::vector<Point> probes(n);
    for (std::size_t q = 0; q < n; ++q) {
      const double th = 2.0 * std::numbers::pi * prng.uniform();
      probes[q] = {r_grid[q] * std::cos(th), r_grid[q] * std::sin(th)};
    }
    detail::ClusterRun run(cfg, plan, i, std::move(probes));
    for (int a = 0; a < cfg.tau; ++a) run.attempt(Point{}, a, [](std::size_t) { return true; });
    for (std::size_t q = 0; q < n; ++q) hits[i * n + q] = run.connected()[q];
  });
  std::vector<ProfilePoint> out;
  for (std::size_t q = 0; q < n; ++q) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < plan.trials; ++i) c += hits[i * n + q];
    out.push_back({r_grid[q], make_estimate(c, plan.trials)});
  }
  return out;
}

/// Aggregate interference at the origin from a fresh PPP(lambda_t) field,
/// one draw per trial.
inline MeanEstimate estimate_interference_mean(const NetworkConfig& cfg, const TrialPlan& plan) {
  require_valid(cfg);
  detail::require_trials(plan);
  const detail::InterferenceLoss loss(cfg.alpha);
  const double radius = window_radius_for(cfg);
  return detail::mean_of(plan.trials, plan.worker_count, [&](std::size_t i) {
    auto rng = substream(plan.master_seed, i, detail::kSlotAttempt0);
    const auto field = sample_ppp_disk(cfg.lambda_t, Point{}, radius, rng);
    double sum = 0.0;
    for (const Point& x : field) sum += sample_fading_power(cfg.m, rng) * loss(x.norm2());
    return sum;
  });
}

/// Monte Carlo multicast rate E[log2(1 + H_max s^-alpha / I_0)] at the
/// cluster edge, H_max the best of tau fading draws.
inline MeanEstimate estimate_rate(const NetworkConfig& cfg, const TrialPlan& plan) {
  require_valid(cfg);
  detail::require_trials(plan);
  if (!(cfg.lambda_t > 0.0)) throw std::domain_error("estimate_rate: lambda_t must be positive");
  const detail::InterferenceLoss loss(cfg.alpha);
  const double radius = window_radius_for(cfg);
  const double edge = std::pow(cfg.s, -cfg.alpha);
  return detail::mean_of(plan.trials, plan.worker_count, [&](std::size_t i) {
    auto rng = substream(plan.master_seed, i, detail::kSlotAttempt0);
    const auto field = sample_ppp_disk(cfg.lambda_t, Point{}, radius, rng);
    double interference = 0.0;
    for (const Point& x : field) interference += sample_fading_power(cfg.m, rng) * loss(x.norm2());
    double h_max = 0.0;
    for (int t = 0; t < cfg.tau; ++t) h_max = std::max(h_max, sample_fading_power(cfg.m, rng));
    if (interference == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(1.0 + h_max * edge / interference);
  });
}

/// Root of the estimated outage curve with an interval for it.
struct MaxIntensityEstimate {
  double lambda = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int evaluations = 0;
  std::size_t trials_used = 0;
};

/// Largest lambda_t whose estimated outage stays at or below epsilon.
///
/// Bisection on log lambda_t. Each evaluation starts at plan.trials and
/// multiplies the trial count by 4 until the 95% interval excludes epsilon,
/// its width drops below epsilon/10, or the escalation budget runs out. All
/// evaluations share the master seed. The interval maps the outage standard
/// error at the root through the locally fitted slope of outage in log
/// lambda_t.
inline MaxIntensityEstimate estimate_max_intensity_detailed(const NetworkConfig& cfg,
                                                            const TrialPlan& plan) {
  require_valid(cfg);
  detail::require_trials(plan);
  const double eps = cfg.epsilon;
  const auto tess = tessellate(cfg.s, cfg.v);

  struct Eval {
    double log_lambda;
    OutageEstimate est;
  };
  std::vector<Eval> evals;
  MaxIntensityEstimate out;

  auto evaluate = [&](double lambda) -> bool {
    NetworkConfig c = cfg;
    c.lambda_t = lambda;
    std::size_t done = 0, events = 0, target = plan.trials;
    OutageEstimate est;
    for (int round = 0;; ++round) {
      events += detail::count_events(done, target, plan.worker_count, [&](std::size_t i) {
        return detail::multihop_trial_outage(c, plan, tess, i);
      });
      done = target;
      est = make_estimate(events, done);
      const bool decided = est.p_hat - 1.96 * est.std_err > eps ||
                           est.p_hat + 1.96 * est.std_err < eps ||
                           2.0 * 1.96 * est.std_err < 0.1 * eps;
      if (decided || round >= plan.max_escalations) break;
      target *= 4;
    }
    ++out.evaluations;
    out.trials_used += done;
    evals.push_back({std::log(lambda), est});
    return est.p_hat > eps;
  };

  // Bracket upward in steps of 4 from a small intensity.
  double lo = 1e-5, hi = lo;
  if (evaluate(lo)) {
    for (int guard = 0; evaluate(lo /= 4.0);)
      if (++guard > 20) throw NoSolutionError("estimate_max_intensity: no lower bracket");
    hi = lo * 4.0;
  } else {
    for (int guard = 0; !evaluate(hi *= 4.0);)
      if (++guard > 12)
        throw NoSolutionError("estimate_max_intensity: outage never exceeds epsilon");
    lo = hi / 4.0;
  }
  double llo = std::log(lo), lhi = std::log(hi);
  while (lhi - llo > std::log(1.02)) {
    const double mid = 0.5 * (llo + lhi);
    if (evaluate(std::exp(mid))) lhi = mid;
    else llo = mid;
  }
  const double root = 0.5 * (llo + lhi);
  out.lambda = std::exp(root);

  // Weighted least-squares slope of p_hat on log lambda near the root.
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n_max = 0;
  for (const auto& e : evals) {
    if (std::abs(e.log_lambda - root) > std::log(4.0)) continue;
    const double w = static_cast<double>(e.est.trials);
    sw += w;
    sx += w * e.log_lambda;
    sy += w * e.est.p_hat;
    sxx += w * e.log_lambda * e.log_lambda;
    sxy += w * e.log_lambda * e.est.p_hat;
    n_max = std::max(n_max, e.est.trials);
  }
  const double denom = sw * sxx - sx * sx;
  const double slope = denom > 0.0 ? (sw * sxy - sx * sy) / denom : 0.0;
  if (slope > 0.0 && n_max > 0) {
    const double se = std::sqrt(eps * (1.0 - eps) / static_cast<double>(n_max));
    const double half = 1.96 * se / slope;
    out.ci_low = std::exp(root - half);
    out.ci_high = std::exp(root + half);
  } else {
    out.ci_low = std::exp(llo);
    out.ci_high = std::exp(lhi);
  }
  return out;
}

inline double estimate_max_intensity(const NetworkConfig& cfg, const TrialPlan& plan) {
  return estimate_max_intensity_detailed(cfg, plan).lambda;
}

/// A bounded test region for void probabilities.
struct TestSet {
  enum class Shape { rectangle, disk };
  Shape shape = Shape::rectangle;
  Point center{};
  double width = 0.0;   ///< rectangle width, or disk radius
  double height = 0.0;  ///< rectangle height; unused for disks
  std::string name;

  static TestSet rectangle(Point c, double w, double h, std::string name = {}) {
    return {Shape::rectangle, c, w, h, std::move(name)};
  }
  static TestSet disk(Point c, double radius, std::string name = {}) {
    return {Shape::disk, c, radius, 0.0, std::move(name)};
  }

  double area() const noexcept {
    return shape == Shape::disk ? std::numbers::pi * width * width : width * height;
  }
  /// Radius of a disk about the origin that contains the set.
  double reach() const noexcept {
    if (shape == Shape::disk) return center.norm() + width;
    return center.norm() + 0.5 * std::hypot(width, height);
  }
  bool contains(Point p) const noexcept {
    const Point d = p - center;
    if (shape == Shape::disk) return d.norm2() < width * width;
    return std::abs(d.x) < 0.5 * width && std::abs(d.y) < 0.5 * height;
  }
};

struct VoidTestRow {
  std::string name;
  double area = 0.0;
  double target = 0.0;  ///< exp(-lambda * area)
  OutageEstimate empirical;  ///< p_hat is the empirical void frequency
  double z = 0.0;
};

/// Void-probability check of the point process formed by picking one point
/// uniformly per cluster (parent PPP of intensity cfg.lambda_t, daughters
/// PPP(cfg.lambda_r) on a disk of radius cfg.s, parent included in the pick).
/// The picked points should again form a PPP of intensity lambda_t.
inline std::vector<VoidTestRow> duality_void_test(const NetworkConfig& cfg, const TrialPlan& plan,
                                                  const std::vector<TestSet>& sets) {
  require_valid(cfg);
  detail::require_trials(plan);
  double reach = 0.0;
  for (const auto& t : sets) reach = std::max(reach, t.reach());
  const double window = reach + cfg.s;
  const std::size_t n = sets.size();
  std::vector<unsigned char> empty(plan.trials * n, 1);
  detail::for_each_trial(0, plan.trials, plan.worker_count, [&](std::size_t i) {
    auto rng = substream(plan.master_seed, i, detail::kSlotReceivers);
    const auto parents = sample_ppp_disk(cfg.lambda_t, Point{}, window, rng);
    for (const Point& p : parents) {
      const auto kids = sample_ppp_disk(cfg.lambda_r, p, cfg.s, rng);
      const auto pick = static_cast<std::size_t>(rng.uniform() * (kids.size() + 1));
      const Point chosen = pick < kids.size() ? kids[pick] : p;
      for (std::size_t q = 0; q < n; ++q)
        if (sets[q].contains(chosen)) empty[i * n + q] = 0;
    }
  });
  std::vector<VoidTestRow> rows;
  for (std::size_t q = 0; q < n; ++q) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < plan.trials; ++i) c += empty[i * n + q];
    VoidTestRow row;
    row.name = sets[q].name;
    row.area = sets[q].area();
    row.target = std::exp(-cfg.lambda_t * row.area);
    row.empirical = make_estimate(c, plan.trials);
    const double sd = std::sqrt(row.target * (1.0 - row.target) / static_cast<double>(plan.trials));
    row.z = sd > 0.0 ? (row.empirical.p_hat - row.target) / sd : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace clustercast::sim
