// How splitting a cluster into v relay regions changes the scaling-law
// capacity, and what the simulator says about the outage at one density.

#include <cstdio>

#include "clustercast/clustercast.hpp"

int main() {
  using namespace clustercast;

  NetworkConfig cfg;
  cfg.lambda_r = 0.2;
  cfg.s = 5.0;
  cfg.alpha = 3.0;
  cfg.beta = 2.0;
  cfg.epsilon = 0.1;
  cfg.tau = 20;
  cfg.lambda_t = 2e-3;

  sim::TrialPlan plan;
  plan.trials = 400;

  std::printf("k = %.2f\n", cfg.k());
  std::printf("%4s %12s %14s %12s\n", "v", "gain [dB]", "closed form", "sim outage");
  for (int v : analytic::divisors(cfg.tau)) {
    cfg.v = v;
    const double cf = analytic::AnalyticKernel(cfg).multihop_closed_form_max_intensity();
    const auto est = sim::simulate_multihop_outage(cfg, plan);
    std::printf("%4d %12.3f %14.4e %12.4f\n", v,
                analytic::capacity_gain(v, cfg.tau, cfg.k(), cfg.epsilon), cf, est.p_hat);
  }
  std::printf("v* = %d\n", analytic::optimize_tessellation(cfg.tau, cfg.k(), cfg.epsilon));
}
