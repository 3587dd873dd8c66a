// Analytic versus simulated multicast outage as the transmitter density grows.
//
//   sample_outage_curve [trials]

#include <cstdio>
#include <cstdlib>

#include "clustercast/clustercast.hpp"

int main(int argc, char** argv) {
  using namespace clustercast;

  NetworkConfig cfg;
  cfg.lambda_r = 0.1;
  cfg.s = 5.0;
  cfg.alpha = 4.0;
  cfg.beta = 1.0;
  cfg.tau = 2;

  sim::TrialPlan plan;
  plan.trials = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 4000;
  plan.master_seed = 2024;

  const analytic::AnalyticKernel kernel(cfg);
  std::printf("%10s %10s %10s %10s\n", "lambda_t", "analytic", "simulated", "std_err");
  for (double lt : {2.5e-4, 5e-4, 1e-3, 2e-3, 4e-3}) {
    cfg.lambda_t = lt;
    const auto est = sim::estimate_outage(cfg, plan);
    std::printf("%10.2e %10.4f %10.4f %10.4f\n", lt, kernel.outage_probability(lt), est.p_hat,
                est.std_err);
  }
  std::printf("max contention intensity at eps=%.2f: %.4e\n", cfg.epsilon,
              kernel.solve_max_intensity());
}
