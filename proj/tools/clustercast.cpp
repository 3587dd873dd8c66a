// Command-line driver: analytic and simulated figures of merit, sweeps and
// figure presets, all written as CSV.
//
// Exit status: 0 success, 1 invalid input, 2 numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "clustercast/clustercast.hpp"

namespace cc = clustercast;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNumerical = 2;

struct Options {
  std::string config;
  std::uint64_t seed = 1;
  std::size_t trials = 1000;
  std::string out;
  unsigned workers = 1;
  bool summary = false;
  bool shared_interference = false;
  bool fixed_interferers = false;
  std::vector<std::string> pipelines;
};

unsigned default_workers() {
  if (const char* env = std::getenv("CLUSTERCAST_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (...) {
    }
    std::cerr << "warning: ignoring CLUSTERCAST_WORKERS='" << env << "'\n";
  }
  return 1;
}

cc::cli::RunConfig load(const Options& o) {
  if (o.config.empty()) throw cc::ValidationError("config", "--config is required");
  return cc::cli::validate_config(cc::cli::read_file(o.config));
}

std::vector<cc::cli::Pipeline> pipelines_from(const std::vector<std::string>& names,
                                              std::vector<cc::cli::Pipeline> fallback) {
  if (names.empty()) return fallback;
  std::vector<cc::cli::Pipeline> out;
  for (const auto& n : names) {
    if (n == "analytic") out.push_back(cc::cli::Pipeline::analytic);
    else if (n == "simulate") out.push_back(cc::cli::Pipeline::simulate);
    else if (n == "none") continue;
    else throw cc::ValidationError("pipelines", fmt::format("unknown pipeline '{}'", n));
  }
  return out;
}

void apply_run_options(cc::cli::SweepSpec& spec, const Options& o) {
  spec.master_seed = o.seed;
  spec.trials = o.trials;
  spec.worker_count = o.workers;
  spec.shared_interference = o.shared_interference;
  spec.resample_interferers_per_slot = !o.fixed_interferers;
}

void emit(const std::string& csv, const Options& o) {
  if (o.out.empty()) std::cout << csv;
  else cc::cli::write_atomically(o.out, csv);
}

void print_summary(const cc::cli::SweepResult& r) {
  for (const auto& row : r.rows) {
    std::string head;
    if (!r.series_parameter.empty())
      head += fmt::format("{}={} ", r.series_parameter, cc::cli::format_number(row.series_value));
    if (!r.sweep_parameter.empty())
      head += fmt::format("{}={} ", r.sweep_parameter, cc::cli::format_number(row.sweep_value));
    const double b = std::isnan(row.b_analytic) ? row.b_sim : row.b_analytic;
    const double mtc = std::isnan(row.mtc_analytic) ? row.mtc_sim : row.mtc_analytic;
    std::cout << head
              << fmt::format("lambda_bar={} lambda_bar_closed_form={} lambda_bar_sim={} b={} "
                             "C_eps={} g_c_db={} v_star={}\n",
                             cc::cli::format_number(row.lambda_bar_analytic),
                             cc::cli::format_number(row.lambda_bar_closed_form),
                             cc::cli::format_number(row.lambda_bar_sim), cc::cli::format_number(b),
                             cc::cli::format_number(mtc),
                             cc::cli::format_number(row.capacity_gain_db),
                             cc::cli::format_number(row.v_star));
  }
}

int finish(const cc::cli::SweepResult& r, const Options& o) {
  emit(cc::cli::to_csv(r), o);
  if (o.summary) print_summary(r);
  return kOk;
}

// A single-point sweep over the config's own value of s.
int run_single(const Options& o, std::vector<cc::cli::Pipeline> pipes) {
  const auto rc = load(o);
  cc::cli::SweepSpec spec;
  spec.base = rc.network;
  spec.quadrature = rc.quadrature;
  spec.parameter = "s";
  spec.grid = {rc.network.s};
  spec.pipelines = pipelines_from(o.pipelines, std::move(pipes));
  apply_run_options(spec, o);
  return finish(cc::cli::run_sweep_rows(spec), o);
}

int run_gain(const Options& o) {
  const auto rc = load(o);
  const auto& c = rc.network;
  std::string csv = "v,capacity_gain_db,lambda_bar_closed_form,convexity_certificate\n";
  for (int v : cc::analytic::divisors(c.tau)) {
    auto cv = c;
    cv.v = v;
    const double cf = cc::analytic::AnalyticKernel(cv, rc.quadrature).multihop_closed_form_max_intensity();
    csv += fmt::format("{},{},{},{}\n", v,
                       cc::cli::format_number(cc::analytic::capacity_gain(v, c.tau, c.k(), c.epsilon)),
                       cc::cli::format_number(cf),
                       cc::cli::format_number(cc::analytic::convexity_certificate(c.tau, v)));
  }
  emit(csv, o);
  if (o.summary)
    std::cout << fmt::format("v_star={}\n", cc::analytic::optimize_tessellation(c.tau, c.k(), c.epsilon));
  return kOk;
}

std::vector<double> parse_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw cc::ValidationError(field, fmt::format("'{}' is not a number", item));
    }
  }
  return out;
}

int run_duality(const Options& o) {
  const auto rc = load(o);
  cc::sim::TrialPlan plan;
  plan.master_seed = o.seed;
  plan.trials = o.trials;
  plan.worker_count = o.workers;
  const std::vector<cc::sim::TestSet> sets = {
      cc::sim::TestSet::rectangle({0, 0}, 4, 4, "square_4x4"),
      cc::sim::TestSet::disk({3, 1}, 2, "disk_r2"),
      cc::sim::TestSet::rectangle({-2, 3}, 2, 6, "rect_2x6")};
  const auto rows = cc::sim::duality_void_test(rc.network, plan, sets);
  std::string csv = "set,area,target,empirical,std_err,z\n";
  for (const auto& r : rows)
    csv += fmt::format("{},{},{},{},{},{}\n", r.name, cc::cli::format_number(r.area),
                       cc::cli::format_number(r.target), cc::cli::format_number(r.empirical.p_hat),
                       cc::cli::format_number(r.empirical.std_err), cc::cli::format_number(r.z));
  emit(csv, o);
  if (o.summary)
    for (const auto& r : rows) std::cout << fmt::format("{} z={:.3f}\n", r.name, r.z);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicast transmission capacity of clustered wireless networks"};
  app.require_subcommand(1);
  Options o;
  o.workers = default_workers();

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", o.config, "key = value config file");
    if (needs_config) opt->required();
    cmd->add_option("--seed", o.seed, "master seed for all randomness");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials (starting count for searches)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "output CSV path (default: stdout)");
    cmd->add_option("--workers", o.workers, "worker threads (env CLUSTERCAST_WORKERS)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--summary", o.summary, "print key scalars to stdout");
    cmd->add_flag("--shared-interference", o.shared_interference,
                  "one interferer field per attempt for the whole cluster");
    cmd->add_flag("--fixed-interferers", o.fixed_interferers,
                  "keep interferer positions for all attempts of a trial");
    cmd->add_option("--pipelines", o.pipelines, "analytic, simulate (comma separated)")
        ->delimiter(',');
  };

  auto* analytic = app.add_subcommand("analytic", "analytic figures for one config");
  add_common(analytic, true);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo figures for one config");
  add_common(simulate, true);
  auto* gain = app.add_subcommand("gain", "multihop capacity gain over the divisors of tau");
  add_common(gain, true);

  std::string param, grid, series, series_values;
  auto* sweep = app.add_subcommand("sweep", "sweep one config field");
  add_common(sweep, true);
  sweep->add_option("--param", param, "field to sweep")->required();
  sweep->add_option("--grid", grid, "comma-separated increasing values")->required();
  sweep->add_option("--series", series, "optional second field, one curve per value");
  sweep->add_option("--series-values", series_values, "values for --series");

  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "run a built-in figure preset");
  add_common(preset, false);
  preset->add_option("name", preset_name, "preset name (fig2, fig5)")->required();

  auto* duality = app.add_subcommand("duality-test", "void-probability check of the picked-point process");
  add_common(duality, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*analytic) return run_single(o, {cc::cli::Pipeline::analytic});
    if (*simulate) return run_single(o, {cc::cli::Pipeline::simulate});
    if (*gain) return run_gain(o);
    if (*duality) return run_duality(o);
    if (*sweep) {
      const auto rc = load(o);
      cc::cli::SweepSpec spec;
      spec.base = rc.network;
      spec.quadrature = rc.quadrature;
      spec.parameter = param;
      spec.grid = parse_list("grid", grid);
      if (!series.empty()) spec.series = cc::cli::Series{series, parse_list("series-values", series_values)};
      spec.pipelines = pipelines_from(o.pipelines, spec.pipelines);
      apply_run_options(spec, o);
      return finish(cc::cli::run_sweep_rows(spec), o);
    }
    if (*preset) {
      auto spec = cc::cli::preset(preset_name);
      if (!spec)
        throw cc::ValidationError("preset", fmt::format("unknown preset '{}'", preset_name));
      spec->pipelines = pipelines_from(o.pipelines, spec->pipelines);
      apply_run_options(*spec, o);
      return finish(cc::cli::run_sweep_rows(*spec), o);
    }
  } catch (const cc::ValidationError& e) {
    std::cerr << "invalid input:\n";
    for (const auto& fe : e.errors()) std::cerr << "  " << fe.field << ": " << fe.message << "\n";
    return kInvalid;
  } catch (const cc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  }
  return kOk;
}
