#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "clustercast/analytic.hpp"
#include "clustercast/config.hpp"
#include "clustercast/errors.hpp"
#include "clustercast/quadrature.hpp"
#include "clustercast/simulate.hpp"

namespace clustercast::cli {

/// Network parameters plus the numerical settings read from a config file.
struct RunConfig {
  NetworkConfig network;
  QuadratureSpec quadrature;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
  // strtod rather than from_chars: it accepts "1e-3", "inf" and friends on
  // every supported standard library.
  std::string buf(s);
  char* end = nullptr;
  const double x = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) return std::nullopt;
  return x;
}

inline std::optional<long long> parse_int(std::string_view s) {
  long long x = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
  return x;
}

}  // namespace detail

/// Keys accepted in a config file. The first six are required.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "lambda_r", "s",      "alpha",   "beta",    "epsilon",          "tau",
      "lambda_t", "m",      "v",       "window_radius", "a_hat",     "rel_tol",
      "abs_tol",  "max_subdivisions", "derivative_policy"};
  return keys;
}

/// Parses flat `key = value` text ('#' starts a comment) into a RunConfig.
/// Every problem found is reported, each tagged with the offending key;
/// nothing is thrown.
inline RunConfig parse_config(std::string_view text, std::vector<FieldError>& errors) {
  RunConfig rc;
  // Documented defaults for the optional keys.
  rc.network.lambda_t = 0.0;
  rc.network.m = 1;
  rc.network.v = 1;
  rc.network.window_radius.reset();
  rc.network.a_hat = 1.0;

  const auto& keys = config_keys();
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = detail::trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back({fmt::format("line {}", lineno), "expected key = value"});
      continue;
    }
    const std::string key(detail::trim(sv.substr(0, eq)));
    const std::string_view value = detail::trim(sv.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      errors.push_back({key.empty() ? fmt::format("line {}", lineno) : key, "unknown key"});
      continue;
    }
    if (!seen.insert(key).second) {
      errors.push_back({key, "duplicate key"});
      continue;
    }

    auto real = [&](double& out) {
      if (auto x = detail::parse_double(value)) out = *x;
      else errors.push_back({key, fmt::format("'{}' is not a number", value)});
    };
    auto integer = [&](int& out) {
      auto x = detail::parse_int(value);
      if (x && *x >= std::numeric_limits<int>::min() && *x <= std::numeric_limits<int>::max())
        out = static_cast<int>(*x);
      else errors.push_back({key, fmt::format("'{}' is not an integer", value)});
    };

    auto& n = rc.network;
    if (key == "lambda_t") real(n.lambda_t);
    else if (key == "lambda_r") real(n.lambda_r);
    else if (key == "s") real(n.s);
    else if (key == "alpha") real(n.alpha);
    else if (key == "beta") real(n.beta);
    else if (key == "epsilon") real(n.epsilon);
    else if (key == "a_hat") real(n.a_hat);
    else if (key == "m") integer(n.m);
    else if (key == "tau") integer(n.tau);
    else if (key == "v") integer(n.v);
    else if (key == "window_radius") {
      if (value == "auto") n.window_radius.reset();
      else {
        double w = 0.0;
        real(w);
        n.window_radius = w;
      }
    } else if (key == "rel_tol") real(rc.quadrature.rel_tol);
    else if (key == "abs_tol") real(rc.quadrature.abs_tol);
    else if (key == "max_subdivisions") integer(rc.quadrature.max_subdivisions);
    else if (key == "derivative_policy") {
      if (value == "analytic") rc.quadrature.derivative_policy = DerivativePolicy::analytic;
      else if (value == "richardson") rc.quadrature.derivative_policy = DerivativePolicy::richardson;
      else errors.push_back({key, "derivative_policy must be 'analytic' or 'richardson'"});
    }
  }
  for (std::size_t i = 0; i < 6; ++i)
    if (!seen.count(keys[i])) errors.push_back({keys[i], "missing required key"});

  // Range checks only for keys that parsed; a missing or malformed key has
  // already been reported under its own name.
  std::set<std::string> reported;
  for (const auto& e : errors) reported.insert(e.field);
  for (auto& e : check(rc.network))
    if (!reported.count(e.field)) errors.push_back(std::move(e));
  for (auto& e : check(rc.quadrature))
    if (!reported.count(e.field)) errors.push_back(std::move(e));
  return rc;
}

/// Parsed config, or ValidationError listing every violation.
inline RunConfig validate_config(std::string_view text) {
  std::vector<FieldError> errors;
  auto rc = parse_config(text, errors);
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return rc;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config", fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

enum class Pipeline { analytic, simulate };

/// A named numeric config field with a setter.
inline bool set_field(NetworkConfig& cfg, std::string_view name, double value) {
  if (name == "lambda_t") cfg.lambda_t = value;
  else if (name == "lambda_r") cfg.lambda_r = value;
  else if (name == "s") cfg.s = value;
  else if (name == "alpha") cfg.alpha = value;
  else if (name == "beta") cfg.beta = value;
  else if (name == "epsilon") cfg.epsilon = value;
  else if (name == "a_hat") cfg.a_hat = value;
  else if (name == "window_radius") cfg.window_radius = value;
  else if (name == "m" || name == "tau" || name == "v") {
    if (value != std::floor(value)) return false;
    const int iv = static_cast<int>(value);
    if (name == "m") cfg.m = iv;
    else if (name == "tau") cfg.tau = iv;
    else cfg.v = iv;
  } else {
    return false;
  }
  return true;
}

/// An optional outer loop: one curve per value.
struct Series {
  std::string parameter;
  std::vector<double> values;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> grid;
  NetworkConfig base;
  QuadratureSpec quadrature;
  std::optional<Series> series;
  std::vector<Pipeline> pipelines = {Pipeline::analytic, Pipeline::simulate};
  std::uint64_t master_seed = 1;
  std::size_t trials = 1000;
  unsigned worker_count = 1;
  bool shared_interference = false;
  bool resample_interferers_per_slot = true;
  std::filesystem::path output;
};

namespace detail {

inline void check_axis(const std::string& field, const std::string& name,
                       const std::vector<double>& values, std::vector<FieldError>& errs) {
  NetworkConfig probe;
  if (!set_field(probe, name, 1.0))
    errs.push_back({field, fmt::format("'{}' is not a sweepable config field", name)});
  if (values.empty()) errs.push_back({field, "grid must not be empty"});
  if (name == "m" || name == "tau" || name == "v")
    for (double x : values)
      if (x != std::floor(x)) {
        errs.push_back({field, fmt::format("'{}' takes integer values only", name)});
        break;
      }
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) {
      errs.push_back({field, "grid must be strictly increasing"});
      break;
    }
}

}  // namespace detail

inline std::vector<NetworkConfig> expand(const SweepSpec& spec);

/// Every problem with the spec, tagged by field.
inline std::vector<FieldError> check(const SweepSpec& spec) {
  std::vector<FieldError> errs;
  detail::check_axis("parameter", spec.parameter, spec.grid, errs);
  if (spec.series) {
    detail::check_axis("series", spec.series->parameter, spec.series->values, errs);
    if (spec.series->parameter == spec.parameter)
      errs.push_back({"series", "series and sweep parameter must differ"});
  }
  if (spec.pipelines.empty()) errs.push_back({"pipelines", "pipelines must not be empty"});
  if (spec.trials == 0) errs.push_back({"trials", "trials must be positive"});
  for (auto& e : check(spec.quadrature)) errs.push_back(std::move(e));
  if (errs.empty()) {
    // Report the first grid point that yields an invalid network.
    const auto configs = expand(spec);
    const std::size_t per = spec.grid.size();
    for (std::size_t i = 0; i < configs.size() && errs.empty(); ++i) {
      for (auto& e : check(configs[i])) {
        e.message += fmt::format(" (at {} = {})", spec.parameter, spec.grid[i % per]);
        errs.push_back(std::move(e));
      }
    }
  }
  return errs;
}

/// Grid points in output order: series-major, then sweep value.
inline std::vector<NetworkConfig> expand(const SweepSpec& spec) {
  std::vector<NetworkConfig> out;
  const std::vector<double> outer =
      spec.series ? spec.series->values : std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
  for (double sv : outer) {
    for (double g : spec.grid) {
      NetworkConfig c = spec.base;
      if (spec.series) set_field(c, spec.series->parameter, sv);
      set_field(c, spec.parameter, g);
      out.push_back(c);
    }
  }
  return out;
}

/// One CSV row. Cells a pipeline did not produce stay NaN.
struct SweepRow {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  double series_value = nan;
  double sweep_value = nan;
  NetworkConfig config;
  double lambda_bar_analytic = nan;
  double lambda_bar_closed_form = nan;
  double lambda_bar_sim = nan;
  double lambda_bar_sim_ci_low = nan;
  double lambda_bar_sim_ci_high = nan;
  double b_lower = nan;
  double b_upper = nan;
  double b_analytic = nan;
  double b_sim = nan;
  double b_sim_stderr = nan;
  double mtc_analytic = nan;
  double mtc_sim = nan;
  double capacity_gain_db = nan;
  double v_star = nan;
};

struct SweepResult {
  std::string series_parameter;
  std::string sweep_parameter;
  std::vector<SweepRow> rows;
};

inline constexpr int kSchemaVersion = 1;

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "schema_version", "series_param", "series_value", "sweep_param", "sweep_value",
      "lambda_t", "lambda_r", "s", "alpha", "beta", "m", "epsilon", "tau", "v",
      "window_radius", "a_hat", "k",
      "lambda_bar_analytic", "lambda_bar_closed_form",
      "lambda_bar_sim", "lambda_bar_sim_ci_low", "lambda_bar_sim_ci_high",
      "b_lower", "b_upper", "b_analytic", "b_sim", "b_sim_stderr",
      "mtc_analytic", "mtc_sim", "capacity_gain_db", "v_star"};
  return cols;
}

/// Shortest text that parses back to the same double; "nan" for NaN.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  return fmt::format("{}", x);
}

/// Evaluates one grid point with the requested pipelines.
inline SweepRow evaluate_point(const SweepSpec& spec, const NetworkConfig& cfg) {
  SweepRow row;
  row.config = cfg;
  const bool want_analytic = std::count(spec.pipelines.begin(), spec.pipelines.end(), Pipeline::analytic) > 0;
  const bool want_sim = std::count(spec.pipelines.begin(), spec.pipelines.end(), Pipeline::simulate) > 0;

  analytic::AnalyticKernel kernel(cfg, spec.quadrature);
  row.capacity_gain_db = analytic::capacity_gain(cfg.v, cfg.tau, cfg.k(), cfg.epsilon);
  row.v_star = analytic::optimize_tessellation(cfg.tau, cfg.k(), cfg.epsilon);

  if (want_analytic) {
    row.lambda_bar_closed_form = cfg.v == 1 ? kernel.closed_form_max_intensity()
                                            : kernel.multihop_closed_form_max_intensity();
    // The exact outage is only available without tessellation.
    if (cfg.v == 1) {
      row.lambda_bar_analytic = kernel.solve_max_intensity();
      const auto bounds = kernel.rate_bounds(row.lambda_bar_analytic);
      row.b_lower = bounds.lower;
      row.b_upper = bounds.upper;
      row.b_analytic = kernel.expected_rate(row.lambda_bar_analytic);
      row.mtc_analytic = analytic::mtc(cfg, row.lambda_bar_analytic, row.b_analytic);
    }
  }
  if (want_sim) {
    sim::TrialPlan plan;
    plan.master_seed = spec.master_seed;
    plan.trials = spec.trials;
    plan.worker_count = spec.worker_count;
    plan.shared_interference = spec.shared_interference;
    plan.resample_interferers_per_slot = spec.resample_interferers_per_slot;
    const auto est = sim::estimate_max_intensity_detailed(cfg, plan);
    row.lambda_bar_sim = est.lambda;
    row.lambda_bar_sim_ci_low = est.ci_low;
    row.lambda_bar_sim_ci_high = est.ci_high;
    NetworkConfig at = cfg;
    at.lambda_t = est.lambda;
    const auto b = sim::estimate_rate(at, plan);
    row.b_sim = b.mean;
    row.b_sim_stderr = b.std_err;
    row.mtc_sim = analytic::mtc(cfg, est.lambda, b.mean);
  }
  return row;
}

inline SweepResult run_sweep_rows(const SweepSpec& spec) {
  auto errs = check(spec);
  if (!errs.empty()) throw ValidationError(std::move(errs));
  SweepResult result;
  result.sweep_parameter = spec.parameter;
  if (spec.series) result.series_parameter = spec.series->parameter;
  const auto configs = expand(spec);
  const std::size_t per = spec.grid.size();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    auto row = evaluate_point(spec, configs[i]);
    row.sweep_value = spec.grid[i % per];
    if (spec.series) row.series_value = spec.series->values[i / per];
    result.rows.push_back(row);
  }
  return result;
}

inline std::string to_csv(const SweepResult& r) {
  std::string out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  out += '\n';
  for (const auto& row : r.rows) {
    const auto& c = row.config;
    const std::vector<std::string> cells = {
        std::to_string(kSchemaVersion),
        r.series_parameter,
        format_number(row.series_value),
        r.sweep_parameter,
        format_number(row.sweep_value),
        format_number(c.lambda_t),
        format_number(c.lambda_r),
        format_number(c.s),
        format_number(c.alpha),
        format_number(c.beta),
        std::to_string(c.m),
        format_number(c.epsilon),
        std::to_string(c.tau),
        std::to_string(c.v),
        format_number(c.window_radius.value_or(SweepRow::nan)),
        format_number(c.a_hat),
        format_number(c.k()),
        format_number(row.lambda_bar_analytic),
        format_number(row.lambda_bar_closed_form),
        format_number(row.lambda_bar_sim),
        format_number(row.lambda_bar_sim_ci_low),
        format_number(row.lambda_bar_sim_ci_high),
        format_number(row.b_lower),
        format_number(row.b_upper),
        format_number(row.b_analytic),
        format_number(row.b_sim),
        format_number(row.b_sim_stderr),
        format_number(row.mtc_analytic),
        format_number(row.mtc_sim),
        format_number(row.capacity_gain_db),
        format_number(row.v_star)};
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }
  return out;
}

/// Writes `content` to `path` through a sibling temp file and a rename, so
/// readers never see a partial file.
inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("out", fmt::format("cannot write '{}'", path.string()));
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ValidationError("out", fmt::format("cannot write '{}'", path.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ValidationError("out", fmt::format("cannot rename into '{}'", path.string()));
  }
}

/// Runs the sweep and writes the CSV to spec.output (when set).
inline SweepResult run_sweep(const SweepSpec& spec) {
  auto result = run_sweep_rows(spec);
  if (!spec.output.empty()) write_atomically(spec.output, to_csv(result));
  return result;
}

/// Built-in figure presets; names are "fig2" and "fig5".
inline std::optional<SweepSpec> preset(std::string_view name) {
  SweepSpec spec;
  auto& c = spec.base;
  c.epsilon = 0.1;
  c.beta = 2.0;
  c.alpha = 3.0;
  c.m = 1;
  // With alpha = 3 the automatic window reaches kilometres at these
  // densities; 100 m keeps the truncated mean interference near 1% of the
  // total over both grids while staying >= 10 s.
  c.window_radius = 100.0;
  if (name == "fig2") {
    c.lambda_r = 0.1;
    c.tau = 1;
    spec.parameter = "s";
    spec.grid = {2, 3, 4, 5, 6, 7, 8};
    spec.series = Series{"tau", {1, 3, 10}};
    return spec;
  }
  if (name == "fig5") {
    c.lambda_r = 0.2;
    c.tau = 20;
    c.s = 5.0;
    spec.parameter = "v";
    for (int v : analytic::divisors(20)) spec.grid.push_back(v);
    return spec;
  }
  return std::nullopt;
}

inline std::vector<std::string> preset_names() { return {"fig2", "fig5"}; }

}  // namespace clustercast::cli
