#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "clustercast/sweep.hpp"

using namespace clustercast;
using namespace clustercast::cli;

namespace {

const char* kMinimal =
    "lambda_r = 0.1\n"
    "s = 5\n"
    "alpha = 4\n"
    "beta = 1\n"
    "epsilon = 0.1\n"
    "tau = 2\n";

std::vector<FieldError> errors_of(const std::string& text) {
  std::vector<FieldError> errs;
  parse_config(text, errs);
  return errs;
}

bool has(const std::vector<FieldError>& errs, const std::string& field, const std::string& msg = {}) {
  for (const auto& e : errs)
    if (e.field == field && e.message.find(msg) != std::string::npos) return true;
  return false;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

SweepSpec analytic_sweep() {
  SweepSpec spec;
  spec.base = validate_config(kMinimal).network;
  spec.parameter = "s";
  spec.grid = {3, 5};
  spec.pipelines = {Pipeline::analytic};
  return spec;
}

}  // namespace

TEST(Config, ParsesAndAppliesDefaults) {
  const auto rc = validate_config(std::string(kMinimal) + "# comment\n\n  m = 2  # trailing\n");
  EXPECT_EQ(rc.network.lambda_r, 0.1);
  EXPECT_EQ(rc.network.tau, 2);
  EXPECT_EQ(rc.network.m, 2);
  EXPECT_EQ(rc.network.v, 1);
  EXPECT_EQ(rc.network.lambda_t, 0.0);
  EXPECT_EQ(rc.network.a_hat, 1.0);
  EXPECT_FALSE(rc.network.window_radius.has_value());
  EXPECT_EQ(rc.quadrature.derivative_policy, DerivativePolicy::analytic);
}

TEST(Config, OptionalKeys) {
  const auto rc = validate_config(std::string(kMinimal) +
                                  "window_radius = 80\nderivative_policy = richardson\nrel_tol = 1e-8\n");
  EXPECT_EQ(*rc.network.window_radius, 80.0);
  EXPECT_EQ(rc.quadrature.derivative_policy, DerivativePolicy::richardson);
  EXPECT_EQ(rc.quadrature.rel_tol, 1e-8);
  EXPECT_FALSE(validate_config(std::string(kMinimal) + "window_radius = auto\n").network.window_radius);
}

TEST(Config, RangeErrorsNameTheField) {
  std::string text = kMinimal;
  text.replace(text.find("alpha = 4"), 9, "alpha = 2");
  EXPECT_TRUE(has(errors_of(text), "alpha", "alpha must exceed 2"));
  std::string four = kMinimal;
  four.replace(four.find("tau = 2"), 7, "tau = 4");
  EXPECT_TRUE(has(errors_of(four + "v = 3\n"), "v", "v must divide tau"));
  EXPECT_TRUE(has(errors_of(four + "v = 8\n"), "v", "must not exceed tau"));
  EXPECT_TRUE(has(errors_of(std::string(kMinimal) + "window_radius = 4\n"), "window_radius"));
  EXPECT_TRUE(has(errors_of(std::string(kMinimal) + "derivative_policy = guess\n"), "derivative_policy"));
}

TEST(Config, AggregatesEveryError) {
  const auto errs = errors_of(
      "lambda_r = -1\n"
      "s = 0.5\n"
      "alpha = 4\n"
      "beta = abc\n"
      "tau = 2.5\n"
      "colour = blue\n"
      "alpha = 3\n"
      "garbage line\n");
  EXPECT_TRUE(has(errs, "lambda_r", ">= 0"));
  EXPECT_TRUE(has(errs, "s", "s must exceed 1"));
  EXPECT_TRUE(has(errs, "alpha", "duplicate key"));
  EXPECT_TRUE(has(errs, "beta", "not a number"));
  EXPECT_TRUE(has(errs, "tau", "not an integer"));
  EXPECT_TRUE(has(errs, "colour", "unknown key"));
  EXPECT_TRUE(has(errs, "line 8", "expected key = value"));
  EXPECT_TRUE(has(errs, "epsilon", "missing required key"));
  // A malformed value is not re-reported as a range error.
  EXPECT_FALSE(has(errs, "beta", "positive"));
}

TEST(Config, ValidateThrowsWithAllErrors) {
  try {
    validate_config("alpha = 1\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_GE(e.errors().size(), 6u);
  }
}

TEST(Config, MissingFileIsAValidationError) {
  EXPECT_THROW(read_file("/nonexistent/dir/none.cfg"), ValidationError);
}

TEST(SweepCheck, RejectsBadSpecs) {
  auto spec = analytic_sweep();
  spec.pipelines.clear();
  EXPECT_TRUE(has(check(spec), "pipelines", "pipelines must not be empty"));

  spec = analytic_sweep();
  spec.parameter = "colour";
  EXPECT_TRUE(has(check(spec), "parameter", "not a sweepable"));

  spec = analytic_sweep();
  spec.grid = {5, 3};
  EXPECT_TRUE(has(check(spec), "parameter", "strictly increasing"));

  spec = analytic_sweep();
  spec.parameter = "tau";
  spec.grid = {1, 2.5};
  EXPECT_TRUE(has(check(spec), "parameter", "integer"));

  spec = analytic_sweep();
  spec.grid = {3, 0.5};
  spec.grid = {0.5, 3};
  EXPECT_TRUE(has(check(spec), "s", "at s = 0.5"));

  spec = analytic_sweep();
  spec.series = Series{"s", {2}};
  EXPECT_TRUE(has(check(spec), "series", "must differ"));

  EXPECT_THROW(run_sweep_rows(spec), ValidationError);
}

TEST(SweepExpand, SeriesMajorOrder) {
  auto spec = analytic_sweep();
  spec.series = Series{"tau", {1, 3}};
  const auto cfgs = expand(spec);
  ASSERT_EQ(cfgs.size(), 4u);
  EXPECT_EQ(cfgs[0].tau, 1);
  EXPECT_EQ(cfgs[0].s, 3.0);
  EXPECT_EQ(cfgs[1].s, 5.0);
  EXPECT_EQ(cfgs[2].tau, 3);
}

TEST(Csv, HeaderAndRowShape) {
  auto spec = analytic_sweep();
  const auto csv = to_csv(run_sweep_rows(spec));
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(split(header), csv_columns());
  EXPECT_EQ(csv_columns().front(), "schema_version");
  int rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    const auto cells = split(row);
    ASSERT_EQ(cells.size(), csv_columns().size());
    EXPECT_EQ(cells[0], "1");
    EXPECT_EQ(cells[3], "s");
    EXPECT_EQ(cells[19], "nan");  // lambda_bar_sim: pipeline not requested
    EXPECT_NE(cells[17], "nan");
  }
  EXPECT_EQ(rows, 2);
}

TEST(Csv, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, 1e-300, -2.5}) {
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(std::nan("")), "nan");
  const auto result = run_sweep_rows(analytic_sweep());
  std::istringstream in(to_csv(result));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(std::stod(split(line)[17]), result.rows[0].lambda_bar_analytic);
}

TEST(Csv, AtomicWrite) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "clustercast_cli_test";
  fs::create_directories(dir);
  const fs::path out = dir / "out.csv";
  write_atomically(out, "a,b\n1,2\n");
  write_atomically(out, "a,b\n3,4\n");
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "a,b\n3,4\n");
  EXPECT_FALSE(fs::exists(out.string() + ".tmp"));
  EXPECT_THROW(write_atomically(dir / "missing" / "x.csv", "x"), ValidationError);
  fs::remove_all(dir);
}

TEST(Sweep, AnalyticValuesAreConsistent) {
  const auto r = run_sweep_rows(analytic_sweep());
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& row : r.rows) {
    EXPECT_NEAR(analytic::outage_probability(row.lambda_bar_analytic, row.config.tau, row.config),
                row.config.epsilon, 1e-8);
    EXPECT_LT(row.b_lower, row.b_upper);
    EXPECT_DOUBLE_EQ(row.mtc_analytic, analytic::mtc(row.config, row.lambda_bar_analytic, row.b_analytic));
  }
  EXPECT_GT(r.rows[0].lambda_bar_analytic, r.rows[1].lambda_bar_analytic);
}

TEST(Presets, Definitions) {
  const auto f2 = preset("fig2");
  ASSERT_TRUE(f2);
  EXPECT_EQ(f2->parameter, "s");
  EXPECT_EQ(f2->grid, (std::vector<double>{2, 3, 4, 5, 6, 7, 8}));
  ASSERT_TRUE(f2->series);
  EXPECT_EQ(f2->series->values, (std::vector<double>{1, 3, 10}));
  EXPECT_EQ(f2->base.alpha, 3.0);
  EXPECT_EQ(f2->base.beta, 2.0);
  EXPECT_EQ(f2->base.lambda_r, 0.1);
  const auto f5 = preset("fig5");
  ASSERT_TRUE(f5);
  EXPECT_EQ(f5->parameter, "v");
  EXPECT_EQ(f5->grid, (std::vector<double>{1, 2, 4, 5, 10, 20}));
  EXPECT_EQ(f5->base.tau, 20);
  EXPECT_FALSE(preset("fig9"));
  EXPECT_TRUE(check(*f2).empty());
  EXPECT_TRUE(check(*f5).empty());
}

TEST(Presets, Fig5AnalyticGainPeaksAtTwenty) {
  auto spec = *preset("fig5");
  spec.pipelines = {Pipeline::analytic};
  const auto r = run_sweep_rows(spec);
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.rows[0].capacity_gain_db, 0.0);
  for (const auto& row : r.rows) EXPECT_EQ(row.v_star, 20.0);
}
