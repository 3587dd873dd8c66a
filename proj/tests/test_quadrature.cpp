#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "clustercast/quadrature.hpp"

using namespace clustercast;

TEST(Integrate, SmoothIntegrands) {
  QuadratureSpec q;
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, q).value, 2.0, 1e-12);
  EXPECT_NEAR(integrate([](double x) { return std::exp(x); }, 0.0, 1.0, q).value, std::exp(1.0) - 1.0, 1e-12);
  // Reversed limits flip the sign.
  EXPECT_NEAR(integrate([](double x) { return x * x; }, 1.0, 0.0, q).value, -1.0 / 3.0, 1e-14);
  EXPECT_EQ(integrate([](double x) { return x; }, 2.0, 2.0, q).value, 0.0);
}

TEST(Integrate, EndpointSingularity) {
  QuadratureSpec q;
  q.rel_tol = 1e-10;
  // int_0^1 x^-1/2 dx = 2
  EXPECT_NEAR(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, q).value, 2.0, 1e-8);
}

TEST(IntegrateTail, PowerAndExponentialTails) {
  QuadratureSpec q;
  EXPECT_NEAR(integrate_tail([](double t) { return 1.0 / (t * t); }, 1.0, 2.0, q).value, 1.0, 1e-12);
  // Slow decay t^-1.25 (p close to 1): int_2^inf = 4 * 2^-0.25
  EXPECT_NEAR(integrate_tail([](double t) { return std::pow(t, -1.25); }, 2.0, 1.25, q).value,
              4.0 * std::pow(2.0, -0.25), 1e-9);
  EXPECT_NEAR(integrate_tail([](double t) { return std::exp(-t); }, 1.0, 2.0, q).value,
              std::exp(-1.0), 1e-11);
  EXPECT_THROW(integrate_tail([](double) { return 1.0; }, 0.0, 2.0, q), std::domain_error);
  EXPECT_THROW(integrate_tail([](double) { return 1.0; }, 1.0, 1.0, q), std::domain_error);
}

TEST(Integrate, SubdivisionLimitIsANumericalError) {
  QuadratureSpec q;
  q.max_subdivisions = 64;
  q.rel_tol = 1e-15;
  q.abs_tol = 1e-300;
  auto wild = [](double x) { return std::sin(1.0 / x) / x; };
  EXPECT_THROW(integrate(wild, 1e-6, 1.0, q), QuadratureError);
}

TEST(QuadratureSpecCheck, ReportsEveryField) {
  QuadratureSpec q;
  q.rel_tol = 0.0;
  q.abs_tol = -1.0;
  q.max_subdivisions = 10;
  const auto errs = check(q);
  ASSERT_EQ(errs.size(), 3u);
  EXPECT_EQ(errs[0].field, "rel_tol");
  EXPECT_EQ(errs[1].field, "abs_tol");
  EXPECT_EQ(errs[2].field, "max_subdivisions");
  EXPECT_TRUE(check(QuadratureSpec{}).empty());
}
