#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "clustercast/model.hpp"
#include "clustercast/rng.hpp"

using namespace clustercast;

TEST(PathLoss, DesiredLinkIsClampedInsideUnitDistance) {
  EXPECT_EQ(path_loss(0.0, 4.0, LinkRole::desired), 1.0);
  EXPECT_EQ(path_loss(0.5, 3.0, LinkRole::desired), 1.0);
  EXPECT_EQ(path_loss(0.5, 3.0, LinkRole::interference), 0.0);
  EXPECT_EQ(path_loss(1.0, 3.0, LinkRole::interference), 1.0);
  EXPECT_DOUBLE_EQ(path_loss(2.0, 4.0, LinkRole::desired), 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(path_loss_sq(4.0, 4.0, LinkRole::interference), 1.0 / 16.0);
  EXPECT_THROW(path_loss(-0.1, 4.0, LinkRole::desired), std::domain_error);
}

TEST(Rng, SubstreamsArePureFunctionsOfTheirKey) {
  auto a = substream(42, 7, 3);
  auto b = substream(42, 7, 3);
  auto c = substream(42, 7, 4);
  auto d = substream(42, 8, 3);
  std::set<std::uint64_t> firsts;
  for (auto* g : {&a, &c, &d}) firsts.insert((*g)());
  EXPECT_EQ(firsts.size(), 3u);
  b();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, UniformRanges) {
  Xoshiro256 g(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    const double p = g.uniform_pos();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(p, 0.0);
    ASSERT_LE(p, 1.0);
  }
}

class FadingMoments : public ::testing::TestWithParam<int> {};

TEST_P(FadingMoments, UnitMeanAndVarianceOneOverM) {
  const int m = GetParam();
  Xoshiro256 g(99 + m);
  const int n = 200000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double h = sample_fading_power(m, g);
    s1 += h;
    s2 += h * h;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  const double sd = std::sqrt(1.0 / m);
  EXPECT_NEAR(mean, 1.0, 3.0 * sd / std::sqrt(n));
  // Var of the sample variance for Gamma(m,1/m): (mu4 - sigma^4)/n.
  const double mu4 = 3.0 / (m * m) + 6.0 / (m * m * m);
  EXPECT_NEAR(var, 1.0 / m, 3.0 * std::sqrt((mu4 - 1.0 / (m * m)) / n));
}

INSTANTIATE_TEST_SUITE_P(Shapes, FadingMoments, ::testing::Values(1, 2, 3, 5));

TEST(Fading, RejectsNonPositiveShape) {
  Xoshiro256 g(1);
  EXPECT_THROW(sample_fading_power(0, g), std::domain_error);
}

TEST(SampleNetwork, InterfererCountMatchesPoissonMean) {
  NetworkConfig cfg;
  cfg.lambda_t = 0.1;
  cfg.window_radius = 50.0;
  const double mean = 0.1 * std::numbers::pi * 2500.0;  // 785.398...
  const int n = 10000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    auto g = substream(5, i, 0);
    const auto net = sample_network(cfg, g);
    const double c = static_cast<double>(net.interferers.size());
    s1 += c;
    s2 += c * c;
    for (const auto& p : net.interferers) ASSERT_LE(p.norm(), 50.0);
  }
  const double m = s1 / n;
  EXPECT_NEAR(m, mean, 3.0 * std::sqrt(mean / n));
  // Poisson dispersion: variance equals mean.
  const double var = s2 / n - m * m;
  EXPECT_NEAR(var / mean, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(SampleNetwork, ReceiverCountIsPoissonWithMeanK) {
  NetworkConfig cfg;
  cfg.lambda_r = 0.1;
  cfg.s = 5.0;
  const double k = cfg.k();
  const int n = 20000;
  // Chi-square goodness of fit over counts 0..14 (+ tail).
  std::vector<double> observed(16, 0.0);
  for (int i = 0; i < n; ++i) {
    auto g = substream(11, i, 0);
    const auto net = sample_network(cfg, g);
    observed[std::min<std::size_t>(net.receivers.size(), 15)] += 1.0;
    for (const auto& p : net.receivers) ASSERT_LE(p.norm(), 5.0);
  }
  double chi2 = 0.0, cum = 0.0, pk = std::exp(-k);
  for (int c = 0; c < 16; ++c) {
    const double p = c < 15 ? pk : 1.0 - cum;
    cum += pk;
    pk *= k / (c + 1);
    const double e = n * p;
    chi2 += (observed[c] - e) * (observed[c] - e) / e;
  }
  // 15 degrees of freedom: the 99.9% quantile is 37.7.
  EXPECT_LT(chi2, 37.7);
}

TEST(Sir, InfiniteWithoutInterference) {
  std::vector<Point> none;
  std::vector<double> no_fading;
  EXPECT_TRUE(std::isinf(sir_at({2, 0}, none, 1.0, no_fading, 4.0)));
  // An interferer inside unit distance contributes nothing.
  std::vector<Point> close = {{2.5, 0}};
  std::vector<double> h = {1.0};
  EXPECT_TRUE(std::isinf(sir_at({2, 0}, close, 1.0, h, 4.0)));
}

TEST(Sir, HandComputed) {
  // Receiver at (2,0): signal 2^-4 * 1.5; interferers at distance 3 and 4.
  std::vector<Point> xs = {{5, 0}, {2, 4}};
  std::vector<double> h = {2.0, 0.5};
  const double expected = (1.5 / 16.0) / (2.0 / 81.0 + 0.5 / 256.0);
  EXPECT_NEAR(sir_at({2, 0}, xs, 1.5, h, 4.0), expected, 1e-14);
  // Relay transmitter at (2,1): unit distance away, desired gain 1.
  EXPECT_NEAR(sir_at({2, 0}, {2, 1}, xs, 1.5, h, 4.0), 1.5 / (2.0 / 81.0 + 0.5 / 256.0), 1e-12);
  EXPECT_THROW(sir_at({0, 0}, xs, 1.0, std::vector<double>{1.0}, 4.0), std::invalid_argument);
}

class Tessellate : public ::testing::TestWithParam<int> {};

TEST_P(Tessellate, EqualAreasAndConsistentLookup) {
  const int v = GetParam();
  const double s = 5.0;
  const auto t = tessellate(s, v);
  ASSERT_EQ(static_cast<int>(t.regions.size()), v);
  ASSERT_EQ(static_cast<int>(t.path_order.size()), v);
  const double target = std::numbers::pi * s * s / v;
  for (const auto& r : t.regions) EXPECT_NEAR(r.area(), target, 1e-12 * target);

  // Monte Carlo area fractions and agreement between region_of and contains.
  Xoshiro256 g(v);
  const int n = 200000;
  std::vector<int> hits(v, 0);
  for (int i = 0; i < n; ++i) {
    const Point p = sample_in_disk({}, s, g);
    const int idx = t.region_of(p);
    ASSERT_GE(idx, 0);
    ASSERT_TRUE(t.regions[idx].contains(p));
    for (int j = 0; j < v; ++j) {
      if (j == idx) continue;
      ASSERT_FALSE(t.regions[j].contains(p));
    }
    ++hits[idx];
  }
  const double p = 1.0 / v;
  for (int j = 0; j < v; ++j) EXPECT_NEAR(hits[j] / double(n), p, 4.0 * std::sqrt(p * (1 - p) / n));
  EXPECT_EQ(t.region_of({s + 0.1, 0}), -1);
}

INSTANTIATE_TEST_SUITE_P(Counts, Tessellate, ::testing::Values(1, 2, 4, 5, 10, 20));

TEST(TessellateErrors, RejectsBadArguments) {
  EXPECT_THROW(tessellate(5.0, 0), std::domain_error);
  EXPECT_THROW(tessellate(0.0, 2), std::domain_error);
}
