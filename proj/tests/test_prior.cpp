#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "sdlm/error.hpp"
#include "sdlm/prior.hpp"

using namespace sdlm;

TEST(TruncatedInvGamma, IntegratesToOneOverSupport) {
  for (double shape : {1.0, 2.5}) {
    for (double scale : {0.01, 0.5}) {
      // Trapezoid rule in u = log x, where the integrand is p(x) x.
      const int n = 200000;
      const double lo = std::log(1e-8), hi = std::log(10.0);
      const double h = (hi - lo) / n;
      double sum = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double u = lo + i * h;
        const double x = i == n ? 10.0 : std::exp(u);  // exp(log 10) can round above the bound
        const double f = std::exp(truncated_inv_gamma_log_density(x, shape, scale, 10.0) + u);
        sum += (i == 0 || i == n) ? 0.5 * f : f;
      }
      EXPECT_NEAR(sum * h, 1.0, 1e-6) << shape << " " << scale;
    }
  }
}

TEST(TruncatedInvGamma, OutsideSupportIsNegativeInfinity) {
  EXPECT_EQ(truncated_inv_gamma_log_density(0.0, 1.0, 0.01, 10.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(truncated_inv_gamma_log_density(10.5, 1.0, 0.01, 10.0), -std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isfinite(truncated_inv_gamma_log_density(10.0, 1.0, 0.01, 10.0)));
}

TEST(PriorSpec, SamplesStayInSupport) {
  const auto spec = DlmSpec::sinusoid(fixtures::sites(2));
  const PriorSpec prior(spec, 1.0, 0.01, 10.0, true);
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    const StaticParams p = prior.sample(rng);
    ASSERT_TRUE(prior.in_support(p));
    ASSERT_TRUE(std::isfinite(prior.log_density(p)));
    for (int j = 0; j < 2; ++j)
      for (int c = 0; c < 3; ++c) ASSERT_LT(p.w()[p.w_index(j, c)], p.v()[j]);
  }
}

TEST(PriorSpec, SampleMedianMatchesInverseGamma) {
  // IG(1, b) has median b / ln 2; truncation at 10 barely moves it.
  const auto spec = DlmSpec::sinusoid(fixtures::sites(1));
  const PriorSpec prior(spec, 1.0, 0.01, 10.0);
  Rng rng(6);
  std::vector<double> x;
  for (int i = 0; i < 20000; ++i) x.push_back(prior.sample(rng).v()[0]);
  std::nth_element(x.begin(), x.begin() + 10000, x.end());
  EXPECT_NEAR(x[10000], 0.01 / std::log(2.0), 0.001);
}

TEST(PriorSpec, ConstraintViolationHasZeroDensity) {
  const auto spec = DlmSpec::sinusoid(fixtures::sites(1));
  const PriorSpec prior(spec, 1.0, 0.01, 10.0, true);
  StaticParams p = StaticParams::uniform(spec, 0.5, 0.4, 1.0, 0.1);
  EXPECT_EQ(prior.log_density(p), -std::numeric_limits<double>::infinity());
  p.v()[0] = 0.6;
  EXPECT_TRUE(std::isfinite(prior.log_density(p)));
}

TEST(PriorSpec, FixedComponentsLeaveTheFreeSet) {
  const auto spec = DlmSpec::sinusoid(fixtures::sites(2));
  PriorSpec prior(spec);
  EXPECT_EQ(prior.free().size(), 14u);
  prior.fix(3, 0.25);
  EXPECT_EQ(prior.free().size(), 13u);
  Rng rng(1);
  EXPECT_EQ(prior.sample(rng).flat()[3], 0.25);
  EXPECT_THROW(prior.fix(0, 11.0), ConfigError);
  EXPECT_THROW(prior.fix(0, 0.0), ConfigError);

  const StaticParams point = StaticParams::uniform(spec, 0.01, 1.0, 1.0, 0.01);
  prior.fix_all(point);
  EXPECT_TRUE(prior.free().empty());
  EXPECT_EQ(prior.sample(rng).flat(), point.flat());
  EXPECT_EQ(prior.log_density(point), 0.0);
  StaticParams other = point;
  other.v()[0] = 0.9;
  EXPECT_EQ(prior.log_density(other), -std::numeric_limits<double>::infinity());
}

TEST(PriorSpec, RejectsBadHyperparameters) {
  const auto spec = DlmSpec::sinusoid(fixtures::sites(1));
  EXPECT_THROW(PriorSpec(spec, 0.0, 0.01, 10.0), ConfigError);
  EXPECT_THROW(PriorSpec(spec, 1.0, -1.0, 10.0), ConfigError);
}
