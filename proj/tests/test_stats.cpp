#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "sdlm/error.hpp"
#include "sdlm/rng.hpp"
#include "sdlm/stats.hpp"

using namespace sdlm;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

TEST(Ess, Examples) {
  EXPECT_NEAR(stats::ess(std::vector<double>(100, -3.0)), 100.0, 1e-10);
  std::vector<double> one(10, kNegInf);
  one[4] = 0.0;
  EXPECT_DOUBLE_EQ(stats::ess(one), 1.0);
  EXPECT_NEAR(stats::ess(std::vector<double>{std::log(0.6), std::log(0.4)}), 1.0 / 0.52, 1e-12);
  EXPECT_NEAR(stats::ess(std::vector<double>{std::log(0.6), std::log(0.4)}), 1.9231, 5e-5);
}

TEST(Ess, AllNegativeInfinityThrows) {
  EXPECT_THROW(stats::ess(std::vector<double>(3, kNegInf)), StateError);
}

TEST(Ess, BoundsOnRandomWeights) {
  Rng rng(1);
  std::normal_distribution<double> z(0.0, 30.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> lw(2 + trial % 50);
    for (double& x : lw) x = z(rng);
    const double e = stats::ess(lw);
    EXPECT_GE(e, 1.0);
    EXPECT_LE(e, static_cast<double>(lw.size()));
  }
}

TEST(LogSumExp, StableForLargeMagnitudes) {
  EXPECT_NEAR(stats::log_sum_exp(std::vector<double>{1000.0, 1000.0}), 1000.0 + std::log(2.0), 1e-12);
  EXPECT_NEAR(stats::log_sum_exp(std::vector<double>{-1000.0, -1000.0}), -1000.0 + std::log(2.0), 1e-12);
  EXPECT_EQ(stats::log_sum_exp(std::vector<double>{}), kNegInf);
  EXPECT_EQ(stats::log_sum_exp(std::vector<double>{kNegInf, kNegInf}), kNegInf);
}

TEST(NormalizeLogWeights, SumsToOne) {
  Rng rng(2);
  std::normal_distribution<double> z(0.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> lw(1 + trial % 40);
    for (double& x : lw) x = z(rng);
    stats::normalize_log_weights(lw);
    EXPECT_NEAR(stats::log_sum_exp(lw), 0.0, 1e-10);
    EXPECT_NEAR(stats::normalized_weights(lw).sum(), 1.0, 1e-10);
  }
}

TEST(WeightedQuantile, EqualWeightsMatchType7) {
  const std::vector<double> x{5, 1, 4, 2, 3};
  const std::vector<double> w(5, 1.0);
  EXPECT_DOUBLE_EQ(stats::weighted_quantile(x, w, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(stats::weighted_quantile(x, w, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(stats::weighted_quantile(x, w, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(stats::weighted_quantile(x, w, 0.1), 1.4);
  EXPECT_DOUBLE_EQ(stats::weighted_quantile(x, w, 1.0), 5.0);
}

TEST(WeightedQuantile, ZeroWeightsCarryNoMass) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_DOUBLE_EQ(stats::weighted_quantile(x, std::vector<double>{1, 0, 1}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(stats::weighted_quantile(x, std::vector<double>{0, 0, 1}, 0.3), 3.0);
}

TEST(WeightedMoments, MeanAndCovariance) {
  Eigen::MatrixXd s(3, 2);
  s << 0, 0,
       1, 2,
       2, 4;
  const Eigen::VectorXd w = Eigen::Vector3d(0.25, 0.5, 0.25);
  EXPECT_TRUE(stats::weighted_mean(s, w).isApprox(Eigen::Vector2d(1, 2)));
  const Eigen::MatrixXd c = stats::weighted_cov(s, w);
  EXPECT_NEAR(c(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(c(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(c(1, 1), 2.0, 1e-15);
}

TEST(WeightedKs, IdenticalAndDisjoint) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6}, w(3, 1.0);
  EXPECT_EQ(stats::weighted_ks(a, w, a, w), 0.0);
  EXPECT_DOUBLE_EQ(stats::weighted_ks(a, w, b, w), 1.0);
  EXPECT_NEAR(stats::weighted_ks(std::vector<double>{1, 2}, std::vector<double>{1, 1}, std::vector<double>{1, 3},
                                 std::vector<double>{1, 1}),
              0.5, 1e-15);
}

TEST(MixtureQuantile, SingleComponentIsNormalQuantile) {
  const Eigen::VectorXd m = Eigen::VectorXd::Constant(1, 2.0);
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(1, 3.0);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
  EXPECT_NEAR(stats::normal_mixture_quantile(m, s, w, 0.975), 2.0 + 3.0 * 1.959963984540054, 1e-9);
  EXPECT_NEAR(stats::normal_mixture_quantile(m, s, w, 0.5), 2.0, 1e-9);
}

TEST(MixtureQuantile, SymmetricMixtureAndPointMasses) {
  const Eigen::VectorXd m = Eigen::Vector2d(-1.0, 1.0);
  const Eigen::VectorXd s = Eigen::Vector2d(0.5, 0.5);
  const Eigen::VectorXd w = Eigen::Vector2d(0.5, 0.5);
  EXPECT_NEAR(stats::normal_mixture_quantile(m, s, w, 0.5), 0.0, 1e-9);
  const double q = stats::normal_mixture_quantile(m, s, w, 0.9);
  const double cdf = 0.5 * (0.5 * std::erfc(-(q + 1.0) / (0.5 * std::sqrt(2.0))) +
                            0.5 * std::erfc(-(q - 1.0) / (0.5 * std::sqrt(2.0))));
  EXPECT_NEAR(cdf, 0.9, 1e-9);
  const Eigen::VectorXd zero = Eigen::Vector2d::Zero();
  EXPECT_NEAR(stats::normal_mixture_quantile(m, zero, Eigen::Vector2d(0.3, 0.7), 0.1), -1.0, 1e-9);
  EXPECT_THROW(stats::normal_mixture_quantile(m, s, w, 1.0), DomainError);
}
