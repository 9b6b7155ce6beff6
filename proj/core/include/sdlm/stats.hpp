#pragma once

#include <Eigen/Dense>

#include <span>

namespace sdlm::stats {

/// log(sum(exp(x))); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> x);

/// Subtracts log_sum_exp so that the weights sum to one; returns the removed
/// constant. Throws StateError when every weight is -inf.
double normalize_log_weights(std::span<double> log_weights);

/// Effective sample size 1 / sum(w_k²) of the normalised weights, clamped to
/// [1, N]. Throws StateError when every weight is -inf.
double ess(std::span<const double> log_weights);

/// Normalised linear-scale weights.
Eigen::VectorXd normalized_weights(std::span<const double> log_weights);

/// Rows of `samples` are observations.
Eigen::VectorXd weighted_mean(const Eigen::MatrixXd& samples, const Eigen::VectorXd& weights);
/// Weighted covariance with normalised weights, divisor 1 (no bias correction).
Eigen::MatrixXd weighted_cov(const Eigen::MatrixXd& samples, const Eigen::VectorXd& weights);

/// Weighted quantile with type-7 plotting positions p_k = (S_k - w_k) / (1 - w_n)
/// on the sorted sample, where S_k is the cumulative weight. Equal weights
/// reproduce the usual type-7 estimator.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q);

/// Two-sample Kolmogorov-Smirnov statistic between weighted empirical CDFs.
double weighted_ks(std::span<const double> a, std::span<const double> wa, std::span<const double> b,
                   std::span<const double> wb);

/// Quantile of the Gaussian mixture sum_k w_k N(means_k, sds_k²), found by
/// bisection on the mixture CDF. Zero standard deviations act as point masses.
double normal_mixture_quantile(const Eigen::VectorXd& means, const Eigen::VectorXd& sds,
                               const Eigen::VectorXd& weights, double q);

}  // namespace sdlm::stats
