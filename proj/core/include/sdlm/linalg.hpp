#pragma once

#include <Eigen/Dense>

#include <optional>

#include "sdlm/rng.hpp"

namespace sdlm::linalg {

inline constexpr double kJitterStart = 1e-12;
inline constexpr double kJitterMax = 1e-6;

/// Cholesky factorisation of a symmetric positive-definite matrix with jitter
/// escalation kJitterStart -> kJitterMax (factor 10 per retry). Throws
/// NumericalError tagged with `time` when every attempt fails.
class JitteredCholesky {
 public:
  JitteredCholesky() = default;

  void compute(const Eigen::MatrixXd& a, std::optional<double> time = std::nullopt);

  const Eigen::LLT<Eigen::MatrixXd>& llt() const { return llt_; }
  double log_det() const;
  /// Jitter that was needed, zero when the plain factorisation succeeded.
  double jitter() const { return jitter_; }

  template <typename Rhs>
  void solve_in_place(Rhs&& rhs) const {
    llt_.solveInPlace(rhs);
  }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd scratch_;
  double jitter_ = 0.0;
};

/// Copies the average of `a` and its transpose into `a`.
void symmetrize(Eigen::MatrixXd& a);

/// log N(x; mean, cov) for a PD covariance.
double mvn_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                       const Eigen::MatrixXd& cov);

/// Factor L with L Lᵀ = cov for a symmetric positive semi-definite `cov`.
/// Negative pivots produced by rounding are clamped to zero, so a zero matrix
/// yields a zero factor.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov);

/// One draw from N(mean, cov); `cov` may be singular.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng);

/// Standard-normal vector of length n.
Eigen::VectorXd standard_normal(Eigen::Index n, Rng& rng);

double min_eigenvalue(const Eigen::MatrixXd& a);

}  // namespace sdlm::linalg
