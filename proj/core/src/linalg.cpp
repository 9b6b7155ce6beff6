#include "sdlm/linalg.hpp"

#include <cmath>
#include <numbers>

#include "sdlm/error.hpp"

namespace sdlm::linalg {

void JitteredCholesky::compute(const Eigen::MatrixXd& a, std::optional<double> time) {
  jitter_ = 0.0;
  llt_.compute(a);
  if (llt_.info() == Eigen::Success) return;

  for (double jitter = kJitterStart; jitter <= kJitterMax * (1.0 + 1e-9); jitter *= 10.0) {
    scratch_ = a;
    scratch_.diagonal().array() += jitter;
    llt_.compute(scratch_);
    if (llt_.info() == Eigen::Success) {
      jitter_ = jitter;
      return;
    }
  }
  throw NumericalError("covariance not positive definite at maximum jitter", time);
}

double JitteredCholesky::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

void symmetrize(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  }
}

double mvn_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                       const Eigen::MatrixXd& cov) {
  JitteredCholesky chol;
  chol.compute(cov);
  Eigen::VectorXd r = x - mean;
  const Eigen::VectorXd z = chol.llt().matrixL().solve(r);
  const double n = static_cast<double>(x.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + chol.log_det() + z.squaredNorm());
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
  const Eigen::Index n = cov.rows();
  if (n == 0) return Eigen::MatrixXd(0, 0);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  Eigen::VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd l = ldlt.matrixL();
  Eigen::MatrixXd scaled = l * d.asDiagonal();
  // cov = Pᵀ L D Lᵀ P
  return ldlt.transpositionsP().transpose() * scaled;
}

Eigen::VectorXd standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng) {
  return mean + psd_factor(cov) * standard_normal(mean.size(), rng);
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace sdlm::linalg
