#include "oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

int Model::per_site() const {
  switch (kind) {
    case Kind::Sinusoid: return 3;
    case Kind::Fourier: return 2 * q + 1;
    case Kind::Humidity: return 2;
  }
  return 0;
}

Model from_library(const sdlm::DlmSpec& spec, const sdlm::StaticParams& params, const sdlm::StatePrior& prior) {
  Model m;
  switch (spec.family()) {
    case sdlm::Family::Sinusoid: m.kind = Kind::Sinusoid; break;
    case sdlm::Family::Fourier: m.kind = Kind::Fourier; break;
    case sdlm::Family::HumidityConditional: m.kind = Kind::Humidity; break;
  }
  m.q = spec.harmonics();
  for (const auto& loc : spec.locations()) m.coords.emplace_back(loc.easting_km, loc.northing_km);
  m.w = params.w();
  m.v = params.v();
  m.sigma2 = params.sigma2();
  m.psi = params.psi();
  m.m0 = prior.m0;
  m.C0 = prior.C0;
  return m;
}

namespace {

Eigen::RowVectorXd site_row(const Model& model, double t, double regressor) {
  const int m = model.per_site();
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
  switch (model.kind) {
    case Kind::Sinusoid:
      row << std::cos(std::numbers::pi * t / 12.0), std::sin(std::numbers::pi * t / 12.0), 1.0;
      break;
    case Kind::Fourier:
      for (int r = 0; r < model.q; ++r) row[2 * r] = 1.0;
      row[m - 1] = 1.0;
      break;
    case Kind::Humidity:
      row << regressor, 1.0;
      break;
  }
  return row;
}

Eigen::MatrixXd transition(const Model& model, double dt) {
  const int m = model.per_site();
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(model.dim(), model.dim());
  if (model.kind != Kind::Fourier) return G;
  for (int j = 0; j < model.sites(); ++j) {
    for (int r = 1; r <= model.q; ++r) {
      const double a = std::numbers::pi * r * dt / 12.0;
      const int at = j * m + 2 * (r - 1);
      G(at, at) = std::cos(a);
      G(at, at + 1) = std::sin(a);
      G(at + 1, at) = -std::sin(a);
      G(at + 1, at + 1) = std::cos(a);
    }
  }
  return G;
}

Eigen::MatrixXd system_noise(const Model& model, double dt) {
  const int m = model.per_site();
  const int L = model.sites();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(model.dim(), model.dim());
  for (int a = 0; a < L; ++a) {
    for (int b = 0; b < L; ++b) {
      const double d = std::hypot(model.coords[a].first - model.coords[b].first,
                                  model.coords[a].second - model.coords[b].second);
      for (int c = 0; c < m; ++c) W(a * m + c, b * m + c) = model.sigma2[c] * std::exp(-model.psi[c] * d);
    }
  }
  for (int i = 0; i < model.dim(); ++i) W(i, i) += dt * model.w[i];
  return W;
}

}  // namespace

Joint build_joint(const Model& model, std::span<const sdlm::Measurement> data) {
  const int n = static_cast<int>(data.size());
  const int D = model.dim();
  const int m = model.per_site();
  Joint j;
  j.state_mean.resize(n * D);
  j.state_cov = Eigen::MatrixXd::Zero(n * D, n * D);

  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      j.state_mean.segment(0, D) = model.m0;
      j.state_cov.block(0, 0, D, D) = model.C0;
      continue;
    }
    const double dt = data[i].time - data[i - 1].time;
    const Eigen::MatrixXd G = transition(model, dt);
    j.state_mean.segment(i * D, D) = G * j.state_mean.segment((i - 1) * D, D);
    // Cov(theta_i, theta_k) = G Cov(theta_{i-1}, theta_k) for k < i.
    for (int k = 0; k < i; ++k) {
      j.state_cov.block(i * D, k * D, D, D) = G * j.state_cov.block((i - 1) * D, k * D, D, D);
      j.state_cov.block(k * D, i * D, D, D) = j.state_cov.block(i * D, k * D, D, D).transpose();
    }
    j.state_cov.block(i * D, i * D, D, D) =
        G * j.state_cov.block((i - 1) * D, (i - 1) * D, D, D) * G.transpose() + system_noise(model, dt);
  }

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> ys, vs;
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < model.sites(); ++s) {
      const double y = data[i].values[s];
      if (std::isnan(y)) continue;
      const double x = data[i].regressors.size() > 0 ? data[i].regressors[s] : 0.0;
      Eigen::RowVectorXd h = Eigen::RowVectorXd::Zero(n * D);
      h.segment(i * D + s * m, m) = site_row(model, data[i].time, x);
      rows.push_back(h);
      ys.push_back(y);
      vs.push_back(model.v[s]);
    }
  }
  j.H.resize(static_cast<Eigen::Index>(rows.size()), n * D);
  j.y.resize(static_cast<Eigen::Index>(rows.size()));
  j.obs_var.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    j.H.row(r) = rows[r];
    j.y[r] = ys[r];
    j.obs_var[r] = vs[r];
  }
  return j;
}

double log_normal_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) throw std::runtime_error("oracle: covariance not PD");
  const Eigen::VectorXd r = x - mean;
  const double quad = r.dot(ldlt.solve(r));
  const double log_det = ldlt.vectorD().array().log().sum();
  return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) + log_det + quad);
}

double log_likelihood(const Model& model, std::span<const sdlm::Measurement> data) {
  const Joint j = build_joint(model, data);
  if (j.y.size() == 0) return 0.0;
  const Eigen::MatrixXd S = j.H * j.state_cov * j.H.transpose() + Eigen::MatrixXd(j.obs_var.asDiagonal());
  return log_normal_density(j.y, j.H * j.state_mean, S);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> smoothing(const Model& model, std::span<const sdlm::Measurement> data) {
  const Joint j = build_joint(model, data);
  if (j.y.size() == 0) return {j.state_mean, j.state_cov};
  const Eigen::MatrixXd S = j.H * j.state_cov * j.H.transpose() + Eigen::MatrixXd(j.obs_var.asDiagonal());
  const Eigen::MatrixXd cross = j.state_cov * j.H.transpose();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  const Eigen::VectorXd mean = j.state_mean + cross * ldlt.solve(j.y - j.H * j.state_mean);
  const Eigen::MatrixXd cov = j.state_cov - cross * ldlt.solve(cross.transpose());
  return {mean, cov};
}

}  // namespace oracle
