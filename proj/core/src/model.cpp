#include "sdlm/model.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "sdlm/error.hpp"

namespace sdlm {

namespace {

constexpr double kOmega = 2.0 * std::numbers::pi / kPeriodHours;

Eigen::MatrixXd compute_distances(const std::vector<Location>& locations) {
  const auto n = static_cast<Eigen::Index>(locations.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx = locations[i].easting_km - locations[j].easting_km;
      const double dy = locations[i].northing_km - locations[j].northing_km;
      d(i, j) = d(j, i) = std::hypot(dx, dy);
    }
  }
  return d;
}

}  // namespace

DlmSpec::DlmSpec(Family family, int harmonics, std::vector<Location> locations)
    : family_(family), harmonics_(harmonics), locations_(std::move(locations)) {
  if (locations_.empty()) throw ConfigError("locations: at least one site is required");
  if (family_ == Family::Fourier && harmonics_ < 1)
    throw ConfigError("model: Fourier form needs q >= 1 harmonics");
  std::set<int> ids;
  for (std::size_t i = 0; i < locations_.size(); ++i) {
    if (locations_[i].id != static_cast<int>(i))
      throw ConfigError("locations: ids must be 0..L-1 in order, got " +
                        std::to_string(locations_[i].id) + " at position " + std::to_string(i));
    ids.insert(locations_[i].id);
  }
  distances_ = compute_distances(locations_);
}

DlmSpec DlmSpec::sinusoid(std::vector<Location> locations) {
  return DlmSpec(Family::Sinusoid, 0, std::move(locations));
}

DlmSpec DlmSpec::fourier(int harmonics, std::vector<Location> locations) {
  return DlmSpec(Family::Fourier, harmonics, std::move(locations));
}

DlmSpec DlmSpec::humidity(std::vector<Location> locations) {
  return DlmSpec(Family::HumidityConditional, 0, std::move(locations));
}

DlmSpec DlmSpec::parse(std::string_view selector, std::vector<Location> locations) {
  if (selector == "sinusoid") return sinusoid(std::move(locations));
  if (selector == "humidity") return humidity(std::move(locations));
  if (selector.starts_with("fourier:")) {
    const std::string q_text(selector.substr(8));
    std::size_t used = 0;
    int q = 0;
    try {
      q = std::stoi(q_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != q_text.size() || q < 1)
      throw ConfigError("model: bad harmonic count in '" + std::string(selector) + "'");
    return fourier(q, std::move(locations));
  }
  throw ConfigError("model: expected sinusoid, fourier:<q> or humidity, got '" +
                    std::string(selector) + "'");
}

int DlmSpec::state_dim_per_site() const {
  switch (family_) {
    case Family::Sinusoid:
      return 3;
    case Family::Fourier:
      return 2 * harmonics_ + 1;
    case Family::HumidityConditional:
      return 2;
  }
  return 0;
}

int DlmSpec::num_params() const {
  const int m = state_dim_per_site();
  return num_sites() * m + num_sites() + 2 * m;
}

std::string DlmSpec::name() const {
  switch (family_) {
    case Family::Sinusoid:
      return "sinusoid";
    case Family::Fourier:
      return "fourier:" + std::to_string(harmonics_);
    case Family::HumidityConditional:
      return "humidity";
  }
  return {};
}

StaticParams::StaticParams(int sites, int channels)
    : sites_(sites), channels_(channels),
      flat_(Eigen::VectorXd::Zero(sites * channels + sites + 2 * channels)) {}

StaticParams::StaticParams(int sites, int channels, Eigen::VectorXd flat)
    : sites_(sites), channels_(channels), flat_(std::move(flat)) {
  if (flat_.size() != sites * channels + sites + 2 * channels)
    throw InputError("static parameter vector has length " + std::to_string(flat_.size()) +
                     ", expected " + std::to_string(sites * channels + sites + 2 * channels));
}

StaticParams StaticParams::uniform(const DlmSpec& spec, double w, double v, double sigma2,
                                   double psi) {
  StaticParams p(spec.num_sites(), spec.state_dim_per_site());
  p.w().setConstant(w);
  p.v().setConstant(v);
  p.sigma2().setConstant(sigma2);
  p.psi().setConstant(psi);
  return p;
}

bool StaticParams::valid(double bound, bool w_lt_v) const {
  for (Eigen::Index i = 0; i < flat_.size(); ++i) {
    if (!(flat_[i] > 0.0) || !(flat_[i] <= bound)) return false;
  }
  if (w_lt_v) {
    for (int j = 0; j < sites_; ++j) {
      for (int c = 0; c < channels_; ++c) {
        if (!(flat_[w_index(j, c)] < flat_[v_index(j)])) return false;
      }
    }
  }
  return true;
}

std::vector<std::string> StaticParams::names(int sites, int channels) {
  std::vector<std::string> out;
  for (int j = 0; j < sites; ++j)
    for (int c = 0; c < channels; ++c)
      out.push_back("W" + std::to_string(c + 1) + "_s" + std::to_string(j + 1));
  for (int j = 0; j < sites; ++j) out.push_back("V_s" + std::to_string(j + 1));
  for (int c = 0; c < channels; ++c) out.push_back("sigma2_" + std::to_string(c + 1));
  for (int c = 0; c < channels; ++c) out.push_back("psi_" + std::to_string(c + 1));
  return out;
}

double gp_cov(const GpCovariance& gp, double distance_km) {
  if (!(distance_km >= 0.0)) throw DomainError("gp_cov: distance must be non-negative");
  return gp.sigma2 * std::exp(-gp.psi * distance_km);
}

Eigen::MatrixXd build_spatial_K(const DlmSpec& spec, const StaticParams& params) {
  const int sites = spec.num_sites();
  const int m = spec.state_dim_per_site();
  const Eigen::MatrixXd& d = spec.distances();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(sites * m, sites * m);
  for (int c = 0; c < m; ++c) {
    const GpCovariance gp{params.sigma2()[c], params.psi()[c]};
    for (int j = 0; j < sites; ++j) {
      k(j * m + c, j * m + c) = gp.sigma2;
      for (int jp = j + 1; jp < sites; ++jp) {
        const double f = gp_cov(gp, d(j, jp));
        k(j * m + c, jp * m + c) = f;
        k(jp * m + c, j * m + c) = f;
      }
    }
  }
  return k;
}

Incidence::Incidence(const std::vector<bool>& mask) : sites_(static_cast<int>(mask.size())) {
  for (int j = 0; j < sites_; ++j)
    if (mask[j]) observed_.push_back(j);
}

Eigen::VectorXd Incidence::apply(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(rows());
  for (int r = 0; r < rows(); ++r) out[r] = full[observed_[r]];
  return out;
}

Eigen::MatrixXd Incidence::dense() const {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(rows(), sites_);
  for (int r = 0; r < rows(); ++r) p(r, observed_[r]) = 1.0;
  return p;
}

Incidence build_incidence(const std::vector<bool>& mask) { return Incidence(mask); }

namespace {

void fill_site_row(const DlmSpec& spec, double t_hours, double regressor, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  switch (spec.family()) {
    case Family::Sinusoid:
      row[0] = std::cos(kOmega * t_hours);
      row[1] = std::sin(kOmega * t_hours);
      row[2] = 1.0;
      break;
    case Family::Fourier:
      for (int r = 0; r < spec.harmonics(); ++r) {
        row[2 * r] = 1.0;
        row[2 * r + 1] = 0.0;
      }
      row[2 * spec.harmonics()] = 1.0;
      break;
    case Family::HumidityConditional:
      row[0] = regressor;
      row[1] = 1.0;
      break;
  }
}

}  // namespace

Eigen::MatrixXd obs_matrix(const DlmSpec& spec, double t_hours, const Eigen::VectorXd* regressors) {
  const int sites = spec.num_sites();
  const int m = spec.state_dim_per_site();
  if (spec.needs_regressors() && (regressors == nullptr || regressors->size() != sites))
    throw InputError("obs_matrix: humidity model needs one temperature regressor per site");
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(sites, sites * m);
  for (int j = 0; j < sites; ++j) {
    const double x = spec.needs_regressors() ? (*regressors)[j] : 0.0;
    fill_site_row(spec, t_hours, x, f.block(j, j * m, 1, m));
  }
  return f;
}

Eigen::MatrixXd observed_obs_matrix(const DlmSpec& spec, double t_hours, const Incidence& incidence,
                                    const Eigen::VectorXd* regressors) {
  const int m = spec.state_dim_per_site();
  if (spec.needs_regressors() && (regressors == nullptr || regressors->size() != spec.num_sites()))
    throw InputError("observed_obs_matrix: humidity model needs one temperature regressor per site");
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(incidence.rows(), spec.state_dim());
  for (int r = 0; r < incidence.rows(); ++r) {
    const int j = incidence.observed()[r];
    double x = 0.0;
    if (spec.needs_regressors()) {
      x = (*regressors)[j];
      if (!std::isfinite(x))
        throw InputError("humidity observed at site " + std::to_string(j) + " (t=" +
                         std::to_string(t_hours) + ") without a temperature regressor");
    }
    fill_site_row(spec, t_hours, x, f.block(r, j * m, 1, m));
  }
  return f;
}

Eigen::Matrix2d harmonic_matrix(int r, double dt_hours) {
  const double angle = kOmega * r * dt_hours;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix2d h;
  h << c, s, -s, c;
  return h;
}

Eigen::MatrixXd system_matrix(const DlmSpec& spec, double dt_hours) {
  const int d = spec.state_dim();
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(d, d);
  if (spec.family() != Family::Fourier) return g;
  const int m = spec.state_dim_per_site();
  for (int j = 0; j < spec.num_sites(); ++j) {
    for (int r = 1; r <= spec.harmonics(); ++r) {
      const int at = j * m + 2 * (r - 1);
      g.block<2, 2>(at, at) = harmonic_matrix(r, dt_hours);
    }
  }
  return g;
}

AmplitudePhase amplitude_phase(const Eigen::Vector3d& state) {
  AmplitudePhase out;
  out.amplitude = std::hypot(state[0], state[1]);
  if (state[0] != 0.0 || state[1] != 0.0) out.phase = std::atan2(state[1], state[0]);
  out.basal = state[2];
  return out;
}

ParamModel::ParamModel(const DlmSpec& spec, const StaticParams& params)
    : params_(params), K_(build_spatial_K(spec, params)) {}

void ParamModel::system_noise(double dt, Eigen::MatrixXd& out) const {
  out = K_;
  out.diagonal() += dt * params_.w();
}

}  // namespace sdlm
