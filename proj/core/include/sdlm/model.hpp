#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sdlm {

/// Period of the daily cycle. All harmonic formulas use hourly units, so the
/// fundamental frequency is pi/12 per hour.
inline constexpr double kPeriodHours = 24.0;

struct Location {
  int id = 0;
  std::string name;
  double easting_km = 0.0;
  double northing_km = 0.0;
};

enum class Family { Sinusoid, Fourier, HumidityConditional };

/// Structural definition of one spatial DLM: the family, the sites and the
/// cached inter-site distance matrix. Immutable after construction.
class DlmSpec {
 public:
  static DlmSpec sinusoid(std::vector<Location> locations);
  static DlmSpec fourier(int harmonics, std::vector<Location> locations);
  static DlmSpec humidity(std::vector<Location> locations);

  /// Parses "sinusoid", "fourier:<q>" or "humidity".
  static DlmSpec parse(std::string_view selector, std::vector<Location> locations);

  Family family() const { return family_; }
  int harmonics() const { return harmonics_; }
  int num_sites() const { return static_cast<int>(locations_.size()); }
  /// 3 for Sinusoid, 2q+1 for Fourier(q), 2 for HumidityConditional.
  int state_dim_per_site() const;
  int state_dim() const { return num_sites() * state_dim_per_site(); }
  /// Static parameter count: W per state component, V per site, sigma² and psi per channel.
  int num_params() const;
  bool needs_regressors() const { return family_ == Family::HumidityConditional; }

  const std::vector<Location>& locations() const { return locations_; }
  /// Euclidean distances in km, L x L.
  const Eigen::MatrixXd& distances() const { return distances_; }

  std::string name() const;

 private:
  DlmSpec(Family family, int harmonics, std::vector<Location> locations);

  Family family_;
  int harmonics_ = 0;
  std::vector<Location> locations_;
  Eigen::MatrixXd distances_;
};

/// Flattened static parameter vector, laid out as
/// [ W (L*m, site-major) | V (L) | sigma² (m) | psi (m) ].
class StaticParams {
 public:
  StaticParams() = default;
  StaticParams(int sites, int channels);
  StaticParams(int sites, int channels, Eigen::VectorXd flat);

  /// Every W equal to `w`, every V to `v`, and so on.
  static StaticParams uniform(const DlmSpec& spec, double w, double v, double sigma2, double psi);

  int sites() const { return sites_; }
  int channels() const { return channels_; }
  Eigen::Index size() const { return flat_.size(); }

  const Eigen::VectorXd& flat() const { return flat_; }
  Eigen::VectorXd& flat() { return flat_; }

  auto w() const { return flat_.segment(0, sites_ * channels_); }
  auto w() { return flat_.segment(0, sites_ * channels_); }
  auto v() const { return flat_.segment(sites_ * channels_, sites_); }
  auto v() { return flat_.segment(sites_ * channels_, sites_); }
  auto sigma2() const { return flat_.segment(sites_ * (channels_ + 1), channels_); }
  auto sigma2() { return flat_.segment(sites_ * (channels_ + 1), channels_); }
  auto psi() const { return flat_.segment(sites_ * (channels_ + 1) + channels_, channels_); }
  auto psi() { return flat_.segment(sites_ * (channels_ + 1) + channels_, channels_); }

  Eigen::Index w_index(int site, int channel) const { return site * channels_ + channel; }
  Eigen::Index v_index(int site) const { return sites_ * channels_ + site; }
  Eigen::Index sigma2_index(int channel) const { return sites_ * (channels_ + 1) + channel; }
  Eigen::Index psi_index(int channel) const { return sites_ * (channels_ + 1) + channels_ + channel; }

  /// Strict positivity, upper bound, and optionally W < V at every site.
  bool valid(double bound, bool w_lt_v) const;

  /// Column labels, e.g. "W1_s1", "V_s2", "sigma2_3", "psi_1".
  static std::vector<std::string> names(int sites, int channels);

 private:
  int sites_ = 0;
  int channels_ = 0;
  Eigen::VectorXd flat_;
};

struct GpCovariance {
  double sigma2 = 1.0;
  double psi = 1.0;
};

/// sigma2 * exp(-psi * d). Throws DomainError for d < 0.
double gp_cov(const GpCovariance& gp, double distance_km);

/// Spatial innovation covariance K: block (j, j') is diag_c f_c(d_jj').
Eigen::MatrixXd build_spatial_K(const DlmSpec& spec, const StaticParams& params);

/// Row selector for the observed sites at one time, stored as an index list.
class Incidence {
 public:
  Incidence() = default;
  explicit Incidence(const std::vector<bool>& mask);

  int sites() const { return sites_; }
  int rows() const { return static_cast<int>(observed_.size()); }
  bool empty() const { return observed_.empty(); }
  const std::vector<int>& observed() const { return observed_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& full) const;
  /// Dense n_i x L 0/1 matrix.
  Eigen::MatrixXd dense() const;

 private:
  int sites_ = 0;
  std::vector<int> observed_;
};

Incidence build_incidence(const std::vector<bool>& mask);

/// Full L x (L*m) block-diagonal observation matrix at time `t_hours`.
/// Humidity rows use `regressors` (site temperatures); a NaN regressor yields a
/// NaN row. Throws InputError when the humidity family has no regressors.
Eigen::MatrixXd obs_matrix(const DlmSpec& spec, double t_hours,
                           const Eigen::VectorXd* regressors = nullptr);

/// Incidence-projected observation matrix. Throws InputError when an observed
/// humidity site lacks a finite regressor.
Eigen::MatrixXd observed_obs_matrix(const DlmSpec& spec, double t_hours, const Incidence& incidence,
                                    const Eigen::VectorXd* regressors = nullptr);

/// 2x2 rotation advancing harmonic r by `dt_hours`.
Eigen::Matrix2d harmonic_matrix(int r, double dt_hours = 1.0);

/// State transition over `dt_hours`: identity for Sinusoid and Humidity,
/// block-diag(H_1, ..., H_q, 1) per site for Fourier(q).
Eigen::MatrixXd system_matrix(const DlmSpec& spec, double dt_hours = 1.0);

struct AmplitudePhase {
  double amplitude = 0.0;
  /// Empty when (theta1, theta2) = (0, 0).
  std::optional<double> phase;
  double basal = 0.0;
};

/// amplitude = hypot(theta1, theta2), phase = atan2(theta2, theta1), basal = theta3,
/// so that theta1 cos(wt) + theta2 sin(wt) = amplitude cos(wt - phase).
AmplitudePhase amplitude_phase(const Eigen::Vector3d& state);

/// Dense matrices of one assimilation step, mainly for inspection and tests.
struct SystemMatrices {
  Eigen::MatrixXd F;  ///< n_i x D
  Eigen::MatrixXd G;  ///< D x D
  Eigen::MatrixXd W;  ///< k_i² diag(W) + K
  Eigen::MatrixXd V;  ///< P diag(V) Pᵀ
};

/// Parameter-dependent pieces of the system, precomputed once per parameter
/// value and shared by every step of a filter pass.
class ParamModel {
 public:
  ParamModel() = default;
  ParamModel(const DlmSpec& spec, const StaticParams& params);

  const StaticParams& params() const { return params_; }
  const Eigen::MatrixXd& K() const { return K_; }

  /// out = dt * diag(W) + K, where dt = k_i².
  void system_noise(double dt, Eigen::MatrixXd& out) const;

 private:
  StaticParams params_;
  Eigen::MatrixXd K_;
};

}  // namespace sdlm
