#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "sdlm/linalg.hpp"
#include "sdlm/model.hpp"
#include "sdlm/observation.hpp"
#include "sdlm/rng.hpp"

namespace sdlm {

/// Gaussian prior of the state at the first observation time.
struct StatePrior {
  Eigen::VectorXd m0;
  Eigen::MatrixXd C0;

  /// Sinusoid: (0, 0, 17) per site. Fourier: zeros with basal 17. Humidity:
  /// (-1, 90) per site. Identity covariance in every case.
  static StatePrior default_for(const DlmSpec& spec);
};

/// Posterior summary of the state after the last assimilated record.
struct FilterState {
  Eigen::VectorXd m;
  Eigen::MatrixXd C;
  double loglik_total = 0.0;
  double loglik_window = 0.0;
  double t_last = -std::numeric_limits<double>::infinity();
  std::size_t steps = 0;
};

/// Scratch storage reused across filter steps to avoid per-step allocation.
struct FilterWorkspace {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> A;
  Eigen::MatrixXd S;
  Eigen::VectorXd e;
  linalg::JitteredCholesky chol;
};

/// Assimilates the first record into `state`, starting from `prior`.
/// Returns log N(y; F m0, F C0 Fᵀ + V); zero when nothing is observed.
double filter_init(FilterState& state, const StatePrior& prior, const StepDesign& step,
                   const ParamModel& model, FilterWorkspace& ws);

/// Propagates `state` to `step.time` (C <- G C Gᵀ + k² diag(W) + K) and
/// assimilates the observed sites. Returns the log-likelihood increment.
/// Throws InputError when the step is not strictly later than `state.t_last`.
double filter_step(FilterState& state, const StepDesign& step, const ParamModel& model,
                   FilterWorkspace& ws);

struct FilterUpdate {
  FilterState state;
  double increment = 0.0;
};

FilterUpdate filter_init(const StatePrior& prior, const StepDesign& step, const ParamModel& model);
FilterUpdate filter_step(const FilterState& state, const StepDesign& step, const ParamModel& model);

/// Full forward pass over `steps`. When `history` is given it receives the
/// state after every step. Returns the total observed-data log-likelihood.
double run_filter(const StatePrior& prior, std::span<const StepDesign> steps, const ParamModel& model,
                  FilterState* final_state = nullptr, std::vector<FilterState>* history = nullptr);

/// Continues `state` over `steps`; returns the summed increments.
double replay(FilterState& state, std::span<const StepDesign> steps, const ParamModel& model,
              FilterWorkspace& ws);

/// States theta_{t_1..t_n} drawn jointly from the smoothing distribution.
struct SmoothingDraw {
  std::vector<Eigen::VectorXd> states;
};

/// Backward sampler: theta_n ~ N(m_n, C_n), then
/// theta_i | theta_{i+1} ~ N(m_i + B (theta_{i+1} - G m_i), C_i - B R Bᵀ),
/// R = G C_i Gᵀ + W̃_{i+1}, B = C_i Gᵀ R⁻¹.
/// `history[i]` is the filtering state after `steps[i]`.
SmoothingDraw backward_sample(std::span<const FilterState> history, std::span<const StepDesign> steps,
                              const DlmSpec& spec, const ParamModel& model, Rng& rng);

/// Within-sample predictive draw X_i ~ N(F_i theta_i, diag(V)) at every site,
/// observed or not. Humidity sites without a regressor come back as NaN.
std::vector<Eigen::VectorXd> predict_within_sample(const SmoothingDraw& draw,
                                                   std::span<const Measurement> data,
                                                   const DlmSpec& spec, const ParamModel& model,
                                                   Rng& rng);

struct ForecastMoments {
  double time = 0.0;
  Eigen::VectorXd mean;  ///< length L
  Eigen::MatrixXd cov;   ///< L x L
};

/// Exact Gaussian k-step predictive moments of the observations at all sites
/// for a fixed parameter value. Humidity models need one regressor vector per
/// horizon step.
std::vector<ForecastMoments> forecast_moments(const FilterState& state, int horizon, double step_hours,
                                              const DlmSpec& spec, const ParamModel& model,
                                              std::span<const Eigen::VectorXd> regressors = {});

/// One joint draw of the observations at horizons 1..`horizon`, propagating a
/// sampled state through the system equation.
std::vector<Eigen::VectorXd> forecast(const FilterState& state, int horizon, double step_hours,
                                      const DlmSpec& spec, const ParamModel& model, Rng& rng,
                                      std::span<const Eigen::VectorXd> regressors = {});

}  // namespace sdlm
