#include "sdlm/filter.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sdlm/error.hpp"

namespace sdlm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

// Conditions N(m, C) on y = F theta + v, v ~ N(0, diag(v_obs)). Returns log N(y; F m, F C Fᵀ + V).
double assimilate(Eigen::VectorXd& m, Eigen::MatrixXd& C, const StepDesign& step,
                  const ParamModel& model, FilterWorkspace& ws) {
  const int n = step.incidence.rows();
  if (n == 0) return 0.0;

  // F has one non-zero block of width `w` per row, at the observed site.
  const auto& sites = step.incidence.observed();
  const Eigen::Index w = C.rows() / step.incidence.sites();
  const auto v = model.params().v();
  ws.A.resize(n, C.cols());
  ws.S.resize(n, n);
  ws.e.resize(n);
  for (int r = 0; r < n; ++r) {
    const Eigen::Index at = sites[r] * w;
    const auto f = step.F.row(r).segment(at, w);
    ws.A.row(r).noalias() = f.lazyProduct(C.middleRows(at, w));
    ws.e[r] = step.y[r] - f.dot(m.segment(at, w));
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c <= r; ++c) {
      const Eigen::Index at = sites[c] * w;
      ws.S(r, c) = ws.A.row(r).segment(at, w).dot(step.F.row(c).segment(at, w));
      ws.S(c, r) = ws.S(r, c);
    }
    ws.S(r, r) += v[sites[r]];
  }
  ws.chol.compute(ws.S, step.time);

  // With S = L Lᵀ: Z = L⁻¹ A, u = L⁻¹ e, so m += Zᵀ u and C -= Zᵀ Z.
  const auto& L = ws.chol.llt().matrixLLT();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < r; ++c) {
      ws.A.row(r) -= L(r, c) * ws.A.row(c);
      ws.e[r] -= L(r, c) * ws.e[c];
    }
    ws.A.row(r) /= L(r, r);
    ws.e[r] /= L(r, r);
  }
  const double quad = ws.e.squaredNorm();
  const double loglik = -0.5 * (n * kLog2Pi + ws.chol.log_det() + quad);

  m.noalias() += ws.A.transpose() * ws.e;
  // Rank-one downdates keep C exactly symmetric.
  for (int r = 0; r < n; ++r) C.noalias() -= ws.A.row(r).transpose() * ws.A.row(r);
  return loglik;
}

void record(FilterState& state, double time, double increment) {
  state.loglik_total += increment;
  state.loglik_window += increment;
  state.t_last = time;
  ++state.steps;
}

void propagate(Eigen::VectorXd& m, Eigen::MatrixXd& C, const Transition& transition, double dt,
               const ParamModel& model) {
  if (!transition.identity()) {
    transition.apply(m);
    transition.conjugate(C);
    linalg::symmetrize(C);
  }
  C += model.K();
  C.diagonal().noalias() += dt * model.params().w();
}

}  // namespace

StatePrior StatePrior::default_for(const DlmSpec& spec) {
  const int m = spec.state_dim_per_site();
  StatePrior prior;
  prior.m0 = Eigen::VectorXd::Zero(spec.state_dim());
  prior.C0 = Eigen::MatrixXd::Identity(spec.state_dim(), spec.state_dim());
  for (int j = 0; j < spec.num_sites(); ++j) {
    if (spec.family() == Family::HumidityConditional) {
      prior.m0[j * m] = -1.0;
      prior.m0[j * m + 1] = 90.0;
    } else {
      prior.m0[j * m + m - 1] = 17.0;
    }
  }
  return prior;
}

double filter_init(FilterState& state, const StatePrior& prior, const StepDesign& step,
                   const ParamModel& model, FilterWorkspace& ws) {
  state.m = prior.m0;
  state.C = prior.C0;
  state.loglik_total = 0.0;
  state.loglik_window = 0.0;
  state.steps = 0;
  const double inc = assimilate(state.m, state.C, step, model, ws);
  record(state, step.time, inc);
  return inc;
}

double filter_step(FilterState& state, const StepDesign& step, const ParamModel& model,
                   FilterWorkspace& ws) {
  const double dt = step.time - state.t_last;
  if (!(dt > 0.0))
    throw InputError("filter_step: time " + std::to_string(step.time) + " is not after " +
                     std::to_string(state.t_last));
  if (std::abs(dt - step.dt) > 1e-9 * std::max(1.0, std::abs(step.time)))
    throw StateError("filter_step: step was built for a different predecessor time");
  propagate(state.m, state.C, step.transition, step.dt, model);
  const double inc = assimilate(state.m, state.C, step, model, ws);
  record(state, step.time, inc);
  return inc;
}

FilterUpdate filter_init(const StatePrior& prior, const StepDesign& step, const ParamModel& model) {
  FilterWorkspace ws;
  FilterUpdate out;
  out.increment = filter_init(out.state, prior, step, model, ws);
  return out;
}

FilterUpdate filter_step(const FilterState& state, const StepDesign& step, const ParamModel& model) {
  FilterWorkspace ws;
  FilterUpdate out{state, 0.0};
  out.increment = filter_step(out.state, step, model, ws);
  return out;
}

double run_filter(const StatePrior& prior, std::span<const StepDesign> steps, const ParamModel& model,
                  FilterState* final_state, std::vector<FilterState>* history) {
  if (steps.empty()) return 0.0;
  FilterWorkspace ws;
  FilterState state;
  filter_init(state, prior, steps.front(), model, ws);
  if (history != nullptr) {
    history->clear();
    history->reserve(steps.size());
    history->push_back(state);
  }
  for (std::size_t i = 1; i < steps.size(); ++i) {
    filter_step(state, steps[i], model, ws);
    if (history != nullptr) history->push_back(state);
  }
  const double total = state.loglik_total;
  if (final_state != nullptr) *final_state = std::move(state);
  return total;
}

double replay(FilterState& state, std::span<const StepDesign> steps, const ParamModel& model,
              FilterWorkspace& ws) {
  double sum = 0.0;
  for (const auto& step : steps) sum += filter_step(state, step, model, ws);
  return sum;
}

SmoothingDraw backward_sample(std::span<const FilterState> history, std::span<const StepDesign> steps,
                              const DlmSpec& spec, const ParamModel& model, Rng& rng) {
  if (history.empty() || history.size() != steps.size())
    throw StateError("backward_sample: a stored forward pass is required for every step");
  const std::size_t n = history.size();
  SmoothingDraw draw;
  draw.states.resize(n);
  draw.states[n - 1] = linalg::sample_mvn(history[n - 1].m, history[n - 1].C, rng);

  Eigen::MatrixXd W;
  linalg::JitteredCholesky chol;
  for (std::size_t idx = n - 1; idx-- > 0;) {
    const FilterState& f = history[idx];
    const StepDesign& next = steps[idx + 1];
    const Eigen::MatrixXd G = system_matrix(spec, next.dt);
    model.system_noise(next.dt, W);
    const Eigen::MatrixXd GC = G * f.C;
    Eigen::MatrixXd R = GC * G.transpose() + W;
    linalg::symmetrize(R);
    chol.compute(R, next.time);
    Eigen::MatrixXd Bt = GC;  // Bᵀ = R⁻¹ G C
    chol.solve_in_place(Bt);
    const Eigen::VectorXd mean = f.m + Bt.transpose() * (draw.states[idx + 1] - G * f.m);
    Eigen::MatrixXd cov = f.C - Bt.transpose() * GC;
    linalg::symmetrize(cov);
    draw.states[idx] = linalg::sample_mvn(mean, cov, rng);
  }
  return draw;
}

std::vector<Eigen::VectorXd> predict_within_sample(const SmoothingDraw& draw,
                                                   std::span<const Measurement> data,
                                                   const DlmSpec& spec, const ParamModel& model,
                                                   Rng& rng) {
  if (draw.states.size() != data.size())
    throw StateError("predict_within_sample: draw and data lengths differ");
  const Eigen::ArrayXd sd = model.params().v().array().sqrt();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::VectorXd* reg = spec.needs_regressors() ? &data[i].regressors : nullptr;
    const Eigen::MatrixXd F = obs_matrix(spec, data[i].time, reg);
    Eigen::VectorXd x = F * draw.states[i];
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] += sd[j] * normal(rng);
    out.push_back(std::move(x));
  }
  return out;
}

namespace {

Eigen::MatrixXd forecast_obs_matrix(const DlmSpec& spec, double time,
                                    std::span<const Eigen::VectorXd> regressors, int h) {
  if (!spec.needs_regressors()) return obs_matrix(spec, time);
  if (static_cast<int>(regressors.size()) < h)
    throw InputError("forecast: humidity model needs temperature regressors for every horizon");
  return obs_matrix(spec, time, &regressors[h - 1]);
}

}  // namespace

std::vector<ForecastMoments> forecast_moments(const FilterState& state, int horizon, double step_hours,
                                              const DlmSpec& spec, const ParamModel& model,
                                              std::span<const Eigen::VectorXd> regressors) {
  if (horizon < 1) throw ConfigError("horizon: must be at least 1");
  if (!(step_hours > 0.0)) throw ConfigError("step_hours: must be positive");
  Eigen::VectorXd m = state.m;
  Eigen::MatrixXd C = state.C;
  const Transition transition = Transition::for_spec(spec, step_hours);
  std::vector<ForecastMoments> out;
  for (int h = 1; h <= horizon; ++h) {
    propagate(m, C, transition, step_hours, model);
    const double time = state.t_last + h * step_hours;
    const Eigen::MatrixXd F = forecast_obs_matrix(spec, time, regressors, h);
    ForecastMoments fm;
    fm.time = time;
    fm.mean = F * m;
    fm.cov = F * C * F.transpose();
    fm.cov.diagonal() += model.params().v();
    out.push_back(std::move(fm));
  }
  return out;
}

std::vector<Eigen::VectorXd> forecast(const FilterState& state, int horizon, double step_hours,
                                      const DlmSpec& spec, const ParamModel& model, Rng& rng,
                                      std::span<const Eigen::VectorXd> regressors) {
  if (horizon < 1) throw ConfigError("horizon: must be at least 1");
  if (!(step_hours > 0.0)) throw ConfigError("step_hours: must be positive");
  const Transition transition = Transition::for_spec(spec, step_hours);
  Eigen::MatrixXd W;
  model.system_noise(step_hours, W);
  const Eigen::MatrixXd w_factor = linalg::psd_factor(W);
  const Eigen::ArrayXd sd = model.params().v().array().sqrt();

  Eigen::VectorXd theta = linalg::sample_mvn(state.m, state.C, rng);
  std::vector<Eigen::VectorXd> out;
  for (int h = 1; h <= horizon; ++h) {
    transition.apply(theta);
    theta += w_factor * linalg::standard_normal(theta.size(), rng);
    const double time = state.t_last + h * step_hours;
    const Eigen::MatrixXd F = forecast_obs_matrix(spec, time, regressors, h);
    Eigen::VectorXd x = F * theta;
    x.array() += sd * linalg::standard_normal(x.size(), rng).array();
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace sdlm
