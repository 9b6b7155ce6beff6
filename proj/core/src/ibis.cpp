#include "sdlm/ibis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "sdlm/detail/parallel_for.hpp"
#include "sdlm/error.hpp"
#include "sdlm/linalg.hpp"
#include "sdlm/stats.hpp"

namespace sdlm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kVarianceFloor = 1e-12;

FilterWorkspace& thread_workspace() {
  thread_local FilterWorkspace ws;
  return ws;
}

bool has_observations(std::span<const StepDesign> steps) {
  return std::any_of(steps.begin(), steps.end(), [](const StepDesign& s) { return !s.incidence.empty(); });
}

double sum_log(const StaticParams& p, std::span<const Eigen::Index> components) {
  double s = 0.0;
  for (Eigen::Index c : components) s += std::log(p.flat()[c]);
  return s;
}

}  // namespace

void IbisConfig::validate() const {
  if (particles < 2) throw ConfigError("particles: need at least 2");
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta: must lie in (0, 1]");
  if (!(window_hours > 0.0)) throw ConfigError("window: must be positive or inf");
  if (rejuvenation_period < 0) throw ConfigError("rejuvenation_period: must be non-negative");
  if (moves_per_trigger < 1) throw ConfigError("moves_per_trigger: must be at least 1");
  if (workers < 1) throw ConfigError("workers: must be at least 1");
}

std::vector<double> ParticleSet::log_weights() const {
  std::vector<double> lw(particles.size());
  for (std::size_t k = 0; k < particles.size(); ++k) lw[k] = particles[k].log_weight;
  return lw;
}

Eigen::VectorXd ParticleSet::weights() const { return stats::normalized_weights(log_weights()); }

double ParticleSet::ess() const { return stats::ess(log_weights()); }

Eigen::MatrixXd ParticleSet::log_params(std::span<const Eigen::Index> components) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(particles.size()), static_cast<Eigen::Index>(components.size()));
  for (std::size_t k = 0; k < particles.size(); ++k)
    for (std::size_t c = 0; c < components.size(); ++c)
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) =
          std::log(particles[k].params.flat()[components[c]]);
  return out;
}

Eigen::MatrixXd ParticleSet::params() const {
  if (particles.empty()) return {};
  Eigen::MatrixXd out(static_cast<Eigen::Index>(particles.size()), particles.front().params.size());
  for (std::size_t k = 0; k < particles.size(); ++k)
    out.row(static_cast<Eigen::Index>(k)) = particles[k].params.flat().transpose();
  return out;
}

double IbisResult::mean_acceptance() const {
  double sum = 0.0;
  int count = 0;
  for (const auto& t : triggers) {
    if (!t.moved) continue;
    sum += t.acceptance_rate;
    ++count;
  }
  return count == 0 ? 0.0 : sum / count;
}

double ess(std::span<const double> log_weights) { return stats::ess(log_weights); }

double initialize_particles(ParticleSet& set, std::size_t n, const DlmSpec& spec, const PriorSpec& prior,
                            const StatePrior& state_prior, const StepDesign& first, Rng& rng, int workers) {
  set.particles.assign(n, Particle{});
  for (std::size_t k = 0; k < n; ++k) {
    set.particles[k].params = prior.sample(rng);
    set.particles[k].origin = k;
  }
  std::vector<double> inc(n);
  detail::parallel_for(n, workers, [&](std::size_t k) {
    Particle& p = set.particles[k];
    p.model = ParamModel(spec, p.params);
    try {
      inc[k] = filter_init(p.filter, state_prior, first, p.model, thread_workspace());
    } catch (const NumericalError& e) {
      throw e.with_particle(k);
    }
    p.window_start = p.filter;
  });
  for (std::size_t k = 0; k < n; ++k) set.particles[k].log_weight = -std::log(static_cast<double>(n));
  set.log_evidence = 0.0;
  set.time = first.time;
  const double log_l = apply_increments(set, inc);
  return log_l;
}

double apply_increments(ParticleSet& set, std::span<const double> increments) {
  if (increments.size() != set.size()) throw StateError("apply_increments: one increment per particle required");
  std::vector<double> lw = set.log_weights();
  stats::normalize_log_weights(lw);
  for (std::size_t k = 0; k < lw.size(); ++k) lw[k] += increments[k];
  const double log_l = stats::normalize_log_weights(lw);
  for (std::size_t k = 0; k < lw.size(); ++k) set.particles[k].log_weight = lw[k];
  set.log_evidence += log_l;
  return log_l;
}

double reweight(ParticleSet& set, const StepDesign& step, int workers) {
  std::vector<double> inc(set.size());
  detail::parallel_for(set.size(), workers, [&](std::size_t k) {
    Particle& p = set.particles[k];
    try {
      inc[k] = filter_step(p.filter, step, p.model, thread_workspace());
    } catch (const NumericalError& e) {
      throw e.with_particle(k);
    }
  });
  set.time = step.time;
  return apply_increments(set, inc);
}

std::vector<std::size_t> multinomial_resample(ParticleSet& set, Rng& rng) {
  const std::size_t n = set.size();
  const Eigen::VectorXd w = set.weights();
  std::vector<double> cdf(n);
  std::partial_sum(w.begin(), w.end(), cdf.begin());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> ancestors(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = unif(rng) * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ancestors[k] = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), n - 1);
  }
  std::vector<Particle> next;
  next.reserve(n);
  for (std::size_t a : ancestors) next.push_back(set.particles[a]);
  const double lw = -std::log(static_cast<double>(n));
  for (auto& p : next) p.log_weight = lw;
  set.particles = std::move(next);
  return ancestors;
}

RandomWalkProposal RandomWalkProposal::from_particles(const ParticleSet& set,
                                                      std::span<const Eigen::Index> components) {
  RandomWalkProposal out;
  out.components.assign(components.begin(), components.end());
  if (components.empty()) return out;
  const Eigen::MatrixXd logs = set.log_params(components);
  Eigen::MatrixXd cov = stats::weighted_cov(logs, set.weights()) * scaling(components.size());
  cov.diagonal().array() += kVarianceFloor;
  linalg::symmetrize(cov);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  out.factor = llt.info() == Eigen::Success ? Eigen::MatrixXd(llt.matrixL()) : linalg::psd_factor(cov);
  return out;
}

Eigen::VectorXd silverman_bandwidth(const Eigen::MatrixXd& log_samples, const Eigen::VectorXd& weights) {
  const double n = static_cast<double>(log_samples.rows());
  const Eigen::VectorXd var = stats::weighted_cov(log_samples, weights).diagonal();
  const double factor = 1.06 * 1.06 * std::pow(n, -0.4);
  return (factor * var.array()).max(kVarianceFloor).matrix();
}

KdeProposal KdeProposal::from_particles(const ParticleSet& set, std::span<const Eigen::Index> components) {
  KdeProposal out;
  out.components.assign(components.begin(), components.end());
  out.centers = set.log_params(components);
  if (components.empty()) return out;
  out.bandwidth2 = silverman_bandwidth(out.centers, set.weights());
  return out;
}

double KdeProposal::log_density(const StaticParams& p) const {
  const Eigen::Index d = static_cast<Eigen::Index>(components.size());
  Eigen::VectorXd x(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const double v = p.flat()[components[static_cast<std::size_t>(c)]];
    if (!(v > 0.0)) return kNegInf;
    x[c] = std::log(v);
  }
  const double norm = -0.5 * (d * std::log(2.0 * std::numbers::pi) + bandwidth2.array().log().sum()) - x.sum();
  std::vector<double> terms(static_cast<std::size_t>(centers.rows()));
  for (Eigen::Index k = 0; k < centers.rows(); ++k) {
    const double q = ((x.transpose() - centers.row(k)).array().square() / bandwidth2.transpose().array()).sum();
    terms[static_cast<std::size_t>(k)] = norm - 0.5 * q;
  }
  return stats::log_sum_exp(terms) - std::log(static_cast<double>(centers.rows()));
}

double full_move_log_ratio(double log_prior_new, double loglik_new, double log_prior_old, double loglik_old,
                           double sum_log_new, double sum_log_old) {
  if (log_prior_new == kNegInf || loglik_new == kNegInf) return kNegInf;
  return (loglik_new + log_prior_new + sum_log_new) - (loglik_old + log_prior_old + sum_log_old);
}

MoveOutcome mh_move_full(Particle& particle, std::span<const StepDesign> data, const MoveContext& ctx,
                         const RandomWalkProposal& proposal, Rng& rng) {
  MoveOutcome out;
  const auto& comps = proposal.components;
  if (comps.empty() || data.empty()) return out;
  const Eigen::VectorXd z = linalg::standard_normal(static_cast<Eigen::Index>(comps.size()), rng);
  const Eigen::VectorXd step = proposal.factor * z;
  StaticParams cand = particle.params;
  for (std::size_t c = 0; c < comps.size(); ++c)
    cand.flat()[comps[c]] = std::exp(std::log(cand.flat()[comps[c]]) + step[static_cast<Eigen::Index>(c)]);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);

  const double log_prior_new = ctx.prior->log_density(cand);
  if (log_prior_new == kNegInf) return out;

  ParamModel model(*ctx.spec, cand);
  FilterState state;
  FilterWorkspace& ws = thread_workspace();
  try {
    filter_init(state, *ctx.state_prior, data.front(), model, ws);
    replay(state, data.subspan(1), model, ws);
  } catch (const NumericalError&) {
    out.filter_steps = data.size();
    return out;
  }
  out.filter_steps = data.size();

  const double log_ratio =
      full_move_log_ratio(log_prior_new, state.loglik_total, ctx.prior->log_density(particle.params),
                          particle.filter.loglik_total, sum_log(cand, comps), sum_log(particle.params, comps));
  if (std::log(u) < log_ratio) {
    state.loglik_window = particle.filter.loglik_window - particle.filter.loglik_total + state.loglik_total;
    particle.params = std::move(cand);
    particle.model = std::move(model);
    particle.filter = std::move(state);
    out.accepted = true;
  }
  return out;
}

MoveOutcome mh_move_windowed(Particle& particle, std::span<const StepDesign> window, const MoveContext& ctx,
                             const KdeProposal& kde, Rng& rng) {
  MoveOutcome out;
  const auto& comps = kde.components;
  if (comps.empty() || !has_observations(window)) return out;
  const Eigen::VectorXd z = linalg::standard_normal(static_cast<Eigen::Index>(comps.size()), rng);
  StaticParams cand = particle.params;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const Eigen::Index i = static_cast<Eigen::Index>(c);
    cand.flat()[comps[c]] = std::exp(std::log(cand.flat()[comps[c]]) + std::sqrt(kde.bandwidth2[i]) * z[i]);
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (!ctx.prior->in_support(cand)) return out;

  ParamModel model(*ctx.spec, cand);
  FilterState state = particle.window_start;
  state.loglik_window = 0.0;
  try {
    replay(state, window, model, thread_workspace());
  } catch (const NumericalError&) {
    out.filter_steps = window.size();
    return out;
  }
  out.filter_steps = window.size();
  if (std::log(u) < state.loglik_window - particle.filter.loglik_window) {
    particle.params = std::move(cand);
    particle.model = std::move(model);
    particle.filter = std::move(state);
    out.accepted = true;
  }
  return out;
}

std::vector<int> window_partition(std::span<const double> times, double window_hours) {
  if (!(window_hours > 0.0)) throw ConfigError("window: must be positive or inf");
  std::vector<int> out(times.size(), 1);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InputError("window_partition: times must be strictly increasing (index " + std::to_string(i) + ")");
    if (std::isinf(window_hours) || times[i] <= 0.0) continue;
    out[i] = std::max(1, static_cast<int>(std::ceil(times[i] / window_hours)));
  }
  return out;
}

IbisResult run_sampler(const IbisConfig& config, std::span<const StepDesign> data, const PriorSpec& prior,
                       const StatePrior& state_prior, const DlmSpec& spec, Rng& rng,
                       const StepObserver& observer) {
  config.validate();
  if (data.empty()) throw InputError("no observations to fit");
  if (prior.size() != spec.num_params())
    throw ConfigError("prior has " + std::to_string(prior.size()) + " components, model needs " +
                      std::to_string(spec.num_params()));
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> times(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) times[i] = data[i].time;
  const std::vector<int> windows = window_partition(times, config.window_hours);

  IbisResult result;
  ParticleSet& set = result.set;
  const double first = initialize_particles(set, config.particles, spec, prior, state_prior, data.front(), rng,
                                            config.workers);
  result.evidence.push_back({data.front().time, first, first});
  if (observer) observer(set, 0);

  const MoveContext ctx{&spec, &prior, &state_prior};
  const auto& free = prior.free();
  const double threshold = config.delta * static_cast<double>(config.particles);
  int window = windows.front();
  std::size_t window_begin = 0;

  for (std::size_t i = 1; i < data.size(); ++i) {
    if (windows[i] != window) {
      window = windows[i];
      window_begin = i;
      for (auto& p : set.particles) {
        p.filter.loglik_window = 0.0;
        p.window_start = p.filter;
      }
    }

    const double log_l = reweight(set, data[i], config.workers);
    result.evidence.push_back({data[i].time, log_l, result.evidence.back().cumulative + log_l});

    const double ess_now = set.ess();
    const bool scheduled = config.rejuvenation_period > 0 && (i + 1) % config.rejuvenation_period == 0;
    if (ess_now < threshold || scheduled) {
      TriggerEvent event;
      event.time = data[i].time;
      event.index = i;
      event.ess = ess_now;
      event.scheduled = scheduled;
      event.window = window;

      const bool windowed = window > 1;
      const std::span<const StepDesign> move_data =
          windowed ? data.subspan(window_begin, i - window_begin + 1) : data.subspan(0, i + 1);
      event.moved = !free.empty() && (!windowed || has_observations(move_data));

      RandomWalkProposal rw;
      KdeProposal kde;
      if (event.moved) {
        if (windowed)
          kde = KdeProposal::from_particles(set, free);
        else
          rw = RandomWalkProposal::from_particles(set, free);
      }
      multinomial_resample(set, rng);
      const std::uint64_t move_seed = rng();

      if (event.moved) {
        std::vector<int> accepted(set.size(), 0);
        std::vector<std::size_t> steps(set.size(), 0);
        detail::parallel_for(set.size(), config.workers, [&](std::size_t k) {
          Rng stream(derive_seed(move_seed, k));
          for (int r = 0; r < config.moves_per_trigger; ++r) {
            const MoveOutcome o = windowed ? mh_move_windowed(set.particles[k], move_data, ctx, kde, stream)
                                           : mh_move_full(set.particles[k], move_data, ctx, rw, stream);
            accepted[k] += o.accepted ? 1 : 0;
            steps[k] += o.filter_steps;
          }
        });
        const double total = std::accumulate(accepted.begin(), accepted.end(), 0.0);
        event.acceptance_rate = total / (static_cast<double>(set.size()) * config.moves_per_trigger);
        result.move_filter_steps += std::accumulate(steps.begin(), steps.end(), std::size_t{0});
      }
      result.triggers.push_back(event);
    }
    if (observer) observer(set, i);
  }
  set.log_evidence = result.evidence.back().cumulative;
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

IbisResult run_ibis(const IbisConfig& config, std::span<const StepDesign> data, const PriorSpec& prior,
                    const StatePrior& state_prior, const DlmSpec& spec, Rng& rng, const StepObserver& observer) {
  if (!std::isinf(config.window_hours)) throw ConfigError("run_ibis: full IBIS needs an infinite window");
  return run_sampler(config, data, prior, state_prior, spec, rng, observer);
}

IbisResult run_online_ibis(const IbisConfig& config, std::span<const StepDesign> data, const PriorSpec& prior,
                           const StatePrior& state_prior, const DlmSpec& spec, Rng& rng,
                           const StepObserver& observer) {
  if (std::isinf(config.window_hours)) throw ConfigError("run_online_ibis: window must be finite");
  return run_sampler(config, data, prior, state_prior, spec, rng, observer);
}

std::vector<double> log_bayes_factor(std::span<const EvidencePoint> model1, std::span<const EvidencePoint> model2) {
  if (model1.size() != model2.size())
    throw InputError("log_bayes_factor: evidence traces have different lengths (" + std::to_string(model1.size()) +
                     " vs " + std::to_string(model2.size()) + ")");
  std::vector<double> out(model1.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < model1.size(); ++i) {
    if (std::abs(model1[i].time - model2[i].time) > 1e-9 * std::max(1.0, std::abs(model1[i].time)))
      throw InputError("log_bayes_factor: traces differ in observation time at index " + std::to_string(i));
    cum += model1[i].log_factor - model2[i].log_factor;
    out[i] = cum;
  }
  return out;
}

}  // namespace sdlm
