#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sdlm/filter.hpp"
#include "sdlm/model.hpp"
#include "sdlm/observation.hpp"
#include "sdlm/prior.hpp"
#include "sdlm/rng.hpp"

namespace sdlm {

inline constexpr double kInfiniteWindow = std::numeric_limits<double>::infinity();

struct IbisConfig {
  std::size_t particles = 10'000;
  /// Resample-move fires when ESS < delta * N.
  double delta = 0.5;
  /// Window width T in hours; infinity runs full IBIS.
  double window_hours = kInfiniteWindow;
  /// Forced resample-move every this many records; 0 disables it.
  int rejuvenation_period = 0;
  int moves_per_trigger = 1;
  /// Threads for the per-particle reweight and move loops.
  int workers = 1;

  void validate() const;
};

struct Particle {
  StaticParams params;
  ParamModel model;
  FilterState filter;
  /// Filter state at the start of the current window (online mode only).
  FilterState window_start;
  double log_weight = 0.0;
  int batch = 0;
  /// Index of the initial prior draw this particle descends from.
  std::size_t origin = 0;
};

struct ParticleSet {
  std::vector<Particle> particles;
  double log_evidence = 0.0;
  double time = -std::numeric_limits<double>::infinity();

  std::size_t size() const { return particles.size(); }
  std::vector<double> log_weights() const;
  Eigen::VectorXd weights() const;
  double ess() const;
  /// N x |components| matrix of log-parameters.
  Eigen::MatrixXd log_params(std::span<const Eigen::Index> components) const;
  /// N x P matrix of parameters.
  Eigen::MatrixXd params() const;
};

struct EvidencePoint {
  double time = 0.0;
  double log_factor = 0.0;  ///< log L_{t_i}
  double cumulative = 0.0;  ///< sum of log L up to t_i
};

struct TriggerEvent {
  double time = 0.0;
  std::size_t index = 0;
  double ess = 0.0;
  bool scheduled = false;
  int window = 1;
  double acceptance_rate = 0.0;
  bool moved = true;
};

struct IbisResult {
  ParticleSet set;
  std::vector<EvidencePoint> evidence;
  std::vector<TriggerEvent> triggers;
  std::size_t move_filter_steps = 0;
  double wall_seconds = 0.0;

  double mean_acceptance() const;
};

/// Called after record `index` has been fully processed (reweight and any move).
using StepObserver = std::function<void(const ParticleSet&, std::size_t index)>;

/// 1 / sum(w²) on normalised weights.
double ess(std::span<const double> log_weights);

/// Draws N particles from the prior and assimilates the first record. Weights
/// become the normalised first-record likelihoods; returns log L_{t_1}.
double initialize_particles(ParticleSet& set, std::size_t n, const DlmSpec& spec, const PriorSpec& prior,
                            const StatePrior& state_prior, const StepDesign& first, Rng& rng,
                            int workers = 1);

/// Advances every particle's filter over `step`, adds the increments to the
/// log-weights and renormalises. Returns log L_{t_i} = log sum_k w_{k,i-1}
/// pi(x_i | ...), computed with the pre-update normalised weights.
double reweight(ParticleSet& set, const StepDesign& step, int workers = 1);

/// Same bookkeeping as `reweight` for externally supplied increments.
double apply_increments(ParticleSet& set, std::span<const double> increments);

/// Draws N ancestors i.i.d. from the weights, copies them and resets the
/// weights to 1/N. Returns the ancestor indices.
std::vector<std::size_t> multinomial_resample(ParticleSet& set, Rng& rng);

/// Gaussian random walk on the log of the free parameters with covariance
/// gamma * Var(log phi), gamma = 2.38² / n_par.
struct RandomWalkProposal {
  std::vector<Eigen::Index> components;
  Eigen::MatrixXd factor;  ///< lower Cholesky factor of the step covariance

  static double scaling(std::size_t n_par) { return 2.38 * 2.38 / static_cast<double>(n_par); }
  /// Uses the weighted covariance of the set, floored by 1e-12 on the diagonal.
  static RandomWalkProposal from_particles(const ParticleSet& set, std::span<const Eigen::Index> components);
};

/// Per-component Silverman bandwidth h² = 1.06² N^{-2/5} Var(log phi), floored at 1e-12.
Eigen::VectorXd silverman_bandwidth(const Eigen::MatrixXd& log_samples, const Eigen::VectorXd& weights);

/// Log-normal kernel density estimate centred on the particles.
struct KdeProposal {
  std::vector<Eigen::Index> components;
  Eigen::MatrixXd centers;    ///< N x |components| log-parameters
  Eigen::VectorXd bandwidth2;  ///< h² per component

  static KdeProposal from_particles(const ParticleSet& set, std::span<const Eigen::Index> components);
  /// log of (1/N) sum_k logN(phi; log phi_k, diag(h²)) over the free components.
  double log_density(const StaticParams& p) const;
};

struct MoveContext {
  const DlmSpec* spec = nullptr;
  const PriorSpec* prior = nullptr;
  const StatePrior* state_prior = nullptr;
};

struct MoveOutcome {
  bool accepted = false;
  std::size_t filter_steps = 0;
};

/// Log acceptance ratio of the full-data move: prior and likelihood ratio
/// times q(phi | phi*) / q(phi* | phi), which for the log-normal walk is
/// prod(phi*) / prod(phi) over the moved components.
double full_move_log_ratio(double log_prior_new, double loglik_new, double log_prior_old, double loglik_old,
                           double sum_log_new, double sum_log_old);

/// Metropolis-Hastings move re-running the filter from t_1 over `data`
/// (records 1..i). Proposals outside the prior support are rejected without
/// filtering.
MoveOutcome mh_move_full(Particle& particle, std::span<const StepDesign> data, const MoveContext& ctx,
                         const RandomWalkProposal& proposal, Rng& rng);

/// Windowed move: proposes phi* ~ logN(log phi, h²), replays the filter over
/// `window` from the particle's window-start snapshot, accepts on the
/// likelihood ratio alone. An empty window leaves the particle untouched.
MoveOutcome mh_move_windowed(Particle& particle, std::span<const StepDesign> window, const MoveContext& ctx,
                             const KdeProposal& kde, Rng& rng);

/// Window index (1-based) of each time: t = 0 goes to window 1, window s
/// covers ((s-1)T, sT]. Throws InputError on unsorted times.
std::vector<int> window_partition(std::span<const double> times, double window_hours);

/// Algorithm driver shared by the full and online schemes.
IbisResult run_sampler(const IbisConfig& config, std::span<const StepDesign> data, const PriorSpec& prior,
                       const StatePrior& state_prior, const DlmSpec& spec, Rng& rng,
                       const StepObserver& observer = {});

/// Full IBIS; requires an infinite window.
IbisResult run_ibis(const IbisConfig& config, std::span<const StepDesign> data, const PriorSpec& prior,
                    const StatePrior& state_prior, const DlmSpec& spec, Rng& rng,
                    const StepObserver& observer = {});

/// Online IBIS with windowed moves; requires a finite window.
IbisResult run_online_ibis(const IbisConfig& config, std::span<const StepDesign> data, const PriorSpec& prior,
                           const StatePrior& state_prior, const DlmSpec& spec, Rng& rng,
                           const StepObserver& observer = {});

/// Cumulative log Bayes factor log p(x_{0:t}|M1) - log p(x_{0:t}|M2) per time.
/// Throws InputError when the traces do not share their observation times.
std::vector<double> log_bayes_factor(std::span<const EvidencePoint> model1, std::span<const EvidencePoint> model2);

}  // namespace sdlm
