#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdlm/ibis.hpp"

namespace sdlm {

/// Partition of the particles into independent batches.
struct BatchPlan {
  int n_batches = 1;
  std::size_t particles_per_batch = 10'000;
  /// Forced resample-move period inside every batch; 0 disables it.
  int rejuvenation_period = 20;
  std::uint64_t master_seed = 0;
  std::size_t min_batch = 50;

  std::size_t total_particles() const { return static_cast<std::size_t>(n_batches) * particles_per_batch; }
  /// Batch b uses batch_seed(master_seed, b); batch 0 reuses the master seed.
  std::vector<std::uint64_t> seeds() const;
  /// Throws ConfigError on an empty plan or a batch below `min_batch`.
  void validate() const;
};

struct BatchDiagnostics {
  int batch = 0;
  std::size_t triggers = 0;
  double mean_acceptance = 0.0;
  std::size_t move_filter_steps = 0;
  double wall_seconds = 0.0;
};

struct BatchedResult {
  ParticleSet set;
  /// Equal-weight average of the per-batch evidence traces.
  std::vector<EvidencePoint> evidence;
  std::vector<BatchDiagnostics> diagnostics;
  std::vector<IbisResult> batches;
  double wall_seconds = 0.0;
};

/// Runs every batch as an independent sampler (full or windowed per
/// `config.window_hours`) on up to `workers` threads. `config.particles`,
/// `config.rejuvenation_period` and `config.workers` are taken from the plan
/// and the worker count. `order` optionally fixes the order in which batches
/// are dispatched; outputs do not depend on it.
BatchedResult run_batched(const IbisConfig& config, const BatchPlan& plan, std::span<const StepDesign> data,
                          const PriorSpec& prior, const StatePrior& state_prior, const DlmSpec& spec,
                          int workers = 1, std::span<const int> order = {});

/// Concatenates the batches; every batch keeps its normalised weights scaled
/// by 1/B. Throws StateError when the batches end at different times.
ParticleSet final_merge(std::span<const ParticleSet> batches);

/// Per-time mean of the batch log-factors; cumulative sums are recomputed.
std::vector<EvidencePoint> merge_evidence(std::span<const std::vector<EvidencePoint>> traces);

}  // namespace sdlm
