#include "sdlm/parallel.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "sdlm/detail/parallel_for.hpp"
#include "sdlm/error.hpp"
#include "sdlm/stats.hpp"

namespace sdlm {

std::vector<std::uint64_t> BatchPlan::seeds() const {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(std::max(0, n_batches)));
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = batch_seed(master_seed, b);
  return out;
}

void BatchPlan::validate() const {
  if (n_batches < 1) throw ConfigError("batches: need at least one batch");
  if (particles_per_batch < min_batch)
    throw ConfigError("batches: " + std::to_string(particles_per_batch) + " particles per batch is below the floor of " +
                      std::to_string(min_batch));
  if (rejuvenation_period < 0) throw ConfigError("rejuvenation_period: must be non-negative");
}

BatchedResult run_batched(const IbisConfig& config, const BatchPlan& plan, std::span<const StepDesign> data,
                          const PriorSpec& prior, const StatePrior& state_prior, const DlmSpec& spec, int workers,
                          std::span<const int> order) {
  plan.validate();
  if (workers < 1) throw ConfigError("workers: must be at least 1");
  const auto n = static_cast<std::size_t>(plan.n_batches);
  std::vector<int> dispatch(order.begin(), order.end());
  if (dispatch.empty()) {
    dispatch.resize(n);
    for (std::size_t b = 0; b < n; ++b) dispatch[b] = static_cast<int>(b);
  }
  if (dispatch.size() != n) throw ConfigError("batch order: must list every batch exactly once");
  std::vector<bool> seen(n, false);
  for (int b : dispatch) {
    if (b < 0 || static_cast<std::size_t>(b) >= n || seen[static_cast<std::size_t>(b)])
      throw ConfigError("batch order: must list every batch exactly once");
    seen[static_cast<std::size_t>(b)] = true;
  }

  IbisConfig local = config;
  local.particles = plan.particles_per_batch;
  local.rejuvenation_period = plan.rejuvenation_period;
  local.workers = 1;
  local.validate();

  const auto seeds = plan.seeds();
  const auto start = std::chrono::steady_clock::now();
  BatchedResult out;
  out.batches.resize(n);
  detail::parallel_for(n, workers, [&](std::size_t slot) {
    const auto b = static_cast<std::size_t>(dispatch[slot]);
    Rng rng(seeds[b]);
    out.batches[b] = run_sampler(local, data, prior, state_prior, spec, rng);
    for (auto& p : out.batches[b].set.particles) p.batch = static_cast<int>(b);
  });
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<ParticleSet> sets;
  std::vector<std::vector<EvidencePoint>> traces;
  sets.reserve(n);
  traces.reserve(n);
  for (std::size_t b = 0; b < n; ++b) {
    const IbisResult& r = out.batches[b];
    out.diagnostics.push_back(
        {static_cast<int>(b), r.triggers.size(), r.mean_acceptance(), r.move_filter_steps, r.wall_seconds});
    sets.push_back(r.set);
    traces.push_back(r.evidence);
  }
  out.set = final_merge(sets);
  out.evidence = merge_evidence(traces);
  if (!out.evidence.empty()) out.set.log_evidence = out.evidence.back().cumulative;
  return out;
}

ParticleSet final_merge(std::span<const ParticleSet> batches) {
  if (batches.empty()) throw StateError("final_merge: no batches");
  if (batches.size() == 1) return batches.front();
  const double time = batches.front().time;
  const double log_b = std::log(static_cast<double>(batches.size()));
  ParticleSet merged;
  merged.time = time;
  double evidence = 0.0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const ParticleSet& s = batches[b];
    if (s.time != time)
      throw StateError("final_merge: batch " + std::to_string(b) + " ends at t=" + std::to_string(s.time) +
                       ", batch 0 at t=" + std::to_string(time));
    std::vector<double> lw = s.log_weights();
    stats::normalize_log_weights(lw);
    for (std::size_t k = 0; k < s.size(); ++k) {
      merged.particles.push_back(s.particles[k]);
      merged.particles.back().log_weight = lw[k] - log_b;
    }
    evidence += s.log_evidence;
  }
  merged.log_evidence = evidence / static_cast<double>(batches.size());
  return merged;
}

std::vector<EvidencePoint> merge_evidence(std::span<const std::vector<EvidencePoint>> traces) {
  if (traces.empty()) return {};
  const std::size_t len = traces.front().size();
  for (const auto& t : traces)
    if (t.size() != len) throw StateError("merge_evidence: batch traces have different lengths");
  std::vector<EvidencePoint> out(len);
  double cum = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& t : traces) {
      if (t[i].time != traces.front()[i].time) throw StateError("merge_evidence: batch traces are misaligned");
      sum += t[i].log_factor;
    }
    out[i].time = traces.front()[i].time;
    out[i].log_factor = sum / static_cast<double>(traces.size());
    cum += out[i].log_factor;
    out[i].cumulative = cum;
  }
  return out;
}

}  // namespace sdlm
