#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "sdlm/ibis.hpp"
#include "sdlm/observation.hpp"
#include "sdlm/parallel.hpp"

namespace sdlm::cli {

/// Dispatches on `config.command`. Validates the configuration before any
/// data is read and writes every output only after all computation succeeded.
void run_command(const RunConfig& config, std::ostream& log);

void cmd_simulate(const RunConfig& config, std::ostream& log);
void cmd_fit(const RunConfig& config, std::ostream& log);
void cmd_forecast(const RunConfig& config, std::ostream& log);
void cmd_predict(const RunConfig& config, std::ostream& log);
void cmd_compare(const RunConfig& config, std::ostream& log);

struct TriggerRow {
  int batch = 0;
  TriggerEvent event;
};

/// Output of one serial or batched fit.
struct FitRun {
  ParticleSet set;
  std::vector<EvidencePoint> evidence;
  std::vector<TriggerRow> triggers;
  std::vector<BatchDiagnostics> diagnostics;
  double wall_seconds = 0.0;
};

/// Runs the sampler selected by `config` (serial when batches == 1).
FitRun fit_designs(const RunConfig& config, const DlmSpec& spec, const PriorSpec& prior,
                   std::span<const StepDesign> designs, std::uint64_t seed);

/// Measurements for `spec`: humidity models take their regressors from
/// `regressor_records` when given, otherwise from the temperature column.
std::vector<Measurement> measurements_for(const DlmSpec& spec, std::span<const ObservationRecord> records,
                                          std::span<const ObservationRecord> regressor_records = {});

/// Delimited table with '#' comment lines skipped and a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

Table read_table(const std::filesystem::path& path);

}  // namespace sdlm::cli
