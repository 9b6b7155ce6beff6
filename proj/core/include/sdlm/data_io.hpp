#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdlm/filter.hpp"
#include "sdlm/model.hpp"
#include "sdlm/observation.hpp"
#include "sdlm/rng.hpp"

namespace sdlm {

/// Site label -> site index (0-based).
using SiteMap = std::map<std::string, int>;

struct IngestOptions {
  /// Keep hours inside the span where no site reports anything as all-missing records.
  bool retain_empty_hours = false;
};

struct IngestResult {
  std::vector<ObservationRecord> records;
  /// Site-hours where humidity arrived without temperature; both were masked.
  std::size_t co_missing_warnings = 0;
  std::size_t rows = 0;
  /// Unix time in hours of the first bucket; record times are relative to it.
  long long origin_hour = 0;
};

/// Parses an ISO-8601 timestamp ("2019-03-01T13:45:00", optional fractional
/// seconds and "Z" or "+hh:mm" offset) into Unix seconds.
std::optional<double> parse_timestamp(const std::string& text);

/// Reads raw `timestamp_iso8601,site,variable,value` rows (variable is
/// `temperature` or `humidity`, optional header line) and averages them per
/// site, variable and clock hour. Throws InputError with the row number for
/// unknown sites, unknown variables, bad timestamps and non-numeric values.
IngestResult ingest_csv(std::istream& in, const SiteMap& sites, const IngestOptions& options = {});
IngestResult ingest_csv(const std::filesystem::path& path, const SiteMap& sites, const IngestOptions& options = {});

inline constexpr const char* kSeriesHeader = "t_hours,site,temp,humidity,temp_missing,humidity_missing";

/// Canonical series format: one row per (record, site) with the header above;
/// missing values are empty with their flag set to 1. Lines starting with '#'
/// are comments.
void emit_series(std::ostream& out, const std::vector<ObservationRecord>& records);
void emit_series(const std::filesystem::path& path, const std::vector<ObservationRecord>& records,
                 const std::string& comment = {});

/// Inverse of emit_series. `sites` fixes the site count; 0 infers it from the
/// largest site index. Throws InputError on malformed rows, unsorted times or
/// humidity without temperature.
std::vector<ObservationRecord> read_series(std::istream& in, int sites = 0);
std::vector<ObservationRecord> read_series(const std::filesystem::path& path, int sites = 0);

struct MissingInterval {
  int site = 0;
  double start = 0.0;  ///< hours, inclusive
  double end = 0.0;    ///< hours, exclusive
};

/// Both variables go missing together at a site.
struct Missingness {
  /// Independent per-time missing probability per site; empty means none.
  std::vector<double> probability;
  std::vector<MissingInterval> outages;
};

/// Humidity block regressed on the simulated temperatures.
struct HumidityTruth {
  StaticParams params;
  StatePrior state_prior;
};

struct SyntheticConfig {
  DlmSpec spec;
  StaticParams truths;
  StatePrior state_prior;
  std::size_t n = 1300;
  double step_hours = 1.0;
  Missingness missing;
  std::optional<HumidityTruth> humidity;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct SyntheticSeries {
  std::vector<ObservationRecord> records;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> humidity_states;
};

/// Runs the model generatively: theta at the first time from the state prior,
/// then theta_t = G theta_{t-1} + N(0, k² diag(W) + K), x_t = F_t theta_t + N(0, diag(V)).
/// Zero variances are allowed and give deterministic paths.
SyntheticSeries simulate(const SyntheticConfig& config, Rng& rng);

}  // namespace sdlm
