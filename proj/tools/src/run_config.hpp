#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sdlm/model.hpp"
#include "sdlm/prior.hpp"

namespace sdlm::cli {

enum class Command { Simulate, Fit, Forecast, Predict, Compare };

std::string command_name(Command c);

/// Every tunable of a run. Field names double as config-file keys and long
/// flag names (underscores become dashes on the command line).
struct RunConfig {
  Command command = Command::Fit;
  std::optional<std::uint64_t> seed;

  std::string model = "sinusoid";
  std::string locations = "0,0;10,0";
  std::size_t particles = 10'000;
  double delta = 0.5;
  std::string window = "inf";
  int batches = 1;
  std::optional<int> rejuvenation_period;
  int moves_per_trigger = 1;
  int workers = 1;

  double prior_shape = 1.0;
  double prior_scale = 0.01;
  double prior_bound = 10.0;
  bool constrain_w_lt_v = false;
  /// Comma-separated NAME=VALUE pins, e.g. "W1_s1=0.01,psi_1=0.01".
  std::string fix;

  std::filesystem::path data;
  std::filesystem::path regressors;
  std::filesystem::path posterior;
  std::filesystem::path out = "run";

  // simulate
  std::size_t n = 1300;
  double step_hours = 1.0;
  double true_w = 0.01;
  double true_v = 1.0;
  double true_sigma2 = 1.0;
  double true_psi = 0.01;
  double missing_prob = 0.0;
  bool humidity = false;

  // forecast / predict
  int horizon = 1;
  std::size_t draws = 200;

  // compare
  std::string models = "sinusoid,fourier:2";
  int replicates = 1;
  int subsample_sites = 0;
  std::size_t subsample_length = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  double window_hours() const;
  int effective_rejuvenation_period() const;
  std::vector<Location> parsed_locations() const;
  std::vector<std::string> parsed_models() const;
  DlmSpec spec() const;
  PriorSpec prior(const DlmSpec& spec) const;

  /// Canonical `key=value` lines, sorted by key.
  std::string canonical() const;
  /// 64-bit FNV-1a of `canonical()`.
  std::uint64_t hash() const;
  /// "# config_hash=<hex> seed=<n>"
  std::string provenance() const;
};

}  // namespace sdlm::cli
