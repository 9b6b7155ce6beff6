#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <map>
#include <sstream>

#include "sdlm/error.hpp"

namespace sdlm::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : item.substr(b, e - b + 1));
  }
  return out;
}

double to_double(const std::string& s, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(field + ": '" + s + "' is not a number");
  }
  if (used != s.size()) throw ConfigError(field + ": '" + s + "' is not a number");
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Fit: return "fit";
    case Command::Forecast: return "forecast";
    case Command::Predict: return "predict";
    case Command::Compare: return "compare";
  }
  return "?";
}

double RunConfig::window_hours() const {
  if (window == "inf" || window == "infinity") return std::numeric_limits<double>::infinity();
  const double t = to_double(window, "window");
  if (!(t > 0.0)) throw ConfigError("window: must be a positive number of hours or 'inf'");
  return t;
}

int RunConfig::effective_rejuvenation_period() const {
  if (rejuvenation_period) return *rejuvenation_period;
  return batches > 1 ? 20 : 0;
}

std::vector<Location> RunConfig::parsed_locations() const {
  std::vector<Location> out;
  for (const auto& item : split(locations, ';')) {
    if (item.empty()) continue;
    const auto xy = split(item, ',');
    if (xy.size() != 2) throw ConfigError("locations: expected 'x,y;x,y;...', got '" + item + "'");
    Location loc;
    loc.id = static_cast<int>(out.size());
    loc.name = "s" + std::to_string(loc.id + 1);
    loc.easting_km = to_double(xy[0], "locations");
    loc.northing_km = to_double(xy[1], "locations");
    if (!std::isfinite(loc.easting_km) || !std::isfinite(loc.northing_km))
      throw ConfigError("locations: coordinates must be finite");
    out.push_back(loc);
  }
  if (out.empty()) throw ConfigError("locations: at least one site is required");
  return out;
}

std::vector<std::string> RunConfig::parsed_models() const {
  std::vector<std::string> out;
  for (const auto& m : split(models, ','))
    if (!m.empty()) out.push_back(m);
  return out;
}

DlmSpec RunConfig::spec() const {
  try {
    return DlmSpec::parse(model, parsed_locations());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

PriorSpec RunConfig::prior(const DlmSpec& spec) const {
  PriorSpec p(spec, prior_shape, prior_scale, prior_bound, constrain_w_lt_v);
  if (fix.empty()) return p;
  const auto names = StaticParams::names(spec.num_sites(), spec.state_dim_per_site());
  for (const auto& pin : split(fix, ',')) {
    if (pin.empty()) continue;
    const auto kv = split(pin, '=');
    if (kv.size() != 2) throw ConfigError("fix: expected NAME=VALUE, got '" + pin + "'");
    const auto it = std::find(names.begin(), names.end(), kv[0]);
    if (it == names.end()) throw ConfigError("fix: unknown parameter '" + kv[0] + "'");
    p.fix(it - names.begin(), to_double(kv[1], "fix"));
  }
  return p;
}

void RunConfig::validate() const {
  if (!seed) throw ConfigError("seed: required");
  const DlmSpec s = spec();
  if (!(particles >= 2)) throw ConfigError("particles: need at least 2");
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta: must lie in (0, 1]");
  window_hours();
  if (batches < 1) throw ConfigError("batches: must be at least 1");
  if (particles % static_cast<std::size_t>(batches) != 0)
    throw ConfigError("batches: particles (" + std::to_string(particles) + ") must be divisible by batches");
  if (batches > 1 && particles / static_cast<std::size_t>(batches) < 50)
    throw ConfigError("batches: each batch needs at least 50 particles");
  if (rejuvenation_period && *rejuvenation_period < 0) throw ConfigError("rejuvenation_period: must be non-negative");
  if (moves_per_trigger < 1) throw ConfigError("moves_per_trigger: must be at least 1");
  if (workers < 1) throw ConfigError("workers: must be at least 1");
  if (!(prior_shape > 0.0)) throw ConfigError("prior_shape: must be positive");
  if (!(prior_scale > 0.0)) throw ConfigError("prior_scale: must be positive");
  if (!(prior_bound > 0.0)) throw ConfigError("prior_bound: must be positive");
  prior(s);
  if (out.empty()) throw ConfigError("out: output directory required");

  switch (command) {
    case Command::Simulate:
      if (n < 1) throw ConfigError("n: need at least one observation");
      if (!(step_hours > 0.0)) throw ConfigError("step_hours: must be positive");
      if (s.family() == Family::HumidityConditional)
        throw ConfigError("model: simulate a temperature model; add --humidity for the humidity block");
      for (double v : {true_w, true_v, true_sigma2, true_psi})
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("true_*: parameters must be finite and non-negative");
      if (!(missing_prob >= 0.0 && missing_prob <= 1.0)) throw ConfigError("missing_prob: must lie in [0, 1]");
      break;
    case Command::Fit:
    case Command::Predict:
      if (data.empty()) throw ConfigError("data: input series required");
      if (command == Command::Predict && draws < 1) throw ConfigError("draws: must be at least 1");
      if (command == Command::Predict && posterior.empty()) throw ConfigError("posterior: fit output directory required");
      break;
    case Command::Forecast:
      if (horizon < 1) throw ConfigError("horizon: must be at least 1");
      if (!(step_hours > 0.0)) throw ConfigError("step_hours: must be positive");
      if (posterior.empty()) throw ConfigError("posterior: fit output directory required");
      if (s.needs_regressors() && regressors.empty())
        throw ConfigError("regressors: humidity forecasts need future temperatures");
      break;
    case Command::Compare: {
      if (data.empty()) throw ConfigError("data: input series required");
      const auto ms = parsed_models();
      if (ms.size() < 2) throw ConfigError("models: at least two models are required");
      for (const auto& m : ms) {
        try {
          DlmSpec::parse(m, parsed_locations());
        } catch (const Error& e) {
          throw ConfigError(std::string("models: ") + e.what());
        }
      }
      if (replicates < 1) throw ConfigError("replicates: must be at least 1");
      if (subsample_sites < 0) throw ConfigError("subsample_sites: must be non-negative");
      if (subsample_sites > s.num_sites())
        throw ConfigError("subsample_sites: more sites requested than locations");
      break;
    }
  }
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv{
      {"command", command_name(command)},
      {"seed", seed ? std::to_string(*seed) : ""},
      {"model", model},
      {"locations", locations},
      {"particles", std::to_string(particles)},
      {"delta", fmt(delta)},
      {"window", window},
      {"batches", std::to_string(batches)},
      {"rejuvenation_period", std::to_string(effective_rejuvenation_period())},
      {"moves_per_trigger", std::to_string(moves_per_trigger)},
      {"prior_shape", fmt(prior_shape)},
      {"prior_scale", fmt(prior_scale)},
      {"prior_bound", fmt(prior_bound)},
      {"constrain_w_lt_v", constrain_w_lt_v ? "true" : "false"},
      {"fix", fix},
      {"data", data.string()},
      {"regressors", regressors.string()},
      {"posterior", posterior.string()},
  };
  switch (command) {
    case Command::Simulate:
      kv["n"] = std::to_string(n);
      kv["step_hours"] = fmt(step_hours);
      kv["true_w"] = fmt(true_w);
      kv["true_v"] = fmt(true_v);
      kv["true_sigma2"] = fmt(true_sigma2);
      kv["true_psi"] = fmt(true_psi);
      kv["missing_prob"] = fmt(missing_prob);
      kv["humidity"] = humidity ? "true" : "false";
      break;
    case Command::Forecast:
      kv["horizon"] = std::to_string(horizon);
      kv["step_hours"] = fmt(step_hours);
      break;
    case Command::Predict:
      kv["draws"] = std::to_string(draws);
      break;
    case Command::Compare:
      kv["models"] = models;
      kv["replicates"] = std::to_string(replicates);
      kv["subsample_sites"] = std::to_string(subsample_sites);
      kv["subsample_length"] = std::to_string(subsample_length);
      break;
    case Command::Fit:
      break;
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunConfig::provenance() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# config_hash=%016llx seed=%llu", static_cast<unsigned long long>(hash()),
                static_cast<unsigned long long>(seed.value_or(0)));
  return buf;
}

}  // namespace sdlm::cli
