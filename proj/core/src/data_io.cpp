#include "sdlm/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string_view>
#include <tuple>

#include "sdlm/error.hpp"
#include "sdlm/linalg.hpp"

namespace sdlm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = line.find(sep, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string row_context(std::size_t row) { return "row " + std::to_string(row) + ": "; }

std::optional<double> bucket_mean(std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::optional<double> parse_timestamp(const std::string& text) {
  const std::string_view s = trim(text);
  if (s.size() < 19) return std::nullopt;
  const auto year = parse_int<int>(s.substr(0, 4));
  const auto month = parse_int<unsigned>(s.substr(5, 2));
  const auto day = parse_int<unsigned>(s.substr(8, 2));
  const auto hour = parse_int<int>(s.substr(11, 2));
  const auto minute = parse_int<int>(s.substr(14, 2));
  const auto second = parse_int<int>(s.substr(17, 2));
  if (!year || !month || !day || !hour || !minute || !second) return std::nullopt;
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':')
    return std::nullopt;
  if (*hour > 23 || *minute > 59 || *second > 60) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*year}, std::chrono::month{*month},
                                        std::chrono::day{*day}};
  if (!ymd.ok()) return std::nullopt;

  std::string_view rest = s.substr(19);
  double frac = 0.0;
  if (!rest.empty() && rest.front() == '.') {
    std::size_t len = 1;
    while (len < rest.size() && std::isdigit(static_cast<unsigned char>(rest[len]))) ++len;
    if (len == 1) return std::nullopt;
    const auto f = parse_double(std::string("0") + std::string(rest.substr(0, len)));
    if (!f) return std::nullopt;
    frac = *f;
    rest.remove_prefix(len);
  }
  double offset = 0.0;
  if (rest == "Z" || rest.empty()) {
  } else if ((rest.front() == '+' || rest.front() == '-') && (rest.size() == 6 || rest.size() == 5)) {
    const auto oh = parse_int<int>(rest.substr(1, 2));
    const auto om = parse_int<int>(rest.substr(rest.size() - 2, 2));
    if (!oh || !om || (rest.size() == 6 && rest[3] != ':')) return std::nullopt;
    offset = (rest.front() == '+' ? 1.0 : -1.0) * (*oh * 3600.0 + *om * 60.0);
  } else {
    return std::nullopt;
  }
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 + *hour * 3600.0 + *minute * 60.0 + *second + frac - offset;
}

IngestResult ingest_csv(std::istream& in, const SiteMap& sites, const IngestOptions& options) {
  int n_sites = 0;
  for (const auto& [label, idx] : sites) {
    if (idx < 0) throw ConfigError("site map: negative index for '" + label + "'");
    n_sites = std::max(n_sites, idx + 1);
  }
  // hour -> per-site readings (temperature, humidity)
  using Bucket = std::vector<std::pair<std::vector<double>, std::vector<double>>>;
  std::map<long long, Bucket> buckets;
  IngestResult result;

  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split(view);
    if (fields.size() != 4) throw InputError(row_context(row) + "expected 4 fields, got " + std::to_string(fields.size()));
    if (row == 1 && fields[0] == "timestamp_iso8601") continue;
    const auto ts = parse_timestamp(std::string(fields[0]));
    if (!ts) throw InputError(row_context(row) + "unparseable timestamp '" + std::string(fields[0]) + "'");
    const auto site = sites.find(std::string(fields[1]));
    if (site == sites.end()) throw InputError(row_context(row) + "unknown site '" + std::string(fields[1]) + "'");
    const bool is_temp = fields[2] == "temperature";
    if (!is_temp && fields[2] != "humidity")
      throw InputError(row_context(row) + "unknown variable '" + std::string(fields[2]) + "'");
    const auto value = parse_double(fields[3]);
    if (!value || !std::isfinite(*value))
      throw InputError(row_context(row) + "non-numeric value '" + std::string(fields[3]) + "'");

    const auto hour = static_cast<long long>(std::floor(*ts / 3600.0));
    Bucket& b = buckets[hour];
    if (b.empty()) b.resize(static_cast<std::size_t>(n_sites));
    auto& cell = b[static_cast<std::size_t>(site->second)];
    (is_temp ? cell.first : cell.second).push_back(*value);
    ++result.rows;
  }
  if (buckets.empty()) return result;

  result.origin_hour = buckets.begin()->first;
  const auto make_record = [&](long long hour, Bucket* b) {
    ObservationRecord rec;
    rec.time = static_cast<double>(hour - result.origin_hour);
    rec.temperature.assign(static_cast<std::size_t>(n_sites), std::nullopt);
    rec.humidity.assign(static_cast<std::size_t>(n_sites), std::nullopt);
    if (b == nullptr) return rec;
    for (int j = 0; j < n_sites; ++j) {
      auto& cell = (*b)[static_cast<std::size_t>(j)];
      rec.temperature[j] = bucket_mean(cell.first);
      rec.humidity[j] = bucket_mean(cell.second);
      if (rec.humidity[j] && !rec.temperature[j]) {
        rec.humidity[j].reset();
        ++result.co_missing_warnings;
      }
    }
    return rec;
  };

  long long expected = result.origin_hour;
  for (auto& [hour, b] : buckets) {
    if (options.retain_empty_hours)
      for (; expected < hour; ++expected) result.records.push_back(make_record(expected, nullptr));
    ObservationRecord rec = make_record(hour, &b);
    expected = hour + 1;
    if (!options.retain_empty_hours && rec.all_missing()) continue;
    result.records.push_back(std::move(rec));
  }
  if (!result.records.empty() && result.records.front().time != 0.0) {
    const double shift = result.records.front().time;
    result.origin_hour += static_cast<long long>(shift);
    for (auto& r : result.records) r.time -= shift;
  }
  return result;
}

IngestResult ingest_csv(const std::filesystem::path& path, const SiteMap& sites, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return ingest_csv(in, sites, options);
}

void emit_series(std::ostream& out, const std::vector<ObservationRecord>& records) {
  out << kSeriesHeader << '\n';
  char buf[64];
  const auto fmt = [&](const std::optional<double>& v) -> std::string {
    if (!v) return {};
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
  };
  for (const auto& rec : records) {
    const std::string t = fmt(rec.time);
    for (int j = 0; j < rec.sites(); ++j) {
      const std::optional<double> h =
          j < static_cast<int>(rec.humidity.size()) ? rec.humidity[j] : std::optional<double>{};
      out << t << ',' << j << ',' << fmt(rec.temperature[j]) << ',' << fmt(h) << ','
          << (rec.temperature[j] ? 0 : 1) << ',' << (h ? 0 : 1) << '\n';
    }
  }
  if (!out) throw InputError("failed to write series");
}

void emit_series(const std::filesystem::path& path, const std::vector<ObservationRecord>& records,
                 const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  if (!comment.empty()) out << "# " << comment << '\n';
  emit_series(out, records);
  out.flush();
  if (!out) throw InputError("failed to write " + path.string());
}

std::vector<ObservationRecord> read_series(std::istream& in, int sites) {
  struct Row {
    double time;
    int site;
    std::optional<double> temp;
    std::optional<double> hum;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  int max_site = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (view == kSeriesHeader) continue;
    }
    const auto f = split(view);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (f.size() != 6) throw InputError(where + "expected 6 fields, got " + std::to_string(f.size()));
    const auto t = parse_double(f[0]);
    const auto site = parse_int<int>(f[1]);
    const auto tm = parse_int<int>(f[4]);
    const auto hm = parse_int<int>(f[5]);
    if (!t || !std::isfinite(*t)) throw InputError(where + "bad time '" + std::string(f[0]) + "'");
    if (!site || *site < 0) throw InputError(where + "bad site '" + std::string(f[1]) + "'");
    if (!tm || !hm || *tm < 0 || *tm > 1 || *hm < 0 || *hm > 1) throw InputError(where + "missing flags must be 0 or 1");
    Row r{*t, *site, std::nullopt, std::nullopt, line_no};
    if (*tm == 0) {
      r.temp = parse_double(f[2]);
      if (!r.temp || !std::isfinite(*r.temp)) throw InputError(where + "non-numeric temperature '" + std::string(f[2]) + "'");
    } else if (!f[2].empty()) {
      throw InputError(where + "temperature flagged missing but has a value");
    }
    if (*hm == 0) {
      r.hum = parse_double(f[3]);
      if (!r.hum || !std::isfinite(*r.hum)) throw InputError(where + "non-numeric humidity '" + std::string(f[3]) + "'");
    } else if (!f[3].empty()) {
      throw InputError(where + "humidity flagged missing but has a value");
    }
    if (r.hum && !r.temp) throw InputError(where + "humidity present without temperature");
    max_site = std::max(max_site, r.site);
    rows.push_back(r);
  }
  const int n_sites = sites > 0 ? sites : max_site + 1;
  std::vector<ObservationRecord> out;
  for (const Row& r : rows) {
    const std::string where = "line " + std::to_string(r.line) + ": ";
    if (r.site >= n_sites) throw InputError(where + "site " + std::to_string(r.site) + " out of range");
    if (out.empty() || r.time != out.back().time) {
      if (!out.empty() && !(r.time > out.back().time)) throw InputError(where + "times must be strictly increasing");
      ObservationRecord rec;
      rec.time = r.time;
      rec.temperature.assign(static_cast<std::size_t>(n_sites), std::nullopt);
      rec.humidity.assign(static_cast<std::size_t>(n_sites), std::nullopt);
      out.push_back(std::move(rec));
    }
    auto& rec = out.back();
    rec.temperature[r.site] = r.temp;
    rec.humidity[r.site] = r.hum;
  }
  return out;
}

std::vector<ObservationRecord> read_series(const std::filesystem::path& path, int sites) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_series(in, sites);
}

void SyntheticConfig::validate() const {
  if (n < 1) throw ConfigError("n: need at least one observation");
  if (!(step_hours > 0.0)) throw ConfigError("step_hours: must be positive");
  if (spec.family() == Family::HumidityConditional)
    throw ConfigError("model: simulate a temperature model and supply a humidity block");
  if (truths.size() != spec.num_params() || truths.sites() != spec.num_sites())
    throw ConfigError("truths: expected " + std::to_string(spec.num_params()) + " parameters");
  if (!(truths.flat().array() >= 0.0).all() || !truths.flat().allFinite())
    throw ConfigError("truths: parameters must be finite and non-negative");
  if (state_prior.m0.size() != spec.state_dim() || state_prior.C0.rows() != spec.state_dim() ||
      state_prior.C0.cols() != spec.state_dim())
    throw ConfigError("state_prior: dimension does not match the model");
  if (!missing.probability.empty()) {
    if (static_cast<int>(missing.probability.size()) != spec.num_sites())
      throw ConfigError("missing_prob: need one probability per site");
    for (double p : missing.probability)
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("missing_prob: must lie in [0, 1]");
  }
  for (const auto& o : missing.outages)
    if (o.site < 0 || o.site >= spec.num_sites() || !(o.end >= o.start))
      throw ConfigError("outage: bad site or interval");
  if (humidity) {
    const DlmSpec hs = DlmSpec::humidity(spec.locations());
    if (humidity->params.size() != hs.num_params())
      throw ConfigError("humidity truths: expected " + std::to_string(hs.num_params()) + " parameters");
    if (!(humidity->params.flat().array() >= 0.0).all())
      throw ConfigError("humidity truths: parameters must be non-negative");
    if (humidity->state_prior.m0.size() != hs.state_dim()) throw ConfigError("humidity state_prior: wrong dimension");
  }
}

namespace {

// Path of one DLM driven forward; `regressors` feeds the humidity family.
std::vector<Eigen::VectorXd> simulate_states(const DlmSpec& spec, const ParamModel& model, const StatePrior& prior,
                                             std::size_t n, double step_hours, Rng& rng) {
  std::vector<Eigen::VectorXd> states;
  states.reserve(n);
  states.push_back(linalg::sample_mvn(prior.m0, prior.C0, rng));
  const Eigen::MatrixXd G = system_matrix(spec, step_hours);
  Eigen::MatrixXd W;
  model.system_noise(step_hours, W);
  const Eigen::MatrixXd factor = linalg::psd_factor(W);
  for (std::size_t i = 1; i < n; ++i)
    states.push_back(G * states.back() + factor * linalg::standard_normal(G.rows(), rng));
  return states;
}

Eigen::VectorXd observe(const DlmSpec& spec, double t, const Eigen::VectorXd& state, const ParamModel& model,
                        const Eigen::VectorXd* regressors, Rng& rng) {
  const Eigen::MatrixXd F = obs_matrix(spec, t, regressors);
  Eigen::VectorXd x = F * state;
  x.array() += model.params().v().array().sqrt() * linalg::standard_normal(x.size(), rng).array();
  return x;
}

}  // namespace

SyntheticSeries simulate(const SyntheticConfig& config, Rng& rng) {
  config.validate();
  const DlmSpec& spec = config.spec;
  const int L = spec.num_sites();
  const ParamModel model(spec, config.truths);
  SyntheticSeries out;
  out.states = simulate_states(spec, model, config.state_prior, config.n, config.step_hours, rng);

  std::vector<Eigen::VectorXd> temps(config.n);
  for (std::size_t i = 0; i < config.n; ++i)
    temps[i] = observe(spec, static_cast<double>(i) * config.step_hours, out.states[i], model, nullptr, rng);

  std::vector<Eigen::VectorXd> hums;
  if (config.humidity) {
    const DlmSpec hs = DlmSpec::humidity(spec.locations());
    const ParamModel hmodel(hs, config.humidity->params);
    out.humidity_states = simulate_states(hs, hmodel, config.humidity->state_prior, config.n, config.step_hours, rng);
    hums.resize(config.n);
    for (std::size_t i = 0; i < config.n; ++i)
      hums[i] = observe(hs, static_cast<double>(i) * config.step_hours, out.humidity_states[i], hmodel, &temps[i], rng);
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  out.records.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    ObservationRecord rec;
    rec.time = static_cast<double>(i) * config.step_hours;
    rec.temperature.assign(static_cast<std::size_t>(L), std::nullopt);
    rec.humidity.assign(static_cast<std::size_t>(L), std::nullopt);
    for (int j = 0; j < L; ++j) {
      bool missing = false;
      if (!config.missing.probability.empty()) missing = unif(rng) < config.missing.probability[j];
      for (const auto& o : config.missing.outages)
        if (o.site == j && rec.time >= o.start && rec.time < o.end) missing = true;
      if (missing) continue;
      rec.temperature[j] = temps[i][j];
      if (config.humidity) rec.humidity[j] = hums[i][j];
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace sdlm
