#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "sdlm/data_io.hpp"
#include "sdlm/error.hpp"
#include "sdlm/filter.hpp"
#include "sdlm/stats.hpp"

namespace sdlm::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  if (std::isnan(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Files of one run, written together once every computation has finished.
class OutputSet {
 public:
  explicit OutputSet(const RunConfig& config) : config_(config) {}

  std::ostringstream& add(const std::string& name) {
    files_.emplace_back(name, std::make_unique<std::ostringstream>());
    auto& os = *files_.back().second;
    os << config_.provenance() << '\n';
    return os;
  }

  void write(std::ostream& log, double wall_seconds) const {
    fs::create_directories(config_.out);
    for (const auto& [name, body] : files_) write_file(config_.out / name, body->str());
    std::ostringstream meta;
    meta << config_.provenance() << '\n';
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_.hash()));
    meta << "config_hash=" << hash << '\n' << "version=" << SDLM_VERSION << '\n';
    meta << "wall_seconds=" << num(wall_seconds) << '\n' << config_.canonical();
    write_file(config_.out / "run.meta", meta.str());
    for (const auto& f : files_) log << "wrote " << (config_.out / f.first).string() << '\n';
  }

 private:
  static void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
    out.flush();
    if (!out) throw InputError("failed to write " + path.string());
  }

  const RunConfig& config_;
  std::vector<std::pair<std::string, std::unique_ptr<std::ostringstream>>> files_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<ObservationRecord> load_series(const fs::path& path, int sites) {
  auto records = read_series(path, sites);
  if (records.empty()) throw InputError(path.string() + ": no observations");
  for (const auto& r : records)
    if (r.sites() != sites) throw InputError(path.string() + ": site count does not match the locations");
  return records;
}

std::vector<ObservationRecord> load_regressors(const RunConfig& config, const DlmSpec& spec) {
  if (!spec.needs_regressors() || config.regressors.empty()) return {};
  return load_series(config.regressors, spec.num_sites());
}

void write_summary(std::ostream& os, const ParticleSet& set, const std::vector<std::string>& names) {
  os << "parameter,median,q025,q975\n";
  const Eigen::MatrixXd p = set.params();
  const Eigen::VectorXd w = set.weights();
  const std::span<const double> ws(w.data(), static_cast<std::size_t>(w.size()));
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    const Eigen::VectorXd col = p.col(c);
    const std::span<const double> vs(col.data(), static_cast<std::size_t>(col.size()));
    os << names[static_cast<std::size_t>(c)] << ',' << num(stats::weighted_quantile(vs, ws, 0.5)) << ','
       << num(stats::weighted_quantile(vs, ws, 0.025)) << ',' << num(stats::weighted_quantile(vs, ws, 0.975))
       << '\n';
  }
}

struct LoadedPosterior {
  std::vector<StaticParams> params;
  std::vector<double> weights;
  std::vector<FilterState> states;
};

LoadedPosterior load_posterior(const fs::path& dir, const DlmSpec& spec) {
  const Table post = read_table(dir / "posterior.csv");
  const Table term = read_table(dir / "terminal_states.csv");
  const auto names = StaticParams::names(spec.num_sites(), spec.state_dim_per_site());
  const std::size_t w_col = post.column("weight");
  std::vector<std::size_t> cols;
  for (const auto& n : names) cols.push_back(post.column(n));
  const auto D = static_cast<Eigen::Index>(spec.state_dim());
  if (term.header.size() != static_cast<std::size_t>(2 + D + D * D))
    throw InputError((dir / "terminal_states.csv").string() + ": state dimension does not match the model");
  if (term.rows.size() != post.rows.size())
    throw InputError(dir.string() + ": posterior and terminal states have different particle counts");

  LoadedPosterior out;
  for (std::size_t k = 0; k < post.rows.size(); ++k) {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) flat[static_cast<Eigen::Index>(c)] = post.rows[k][cols[c]];
    out.params.emplace_back(spec.num_sites(), spec.state_dim_per_site(), flat);
    out.weights.push_back(post.rows[k][w_col]);
    const auto& row = term.rows[k];
    FilterState s;
    s.t_last = row[1];
    s.m = Eigen::Map<const Eigen::VectorXd>(row.data() + 2, D);
    s.C = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(row.data() + 2 + D,
                                                                                                   D, D);
    out.states.push_back(std::move(s));
  }
  if (out.params.empty()) throw InputError(dir.string() + ": empty posterior");
  return out;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError("table has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (t.header.empty()) {
      while (std::getline(ss, cell, ',')) t.header.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell));
      } catch (const std::exception&) {
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
      }
    }
    if (row.size() != t.header.size())
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(t.header.size()) + " cells");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<Measurement> measurements_for(const DlmSpec& spec, std::span<const ObservationRecord> records,
                                          std::span<const ObservationRecord> regressor_records) {
  if (!spec.needs_regressors()) return to_measurements(records, Variable::Temperature);
  if (!regressor_records.empty()) return to_measurements(records, regressor_records);
  return to_measurements(records, Variable::Humidity);
}

FitRun fit_designs(const RunConfig& config, const DlmSpec& spec, const PriorSpec& prior,
                   std::span<const StepDesign> designs, std::uint64_t seed) {
  IbisConfig ic;
  ic.particles = config.particles;
  ic.delta = config.delta;
  ic.window_hours = config.window_hours();
  ic.rejuvenation_period = config.effective_rejuvenation_period();
  ic.moves_per_trigger = config.moves_per_trigger;
  ic.workers = config.workers;
  const StatePrior state_prior = StatePrior::default_for(spec);

  FitRun run;
  if (config.batches == 1) {
    Rng rng(seed);
    IbisResult r = run_sampler(ic, designs, prior, state_prior, spec, rng);
    run.diagnostics.push_back({0, r.triggers.size(), r.mean_acceptance(), r.move_filter_steps, r.wall_seconds});
    for (const auto& t : r.triggers) run.triggers.push_back({0, t});
    run.set = std::move(r.set);
    run.evidence = std::move(r.evidence);
    run.wall_seconds = r.wall_seconds;
    return run;
  }
  BatchPlan plan;
  plan.n_batches = config.batches;
  plan.particles_per_batch = config.particles / static_cast<std::size_t>(config.batches);
  plan.rejuvenation_period = ic.rejuvenation_period;
  plan.master_seed = seed;
  BatchedResult r = run_batched(ic, plan, designs, prior, state_prior, spec, config.workers);
  for (std::size_t b = 0; b < r.batches.size(); ++b)
    for (const auto& t : r.batches[b].triggers) run.triggers.push_back({static_cast<int>(b), t});
  run.diagnostics = std::move(r.diagnostics);
  run.set = std::move(r.set);
  run.evidence = std::move(r.evidence);
  run.wall_seconds = r.wall_seconds;
  return run;
}

void cmd_simulate(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const DlmSpec spec = config.spec();
  SyntheticConfig sc{spec,
                     StaticParams::uniform(spec, config.true_w, config.true_v, config.true_sigma2, config.true_psi),
                     StatePrior::default_for(spec), config.n, config.step_hours, {}, std::nullopt};
  if (config.missing_prob > 0.0)
    sc.missing.probability.assign(static_cast<std::size_t>(spec.num_sites()), config.missing_prob);
  const DlmSpec hspec = DlmSpec::humidity(spec.locations());
  if (config.humidity)
    sc.humidity = HumidityTruth{
        StaticParams::uniform(hspec, config.true_w, config.true_v, config.true_sigma2, config.true_psi),
        StatePrior::default_for(hspec)};
  Rng rng(*config.seed);
  const SyntheticSeries series = simulate(sc, rng);

  OutputSet out(config);
  emit_series(out.add("series.csv"), series.records);
  const auto write_truths = [&](const std::string& name, const DlmSpec& s, const StaticParams& p) {
    auto& os = out.add(name);
    os << "parameter,value\n";
    const auto names = StaticParams::names(s.num_sites(), s.state_dim_per_site());
    for (Eigen::Index i = 0; i < p.size(); ++i) os << names[static_cast<std::size_t>(i)] << ',' << num(p.flat()[i]) << '\n';
  };
  const auto write_states = [&](const std::string& name, const std::vector<Eigen::VectorXd>& states) {
    auto& os = out.add(name);
    os << "t_hours";
    for (Eigen::Index d = 0; d < states.front().size(); ++d) os << ",theta_" << d;
    os << '\n';
    for (std::size_t i = 0; i < states.size(); ++i) {
      os << num(series.records[i].time);
      for (Eigen::Index d = 0; d < states[i].size(); ++d) os << ',' << num(states[i][d]);
      os << '\n';
    }
  };
  write_truths("truths.csv", spec, sc.truths);
  write_states("states.csv", series.states);
  if (sc.humidity) {
    write_truths("humidity_truths.csv", hspec, sc.humidity->params);
    write_states("humidity_states.csv", series.humidity_states);
  }
  log << "simulated " << series.records.size() << " records at " << spec.num_sites() << " sites (" << spec.name()
      << ", " << spec.num_params() << " parameters)\n";
  out.write(log, seconds_since(start));
}

void cmd_fit(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const DlmSpec spec = config.spec();
  const PriorSpec prior = config.prior(spec);
  const auto records = load_series(config.data, spec.num_sites());
  const auto regressors = load_regressors(config, spec);
  const auto designs = build_designs(spec, measurements_for(spec, records, regressors));

  const FitRun run = fit_designs(config, spec, prior, designs, *config.seed);
  const auto names = StaticParams::names(spec.num_sites(), spec.state_dim_per_site());

  OutputSet out(config);
  {
    auto& os = out.add("posterior.csv");
    os << "weight,batch";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    const Eigen::VectorXd w = run.set.weights();
    for (std::size_t k = 0; k < run.set.size(); ++k) {
      const Particle& p = run.set.particles[k];
      os << num(w[static_cast<Eigen::Index>(k)]) << ',' << p.batch;
      for (Eigen::Index i = 0; i < p.params.size(); ++i) os << ',' << num(p.params.flat()[i]);
      os << '\n';
    }
  }
  write_summary(out.add("summary.csv"), run.set, names);
  {
    auto& os = out.add("evidence.csv");
    os << "t_hours,log_factor,cumulative\n";
    for (const auto& e : run.evidence) os << num(e.time) << ',' << num(e.log_factor) << ',' << num(e.cumulative) << '\n';
  }
  {
    auto& os = out.add("triggers.csv");
    os << "batch,t_hours,index,ess,scheduled,window,moved,acceptance\n";
    for (const auto& [batch, t] : run.triggers)
      os << batch << ',' << num(t.time) << ',' << t.index << ',' << num(t.ess) << ',' << (t.scheduled ? 1 : 0) << ','
         << t.window << ',' << (t.moved ? 1 : 0) << ',' << num(t.acceptance_rate) << '\n';
  }
  {
    auto& os = out.add("terminal_states.csv");
    const int D = spec.state_dim();
    os << "particle,t_last";
    for (int d = 0; d < D; ++d) os << ",m_" << d;
    for (int r = 0; r < D; ++r)
      for (int c = 0; c < D; ++c) os << ",C_" << r << '_' << c;
    os << '\n';
    for (std::size_t k = 0; k < run.set.size(); ++k) {
      const FilterState& f = run.set.particles[k].filter;
      os << k << ',' << num(f.t_last);
      for (int d = 0; d < D; ++d) os << ',' << num(f.m[d]);
      for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c) os << ',' << num(f.C(r, c));
      os << '\n';
    }
  }
  {
    auto& os = out.add("batches.csv");
    os << "batch,triggers,mean_acceptance,move_filter_steps,wall_seconds\n";
    for (const auto& d : run.diagnostics)
      os << d.batch << ',' << d.triggers << ',' << num(d.mean_acceptance) << ',' << d.move_filter_steps << ','
         << num(d.wall_seconds) << '\n';
  }
  log << "fitted " << spec.name() << " to " << designs.size() << " records with " << run.set.size()
      << " particles; log evidence " << num(run.evidence.back().cumulative) << ", " << run.triggers.size()
      << " resample-move steps\n";
  out.write(log, seconds_since(start));
}

void cmd_forecast(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const DlmSpec spec = config.spec();
  const LoadedPosterior post = load_posterior(config.posterior, spec);
  const double t_last = post.states.front().t_last;

  std::vector<Eigen::VectorXd> regs;
  if (spec.needs_regressors()) {
    for (const auto& r : load_series(config.regressors, spec.num_sites())) {
      if (r.time <= t_last) continue;
      Eigen::VectorXd x(spec.num_sites());
      for (int j = 0; j < spec.num_sites(); ++j)
        x[j] = r.temperature[j] ? *r.temperature[j] : std::numeric_limits<double>::quiet_NaN();
      regs.push_back(x);
      if (static_cast<int>(regs.size()) == config.horizon) break;
    }
    if (static_cast<int>(regs.size()) < config.horizon)
      throw InputError("regressors: fewer future temperature records than the horizon");
  }

  const std::size_t N = post.params.size();
  const int L = spec.num_sites();
  const int H = config.horizon;
  std::vector<Eigen::MatrixXd> means(static_cast<std::size_t>(H), Eigen::MatrixXd(static_cast<Eigen::Index>(N), L));
  std::vector<Eigen::MatrixXd> sds = means;
  for (std::size_t k = 0; k < N; ++k) {
    const ParamModel model(spec, post.params[k]);
    const auto fm = forecast_moments(post.states[k], H, config.step_hours, spec, model, regs);
    for (int h = 0; h < H; ++h) {
      means[static_cast<std::size_t>(h)].row(static_cast<Eigen::Index>(k)) = fm[static_cast<std::size_t>(h)].mean;
      sds[static_cast<std::size_t>(h)].row(static_cast<Eigen::Index>(k)) =
          fm[static_cast<std::size_t>(h)].cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    }
  }
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(post.weights.data(), static_cast<Eigen::Index>(N));

  OutputSet out(config);
  auto& os = out.add("forecast.csv");
  os << "horizon,t_hours,site,mean,q025,q975\n";
  for (int h = 0; h < H; ++h) {
    const auto& mu = means[static_cast<std::size_t>(h)];
    const auto& sd = sds[static_cast<std::size_t>(h)];
    for (int j = 0; j < L; ++j) {
      const Eigen::VectorXd mj = mu.col(j);
      const Eigen::VectorXd sj = sd.col(j);
      os << h + 1 << ',' << num(t_last + (h + 1) * config.step_hours) << ',' << j << ',' << num(w.dot(mj) / w.sum())
         << ',' << num(stats::normal_mixture_quantile(mj, sj, w, 0.025)) << ','
         << num(stats::normal_mixture_quantile(mj, sj, w, 0.975)) << '\n';
    }
  }
  log << "forecast " << H << " step(s) from t=" << num(t_last) << " using " << N << " particles\n";
  out.write(log, seconds_since(start));
}

void cmd_predict(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const DlmSpec spec = config.spec();
  const LoadedPosterior post = load_posterior(config.posterior, spec);
  const auto records = load_series(config.data, spec.num_sites());
  const auto regressors = load_regressors(config, spec);
  const auto meas = measurements_for(spec, records, regressors);
  const auto designs = build_designs(spec, meas);
  const StatePrior state_prior = StatePrior::default_for(spec);

  Rng rng(*config.seed);
  std::discrete_distribution<std::size_t> pick(post.weights.begin(), post.weights.end());
  const int L = spec.num_sites();
  const std::size_t n = meas.size();
  // diffs[i * L + j] holds the draws of X_ij - x_ij
  std::vector<std::vector<double>> diffs(n * static_cast<std::size_t>(L));
  std::vector<FilterState> history;
  for (std::size_t d = 0; d < config.draws; ++d) {
    const std::size_t k = pick(rng);
    const ParamModel model(spec, post.params[k]);
    run_filter(state_prior, designs, model, nullptr, &history);
    const SmoothingDraw draw = backward_sample(history, designs, spec, model, rng);
    const auto x = predict_within_sample(draw, meas, spec, model, rng);
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < L; ++j)
        if (std::isfinite(meas[i].values[j]) && std::isfinite(x[i][j]))
          diffs[i * static_cast<std::size_t>(L) + static_cast<std::size_t>(j)].push_back(x[i][j] - meas[i].values[j]);
  }

  OutputSet out(config);
  auto& os = out.add("predict.csv");
  os << "t_hours,site,observed,mean_diff,q025,q975\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < L; ++j) {
      const auto& v = diffs[i * static_cast<std::size_t>(L) + static_cast<std::size_t>(j)];
      os << num(meas[i].time) << ',' << j << ',' << num(meas[i].values[j]);
      if (v.empty()) {
        os << ",,,\n";
        continue;
      }
      const std::vector<double> eq(v.size(), 1.0);
      os << ',' << num(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size())) << ','
         << num(stats::weighted_quantile(v, eq, 0.025)) << ',' << num(stats::weighted_quantile(v, eq, 0.975)) << '\n';
    }
  }
  log << "within-sample predictive over " << n << " records from " << config.draws << " posterior draws\n";
  out.write(log, seconds_since(start));
}

void cmd_compare(const RunConfig& config, std::ostream& log) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto locations = config.parsed_locations();
  const int L = static_cast<int>(locations.size());
  const auto records = load_series(config.data, L);
  std::vector<ObservationRecord> regressor_records;
  if (!config.regressors.empty()) regressor_records = load_series(config.regressors, L);
  const auto models = config.parsed_models();
  const std::string& baseline = models.back();
  if (config.subsample_length > records.size())
    throw ConfigError("subsample_length: longer than the series (" + std::to_string(records.size()) + " records)");

  struct Trace {
    int replicate;
    std::string model;
    std::vector<EvidencePoint> evidence;
  };
  std::vector<Trace> traces;
  for (int r = 0; r < config.replicates; ++r) {
    const std::uint64_t seed = derive_seed(*config.seed, static_cast<std::uint64_t>(r));
    Rng pick(derive_seed(seed, 0xC0FFEE));
    std::vector<int> sites(static_cast<std::size_t>(L));
    std::iota(sites.begin(), sites.end(), 0);
    if (config.subsample_sites > 0 && config.subsample_sites < L) {
      std::shuffle(sites.begin(), sites.end(), pick);
      sites.resize(static_cast<std::size_t>(config.subsample_sites));
      std::sort(sites.begin(), sites.end());
    }
    std::size_t first = 0;
    std::size_t count = records.size();
    if (config.subsample_length > 0) {
      count = config.subsample_length;
      first = std::uniform_int_distribution<std::size_t>(0, records.size() - count)(pick);
    }
    std::vector<Location> locs;
    for (int j : sites) {
      Location loc = locations[static_cast<std::size_t>(j)];
      loc.id = static_cast<int>(locs.size());
      locs.push_back(loc);
    }
    const auto subset = [&](std::span<const ObservationRecord> src, double origin) {
      std::vector<ObservationRecord> out;
      for (const auto& rec : src) {
        ObservationRecord s;
        s.time = rec.time - origin;
        for (int j : sites) {
          s.temperature.push_back(rec.temperature[static_cast<std::size_t>(j)]);
          s.humidity.push_back(rec.humidity[static_cast<std::size_t>(j)]);
        }
        out.push_back(std::move(s));
      }
      return out;
    };
    const double origin = records[first].time;
    const auto data = subset(std::span(records).subspan(first, count), origin);
    const auto regs = subset(regressor_records, origin);

    for (const auto& m : models) {
      const DlmSpec spec = DlmSpec::parse(m, locs);
      const PriorSpec prior(spec, config.prior_shape, config.prior_scale, config.prior_bound, config.constrain_w_lt_v);
      const auto designs = build_designs(spec, measurements_for(spec, data, regs));
      FitRun run = fit_designs(config, spec, prior, designs, seed);
      log << "replicate " << r + 1 << '/' << config.replicates << ' ' << m << ": log evidence "
          << num(run.evidence.back().cumulative) << '\n';
      traces.push_back({r, m, std::move(run.evidence)});
    }
  }

  OutputSet out(config);
  auto& trace_os = out.add("compare.csv");
  trace_os << "replicate,model,baseline,step,t_hours,log_bf\n";
  auto& evid_os = out.add("compare_evidence.csv");
  evid_os << "replicate,model,log_evidence\n";
  std::vector<std::vector<std::vector<double>>> by_model(models.size());
  const std::size_t per_rep = models.size();
  for (int r = 0; r < config.replicates; ++r) {
    const Trace& base = traces[static_cast<std::size_t>(r) * per_rep + per_rep - 1];
    for (std::size_t mi = 0; mi < per_rep; ++mi) {
      const Trace& t = traces[static_cast<std::size_t>(r) * per_rep + mi];
      evid_os << r << ',' << t.model << ',' << num(t.evidence.back().cumulative) << '\n';
      if (mi + 1 == per_rep) continue;
      const auto bf = log_bayes_factor(t.evidence, base.evidence);
      for (std::size_t i = 0; i < bf.size(); ++i)
        trace_os << r << ',' << t.model << ',' << baseline << ',' << i << ',' << num(t.evidence[i].time) << ','
                 << num(bf[i]) << '\n';
      by_model[mi].push_back(bf);
    }
  }
  auto& sum_os = out.add("compare_summary.csv");
  sum_os << "model,baseline,step,mean,q025,q975\n";
  for (std::size_t mi = 0; mi + 1 < per_rep; ++mi) {
    const auto& reps = by_model[mi];
    std::size_t len = reps.front().size();
    for (const auto& v : reps) len = std::min(len, v.size());
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<double> vals;
      for (const auto& v : reps) vals.push_back(v[i]);
      const std::vector<double> eq(vals.size(), 1.0);
      sum_os << models[mi] << ',' << baseline << ',' << i << ','
             << num(std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size())) << ','
             << num(stats::weighted_quantile(vals, eq, 0.025)) << ',' << num(stats::weighted_quantile(vals, eq, 0.975))
             << '\n';
    }
  }
  out.write(log, seconds_since(start));
}

void run_command(const RunConfig& config, std::ostream& log) {
  switch (config.command) {
    case Command::Simulate: return cmd_simulate(config, log);
    case Command::Fit: return cmd_fit(config, log);
    case Command::Forecast: return cmd_forecast(config, log);
    case Command::Predict: return cmd_predict(config, log);
    case Command::Compare: return cmd_compare(config, log);
  }
}

}  // namespace sdlm::cli
