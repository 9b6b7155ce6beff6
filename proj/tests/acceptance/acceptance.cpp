// Acceptance runner. `sdlm_acceptance c4` runs one criterion, no argument runs
// all of them. Each criterion prints one line: "C<k> PASS|FAIL <details>".

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "grid.hpp"
#include "oracle.hpp"
#include "sdlm/data_io.hpp"
#include "sdlm/filter.hpp"
#include "sdlm/ibis.hpp"
#include "sdlm/parallel.hpp"
#include "sdlm/prior.hpp"
#include "sdlm/stats.hpp"

using namespace sdlm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// MH moves per particle per trigger for the posterior-accuracy runs on the
/// 14-parameter study.
constexpr int kStudyMoves = 5;

/// The simulation-study truths: W = 0.01, V = sigma² = 1, psi = 0.01.
StaticParams study_truths(const DlmSpec& spec) { return StaticParams::uniform(spec, 0.01, 1.0, 1.0, 0.01); }

std::vector<StepDesign> study_designs(const DlmSpec& spec, std::size_t n, std::uint64_t seed) {
  const auto series = fixtures::simulated(spec, study_truths(spec), n, seed);
  return build_designs(spec, to_measurements(series.records, Variable::Temperature));
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
  return {m.col(c).data(), m.col(c).data() + m.rows()};
}

std::vector<double> margin_ks(const ParticleSet& a, const ParticleSet& b) {
  const Eigen::MatrixXd pa = a.params(), pb = b.params();
  const Eigen::VectorXd wa = a.weights(), wb = b.weights();
  const std::vector<double> va(wa.data(), wa.data() + wa.size()), vb(wb.data(), wb.data() + wb.size());
  std::vector<double> out;
  for (Eigen::Index c = 0; c < pa.cols(); ++c) out.push_back(stats::weighted_ks(column(pa, c), va, column(pb, c), vb));
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int count_below(const std::vector<double>& v, double bound) {
  return static_cast<int>(std::count_if(v.begin(), v.end(), [&](double x) { return x < bound; }));
}

// 1. Forward filter against the stacked joint Gaussian.
Outcome c1() {
  Rng rng(101);
  std::uniform_int_distribution<int> sites(1, 2), length(1, 20), family(0, 3);
  std::uniform_real_distribution<double> missing(0.0, 0.5);
  double worst = 0.0;
  int failures = 0;
  for (int c = 0; c < 50; ++c) {
    const auto locs = fixtures::scattered_sites(sites(rng), rng);
    const int f = family(rng);
    const DlmSpec spec = f == 0   ? DlmSpec::sinusoid(locs)
                         : f == 1 ? DlmSpec::fourier(1, locs)
                         : f == 2 ? DlmSpec::fourier(2, locs)
                                  : DlmSpec::humidity(locs);
    const StaticParams params = fixtures::random_params(spec, rng);
    const auto data = fixtures::random_series(spec, length(rng), missing(rng), rng);
    const StatePrior prior = StatePrior::default_for(spec);
    const double got = run_filter(prior, build_designs(spec, data), ParamModel(spec, params));
    const double want = oracle::log_likelihood(oracle::from_library(spec, params, prior), data);
    const double rel = want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-6)) ++failures;
  }
  return {failures == 0, "50 configurations, worst relative error " + fmt("%.3g", worst)};
}

// 2. Backward sampler moments against the exact smoothing Gaussian.
Outcome c2() {
  Rng rng(202);
  const int draws = 100000;
  int checked = 0, outside = 0;
  double worst = 0.0;
  for (const DlmSpec& spec : {DlmSpec::sinusoid(fixtures::sites(1)), DlmSpec::fourier(1, fixtures::sites(1))}) {
    const StaticParams params = StaticParams::uniform(spec, 0.2, 0.5, 0.3, 0.1);
    const StatePrior prior = StatePrior::default_for(spec);
    const auto data = fixtures::random_series(spec, 5, 0.2, rng);
    const auto designs = build_designs(spec, data);
    const ParamModel model(spec, params);
    std::vector<FilterState> history;
    run_filter(prior, designs, model, nullptr, &history);
    const auto [mean, cov] = oracle::smoothing(oracle::from_library(spec, params, prior), data);
    const Eigen::Index D = mean.size(), d = spec.state_dim();

    Eigen::MatrixXd x(draws, D);
    for (int r = 0; r < draws; ++r) {
      const SmoothingDraw s = backward_sample(history, designs, spec, model, rng);
      for (std::size_t i = 0; i < s.states.size(); ++i)
        x.row(r).segment(static_cast<Eigen::Index>(i) * d, d) = s.states[i].transpose();
    }
    const Eigen::VectorXd emp_mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - emp_mean.transpose();
    const Eigen::MatrixXd emp_cov = centered.transpose() * centered / (draws - 1.0);
    for (Eigen::Index i = 0; i < D; ++i) {
      const double z = std::abs(emp_mean[i] - mean[i]) / std::sqrt(cov(i, i) / draws);
      worst = std::max(worst, z);
      ++checked;
      outside += z > 3.0;
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double se = std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / draws);
        const double zc = std::abs(emp_cov(i, j) - cov(i, j)) / se;
        worst = std::max(worst, zc);
        ++checked;
        outside += zc > 3.0;
      }
    }
  }
  return {outside == 0, std::to_string(checked) + " moments, " + std::to_string(outside) +
                            " beyond 3 SE, largest deviation " + fmt("%.2f", worst) + " SE"};
}

// 3. One unknown parameter against grid quadrature.
Outcome c3() {
  const DlmSpec spec = DlmSpec::sinusoid(fixtures::sites(1));
  const StaticParams truth = StaticParams::uniform(spec, 0.01, 1.0, 0.01, 0.01);
  const Eigen::Index vi = truth.v_index(0);
  PriorSpec prior(spec);
  for (Eigen::Index i = 0; i < truth.size(); ++i)
    if (i != vi) prior.fix(i, truth.flat()[i]);
  const StatePrior state_prior = StatePrior::default_for(spec);
  const auto series = fixtures::simulated(spec, truth, 100, 303);
  const auto data = to_measurements(series.records, Variable::Temperature);
  const auto designs = build_designs(spec, data);

  // Only the observation variance moves with V, so the stacked state
  // covariance is built once and the grid reuses it.
  const oracle::Joint joint = oracle::build_joint(oracle::from_library(spec, truth, state_prior), data);
  const Eigen::MatrixXd S0 = joint.H * joint.state_cov * joint.H.transpose();
  const Eigen::VectorXd mu = joint.H * joint.state_mean;
  const auto log_lik = [&](double v) {
    Eigen::MatrixXd S = S0;
    S.diagonal().array() += v;
    return oracle::log_normal_density(joint.y, mu, S);
  };
  const auto& c = prior.component(vi);
  const oracle::GridPosterior grid = oracle::grid_posterior(
      [&](double v) { return truncated_inv_gamma_log_density(v, c.shape, c.scale, prior.bound()); }, log_lik, 1e-3,
      10.0, 10000);

  IbisConfig cfg;
  cfg.particles = 100000;
  Rng rng(33);
  const IbisResult r = run_ibis(cfg, designs, prior, state_prior, spec, rng);
  const Eigen::VectorXd w = r.set.weights();
  const Eigen::VectorXd v = r.set.params().col(vi);
  const double mean = w.dot(v);
  const double sd = std::sqrt(w.dot((v.array() - mean).square().matrix()));
  const double mean_err = std::abs(mean / grid.mean - 1.0);
  const double sd_err = std::abs(sd / grid.sd - 1.0);
  const double z_err = std::abs(std::exp(r.set.log_evidence - grid.log_evidence) - 1.0);
  return {mean_err <= 0.02 && sd_err <= 0.02 && z_err <= 0.02,
          "mean " + fmt("%.5f", mean) + " vs " + fmt("%.5f", grid.mean) + ", sd " + fmt("%.5f", sd) + " vs " +
              fmt("%.5f", grid.sd) + ", evidence ratio error " + fmt("%.4f", z_err)};
}

// 4. Credible-interval coverage on the two-site simulation study.
Outcome c4() {
  const DlmSpec spec = DlmSpec::sinusoid(fixtures::sites(2));
  const PriorSpec prior(spec);
  const StatePrior state_prior = StatePrior::default_for(spec);
  const StaticParams truth = study_truths(spec);
  IbisConfig cfg;
  cfg.particles = 10000;
  cfg.delta = 0.5;
  cfg.moves_per_trigger = kStudyMoves;
  bool pass = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto designs = study_designs(spec, 1300, derive_seed(seed, 1));
    Rng rng(seed);
    const IbisResult r = run_ibis(cfg, designs, prior, state_prior, spec, rng);
    const Eigen::MatrixXd p = r.set.params();
    const Eigen::VectorXd w = r.set.weights();
    const std::vector<double> wv(w.data(), w.data() + w.size());
    int covered = 0;
    for (Eigen::Index i = 0; i < p.cols(); ++i) {
      const auto x = column(p, i);
      const double lo = stats::weighted_quantile(x, wv, 0.025), hi = stats::weighted_quantile(x, wv, 0.975);
      covered += lo <= truth.flat()[i] && truth.flat()[i] <= hi;
    }
    pass = pass && covered >= 12;
    detail += (detail.empty() ? "" : ", ") + std::string("seed ") + std::to_string(seed) + ": " +
              std::to_string(covered) + "/14 covered";
  }
  return {pass, detail + " (R=" + std::to_string(kStudyMoves) + ")"};
}

struct StudyRun {
  DlmSpec spec = DlmSpec::sinusoid(fixtures::sites(2));
  PriorSpec prior{spec};
  StatePrior state_prior = StatePrior::default_for(spec);
  std::vector<StepDesign> designs = study_designs(spec, 1300, 505);

  IbisResult run(double window_hours, std::uint64_t seed) const {
    IbisConfig cfg;
    cfg.particles = 10000;
    cfg.window_hours = window_hours;
    cfg.moves_per_trigger = kStudyMoves;
    Rng rng(seed);
    return std::isinf(window_hours) ? run_ibis(cfg, designs, prior, state_prior, spec, rng)
                                    : run_online_ibis(cfg, designs, prior, state_prior, spec, rng);
  }
};

// 5. Online IBIS against full IBIS.
Outcome c5() {
  const StudyRun s;
  const IbisResult full = s.run(kInfiniteWindow, 55);
  const auto ks300 = margin_ks(s.run(300.0, 55).set, full.set);
  const auto ks100 = margin_ks(s.run(100.0, 55).set, full.set);
  const int agree = count_below(ks300, 0.1);
  const double m300 = median(ks300), m100 = median(ks100);
  return {agree >= 12 && m100 > m300, "T=300: " + std::to_string(agree) + "/14 margins with KS < 0.1, median KS " +
                                          fmt("%.4f", m300) + "; T=100 median KS " + fmt("%.4f", m100) +
                                          " (R=" + std::to_string(kStudyMoves) + ")"};
}

// 6. Batched engine against the serial sampler.
Outcome c6() {
  const StudyRun s;
  auto start = std::chrono::steady_clock::now();
  const IbisResult serial = s.run(kInfiniteWindow, 66);
  const double serial_seconds = seconds_since(start);

  BatchPlan plan;
  plan.n_batches = 20;
  plan.particles_per_batch = 500;
  plan.master_seed = 66;
  IbisConfig cfg;
  cfg.moves_per_trigger = kStudyMoves;
  start = std::chrono::steady_clock::now();
  const BatchedResult batched = run_batched(cfg, plan, s.designs, s.prior, s.state_prior, s.spec, 4);
  const double batched_seconds = seconds_since(start);

  const auto ks = margin_ks(batched.set, serial.set);
  const int agree = count_below(ks, 0.1);
  const double speedup = serial_seconds / batched_seconds;
  return {agree >= 12 && speedup >= 2.0,
          std::to_string(agree) + "/14 margins with KS < 0.1; speedup " + fmt("%.2f", speedup) + "x on 4 workers (" +
              std::to_string(std::thread::hardware_concurrency()) + " hardware threads, serial " +
              fmt("%.1f", serial_seconds) + " s, batched " + fmt("%.1f", batched_seconds) + " s, R=" +
              std::to_string(kStudyMoves) + ")"};
}

// 7. Bayes factor of the sinusoid against two harmonics on sinusoid data.
Outcome c7() {
  const auto locs = fixtures::sites(3);
  const DlmSpec sinusoid = DlmSpec::sinusoid(locs);
  const DlmSpec fourier = DlmSpec::fourier(2, locs);
  IbisConfig cfg;
  cfg.particles = 10000;
  double total = 0.0;
  int positive = 0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const auto series = fixtures::simulated(sinusoid, study_truths(sinusoid), 400, derive_seed(707, rep));
    std::vector<double> terminal;
    for (const DlmSpec* spec : {&sinusoid, &fourier}) {
      const auto designs = build_designs(*spec, to_measurements(series.records, Variable::Temperature));
      Rng rng(derive_seed(77, rep));
      terminal.push_back(
          run_ibis(cfg, designs, PriorSpec(*spec), StatePrior::default_for(*spec), *spec, rng).set.log_evidence);
    }
    total += terminal[0] - terminal[1];
    positive += terminal[0] > terminal[1];
  }
  const double mean = total / 10.0;
  return {mean > 0.0, "mean terminal log BF " + fmt("%.3f", mean) + ", positive in " + std::to_string(positive) + "/10 (R=" +
                          std::to_string(cfg.moves_per_trigger) + ")"};
}

// 8. One- and two-step forecast intervals on held-out records.
Outcome c8() {
  const DlmSpec spec = DlmSpec::sinusoid(fixtures::sites(2));
  const std::size_t n = 560, first = 59;
  const auto designs = study_designs(spec, n, 808);
  const PriorSpec prior(spec);
  const StatePrior state_prior = StatePrior::default_for(spec);
  std::size_t count = 0, covered = 0, width_count = 0;
  double width1 = 0.0, width2 = 0.0;

  const StepObserver observer = [&](const ParticleSet& set, std::size_t index) {
    if (index < first || index + 1 >= designs.size()) return;
    const Eigen::VectorXd w = set.weights();
    const Eigen::Index N = static_cast<Eigen::Index>(set.size());
    Eigen::MatrixXd mean1(N, 2), sd1(N, 2), mean2(N, 2), sd2(N, 2);
    for (Eigen::Index k = 0; k < N; ++k) {
      const Particle& p = set.particles[static_cast<std::size_t>(k)];
      const auto f = forecast_moments(p.filter, 2, 1.0, spec, p.model);
      mean1.row(k) = f[0].mean.transpose();
      sd1.row(k) = f[0].cov.diagonal().cwiseSqrt().transpose();
      mean2.row(k) = f[1].mean.transpose();
      sd2.row(k) = f[1].cov.diagonal().cwiseSqrt().transpose();
    }
    const StepDesign& next = designs[index + 1];
    for (int j = 0; j < 2; ++j) {
      const double lo = stats::normal_mixture_quantile(mean1.col(j), sd1.col(j), w, 0.025);
      const double hi = stats::normal_mixture_quantile(mean1.col(j), sd1.col(j), w, 0.975);
      const double lo2 = stats::normal_mixture_quantile(mean2.col(j), sd2.col(j), w, 0.025);
      const double hi2 = stats::normal_mixture_quantile(mean2.col(j), sd2.col(j), w, 0.975);
      width1 += hi - lo;
      width2 += hi2 - lo2;
      ++width_count;
      const auto& sites = next.incidence.observed();
      const auto it = std::find(sites.begin(), sites.end(), j);
      if (it == sites.end()) continue;
      const double y = next.y[it - sites.begin()];
      ++count;
      covered += lo <= y && y <= hi;
    }
  };

  IbisConfig cfg;
  cfg.particles = 2000;
  Rng rng(88);
  run_ibis(cfg, designs, prior, state_prior, spec, rng, observer);
  const double coverage = static_cast<double>(covered) / static_cast<double>(count);
  const double w1 = width1 / static_cast<double>(width_count), w2 = width2 / static_cast<double>(width_count);
  return {count >= 500 && coverage >= 0.92 && coverage <= 0.98 && w2 > w1,
          std::to_string(count) + " one-step forecasts, coverage " + fmt("%.4f", coverage) + ", mean width " +
              fmt("%.3f", w1) + " (one step) vs " + fmt("%.3f", w2) + " (two steps)"};
}

// 9. Property suite.
Outcome c9() {
  Rng rng(909);
  std::vector<std::string> failed;
  const auto check = [&](bool ok, const std::string& name) {
    if (!ok) failed.push_back(name);
  };

  // ESS bounds and normalisation on random log-weights.
  bool ess_ok = true, norm_ok = true;
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 500);
  std::uniform_real_distribution<double> spread(0.0, 50.0);
  for (int r = 0; r < 1000; ++r) {
    std::vector<double> lw(static_cast<std::size_t>(size(rng)));
    const double s = spread(rng);
    for (double& x : lw) x = s * z(rng);
    const double e = ess(lw);
    ess_ok = ess_ok && e >= 1.0 - 1e-12 && e <= static_cast<double>(lw.size()) + 1e-9;
    std::vector<double> norm = lw;
    stats::normalize_log_weights(norm);
    double sum = 0.0;
    for (double x : norm) sum += std::exp(x);
    norm_ok = norm_ok && std::abs(sum - 1.0) <= 1e-10;
  }
  check(ess_ok && std::abs(ess(std::vector<double>(10, 0.3)) - 10.0) < 1e-12, "ess bounds");
  check(norm_ok, "weight normalisation");

  // Degenerate weights resample to a single ancestor.
  {
    const auto spec = DlmSpec::sinusoid(fixtures::sites(1));
    ParticleSet set;
    for (int k = 0; k < 20; ++k) {
      Particle p;
      p.params = StaticParams::uniform(spec, 0.1 * (k + 1), 1.0, 1.0, 1.0);
      p.log_weight = k == 7 ? 0.0 : -std::numeric_limits<double>::infinity();
      set.particles.push_back(p);
    }
    const auto anc = multinomial_resample(set, rng);
    check(std::all_of(anc.begin(), anc.end(), [](std::size_t a) { return a == 7; }), "degenerate resampling");
  }

  // Harmonic rotations and the Fourier system matrix are orthogonal.
  {
    bool ok = true;
    for (int q = 1; q <= 6; ++q)
      for (double dt : {1.0, 2.0, 3.5, 17.0}) {
        const Eigen::MatrixXd G = system_matrix(DlmSpec::fourier(q, fixtures::sites(2)), dt);
        ok = ok && (G * G.transpose() - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() <= 1e-12;
        const Eigen::Matrix2d H = harmonic_matrix(q, dt);
        ok = ok && (H * H.transpose() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12;
      }
    check(ok, "rotation orthogonality");
  }

  // One harmonic without system noise reproduces the sinusoid for t = 0..47.
  {
    const auto fspec = DlmSpec::fourier(1, fixtures::sites(1));
    const auto sspec = DlmSpec::sinusoid(fixtures::sites(1));
    const Eigen::MatrixXd G = system_matrix(fspec);
    bool ok = true;
    for (int r = 0; r < 100; ++r) {
      const Eigen::Vector3d theta0(z(rng), z(rng), 17.0 + z(rng));
      Eigen::VectorXd theta = theta0;
      for (int t = 0; t < 48; ++t) {
        const double direct = theta0[0] * std::cos(std::numbers::pi * t / 12.0) +
                              theta0[1] * std::sin(std::numbers::pi * t / 12.0) + theta0[2];
        ok = ok && std::abs((obs_matrix(fspec, t) * theta)[0] - direct) <= 1e-10 &&
             std::abs((obs_matrix(sspec, t) * theta0)[0] - direct) <= 1e-10;
        theta = G * theta;
      }
    }
    check(ok, "fourier q=1 equivalence");
  }

  // Series serialisation round-trips exactly, all-missing records included.
  {
    const auto spec = DlmSpec::sinusoid(fixtures::sites(3));
    auto series = fixtures::simulated(spec, study_truths(spec), 500, 99, 0.3);
    series.records[10].temperature.assign(3, std::nullopt);
    series.records[10].humidity.assign(3, std::nullopt);
    std::stringstream ss;
    emit_series(ss, series.records);
    const auto back = read_series(ss, 3);
    bool ok = back.size() == series.records.size();
    for (std::size_t i = 0; ok && i < back.size(); ++i)
      ok = back[i].time == series.records[i].time && back[i].temperature == series.records[i].temperature &&
           back[i].humidity == series.records[i].humidity;
    check(ok, "serialisation round-trip");
  }

  std::string detail = "6 properties";
  if (!failed.empty()) {
    detail += "; failed:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<Outcome()>> criteria{
      {"c1", c1}, {"c2", c2}, {"c3", c3}, {"c4", c4}, {"c5", c5}, {"c6", c6}, {"c7", c7}, {"c8", c8}, {"c9", c9}};
  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) selected.emplace_back(argv[i]);
  if (selected.empty())
    for (const auto& [name, fn] : criteria) selected.push_back(name);

  int failures = 0;
  for (const auto& name : selected) {
    const auto it = criteria.find(name);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion '" << name << "'\n";
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::string label = name;
    label[0] = 'C';
    std::cout << label << (o.pass ? " PASS " : " FAIL ") << o.detail << " [" << fmt("%.1f", seconds_since(start))
              << " s]" << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
