#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "commands.hpp"
#include "sdlm/error.hpp"

namespace {

// Long flag with dashes plus an underscore alias so config-file keys can use either.
std::string flag(const std::string& name) {
  std::string under = name;
  for (char& c : under)
    if (c == '-') c = '_';
  return under == name ? "--" + name : "--" + name + ",--" + under;
}

}  // namespace

int main(int argc, char** argv) {
  using sdlm::cli::Command;
  sdlm::cli::RunConfig cfg;
  CLI::App app{"Spatial dynamic linear models fitted by iterated batch importance sampling"};
  app.set_config("--config", "", "Key=value configuration file; command-line flags override it");
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int rejuvenation = 0;
  std::string data, regressors, posterior, out = cfg.out.string();

  app.add_option(flag("seed"), seed, "Master random seed (required)");
  app.add_option(flag("model"), cfg.model, "sinusoid | fourier:<q> | humidity")->capture_default_str();
  app.add_option(flag("locations"), cfg.locations, "Site coordinates in km, 'x,y;x,y;...'")->capture_default_str();
  app.add_option(flag("particles"), cfg.particles, "Number of particles N")->capture_default_str();
  app.add_option(flag("delta"), cfg.delta, "Resample-move when ESS < delta * N")->capture_default_str();
  app.add_option(flag("window"), cfg.window, "Window width T in hours, or 'inf' for full IBIS")->capture_default_str();
  app.add_option(flag("batches"), cfg.batches, "Number of independent particle batches")->capture_default_str();
  app.add_option(flag("rejuvenation-period"), rejuvenation,
                 "Forced resample-move every K records (default 0 serial, 20 batched)");
  app.add_option(flag("moves-per-trigger"), cfg.moves_per_trigger, "MH moves per particle per trigger")
      ->capture_default_str();
  app.add_option(flag("workers"), cfg.workers, "Worker threads")->capture_default_str();
  app.add_option(flag("prior-shape"), cfg.prior_shape, "Inverse-gamma shape")->capture_default_str();
  app.add_option(flag("prior-scale"), cfg.prior_scale, "Inverse-gamma scale")->capture_default_str();
  app.add_option(flag("prior-bound"), cfg.prior_bound, "Upper truncation of every prior")->capture_default_str();
  app.add_flag(flag("constrain-w-lt-v"), cfg.constrain_w_lt_v, "Require W < V at every site");
  app.add_option(flag("fix"), cfg.fix, "Pin parameters, 'NAME=VALUE,...'");
  app.add_option(flag("data"), data, "Input series in the canonical format");
  app.add_option(flag("regressors"), regressors, "Temperature series used as humidity regressors");
  app.add_option(flag("posterior"), posterior, "Output directory of a previous fit");
  app.add_option(flag("out"), out, "Output directory")->capture_default_str();
  app.add_option(flag("n"), cfg.n, "Simulated series length")->capture_default_str();
  app.add_option(flag("step-hours"), cfg.step_hours, "Hours between records")->capture_default_str();
  app.add_option(flag("true-w"), cfg.true_w, "Simulation truth for every W")->capture_default_str();
  app.add_option(flag("true-v"), cfg.true_v, "Simulation truth for every V")->capture_default_str();
  app.add_option(flag("true-sigma2"), cfg.true_sigma2, "Simulation truth for every sigma^2")->capture_default_str();
  app.add_option(flag("true-psi"), cfg.true_psi, "Simulation truth for every psi")->capture_default_str();
  app.add_option(flag("missing-prob"), cfg.missing_prob, "Per-site missing probability")->capture_default_str();
  app.add_flag(flag("humidity"), cfg.humidity, "Also simulate humidity regressed on temperature");
  app.add_option(flag("horizon"), cfg.horizon, "Forecast horizon in steps")->capture_default_str();
  app.add_option(flag("draws"), cfg.draws, "Posterior draws for within-sample prediction")->capture_default_str();
  app.add_option(flag("models"), cfg.models, "Comma-separated models; the last is the baseline")
      ->capture_default_str();
  app.add_option(flag("replicates"), cfg.replicates, "Comparison replicates")->capture_default_str();
  app.add_option(flag("subsample-sites"), cfg.subsample_sites, "Random sites per replicate (0 = all)")
      ->capture_default_str();
  app.add_option(flag("subsample-length"), cfg.subsample_length, "Consecutive records per replicate (0 = all)")
      ->capture_default_str();

  const std::pair<const char*, Command> commands[] = {
      {"simulate", Command::Simulate}, {"fit", Command::Fit},         {"forecast", Command::Forecast},
      {"predict", Command::Predict},   {"compare", Command::Compare},
  };
  const char* help[] = {"Simulate a synthetic series from the model", "Fit a model to a series",
                        "Forecast from a fitted posterior", "Within-sample predictive check",
                        "Bayes factors between models"};
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->fallthrough();
    const Command c = commands[i].second;
    sub->callback([&cfg, c] { cfg.command = c; });
  }

  CLI11_PARSE(app, argc, argv);

  if (app.count("--seed") > 0) cfg.seed = seed;
  if (app.count("--rejuvenation-period") > 0) cfg.rejuvenation_period = rejuvenation;
  cfg.data = data;
  cfg.regressors = regressors;
  cfg.posterior = posterior;
  cfg.out = out;

  try {
    sdlm::cli::run_command(cfg, std::cout);
  } catch (const sdlm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const sdlm::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
