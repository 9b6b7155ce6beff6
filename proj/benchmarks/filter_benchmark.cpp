#include <benchmark/benchmark.h>

#include <vector>

#include "sdlm/data_io.hpp"
#include "sdlm/filter.hpp"

namespace sdlm {
namespace {

std::vector<Location> line_of_sites(int n) {
  std::vector<Location> out;
  for (int j = 0; j < n; ++j) out.push_back({j, "s" + std::to_string(j + 1), 10.0 * j, 0.0});
  return out;
}

std::vector<StepDesign> synthetic_designs(const DlmSpec& spec, std::size_t n) {
  SyntheticConfig sc{spec, StaticParams::uniform(spec, 0.01, 1.0, 1.0, 0.01), StatePrior::default_for(spec), n};
  Rng rng(7);
  const auto series = simulate(sc, rng);
  return build_designs(spec, to_measurements(series.records, Variable::Temperature));
}

void run_filter_steps(benchmark::State& state, const DlmSpec& spec) {
  const auto designs = synthetic_designs(spec, 512);
  const ParamModel model(spec, StaticParams::uniform(spec, 0.01, 1.0, 1.0, 0.01));
  const StatePrior prior = StatePrior::default_for(spec);
  FilterWorkspace ws;
  FilterState fs;
  for (auto _ : state) {
    filter_init(fs, prior, designs.front(), model, ws);
    for (std::size_t i = 1; i < designs.size(); ++i) filter_step(fs, designs[i], model, ws);
    benchmark::DoNotOptimize(fs.loglik_total);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(designs.size()));
}

void BM_FilterStepSinusoid(benchmark::State& state) {
  run_filter_steps(state, DlmSpec::sinusoid(line_of_sites(static_cast<int>(state.range(0)))));
}
BENCHMARK(BM_FilterStepSinusoid)->Arg(1)->Arg(2)->Arg(3)->Arg(5);

void BM_FilterStepFourier2(benchmark::State& state) {
  run_filter_steps(state, DlmSpec::fourier(2, line_of_sites(static_cast<int>(state.range(0)))));
}
BENCHMARK(BM_FilterStepFourier2)->Arg(2)->Arg(3)->Arg(5);

}  // namespace
}  // namespace sdlm
