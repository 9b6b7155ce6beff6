#include <benchmark/benchmark.h>

#include <vector>

#include "sdlm/data_io.hpp"
#include "sdlm/ibis.hpp"

namespace sdlm {
namespace {

struct Fixture {
  DlmSpec spec = DlmSpec::sinusoid({{0, "s1", 0.0, 0.0}, {1, "s2", 10.0, 0.0}});
  PriorSpec prior{spec};
  StatePrior state_prior = StatePrior::default_for(spec);
  std::vector<StepDesign> designs;

  Fixture() {
    SyntheticConfig sc{spec, StaticParams::uniform(spec, 0.01, 1.0, 1.0, 0.01), state_prior, 64};
    Rng rng(3);
    designs = build_designs(spec, to_measurements(simulate(sc, rng).records, Variable::Temperature));
  }
};

void BM_Reweight(benchmark::State& state) {
  Fixture f;
  Rng rng(1);
  ParticleSet set;
  initialize_particles(set, static_cast<std::size_t>(state.range(0)), f.spec, f.prior, f.state_prior,
                       f.designs.front(), rng);
  const ParticleSet start = set;
  std::size_t i = 1;
  for (auto _ : state) {
    if (i == f.designs.size()) {
      state.PauseTiming();
      set = start;
      i = 1;
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(reweight(set, f.designs[i++]));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Reweight)->Arg(1000)->Arg(10000);

void BM_MultinomialResample(benchmark::State& state) {
  Fixture f;
  Rng rng(1);
  ParticleSet set;
  initialize_particles(set, static_cast<std::size_t>(state.range(0)), f.spec, f.prior, f.state_prior,
                       f.designs.front(), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(multinomial_resample(set, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MultinomialResample)->Arg(1000)->Arg(10000);

void BM_FullMove(benchmark::State& state) {
  Fixture f;
  Rng rng(1);
  ParticleSet set;
  initialize_particles(set, 256, f.spec, f.prior, f.state_prior, f.designs.front(), rng);
  for (std::size_t i = 1; i < f.designs.size(); ++i) reweight(set, f.designs[i]);
  const auto proposal = RandomWalkProposal::from_particles(set, f.prior.free());
  const MoveContext ctx{&f.spec, &f.prior, &f.state_prior};
  std::size_t k = 0;
  for (auto _ : state) {
    Particle p = set.particles[k++ % set.size()];
    benchmark::DoNotOptimize(mh_move_full(p, f.designs, ctx, proposal, rng));
  }
}
BENCHMARK(BM_FullMove);

}  // namespace
}  // namespace sdlm

BENCHMARK_MAIN();
