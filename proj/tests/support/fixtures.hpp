#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "sdlm/data_io.hpp"
#include "sdlm/filter.hpp"
#include "sdlm/model.hpp"
#include "sdlm/observation.hpp"
#include "sdlm/rng.hpp"

namespace fixtures {

inline std::vector<sdlm::Location> sites(int L, double spacing_km = 10.0) {
  std::vector<sdlm::Location> out;
  for (int j = 0; j < L; ++j) out.push_back({j, "s" + std::to_string(j + 1), spacing_km * j, 0.0});
  return out;
}

inline std::vector<sdlm::Location> scattered_sites(int L, sdlm::Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 30.0);
  std::vector<sdlm::Location> out;
  for (int j = 0; j < L; ++j) out.push_back({j, "s" + std::to_string(j + 1), u(rng), u(rng)});
  return out;
}

inline sdlm::StaticParams random_params(const sdlm::DlmSpec& spec, sdlm::Rng& rng) {
  std::uniform_real_distribution<double> u(-3.0, 0.5);
  sdlm::StaticParams p(spec.num_sites(), spec.state_dim_per_site());
  for (Eigen::Index i = 0; i < p.size(); ++i) p.flat()[i] = std::exp(u(rng));
  return p;
}

/// Random series with irregular gaps (1 to 3 hours) and independent missingness.
inline std::vector<sdlm::Measurement> random_series(const sdlm::DlmSpec& spec, int n, double missing,
                                                    sdlm::Rng& rng) {
  std::normal_distribution<double> value(17.0, 2.0);
  std::normal_distribution<double> temp(10.0, 3.0);
  std::uniform_int_distribution<int> gap(1, 3);
  std::bernoulli_distribution drop(missing);
  std::vector<sdlm::Measurement> out;
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    sdlm::Measurement m;
    m.time = t;
    m.values.resize(spec.num_sites());
    for (int s = 0; s < spec.num_sites(); ++s)
      m.values[s] = drop(rng) ? std::numeric_limits<double>::quiet_NaN() : value(rng);
    if (spec.needs_regressors()) {
      m.regressors.resize(spec.num_sites());
      for (int s = 0; s < spec.num_sites(); ++s) m.regressors[s] = temp(rng);
    }
    out.push_back(m);
    t += gap(rng);
  }
  return out;
}

/// Series simulated from the model itself on an hourly grid.
inline sdlm::SyntheticSeries simulated(const sdlm::DlmSpec& spec, const sdlm::StaticParams& truths, std::size_t n,
                                       std::uint64_t seed, double missing = 0.0) {
  sdlm::SyntheticConfig sc{spec, truths, sdlm::StatePrior::default_for(spec), n, 1.0, {}, std::nullopt};
  if (missing > 0.0) sc.missing.probability.assign(static_cast<std::size_t>(spec.num_sites()), missing);
  sdlm::Rng rng(seed);
  return sdlm::simulate(sc, rng);
}

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
template <typename Cdf>
double ks_one_sample(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

}  // namespace fixtures
