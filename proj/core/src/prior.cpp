#include "sdlm/prior.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "sdlm/error.hpp"

namespace sdlm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxRejections = 1'000'000;
}  // namespace

double truncated_inv_gamma_log_density(double x, double shape, double scale, double bound) {
  if (!(x > 0.0) || !(x <= bound)) return kNegInf;
  // P(X <= bound) for X ~ IG(shape, scale) is Q(shape, scale / bound).
  const double log_mass = std::log(boost::math::gamma_q(shape, scale / bound));
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x -
         log_mass;
}

PriorSpec::PriorSpec(const DlmSpec& spec, double shape, double scale, double bound, bool w_lt_v)
    : sites_(spec.num_sites()),
      channels_(spec.state_dim_per_site()),
      bound_(bound),
      w_lt_v_(w_lt_v),
      components_(static_cast<std::size_t>(spec.num_params()), Component{shape, scale, std::nullopt}) {
  if (!(shape > 0.0)) throw ConfigError("prior_shape: must be positive");
  if (!(scale > 0.0)) throw ConfigError("prior_scale: must be positive");
  if (!(bound > 0.0)) throw ConfigError("prior_bound: must be positive");
  refresh_free();
}

void PriorSpec::set_component(Eigen::Index i, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw ConfigError("prior component shape/scale must be positive");
  auto& c = components_.at(static_cast<std::size_t>(i));
  c.shape = shape;
  c.scale = scale;
}

void PriorSpec::fix(Eigen::Index i, double value) {
  if (!(value > 0.0) || !(value <= bound_))
    throw ConfigError("fixed prior component " + std::to_string(i) + " must lie in (0, bound]");
  components_.at(static_cast<std::size_t>(i)).fixed = value;
  refresh_free();
}

void PriorSpec::fix_all(const StaticParams& value) {
  if (value.size() != size()) throw ConfigError("fix_all: parameter vector has the wrong length");
  for (Eigen::Index i = 0; i < size(); ++i) fix(i, value.flat()[i]);
}

void PriorSpec::refresh_free() {
  free_.clear();
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (!components_[i].fixed) free_.push_back(static_cast<Eigen::Index>(i));
}

double PriorSpec::sample_component(Eigen::Index i, Rng& rng) const {
  const Component& c = components_[static_cast<std::size_t>(i)];
  if (c.fixed) return *c.fixed;
  std::gamma_distribution<double> gamma(c.shape, 1.0);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const double x = c.scale / gamma(rng);
    if (x > 0.0 && x <= bound_) return x;
  }
  throw ConfigError("prior: truncation bound leaves no mass for component " + std::to_string(i));
}

StaticParams PriorSpec::sample(Rng& rng) const {
  StaticParams p(sites_, channels_);
  for (int j = 0; j < sites_; ++j) {
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt >= kMaxRejections)
        throw ConfigError("prior: W < V constraint cannot be met at site " + std::to_string(j));
      for (int c = 0; c < channels_; ++c) p.flat()[p.w_index(j, c)] = sample_component(p.w_index(j, c), rng);
      p.flat()[p.v_index(j)] = sample_component(p.v_index(j), rng);
      if (!w_lt_v_) break;
      bool ok = true;
      for (int c = 0; c < channels_; ++c) ok = ok && p.flat()[p.w_index(j, c)] < p.flat()[p.v_index(j)];
      if (ok) break;
    }
  }
  for (int c = 0; c < channels_; ++c) {
    p.flat()[p.sigma2_index(c)] = sample_component(p.sigma2_index(c), rng);
    p.flat()[p.psi_index(c)] = sample_component(p.psi_index(c), rng);
  }
  return p;
}

bool PriorSpec::in_support(const StaticParams& p) const {
  if (p.size() != size()) return false;
  for (Eigen::Index i = 0; i < size(); ++i) {
    const auto& c = components_[static_cast<std::size_t>(i)];
    if (c.fixed && p.flat()[i] != *c.fixed) return false;
  }
  return p.valid(bound_, w_lt_v_);
}

double PriorSpec::log_density(const StaticParams& p) const {
  if (!in_support(p)) return kNegInf;
  double total = 0.0;
  for (Eigen::Index i : free_) {
    const auto& c = components_[static_cast<std::size_t>(i)];
    total += truncated_inv_gamma_log_density(p.flat()[i], c.shape, c.scale, bound_);
  }
  return total;
}

}  // namespace sdlm
