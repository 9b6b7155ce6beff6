#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "sdlm/model.hpp"
#include "sdlm/rng.hpp"

namespace sdlm {

/// Independent inverse-Gamma IG(shape, scale) priors on every static
/// parameter, truncated above at `bound`, with an optional W < V constraint
/// per site. Components can be pinned to a fixed value (point mass), which
/// removes them from the set the sampler moves.
class PriorSpec {
 public:
  struct Component {
    double shape = 1.0;
    double scale = 0.01;
    std::optional<double> fixed;
  };

  PriorSpec(const DlmSpec& spec, double shape = 1.0, double scale = 0.01, double bound = 10.0,
            bool w_lt_v = false);

  int sites() const { return sites_; }
  int channels() const { return channels_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(components_.size()); }
  double bound() const { return bound_; }
  bool w_lt_v() const { return w_lt_v_; }

  const Component& component(Eigen::Index i) const { return components_[static_cast<std::size_t>(i)]; }
  void set_component(Eigen::Index i, double shape, double scale);
  /// Pins component `i`; throws ConfigError outside (0, bound].
  void fix(Eigen::Index i, double value);
  /// Pins every component (a point-mass prior).
  void fix_all(const StaticParams& value);

  /// Indices of the components that are not fixed, ascending.
  const std::vector<Eigen::Index>& free() const { return free_; }

  /// Draws by rejection from the untruncated inverse-Gamma; the W < V
  /// constraint is enforced by per-site block rejection.
  StaticParams sample(Rng& rng) const;

  bool in_support(const StaticParams& p) const;

  /// Log density, normalised for the truncation (not for the W < V
  /// constraint, which only shifts it by a constant). -inf outside the
  /// support; fixed components contribute zero when they match.
  double log_density(const StaticParams& p) const;

 private:
  double sample_component(Eigen::Index i, Rng& rng) const;
  void refresh_free();

  int sites_;
  int channels_;
  double bound_;
  bool w_lt_v_;
  std::vector<Component> components_;
  std::vector<Eigen::Index> free_;
};

/// Truncated inverse-Gamma log density on (0, bound].
double truncated_inv_gamma_log_density(double x, double shape, double scale, double bound);

}  // namespace sdlm
