#include "sdlm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "sdlm/error.hpp"

namespace sdlm::stats {

double log_sum_exp(std::span<const double> x) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : x) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - mx);
  return mx + std::log(sum);
}

double normalize_log_weights(std::span<double> log_weights) {
  const double lse = log_sum_exp(log_weights);
  if (!std::isfinite(lse)) throw StateError("particle weights are degenerate (all zero or non-finite)");
  for (double& v : log_weights) v -= lse;
  return lse;
}

double ess(std::span<const double> log_weights) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : log_weights) mx = std::max(mx, v);
  if (!std::isfinite(mx)) throw StateError("ess: particle weights are degenerate (all zero or non-finite)");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : log_weights) {
    const double u = std::exp(v - mx);
    sum += u;
    sum_sq += u * u;
  }
  const double n = static_cast<double>(log_weights.size());
  return std::clamp(sum * sum / sum_sq, 1.0, n);
}

Eigen::VectorXd normalized_weights(std::span<const double> log_weights) {
  const double lse = log_sum_exp(log_weights);
  if (!std::isfinite(lse)) throw StateError("particle weights are degenerate (all zero or non-finite)");
  Eigen::VectorXd w(static_cast<Eigen::Index>(log_weights.size()));
  for (std::size_t k = 0; k < log_weights.size(); ++k) w[static_cast<Eigen::Index>(k)] = std::exp(log_weights[k] - lse);
  return w;
}

Eigen::VectorXd weighted_mean(const Eigen::MatrixXd& samples, const Eigen::VectorXd& weights) {
  return samples.transpose() * weights / weights.sum();
}

Eigen::MatrixXd weighted_cov(const Eigen::MatrixXd& samples, const Eigen::VectorXd& weights) {
  const Eigen::VectorXd w = weights / weights.sum();
  const Eigen::RowVectorXd mean = (samples.transpose() * w).transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - mean;
  return centered.transpose() * w.asDiagonal() * centered;
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q) {
  const std::size_t n = values.size();
  if (n == 0 || weights.size() != n) throw InputError("weighted_quantile: bad input sizes");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  // Zero-weight points carry no mass and are skipped.
  std::vector<double> x;
  std::vector<double> w;
  double total = 0.0;
  for (std::size_t k : order) {
    if (weights[k] > 0.0) {
      x.push_back(values[k]);
      w.push_back(weights[k]);
      total += weights[k];
    }
  }
  if (x.empty()) throw InputError("weighted_quantile: all weights are zero");
  if (x.size() == 1) return x[0];
  for (double& v : w) v /= total;
  const double denom = 1.0 - w.back();
  std::vector<double> p(x.size());
  double cum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    p[k] = cum / denom;
    cum += w[k];
  }
  p.back() = 1.0;
  q = std::clamp(q, 0.0, 1.0);
  const auto it = std::upper_bound(p.begin(), p.end(), q);
  if (it == p.end()) return x.back();
  const std::size_t hi = static_cast<std::size_t>(it - p.begin());
  const std::size_t lo = hi - 1;
  const double span = p[hi] - p[lo];
  if (span <= 0.0) return x[hi];
  const double frac = (q - p[lo]) / span;
  return x[lo] + frac * (x[hi] - x[lo]);
}

namespace {

std::vector<std::pair<double, double>> sorted_pairs(std::span<const double> v, std::span<const double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  std::vector<std::pair<double, double>> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = {v[i], w[i] / total};
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double weighted_ks(std::span<const double> a, std::span<const double> wa, std::span<const double> b,
                   std::span<const double> wb) {
  if (a.empty() || b.empty() || a.size() != wa.size() || b.size() != wb.size())
    throw InputError("weighted_ks: bad input sizes");
  const auto pa = sorted_pairs(a, wa);
  const auto pb = sorted_pairs(b, wb);
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0.0;
  double fb = 0.0;
  double d = 0.0;
  while (i < pa.size() || j < pb.size()) {
    double x;
    if (j >= pb.size() || (i < pa.size() && pa[i].first <= pb[j].first))
      x = pa[i].first;
    else
      x = pb[j].first;
    while (i < pa.size() && pa[i].first == x) fa += pa[i++].second;
    while (j < pb.size() && pb[j].first == x) fb += pb[j++].second;
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

double normal_mixture_quantile(const Eigen::VectorXd& means, const Eigen::VectorXd& sds,
                               const Eigen::VectorXd& weights, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("normal_mixture_quantile: q must lie in (0, 1)");
  if (means.size() == 0 || means.size() != sds.size() || means.size() != weights.size())
    throw DomainError("normal_mixture_quantile: means, sds and weights must be non-empty and equally long");
  const double total = weights.sum();
  const auto cdf = [&](double x) {
    double c = 0.0;
    for (Eigen::Index k = 0; k < means.size(); ++k) {
      if (weights[k] == 0.0) continue;
      const double z = sds[k] > 0.0 ? 0.5 * std::erfc(-(x - means[k]) / (sds[k] * std::sqrt(2.0)))
                                    : (x >= means[k] ? 1.0 : 0.0);
      c += weights[k] * z;
    }
    return c / total;
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index k = 0; k < means.size(); ++k) {
    if (weights[k] == 0.0) continue;
    lo = std::min(lo, means[k] - 40.0 * sds[k]);
    hi = std::max(hi, means[k] + 40.0 * sds[k]);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sdlm::stats
