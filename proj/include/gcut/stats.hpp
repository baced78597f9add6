#pragma once

// Kolmogorov-Smirnov distances, Kolmogorov quantiles, QQ pairs and the
// asymptotic clustering test against a uniform reference density.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcut/asymptotics.hpp"
#include "gcut/cuts.hpp"
#include "gcut/discretization.hpp"
#include "gcut/error.hpp"
#include "gcut/graph.hpp"

namespace gcut {

/// sup_x |F_a(x) - F_b(x)| over the merged jump points of both ECDFs.
inline double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("KS distance needs nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// KS distance of a sample to the CDF estimated from reference draws.
inline double ks_distance_to_samples_cdf(std::span<const double> sample,
                                         std::span<const double> reference_draws) {
  return ks_distance(sample, reference_draws);
}

/// One-sample KS distance to a continuous CDF.
inline double ks_distance_to_cdf(std::span<const double> sample,
                                 const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InvalidArgument("KS distance needs a nonempty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// K(x) = P(sup |B| <= x) for the Brownian bridge B.
inline double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  if (x < 1.0) {
    // Theta-function form, fast for small x.
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double j = 2.0 * k - 1.0;
      s += std::exp(-j * j * pi2 / (8.0 * x * x));
    }
    return std::sqrt(2.0 * std::numbers::pi) / x * s;
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return 1.0 - 2.0 * s;
}

/// q with K(q) = 1 - alpha, by bisection.
inline double kolmogorov_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  double lo = 0.0, hi = 10.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_cdf(mid) < 1.0 - alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct KsReport {
  double D = 0.0;
  std::size_t n_eff = 0;
  double alpha = 0.05;
  double critical = 0.0;  // kolmogorov_quantile(alpha) / sqrt(n_eff)
  bool reject = false;
};

inline KsReport ks_report(double d, std::size_t n_eff, double alpha = 0.05) {
  if (n_eff == 0) throw InvalidArgument("n_eff must be positive");
  KsReport r;
  r.D = d;
  r.n_eff = n_eff;
  r.alpha = alpha;
  r.critical = kolmogorov_quantile(alpha) / std::sqrt(static_cast<double>(n_eff));
  r.reject = d > r.critical;
  return r;
}

/// KS test of `sample` against reference draws; n_eff is the sample size.
inline KsReport ks_test(std::span<const double> sample, std::span<const double> reference_draws,
                        double alpha = 0.05) {
  return ks_report(ks_distance(sample, reference_draws), sample.size(), alpha);
}

/// Two-sample critical value q_{1-alpha} sqrt((n + m) / (n m)).
inline double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw InvalidArgument("sample sizes must be positive");
  const double a = static_cast<double>(n), b = static_cast<double>(m);
  return kolmogorov_quantile(alpha) * std::sqrt((a + b) / (a * b));
}

/// Type-7 quantile of an ascending sample.
inline double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidArgument("probability must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::span<const double> sample, double prob) {
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  return quantile_sorted(s, prob);
}

struct QqPoint {
  double level = 0.0;
  double sample = 0.0;
  double reference = 0.0;
};

/// Quantile pairs at levels k / (n_quantiles + 1), k = 1..n_quantiles.
inline std::vector<QqPoint> qq_data(std::span<const double> sample,
                                    std::span<const double> reference_draws,
                                    std::size_t n_quantiles) {
  if (n_quantiles < 2) throw InvalidArgument("qq_data needs at least 2 quantiles");
  std::vector<double> a(sample.begin(), sample.end()), b(reference_draws.begin(),
                                                         reference_draws.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<QqPoint> out(n_quantiles);
  for (std::size_t k = 0; k < n_quantiles; ++k) {
    const double level = static_cast<double>(k + 1) / static_cast<double>(n_quantiles + 1);
    out[k] = {level, quantile_sorted(a, level), quantile_sorted(b, level)};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Clustering test

/// Null reference: XC of the reference population graph and sorted draws of
/// its limit law.
struct ClusterReference {
  CutObjective objective = CutKind::NCut;
  double value = 0.0;
  std::vector<double> draws;  // ascending
  Adjacency adjacency;

  /// All draws equal up to rounding noise.
  bool degenerate() const {
    return draws.empty() ||
           draws.back() - draws.front() <= 1e-10 * (1.0 + std::abs(draws.front()));
  }
};

inline ClusterReference clustering_reference(const ProbabilityGrid& ref_grid, double t,
                                             const CutObjective& objective, std::size_t draws,
                                             std::uint64_t seed, const ExactOptions& opt = {}) {
  if (draws < 1) throw InvalidArgument("reference needs at least one draw");
  const auto g = population_graph(ref_grid, t);
  const auto rep = min_cut_exact(g, objective, opt);
  LimitSampler sampler(g, objective, rep.minimizers);
  ClusterReference r;
  r.objective = objective;
  r.value = rep.value;
  r.draws = sampler.sample(draws, seed);
  std::sort(r.draws.begin(), r.draws.end());
  r.adjacency = g.adjacency();
  return r;
}

struct ClusterTestReport {
  double statistic = 0.0;        // XC(G_n)
  double reference_value = 0.0;  // XC of the reference population graph
  double lo = 0.0, hi = 0.0;
  double q_lo = 0.0, q_hi = 0.0;  // reference quantiles at alpha/2, 1 - alpha/2
  double alpha = 0.05;
  std::size_t n = 0;
  bool degenerate_reference = false;
  bool reject = false;
};

/// Rejects XC(G) = XC(G_ref) when the statistic leaves the band
/// XC(G_ref) + [Q(alpha/2), Q(1 - alpha/2)] / sqrt(n).
inline ClusterTestReport clustering_decision(double statistic, std::size_t n,
                                             const ClusterReference& ref, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (n < 1) throw InvalidArgument("empty sample");
  ClusterTestReport r;
  r.alpha = alpha;
  r.n = n;
  r.statistic = statistic;
  r.reference_value = ref.value;
  r.q_lo = quantile_sorted(ref.draws, alpha / 2);
  r.q_hi = quantile_sorted(ref.draws, 1 - alpha / 2);
  r.degenerate_reference = ref.degenerate();
  const double rn = std::sqrt(static_cast<double>(n));
  r.lo = ref.value + r.q_lo / rn;
  r.hi = ref.value + r.q_hi / rn;
  r.reject = statistic < r.lo || statistic > r.hi;
  return r;
}

inline ClusterTestReport clustering_test(const DiscretizedSample& y,
                                         const ClusterReference& ref, double alpha,
                                         const ExactOptions& opt = {}) {
  if (y.size() != ref.adjacency.size()) throw InvalidArgument("sample does not match grid");
  if (y.n < 1) throw InvalidArgument("empty sample");
  const double stat = min_cut_exact(empirical_graph(y, ref.adjacency), ref.objective, opt).value;
  return clustering_decision(stat, static_cast<std::size_t>(y.n), ref, alpha);
}

/// Convenience form; the reference defaults to the uniform grid of the same shape.
inline ClusterTestReport clustering_test(const DiscretizedSample& y, const ProbabilityGrid& grid,
                                         double t, const CutObjective& objective, double alpha,
                                         std::size_t draws, std::uint64_t seed,
                                         const std::optional<ProbabilityGrid>& ref_grid = {}) {
  const auto reference = ref_grid ? *ref_grid : grid.with_p(uniform_grid(grid.shape()).p());
  const auto ref = clustering_reference(reference, t, objective, draws, seed);
  return clustering_test(y, ref, alpha);
}

}  // namespace gcut
