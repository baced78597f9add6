#pragma once

// M-out-of-n bootstrap and the seeded Monte Carlo replication harness.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "gcut/cuts.hpp"
#include "gcut/discretization.hpp"
#include "gcut/error.hpp"
#include "gcut/graph.hpp"
#include "gcut/maxflow.hpp"
#include "gcut/rng.hpp"
#include "gcut/xist.hpp"

namespace gcut {

/// Worker count from GCUT_WORKERS, else 1.
inline std::size_t default_workers() {
  if (const char* env = std::getenv("GCUT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

/// out[k] = fn(k, seeds[k]) with k spread over `workers` threads. The output
/// depends only on the seeds, never on the worker count.
inline std::vector<double> run_seeded(
    std::span<const std::uint64_t> seeds,
    const std::function<double(std::size_t, std::uint64_t)>& fn, std::size_t workers = 1) {
  std::vector<double> out(seeds.size());
  workers = std::max<std::size_t>(1, std::min(workers, seeds.size()));
  if (workers == 1) {
    for (std::size_t k = 0; k < seeds.size(); ++k) out[k] = fn(k, seeds[k]);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < seeds.size(); k += workers) out[k] = fn(k, seeds[k]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline std::vector<std::uint64_t> replicate_seeds(std::uint64_t master, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t k = 0; k < count; ++k) seeds[k] = stream_seed(master, k);
  return seeds;
}

/// Replicate r receives an engine seeded with stream_seed(master, r).
inline std::vector<double> run_replicates(std::size_t count, std::uint64_t master,
                                          const std::function<double(std::size_t, Engine&)>& fn,
                                          std::size_t workers = 1) {
  const auto seeds = replicate_seeds(master, count);
  return run_seeded(
      seeds,
      [&](std::size_t k, std::uint64_t s) {
        Engine rng(s);
        return fn(k, rng);
      },
      workers);
}

// ---------------------------------------------------------------------------
// Bootstrap

enum class MRule { sqrt_n, fixed, equal_n };

inline std::string to_string(MRule r) {
  switch (r) {
    case MRule::sqrt_n: return "sqrt_n";
    case MRule::fixed: return "fixed";
    case MRule::equal_n: return "equal_n";
  }
  return "?";
}

inline MRule parse_m_rule(std::string_view s) {
  if (s == "sqrt_n" || s == "sqrt") return MRule::sqrt_n;
  if (s == "fixed") return MRule::fixed;
  if (s == "equal_n" || s == "n") return MRule::equal_n;
  throw InvalidArgument("unknown M rule '" + std::string(s) + "' (sqrt_n, fixed, equal_n)");
}

struct BootstrapConfig {
  MRule rule = MRule::sqrt_n;
  std::int64_t fixed_m = 0;  // used when rule == fixed
  std::size_t B = 100;
  std::uint64_t seed = 0;

  /// Resample size for a sample of size n; sqrt_n rounds up.
  std::int64_t resolve_m(std::int64_t n) const {
    if (n < 1) throw InvalidArgument("sample size must be >= 1");
    std::int64_t m = 0;
    switch (rule) {
      case MRule::sqrt_n: {
        m = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
        while (m > 1 && (m - 1) * (m - 1) >= n) --m;
        while (m * m < n) ++m;
        break;
      }
      case MRule::fixed: m = fixed_m; break;
      case MRule::equal_n: m = n; break;
    }
    if (m < 1) throw InvalidArgument("bootstrap size M must be >= 1");
    return m;
  }
};

/// sqrt(M) (XC(G*_M) - base) for one resample Y*, M = Y*.n.
inline double bootstrap_statistic(const DiscretizedSample& y_star, const Adjacency& adj,
                                  const CutObjective& objective, double base_value,
                                  const ExactOptions& opt = {}) {
  const auto g = empirical_graph(y_star, adj);
  const double v = min_cut_exact(g, objective, opt).value;
  return std::sqrt(static_cast<double>(y_star.n)) * (v - base_value);
}

/// B draws of sqrt(M)(XC(G*_M) - XC(G_n)) with Y* ~ Mult(M, Y/n) on the
/// adjacency of G_n. Draw b uses stream b of cfg.seed.
inline std::vector<double> bootstrap_distribution(const DiscretizedSample& y,
                                                  const Adjacency& adj,
                                                  const CutObjective& objective,
                                                  const BootstrapConfig& cfg,
                                                  std::size_t workers = 1,
                                                  const ExactOptions& opt = {}) {
  if (cfg.B < 1) throw InvalidArgument("bootstrap needs B >= 1");
  const std::int64_t m = cfg.resolve_m(y.n);
  const double base = min_cut_exact(empirical_graph(y, adj), objective, opt).value;
  const auto freq = y.frequencies();
  return run_replicates(
      cfg.B, cfg.seed,
      [&](std::size_t, Engine& rng) {
        const auto y_star = sample_multinomial(freq, m, rng);
        return bootstrap_statistic(y_star, adj, objective, base, opt);
      },
      workers);
}

inline std::vector<double> bootstrap_distribution(const DiscretizedSample& y,
                                                  const ProbabilityGrid& grid, double t,
                                                  const CutObjective& objective,
                                                  const BootstrapConfig& cfg,
                                                  std::size_t workers = 1) {
  return bootstrap_distribution(y, neighborhood(grid, t), objective, cfg, workers);
}

// ---------------------------------------------------------------------------
// Monte Carlo statistics

struct Statistic {
  enum class Type { xc_min, xc_fixed, xist, vloc_count, stmincut_attainer };

  Type type = Type::xc_min;
  CutObjective objective = CutKind::NCut;
  std::optional<Partition> fixed;  // xc_fixed
  std::size_t s = 0, t = 0;        // stmincut_attainer

  static Statistic xc_min(CutObjective obj) { return {Type::xc_min, std::move(obj), {}, 0, 0}; }
  static Statistic xc_fixed(CutObjective obj, Partition part) {
    return {Type::xc_fixed, std::move(obj), std::move(part), 0, 0};
  }
  static Statistic xist(CutObjective obj) { return {Type::xist, std::move(obj), {}, 0, 0}; }
  static Statistic vloc_count() { return {Type::vloc_count, CutKind::NCut, {}, 0, 0}; }
  static Statistic stmincut_attainer(std::size_t s_node, std::size_t t_node) {
    return {Type::stmincut_attainer, CutKind::MCut, {}, s_node, t_node};
  }

  std::string describe() const {
    switch (type) {
      case Type::xc_min: return "xc_min(" + objective.name() + ")";
      case Type::xc_fixed: return "xc_fixed(" + objective.name() + "," + fixed->to_string() + ")";
      case Type::xist: return "xist(" + objective.name() + ")";
      case Type::vloc_count: return "vloc_count";
      case Type::stmincut_attainer:
        return "stmincut_attainer(" + std::to_string(s) + "," + std::to_string(t) + ")";
    }
    return "?";
  }
};

struct McEnsemble {
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;  // per-replicate engine seeds
  std::int64_t n = 0;
  std::size_t R = 0;
  std::uint64_t seed = 0;
  std::string statistic;
};

/// Bit mask (bit i set for i on the s side) of the unique minimum-weight
/// partition separating s from t; -1 when several attain the minimum.
inline double stmincut_attainer_code(const WeightedGraph& g, std::size_t s, std::size_t t,
                                     double tolerance = 1e-12, std::size_t cap = 25) {
  const std::size_t m = g.size();
  if (s >= m || t >= m || s == t) throw InvalidArgument("invalid s, t pair");
  if (m > cap)
    throw InfeasibleSize("attainer enumeration needs m <= " + std::to_string(cap));
  const double best = st_mincut(g, s, t).value;
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < m; ++i)
    if (i != s && i != t) free.push_back(i);
  std::vector<std::uint8_t> ind(m, 0);
  ind[s] = 1;
  std::int64_t found = -1;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << free.size()); ++code) {
    std::uint64_t mask = std::uint64_t{1} << s;
    for (std::size_t k = 0; k < free.size(); ++k) {
      const bool in = (code >> k) & 1U;
      ind[free[k]] = in;
      if (in) mask |= std::uint64_t{1} << free[k];
    }
    if (within_tolerance(g.crossing_weight(ind), best, tolerance)) {
      if (found >= 0) return -1.0;
      found = static_cast<std::int64_t>(mask);
    }
  }
  return static_cast<double>(found);
}

/// Statistic evaluated on one sample. Centered statistics are returned as
/// sqrt(n)(value - population_value); Xist without two local maxima is NaN.
class StatisticEvaluator {
 public:
  StatisticEvaluator(const ProbabilityGrid& grid, double t, Statistic stat,
                     ExactOptions opt = {})
      : adj_(neighborhood(grid, t)), stat_(std::move(stat)), opt_(opt) {
    const auto pop = population_graph(grid, t);
    switch (stat_.type) {
      case Statistic::Type::xc_min:
        center_ = min_cut_exact(pop, stat_.objective, opt_).value;
        break;
      case Statistic::Type::xc_fixed:
        if (!stat_.fixed || stat_.fixed->node_count() != grid.size())
          throw InvalidArgument("xc_fixed needs a partition of the grid nodes");
        center_ = cut_value(pop, *stat_.fixed, stat_.objective);
        break;
      case Statistic::Type::xist: {
        const auto r = gcut::xist(pop, grid.p(), stat_.objective);
        if (!r.partition) throw AssumptionViolated("Xist on the population graph is trivial");
        center_ = r.value;
        break;
      }
      case Statistic::Type::stmincut_attainer:
        if (stat_.s >= grid.size() || stat_.t >= grid.size() || stat_.s == stat_.t)
          throw InvalidArgument("invalid s, t pair");
        break;
      case Statistic::Type::vloc_count: break;
    }
  }

  double center() const { return center_; }
  const Adjacency& adjacency() const { return adj_; }

  double operator()(const DiscretizedSample& y) const {
    const double rn = std::sqrt(static_cast<double>(y.n));
    switch (stat_.type) {
      case Statistic::Type::vloc_count: {
        std::vector<double> c(y.counts.begin(), y.counts.end());
        return static_cast<double>(local_maxima(adj_, c).size());
      }
      case Statistic::Type::stmincut_attainer:
        return stmincut_attainer_code(empirical_graph(y, adj_), stat_.s, stat_.t,
                                      opt_.tolerance, opt_.cap);
      case Statistic::Type::xc_min:
        return rn * (min_cut_exact(empirical_graph(y, adj_), stat_.objective, opt_).value -
                     center_);
      case Statistic::Type::xc_fixed:
        return rn * (cut_value(empirical_graph(y, adj_), *stat_.fixed, stat_.objective) -
                     center_);
      case Statistic::Type::xist: {
        const auto g = empirical_graph(y, adj_);
        const auto r = gcut::xist(g, y.frequencies(), stat_.objective);
        if (!r.partition) return std::numeric_limits<double>::quiet_NaN();
        return rn * (r.value - center_);
      }
    }
    return 0.0;
  }

 private:
  Adjacency adj_;
  Statistic stat_;
  ExactOptions opt_;
  double center_ = 0.0;
};

/// One replicate per seed: Y ~ Mult(n, p) from Engine(seed), then the statistic.
inline std::vector<double> mc_statistic_seeded(const ProbabilityGrid& grid, double t,
                                               const Statistic& stat, std::int64_t n,
                                               std::span<const std::uint64_t> seeds,
                                               std::size_t workers = 1,
                                               const ExactOptions& opt = {}) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  const StatisticEvaluator eval(grid, t, stat, opt);
  return run_seeded(
      seeds,
      [&](std::size_t, std::uint64_t s) {
        Engine rng(s);
        return eval(sample_multinomial(grid.p(), n, rng));
      },
      workers);
}

inline McEnsemble mc_statistic(const ProbabilityGrid& grid, double t, const Statistic& stat,
                               std::int64_t n, std::size_t R, std::uint64_t seed,
                               std::size_t workers = 1, const ExactOptions& opt = {}) {
  if (R < 1) throw InvalidArgument("R must be >= 1");
  McEnsemble e;
  e.seeds = replicate_seeds(seed, R);
  e.values = mc_statistic_seeded(grid, t, stat, n, e.seeds, workers, opt);
  e.n = n;
  e.R = R;
  e.seed = seed;
  e.statistic = stat.describe();
  return e;
}

}  // namespace gcut
