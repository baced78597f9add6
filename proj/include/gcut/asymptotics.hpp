#pragma once

// Limiting distributions of sqrt(n) (XC(G_n) - XC(G)): q-vectors, balance
// gradients, covariance matrices, the Gaussian root Z ~ N(0, diag(p) - pp^T)
// and samplers for minima over optimal partitions (incl. the CCut mixture).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gcut/cuts.hpp"
#include "gcut/error.hpp"
#include "gcut/graph.hpp"
#include "gcut/maxflow.hpp"
#include "gcut/partition.hpp"
#include "gcut/rng.hpp"
#include "gcut/xist.hpp"

namespace gcut {

/// Dense symmetric matrix indexed by partitions.
struct LimitCovariance {
  std::string kind;
  std::vector<Partition> partitions;
  std::vector<double> entries;  // row-major

  std::size_t size() const noexcept { return partitions.size(); }
  double operator()(std::size_t a, std::size_t b) const {
    return entries[a * partitions.size() + b];
  }
};

namespace detail {

inline const std::vector<double>& population_masses(const WeightedGraph& g) {
  if (!g.has_masses())
    throw InvalidArgument("limit laws need a graph built from node masses");
  return g.masses();
}

inline void check_partition(const WeightedGraph& g, const Partition& s) {
  if (s.node_count() != g.size())
    throw InvalidArgument("partition size does not match graph");
}

}  // namespace detail

/// q_{i,S}: mass of the neighbours of i on the other side of the cut.
inline std::vector<double> q_vector(const WeightedGraph& g, const Partition& s) {
  detail::check_partition(g, s);
  const auto& p = detail::population_masses(g);
  std::vector<double> q(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (auto j : g.neighbors(i))
      if (s.contains(i) != s.contains(j)) q[i] += p[j];
  return q;
}

/// b_{i,T}: mass of the neighbours of i lying in T (given as an indicator).
inline std::vector<double> side_mass_vector(const WeightedGraph& g,
                                            std::span<const std::uint8_t> side) {
  const auto& p = detail::population_masses(g);
  std::vector<double> b(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (auto j : g.neighbors(i))
      if (side[j]) b[i] += p[j];
  return b;
}

/// d_i: total neighbour mass of i.
inline std::vector<double> neighbor_mass_vector(const WeightedGraph& g) {
  const auto& p = detail::population_masses(g);
  std::vector<double> d(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (auto j : g.neighbors(i)) d[i] += p[j];
  return d;
}

/// d vol(T) / d p_r = 1{r in T} d_r + b_{r,T}.
inline std::vector<double> volume_gradient(const WeightedGraph& g,
                                           std::span<const std::uint8_t> side) {
  auto grad = side_mass_vector(g, side);
  const auto d = neighbor_mass_vector(g);
  for (std::size_t r = 0; r < g.size(); ++r)
    if (side[r]) grad[r] += d[r];
  return grad;
}

/// Relative test vol(S) == vol(S^c) used for the CCut dichotomy.
inline bool equal_volumes(const WeightedGraph& g, const Partition& s,
                          double tolerance = 1e-12) {
  const double a = g.vol(s), b = g.vol_complement(s);
  return std::abs(a - b) <= tolerance * std::max(a, b);
}

/// Gradient of bal(S, S^c) with respect to the node masses.
///
/// CCut is differentiable only when the two volumes differ; for equal
/// volumes an AssumptionViolated error points to the mixture sampler.
inline std::vector<double> balance_gradient(const WeightedGraph& g, const Partition& s,
                                            const CutObjective& objective,
                                            double volume_tolerance = 1e-12) {
  detail::check_partition(g, s);
  const std::size_t m = g.size();
  if (const auto* f = objective.custom()) {
    if (!f->gradient)
      throw InvalidArgument("balance functional '" + f->name + "' has no gradient");
    auto grad = f->gradient(g, s);
    if (grad.size() != m) throw InvalidArgument("balance gradient has wrong length");
    return grad;
  }
  std::vector<double> grad(m, 0.0);
  switch (objective.kind()) {
    case CutKind::MCut:
    case CutKind::RCut:
      return grad;
    case CutKind::NCut:
    case CutKind::NCutAlt: {
      const auto q = q_vector(g, s);
      const auto d = neighbor_mass_vector(g);
      const double vs = g.vol(s), vc = g.vol_complement(s);
      for (std::size_t r = 0; r < m; ++r) {
        const double own = s.contains(r) ? vs : vc;
        const double other = s.contains(r) ? vc : vs;
        grad[r] = q[r] * (own - other) + 2.0 * other * d[r];
      }
      if (objective.kind() == CutKind::NCutAlt) {
        // bal* = vol(S) vol(S^c) / vol(V) with d vol(V) / d p_r = 2 d_r.
        const double vv = g.vol_all();
        const double bal = vs * vc;
        for (std::size_t r = 0; r < m; ++r)
          grad[r] = grad[r] / vv - bal * 2.0 * d[r] / (vv * vv);
      }
      return grad;
    }
    case CutKind::CCut: {
      if (equal_volumes(g, s, volume_tolerance))
        throw AssumptionViolated("CCut balance is not differentiable at " + s.to_string() +
                                 " (equal volumes); use the mixture sampler");
      std::vector<std::uint8_t> smaller(s.indicator());
      if (g.vol(s) > g.vol_complement(s))
        for (auto& v : smaller) v = !v;
      return volume_gradient(g, smaller);
    }
  }
  return grad;
}

/// c_{i,S} = (q_{i,S} - XC_S d bal_S / d p_i) / bal_S, so that the limit of
/// sqrt(n)(XC_S(G_n) - XC_S(G)) is <Z, c_S> in the differentiable case.
inline std::vector<double> limit_gradient(const WeightedGraph& g, const Partition& s,
                                          const CutObjective& objective,
                                          double volume_tolerance = 1e-12) {
  const auto terms = cut_terms(g, s);
  const double bal = objective.balance(terms);
  const double xc = objective.value(terms);
  auto c = q_vector(g, s);
  const auto grad = balance_gradient(g, s, objective, volume_tolerance);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = (c[i] - xc * grad[i]) / bal;
  return c;
}

/// Sigma_{T,S} = sum p_i c_iT c_iS - (p . c_T)(p . c_S).
inline LimitCovariance covariance(const WeightedGraph& g, const CutObjective& objective,
                                  const std::vector<Partition>& partitions,
                                  double volume_tolerance = 1e-12) {
  const auto& p = detail::population_masses(g);
  LimitCovariance cov;
  cov.kind = objective.name();
  cov.partitions = partitions;
  const std::size_t k = partitions.size();
  std::vector<std::vector<double>> c;
  std::vector<double> mean(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    c.push_back(limit_gradient(g, partitions[a], objective, volume_tolerance));
    for (std::size_t i = 0; i < g.size(); ++i) mean[a] += p[i] * c[a][i];
  }
  cov.entries.assign(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += p[i] * c[a][i] * c[b][i];
      cov.entries[a * k + b] = cov.entries[b * k + a] = s - mean[a] * mean[b];
    }
  return cov;
}

/// Sigma^CC for partitions whose two sides have different volumes, with
/// T the smaller-volume side:
/// sum_i p_i (q_iT - CC_T (q_iT + 2 b_iT 1{i in T})) (...)_S / (vol(T) vol(S)).
inline LimitCovariance covariance_ccut_unequal(const WeightedGraph& g,
                                               const std::vector<Partition>& partitions,
                                               double volume_tolerance = 1e-12) {
  const auto& p = detail::population_masses(g);
  const std::size_t k = partitions.size();
  std::vector<std::vector<double>> c(k);
  for (std::size_t a = 0; a < k; ++a) {
    const auto& s = partitions[a];
    detail::check_partition(g, s);
    if (equal_volumes(g, s, volume_tolerance))
      throw AssumptionViolated("partition " + s.to_string() +
                               " has equal volumes; the CCut limit is the mixture law "
                               "(use LimitSampler)");
    std::vector<std::uint8_t> t(s.indicator());
    if (g.vol(s) > g.vol_complement(s))
      for (auto& v : t) v = !v;
    const auto q = q_vector(g, s);
    const auto b = side_mass_vector(g, t);
    const double vt = g.vol(t);
    const double cc = cut_value(g, s, CutKind::CCut);
    c[a].resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      c[a][i] = (q[i] - cc * (q[i] + (t[i] ? 2.0 * b[i] : 0.0))) / vt;
  }
  LimitCovariance cov;
  cov.kind = "CCut";
  cov.partitions = partitions;
  cov.entries.assign(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += p[i] * c[a][i] * c[b][i];
      cov.entries[a * k + b] = cov.entries[b * k + a] = s;
    }
  return cov;
}

/// Z ~ N_m(0, diag(p) - p p^T) as Z_i = sqrt(p_i) G_i - p_i sum_j sqrt(p_j) G_j.
inline std::vector<double> gaussian_root_sample(std::span<const double> p, Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(p.size());
  double proj = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double root = std::sqrt(p[i]);
    const double gi = normal(rng);
    z[i] = root * gi;
    proj += root * gi;
  }
  for (std::size_t i = 0; i < p.size(); ++i) z[i] -= p[i] * proj;
  return z;
}

inline std::vector<double> gaussian_root_sample(std::span<const double> p,
                                                std::uint64_t seed) {
  auto rng = make_engine(seed);
  return gaussian_root_sample(p, rng);
}

enum class LimitMode { gaussian_min, ccut_mixture };

struct LimitSamplerOptions {
  double volume_tolerance = 1e-12;
  /// Treat equal-volume CCut partitions as if the canonical side S were the
  /// smaller one (the Gaussian law under a false unequal-volume assumption).
  bool assume_unequal_volumes = false;
};

/// Per-partition pieces of one CCut draw.
struct CcutComponent {
  double value = 0.0;         // Z_S^CC
  bool mixture = false;       // both orientations tied in volume
  double orientation_s = 0.0;  // grad vol(S) . Z
  double orientation_c = 0.0;  // grad vol(S^c) . Z
};

/// Draws from min_{S in S*} Z_S^XC, the limit of sqrt(n)(XC(G_n) - XC(G)).
class LimitSampler {
 public:
  LimitSampler(const WeightedGraph& population, CutObjective objective,
               std::vector<Partition> minimizers, LimitSamplerOptions options = {})
      : objective_(std::move(objective)), options_(options), p_(detail::population_masses(population)) {
    if (minimizers.empty()) throw InvalidArgument("limit sampler needs at least one partition");
    const bool ccut = objective_.is_builtin() && objective_.kind() == CutKind::CCut;
    for (const auto& s : minimizers) {
      detail::check_partition(population, s);
      Component comp;
      comp.partition = s;
      if (ccut && equal_volumes(population, s, options_.volume_tolerance)) {
        if (options_.assume_unequal_volumes) {
          comp.c = wrong_assumption_gradient(population, s);
        } else {
          comp.mixture = true;
          mode_ = LimitMode::ccut_mixture;
          const double cc = cut_value(population, s, CutKind::CCut);
          const double minvol = std::min(population.vol(s), population.vol_complement(s));
          comp.q = q_vector(population, s);
          for (auto& v : comp.q) v /= minvol;
          std::vector<std::uint8_t> comp_side(s.indicator());
          for (auto& v : comp_side) v = !v;
          comp.grad_s = volume_gradient(population, s.indicator());
          comp.grad_c = volume_gradient(population, comp_side);
          comp.scale = cc / minvol;
        }
      } else {
        comp.c = limit_gradient(population, s, objective_, options_.volume_tolerance);
      }
      components_.push_back(std::move(comp));
    }
  }

  LimitMode mode() const noexcept { return mode_; }
  const std::vector<double>& masses() const noexcept { return p_; }
  std::size_t partition_count() const noexcept { return components_.size(); }

  /// Per-partition values Z_S for a given root draw Z.
  std::vector<CcutComponent> components(std::span<const double> z) const {
    std::vector<CcutComponent> out;
    out.reserve(components_.size());
    for (const auto& comp : components_) {
      CcutComponent r;
      if (comp.mixture) {
        r.mixture = true;
        double qz = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
          qz += comp.q[i] * z[i];
          r.orientation_s += comp.grad_s[i] * z[i];
          r.orientation_c += comp.grad_c[i] * z[i];
        }
        r.value = qz - comp.scale * std::min(r.orientation_s, r.orientation_c);
      } else {
        for (std::size_t i = 0; i < z.size(); ++i) r.value += comp.c[i] * z[i];
      }
      out.push_back(r);
    }
    return out;
  }

  /// min over S* of Z_S for a given root draw Z.
  double evaluate(std::span<const double> z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : components(z)) best = std::min(best, r.value);
    return best;
  }

  double draw(Engine& rng) const { return evaluate(gaussian_root_sample(p_, rng)); }

  std::vector<double> sample(std::size_t n_draws, std::uint64_t seed) const {
    auto rng = make_engine(seed);
    std::vector<double> out(n_draws);
    for (auto& v : out) v = draw(rng);
    return out;
  }

 private:
  struct Component {
    Partition partition;
    bool mixture = false;
    std::vector<double> c;  // linear case
    std::vector<double> q, grad_s, grad_c;  // mixture case, q pre-divided by minvol
    double scale = 0.0;  // CC / minvol
  };

  static std::vector<double> wrong_assumption_gradient(const WeightedGraph& g,
                                                       const Partition& s) {
    const auto q = q_vector(g, s);
    const auto grad = volume_gradient(g, s.indicator());
    const double vt = g.vol(s);
    const double cc = cut_value(g, s, CutKind::CCut);
    std::vector<double> c(g.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (q[i] - cc * grad[i]) / vt;
    return c;
  }

  CutObjective objective_;
  LimitSamplerOptions options_;
  std::vector<double> p_;
  std::vector<Component> components_;
  LimitMode mode_ = LimitMode::gaussian_min;
};

/// Sampler for min_{S in argmin XC} Z_S, taking S* from exact enumeration.
inline LimitSampler make_limit_sampler(const WeightedGraph& population,
                                       const CutObjective& objective,
                                       LimitSamplerOptions options = {},
                                       const ExactOptions& exact = {}) {
  auto rep = min_cut_exact(population, objective, exact);
  return LimitSampler(population, objective, rep.minimizers, options);
}

// ---------------------------------------------------------------------------
// Multiway limits

/// Covariance of (1/2) sum_l Z_{S_l} over k-partitions:
/// (1/4) sum_i sum_j Sigma_{T_i, S_j}.
inline LimitCovariance multiway_covariance(const WeightedGraph& g,
                                           const CutObjective& objective,
                                           const std::vector<MultiPartition>& parts,
                                           double volume_tolerance = 1e-12) {
  const auto& p = detail::population_masses(g);
  const std::size_t k = parts.size();
  std::vector<std::vector<double>> c(k, std::vector<double>(g.size(), 0.0));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < parts[a].block_count(); ++b) {
      const auto cb = limit_gradient(g, parts[a].block_partition(b), objective, volume_tolerance);
      for (std::size_t i = 0; i < g.size(); ++i) c[a][i] += 0.5 * cb[i];
    }
  LimitCovariance cov;
  cov.kind = objective.name();
  for (const auto& mp : parts) cov.partitions.push_back(mp.block_partition(0));
  cov.entries.assign(k * k, 0.0);
  std::vector<double> mean(k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t i = 0; i < g.size(); ++i) mean[a] += p[i] * c[a][i];
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += p[i] * c[a][i] * c[b][i];
      cov.entries[a * k + b] = cov.entries[b * k + a] = s - mean[a] * mean[b];
    }
  return cov;
}

/// Draws from (1/2) min_{S in S*^k} sum_l Z_{S_l}, sharing one root Z per
/// draw across all blocks.
class MultiwayLimitSampler {
 public:
  MultiwayLimitSampler(const WeightedGraph& population, CutObjective objective,
                       std::vector<MultiPartition> minimizers,
                       LimitSamplerOptions options = {}) {
    if (minimizers.empty()) throw InvalidArgument("multiway sampler needs a k-partition");
    std::vector<Partition> blocks;
    for (const auto& mp : minimizers) {
      if (mp.block_count() < 2) throw InvalidArgument("multiway cut needs k >= 2");
      std::vector<std::size_t> idx;
      for (std::size_t b = 0; b < mp.block_count(); ++b) {
        const auto part = mp.block_partition(b);
        auto it = std::find(blocks.begin(), blocks.end(), part);
        if (it == blocks.end()) {
          blocks.push_back(part);
          it = blocks.end() - 1;
        }
        idx.push_back(static_cast<std::size_t>(it - blocks.begin()));
      }
      block_index_.push_back(std::move(idx));
    }
    inner_.emplace(population, std::move(objective), std::move(blocks), options);
  }

  double evaluate(std::span<const double> z) const {
    const auto comps = inner_->components(z);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& idx : block_index_) {
      double sum = 0.0;
      for (auto b : idx) sum += comps[b].value;
      best = std::min(best, 0.5 * sum);
    }
    return best;
  }

  double draw(Engine& rng) const {
    return evaluate(gaussian_root_sample(inner_->masses(), rng));
  }

  std::vector<double> sample(std::size_t n_draws, std::uint64_t seed) const {
    auto rng = make_engine(seed);
    std::vector<double> out(n_draws);
    for (auto& v : out) v = draw(rng);
    return out;
  }

 private:
  std::optional<LimitSampler> inner_;
  std::vector<std::vector<std::size_t>> block_index_;
};

// ---------------------------------------------------------------------------
// Xist limit under uniqueness

struct XistLimit {
  Partition partition;
  double value = 0.0;     // Xist(G)
  double variance = 0.0;  // Sigma^XC_{S_min, S_min}
  std::size_t s = 0;
  std::size_t t = 0;
};

/// Gaussian limit variance of Xist on the population graph. Requires that
/// Xist's minimal value is attained by a single partition and that this
/// partition is the unique st-MinCut for its pair (checked by enumeration).
inline XistLimit xist_limit_variance(const WeightedGraph& population,
                                     const CutObjective& objective,
                                     const ExactOptions& opt = {}) {
  const auto& p = detail::population_masses(population);
  const std::size_t m = population.size();
  if (m > opt.cap || m > 63)
    throw InfeasibleSize("uniqueness check enumerates partitions; graph exceeds the cap");
  const auto res = xist(population, p, objective);
  if (!res.partition) throw AssumptionViolated("Xist returns no partition (|Vloc| <= 1)");

  std::vector<Partition> attaining;
  const XistStep* producer = nullptr;
  for (const auto& st : res.steps) {
    if (!st.value || !within_tolerance(*st.value, res.value, opt.tolerance)) continue;
    if (std::find(attaining.begin(), attaining.end(), st.partition) == attaining.end())
      attaining.push_back(st.partition);
    if (!producer && st.partition == *res.partition) producer = &st;
  }
  auto names = [](const std::vector<Partition>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s.to_string();
    return out;
  };
  if (attaining.size() > 1)
    throw AssumptionViolated("Xist minimum attained by several partitions: " + names(attaining));

  // Every partition separating s from t with the minimal crossing weight.
  std::vector<Partition> st_min;
  const std::uint64_t full = (std::uint64_t{1} << m) - 1;
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    if (!((mask >> producer->s) & 1U) || ((mask >> producer->t) & 1U)) continue;
    std::vector<std::uint8_t> ind(m);
    for (std::size_t i = 0; i < m; ++i) ind[i] = (mask >> i) & 1U;
    if (within_tolerance(population.crossing_weight(ind), producer->st_value, opt.tolerance))
      st_min.emplace_back(std::move(ind));
  }
  if (st_min.size() > 1)
    throw AssumptionViolated("st-MinCut for (" + std::to_string(producer->s) + "," +
                             std::to_string(producer->t) + ") is not unique: " + names(st_min));

  XistLimit out;
  out.partition = *res.partition;
  out.value = res.value;
  out.s = producer->s;
  out.t = producer->t;
  out.variance = covariance(population, objective, {out.partition})(0, 0);
  return out;
}

}  // namespace gcut
