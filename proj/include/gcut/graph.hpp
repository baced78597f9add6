#pragma once

// Discretized population and empirical graphs on a fixed t-neighbourhood
// structure, with weights w_ij = x_i x_j on edges.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gcut/discretization.hpp"
#include "gcut/error.hpp"
#include "gcut/partition.hpp"
#include "gcut/rng.hpp"

namespace gcut {

enum class GraphSource { population, empirical, explicit_weights };

/// Symmetric boolean incidence without self loops.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(std::size_t m) : m_(m), a_(m * m, 0) {}

  std::size_t size() const noexcept { return m_; }
  bool operator()(std::size_t i, std::size_t j) const { return a_[i * m_ + j] != 0; }

  void connect(std::size_t i, std::size_t j) {
    if (i == j) throw InvalidArgument("self loops are not allowed");
    a_[i * m_ + j] = a_[j * m_ + i] = 1;
  }

  std::size_t edge_count() const {
    std::size_t e = 0;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = i + 1; j < m_; ++j) e += (*this)(i, j);
    return e;
  }

  friend bool operator==(const Adjacency&, const Adjacency&) = default;

 private:
  std::size_t m_ = 0;
  std::vector<std::uint8_t> a_;
};

/// Relative slack on t^2 so that thresholds such as t = sqrt(5) given as a
/// rounded double still include centers at exactly that distance.
inline constexpr long double kDistanceSlack = 1e-12L;

/// i ~ j iff the Euclidean distance between bin centers is at most t.
inline Adjacency neighborhood(const ProbabilityGrid& grid, double t) {
  if (!(t > 0.0)) throw InvalidArgument("neighbourhood distance t must be > 0");
  const long double t2 = static_cast<long double>(t) * t * (1.0L + kDistanceSlack);
  Adjacency adj(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto ci = grid.center(i);
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      auto cj = grid.center(j);
      long double d2 = 0.0L;
      for (std::size_t a = 0; a < ci.size(); ++a) {
        const long double d = static_cast<long double>(ci[a]) - cj[a];
        d2 += d * d;
      }
      if (d2 <= t2) adj.connect(i, j);
    }
  }
  return adj;
}

struct Edge {
  std::size_t i;
  std::size_t j;
  double w;
};

class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// w_ij = x_i x_j 1{i~j}. `sample_size` is n for empirical graphs.
  static WeightedGraph from_masses(Adjacency adjacency, std::vector<double> x,
                                   GraphSource source = GraphSource::population,
                                   std::int64_t sample_size = 0) {
    if (x.size() != adjacency.size())
      throw InvalidArgument("mass vector does not match adjacency size");
    for (double v : x)
      if (!(v >= 0.0)) throw InvalidArgument("masses must be nonnegative");
    WeightedGraph g;
    g.m_ = x.size();
    g.adj_ = std::move(adjacency);
    g.w_.assign(g.m_ * g.m_, 0.0);
    for (std::size_t i = 0; i < g.m_; ++i)
      for (std::size_t j = 0; j < g.m_; ++j)
        if (g.adj_(i, j)) g.w_[i * g.m_ + j] = x[i] * x[j];
    g.x_ = std::move(x);
    g.source_ = source;
    g.n_ = sample_size;
    g.finish();
    return g;
  }

  /// Arbitrary symmetric nonnegative weights; adjacency is {w_ij > 0}.
  static WeightedGraph from_weights(std::size_t m, std::vector<double> w) {
    if (w.size() != m * m) throw InvalidArgument("weight matrix must be m x m");
    WeightedGraph g;
    g.m_ = m;
    g.adj_ = Adjacency(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (w[i * m + i] != 0.0) throw InvalidArgument("diagonal weights must be 0");
      for (std::size_t j = i + 1; j < m; ++j) {
        if (w[i * m + j] != w[j * m + i])
          throw InvalidArgument("weight matrix must be symmetric");
        if (w[i * m + j] < 0.0) throw InvalidArgument("weights must be nonnegative");
        if (w[i * m + j] > 0.0) g.adj_.connect(i, j);
      }
    }
    g.w_ = std::move(w);
    g.source_ = GraphSource::explicit_weights;
    g.finish();
    return g;
  }

  static WeightedGraph from_edges(std::size_t m, std::span<const Edge> edges) {
    std::vector<double> w(m * m, 0.0);
    for (const auto& e : edges) {
      if (e.i >= m || e.j >= m || e.i == e.j) throw InvalidArgument("bad edge");
      w[e.i * m + e.j] = w[e.j * m + e.i] = e.w;
    }
    return from_weights(m, std::move(w));
  }

  std::size_t size() const noexcept { return m_; }
  double weight(std::size_t i, std::size_t j) const { return w_[i * m_ + j]; }
  bool adjacent(std::size_t i, std::size_t j) const { return adj_(i, j); }
  const Adjacency& adjacency() const noexcept { return adj_; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return nbr_[i]; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  double degree(std::size_t i) const { return deg_[i]; }
  const std::vector<double>& degrees() const noexcept { return deg_; }

  bool has_masses() const noexcept { return !x_.empty(); }
  /// Node masses x (p or Y/n); empty for explicit-weight graphs.
  const std::vector<double>& masses() const noexcept { return x_; }
  GraphSource source() const noexcept { return source_; }
  std::int64_t sample_size() const noexcept { return n_; }

  double total_weight() const noexcept { return total_; }
  double vol_all() const noexcept { return 2.0 * total_; }

  /// vol(S) = sum over i in S of the weighted degree.
  double vol(std::span<const std::uint8_t> indicator) const {
    double v = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (indicator[i]) v += deg_[i];
    return v;
  }
  double vol(const Partition& s) const { return vol(s.indicator()); }
  double vol_complement(const Partition& s) const {
    double v = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (!s.contains(i)) v += deg_[i];
    return v;
  }
  double vol_of(std::span<const std::size_t> nodes) const {
    double v = 0.0;
    for (auto i : nodes) v += deg_[i];
    return v;
  }

  /// Sum of weights of edges with exactly one end in S.
  double crossing_weight(std::span<const std::uint8_t> indicator) const {
    double c = 0.0;
    for (const auto& e : edges_)
      if ((indicator[e.i] != 0) != (indicator[e.j] != 0)) c += e.w;
    return c;
  }

  /// Connectivity over positive-weight edges.
  bool connected() const {
    if (m_ == 0) return true;
    std::vector<std::uint8_t> seen(m_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      for (auto j : nbr_[i])
        if (!seen[j] && weight(i, j) > 0.0) {
          seen[j] = 1;
          ++count;
          stack.push_back(j);
        }
    }
    return count == m_;
  }

 private:
  void finish() {
    nbr_.assign(m_, {});
    deg_.assign(m_, 0.0);
    edges_.clear();
    total_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < m_; ++j) {
        if (!adj_(i, j)) continue;
        nbr_[i].push_back(j);
        deg_[i] += w_[i * m_ + j];
        if (i < j) {
          edges_.push_back({i, j, w_[i * m_ + j]});
          total_ += w_[i * m_ + j];
        }
      }
  }

  std::size_t m_ = 0;
  Adjacency adj_;
  std::vector<double> w_;
  std::vector<double> x_;
  std::vector<std::vector<std::size_t>> nbr_;
  std::vector<double> deg_;
  std::vector<Edge> edges_;
  double total_ = 0.0;
  GraphSource source_ = GraphSource::population;
  std::int64_t n_ = 0;
};

inline WeightedGraph build_graph(std::span<const double> x,
                                 const ProbabilityGrid& grid, double t,
                                 GraphSource source = GraphSource::population,
                                 std::int64_t sample_size = 0) {
  return WeightedGraph::from_masses(neighborhood(grid, t),
                                    std::vector<double>(x.begin(), x.end()),
                                    source, sample_size);
}

inline WeightedGraph population_graph(const ProbabilityGrid& grid, double t) {
  return build_graph(grid.p(), grid, t, GraphSource::population);
}

inline WeightedGraph empirical_graph(const DiscretizedSample& y,
                                     const Adjacency& adjacency) {
  if (y.size() != adjacency.size())
    throw InvalidArgument("sample does not match graph size");
  return WeightedGraph::from_masses(adjacency, y.frequencies(),
                                    GraphSource::empirical, y.n);
}

inline WeightedGraph empirical_graph(const DiscretizedSample& y,
                                     const ProbabilityGrid& grid, double t) {
  return empirical_graph(y, neighborhood(grid, t));
}

struct EdgeBias {
  std::size_t i;
  std::size_t j;
  bool adjacent;
  double expected;  // p_i p_j 1{i~j}
  double mean;      // mean of n/(n-1) * w^_ij over replicates
  double se;        // standard error of that mean

  double bias() const { return mean - expected; }
};

/// Monte Carlo check of E[n/(n-1) w^_ij] = p_i p_j 1{i~j} for all pairs i<j.
inline std::vector<EdgeBias> weight_unbiasedness_check(const ProbabilityGrid& grid,
                                                       double t, std::int64_t n,
                                                       std::size_t reps,
                                                       std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("unbiasedness check needs n >= 2");
  if (reps < 2) throw InvalidArgument("unbiasedness check needs reps >= 2");
  const auto adj = neighborhood(grid, t);
  const std::size_t m = grid.size();
  const double scale = static_cast<double>(n) / static_cast<double>(n - 1);
  std::vector<double> sum(m * m, 0.0), sumsq(m * m, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    auto rng = make_engine(seed, r);
    const auto y = sample_multinomial(grid.p(), n, rng);
    const auto f = y.frequencies();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        if (!adj(i, j)) continue;
        const double v = scale * f[i] * f[j];
        sum[i * m + j] += v;
        sumsq[i * m + j] += v * v;
      }
  }
  std::vector<EdgeBias> out;
  const auto R = static_cast<double>(reps);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const bool a = adj(i, j);
      const double mean = sum[i * m + j] / R;
      const double var = std::max(0.0, (sumsq[i * m + j] - R * mean * mean) / (R - 1.0));
      out.push_back({i, j, a, a ? grid.p()[i] * grid.p()[j] : 0.0, mean,
                     std::sqrt(var / R)});
    }
  return out;
}

}  // namespace gcut
