#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gcut/discretization.hpp"
#include "gcut/graph.hpp"

namespace gcut::testing {

/// Four-cycle 0-1-3-2-0 with uniform masses, as a 2x2 grid with t = 1.
inline WeightedGraph example1_graph() {
  return population_graph(uniform_grid({2, 2}), 1.0);
}

/// Connected random graph on m nodes: random spanning tree plus extra edges,
/// masses from normalized exponentials.
inline WeightedGraph random_graph(std::uint64_t seed, std::size_t min_m = 2,
                                  std::size_t max_m = 8, double extra = 0.4) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size_dist(min_m, max_m);
  const std::size_t m = size_dist(rng);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(m);
  for (auto& v : w) v = expo(rng) + 1e-3;
  auto p = normalize_weights(w);
  Adjacency adj(m);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 1; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    adj.connect(i, parent(rng));
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (u(rng) < extra) adj.connect(i, j);
  return WeightedGraph::from_masses(std::move(adj), std::move(p));
}

/// Brute force crossing weight straight from the weight matrix.
inline double brute_crossing(const WeightedGraph& g, std::uint64_t mask) {
  double c = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (((mask >> i) & 1U) && !((mask >> j) & 1U)) c += g.weight(i, j);
  return c;
}

inline double brute_vol(const WeightedGraph& g, std::uint64_t mask) {
  double v = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if ((mask >> i) & 1U)
      for (std::size_t j = 0; j < g.size(); ++j) v += g.weight(i, j);
  return v;
}

}  // namespace gcut::testing
