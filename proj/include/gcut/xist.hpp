#pragma once

// Xist: the best balanced cut among st-MinCuts between local maxima, with
// the tau-guided (contraction-free Gomory-Hu) choice of st pairs.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcut/cuts.hpp"
#include "gcut/error.hpp"
#include "gcut/graph.hpp"
#include "gcut/maxflow.hpp"
#include "gcut/partition.hpp"

namespace gcut {

/// {i : masses_i >= masses_j for all j ~ i}, ascending.
inline std::vector<std::size_t> local_maxima(const Adjacency& adj,
                                             std::span<const double> masses) {
  if (masses.size() != adj.size()) throw InvalidArgument("masses do not match graph");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    bool is_max = true;
    for (std::size_t j = 0; j < adj.size() && is_max; ++j)
      if (adj(i, j) && masses[j] > masses[i]) is_max = false;
    if (is_max) out.push_back(i);
  }
  return out;
}

inline std::vector<std::size_t> local_maxima(const WeightedGraph& g,
                                             std::span<const double> masses) {
  return local_maxima(g.adjacency(), masses);
}

struct XistStep {
  std::size_t s = 0;
  std::size_t t = 0;
  double st_value = 0.0;        // st-MinCut weight
  Partition partition;          // canonical form of S_st
  std::optional<double> value;  // XCut of S_st; nullopt when degenerate
};

struct XistResult {
  std::string kind;
  double value = std::numeric_limits<double>::infinity();
  std::optional<Partition> partition;
  std::vector<std::size_t> vloc;
  std::vector<XistStep> steps;
  bool terminated_trivially = false;

  std::vector<std::pair<std::size_t, std::size_t>> computed_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& st : steps) out.emplace_back(st.s, st.t);
    return out;
  }
};

/// Runs Xist on g. `masses` decides the local maxima (p or Y); pass
/// `vloc_override` to iterate over a fixed node list instead.
inline XistResult xist(const WeightedGraph& g, std::span<const double> masses,
                       const CutObjective& objective,
                       const std::optional<std::vector<std::size_t>>& vloc_override = {}) {
  XistResult r;
  r.kind = objective.name();
  if (vloc_override) {
    r.vloc = *vloc_override;
    for (auto v : r.vloc)
      if (v >= g.size()) throw InvalidArgument("vloc node out of range");
  } else {
    r.vloc = local_maxima(g, masses);
  }
  const std::size_t n = r.vloc.size();
  if (n <= 1) {
    r.terminated_trivially = true;
    return r;
  }
  // tau holds 0-based positions into vloc; all start at the first vertex.
  std::vector<std::size_t> tau(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t s = r.vloc[i];
    const std::size_t t = r.vloc[tau[i]];
    const auto cut = st_mincut(g, s, t);
    XistStep step;
    step.s = s;
    step.t = t;
    step.st_value = cut.value;
    step.partition = cut.partition();
    step.value = objective.try_value(cut_terms(g, step.partition));
    if (step.value && *step.value < r.value) {
      r.value = *step.value;
      r.partition = step.partition;
    }
    const std::size_t old = tau[i];
    for (std::size_t j = i + 1; j < n; ++j)
      if (cut.source_side[r.vloc[j]] && tau[j] == old) tau[j] = i;
    r.steps.push_back(std::move(step));
  }
  return r;
}

struct XistComparison {
  XistResult xist;
  CutReport exact;
  double gap = 0.0;  // xist value minus exact minimum
  /// Some exact minimizer attains the st-MinCut for a pair s, t in Vloc.
  bool exact_minimizer_is_st_mincut = false;
  bool xist_found_minimizer = false;
};

inline XistComparison xist_vs_exact(
    const WeightedGraph& g, std::span<const double> masses, const CutObjective& objective,
    const std::optional<std::vector<std::size_t>>& vloc_override = {},
    const ExactOptions& opt = {}) {
  XistComparison c;
  c.exact = min_cut_exact(g, objective, opt);
  c.xist = xist(g, masses, objective, vloc_override);
  c.gap = c.xist.value - c.exact.value;
  c.xist_found_minimizer = c.xist.partition && c.exact.is_minimizer(*c.xist.partition);
  const auto& vloc = c.xist.vloc;
  for (const auto& s_min : c.exact.minimizers) {
    const double mc = g.crossing_weight(s_min.indicator());
    for (auto s : vloc)
      for (auto t : vloc) {
        if (!s_min.contains(s) || s_min.contains(t)) continue;
        const double st = st_mincut(g, s, t).value;
        if (within_tolerance(mc, st, opt.tolerance)) c.exact_minimizer_is_st_mincut = true;
      }
  }
  return c;
}

}  // namespace gcut
