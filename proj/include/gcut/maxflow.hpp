#pragma once

// st-MinCut on undirected weighted graphs via Dinic's blocking-flow
// max-flow. Each undirected edge carries its weight as capacity in both
// directions.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "gcut/error.hpp"
#include "gcut/graph.hpp"
#include "gcut/partition.hpp"

namespace gcut {

struct StCutResult {
  double value = 0.0;  // crossing weight of source_side
  double flow = 0.0;   // max-flow value found by the solver
  std::vector<std::uint8_t> source_side;  // residual reachability set of s
  std::size_t s = 0;
  std::size_t t = 0;

  Partition partition() const { return Partition(source_side); }
};

class MaxFlow {
 public:
  explicit MaxFlow(std::size_t n) : head_(n, kNone) {}

  /// Undirected edge of capacity c (c in both directions).
  void add_undirected(std::size_t u, std::size_t v, double c) {
    arcs_.push_back({v, head_[u], c});
    head_[u] = arcs_.size() - 1;
    arcs_.push_back({u, head_[v], c});
    head_[v] = arcs_.size() - 1;
    max_cap_ = std::max(max_cap_, c);
  }

  double run(std::size_t s, std::size_t t) {
    eps_ = 1e-14 * max_cap_;
    double total = 0.0;
    while (bfs(s, t)) {
      it_ = head_;
      for (;;) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= 0.0) break;
        total += f;
      }
    }
    return total;
  }

  /// Nodes reachable from s through arcs with residual above tolerance.
  std::vector<std::uint8_t> source_side(std::size_t s) const {
    std::vector<std::uint8_t> seen(head_.size(), 0);
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto a = head_[u]; a != kNone; a = arcs_[a].next)
        if (arcs_[a].cap > eps_ && !seen[arcs_[a].to]) {
          seen[arcs_[a].to] = 1;
          stack.push_back(arcs_[a].to);
        }
    }
    return seen;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  struct Arc {
    std::size_t to;
    std::size_t next;
    double cap;  // residual capacity
  };

  bool bfs(std::size_t s, std::size_t t) {
    level_.assign(head_.size(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (auto a = head_[u]; a != kNone; a = arcs_[a].next)
        if (arcs_[a].cap > eps_ && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[u] + 1;
          q.push(arcs_[a].to);
        }
    }
    return level_[t] >= 0;
  }

  double dfs(std::size_t u, std::size_t t, double pushed) {
    if (u == t) return pushed;
    for (auto& a = it_[u]; a != kNone; a = arcs_[a].next) {
      Arc& arc = arcs_[a];
      if (arc.cap <= eps_ || level_[arc.to] != level_[u] + 1) continue;
      const double f = dfs(arc.to, t, std::min(pushed, arc.cap));
      if (f > 0.0) {
        arc.cap -= f;
        arcs_[a ^ 1U].cap += f;
        return f;
      }
    }
    return 0.0;
  }

  std::vector<std::size_t> head_;
  std::vector<std::size_t> it_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  double max_cap_ = 0.0;
  double eps_ = 0.0;
};

/// Minimum-weight partition separating s from t; the source side is the
/// residual reachability set of s after max-flow.
inline StCutResult st_mincut(const WeightedGraph& g, std::size_t s, std::size_t t) {
  if (s >= g.size() || t >= g.size()) throw InvalidArgument("s or t out of range");
  if (s == t) throw InvalidArgument("st-MinCut needs s != t");
  MaxFlow mf(g.size());
  for (const auto& e : g.edges())
    if (e.w > 0.0) mf.add_undirected(e.i, e.j, e.w);
  StCutResult r;
  r.s = s;
  r.t = t;
  r.flow = mf.run(s, t);
  r.source_side = mf.source_side(s);
  if (r.source_side[t])
    throw Error("max-flow terminated with t reachable from s");
  r.value = g.crossing_weight(r.source_side);
  return r;
}

}  // namespace gcut
