#pragma once

// Balanced graph cut objectives XC_S = cut(S, S^c) / bal(S, S^c) and their
// exact minimization by enumeration, two-way and multiway.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gcut/error.hpp"
#include "gcut/graph.hpp"
#include "gcut/partition.hpp"

namespace gcut {

enum class CutKind { MCut, RCut, NCut, NCutAlt, CCut };

inline std::string_view to_string(CutKind k) {
  switch (k) {
    case CutKind::MCut: return "MCut";
    case CutKind::RCut: return "RCut";
    case CutKind::NCut: return "NCut";
    case CutKind::NCutAlt: return "NCutAlt";
    case CutKind::CCut: return "CCut";
  }
  return "?";
}

inline std::optional<CutKind> parse_cut_kind(std::string_view s) {
  std::string l;
  for (char c : s)
    if (c != '-' && c != '_') l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "mcut") return CutKind::MCut;
  if (l == "rcut") return CutKind::RCut;
  if (l == "ncut") return CutKind::NCut;
  if (l == "ncutalt") return CutKind::NCutAlt;
  if (l == "ccut") return CutKind::CCut;
  return std::nullopt;
}

/// Quantities a balancing term may depend on.
struct CutTerms {
  double crossing = 0.0;  // sum of w_ij, i in S, j in S^c
  double vol_s = 0.0;
  double vol_c = 0.0;
  std::size_t size_s = 0;
  std::size_t size_c = 0;

  double vol_all() const { return vol_s + vol_c; }
};

inline CutTerms cut_terms(const WeightedGraph& g,
                          std::span<const std::uint8_t> indicator) {
  CutTerms t;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (indicator[i]) {
      t.vol_s += g.degree(i);
      ++t.size_s;
    } else {
      t.vol_c += g.degree(i);
      ++t.size_c;
    }
  }
  t.crossing = g.crossing_weight(indicator);
  return t;
}

inline CutTerms cut_terms(const WeightedGraph& g, const Partition& s) {
  if (s.node_count() != g.size())
    throw InvalidArgument("partition size does not match graph");
  return cut_terms(g, s.indicator());
}

/// User-defined balancing term, e.g. min{|S|, |S^c|}.
///
/// `gradient` returns d bal / d p_i at the graph's node masses; it is needed
/// only by the limit-law machinery.
struct BalanceFunctional {
  std::string name;
  std::function<double(const CutTerms&)> value;
  std::function<std::vector<double>(const WeightedGraph&, const Partition&)> gradient;
};

class CutObjective {
 public:
  CutObjective(CutKind k) : kind_(k) {}  // NOLINT(implicit)
  explicit CutObjective(BalanceFunctional f) : custom_(std::move(f)) {
    if (!custom_->value) throw InvalidArgument("balance functional needs a value");
  }

  bool is_builtin() const noexcept { return !custom_.has_value(); }
  CutKind kind() const noexcept { return kind_; }
  const BalanceFunctional* custom() const noexcept {
    return custom_ ? &*custom_ : nullptr;
  }
  std::string name() const {
    return custom_ ? custom_->name : std::string(to_string(kind_));
  }

  /// bal(S, S^c); throws DegeneratePartition when it is not positive.
  double balance(const CutTerms& t) const {
    double b = 0.0;
    if (custom_) {
      b = custom_->value(t);
    } else {
      switch (kind_) {
        case CutKind::MCut: return 1.0;
        case CutKind::RCut:
          b = static_cast<double>(t.size_s) * static_cast<double>(t.size_c);
          break;
        case CutKind::NCut:
          b = t.vol_s * t.vol_c;
          if (t.vol_s <= 0.0 || t.vol_c <= 0.0) b = 0.0;
          break;
        case CutKind::NCutAlt:
          b = (t.vol_s > 0.0 && t.vol_c > 0.0) ? 1.0 / (1.0 / t.vol_s + 1.0 / t.vol_c)
                                               : 0.0;
          break;
        case CutKind::CCut: b = std::min(t.vol_s, t.vol_c); break;
      }
    }
    if (!(b > 0.0) || !std::isfinite(b))
      throw DegeneratePartition(name() + ": balancing term vanishes");
    return b;
  }

  double value(const CutTerms& t) const {
    if (!custom_ && kind_ == CutKind::NCutAlt) {
      balance(t);  // degeneracy check
      return t.crossing * (1.0 / t.vol_s + 1.0 / t.vol_c);
    }
    return t.crossing / balance(t);
  }

  /// Non-throwing variant: nullopt for degenerate partitions.
  std::optional<double> try_value(const CutTerms& t) const {
    try {
      return value(t);
    } catch (const DegeneratePartition&) {
      return std::nullopt;
    }
  }

 private:
  CutKind kind_ = CutKind::MCut;
  std::optional<BalanceFunctional> custom_;
};

inline double cut_value(const WeightedGraph& g, const Partition& s,
                        const CutObjective& objective) {
  return objective.value(cut_terms(g, s));
}

struct CutReport {
  std::string kind;
  double value = std::numeric_limits<double>::infinity();
  std::vector<Partition> minimizers;  // ascending canonical order
  double tolerance = 0.0;
  std::size_t candidates = 0;         // partitions evaluated
  std::size_t skipped_count = 0;      // partitions with a degenerate balance
  std::vector<Partition> skipped;     // first few skipped partitions

  bool is_minimizer(const Partition& s) const {
    return std::find(minimizers.begin(), minimizers.end(), s) != minimizers.end();
  }
};

struct ExactOptions {
  std::size_t cap = 25;       // maximal node count for enumeration
  double tolerance = 1e-12;   // relative minimizer tolerance
  unsigned workers = 1;
  std::size_t skipped_listed = 64;
};

inline bool within_tolerance(double v, double best, double tol) {
  return v <= best + tol * (1.0 + std::abs(best));
}

namespace detail {

struct ChunkResult {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::uint64_t, double>> candidates;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::vector<std::uint64_t> skipped_masks;
};

inline void enumerate_range(const WeightedGraph& g, const CutObjective& obj,
                            std::uint64_t lo, std::uint64_t hi, double tol,
                            std::size_t skipped_listed, ChunkResult& out) {
  const std::size_t m = g.size();
  const auto& edges = g.edges();
  const auto& deg = g.degrees();
  const double vol_v = g.vol_all();
  for (std::uint64_t code = lo; code < hi; ++code) {
    const std::uint64_t mask = 1 | (code << 1);
    CutTerms t;
    for (std::size_t i = 0; i < m; ++i)
      if ((mask >> i) & 1U) {
        t.vol_s += deg[i];
        ++t.size_s;
      }
    t.size_c = m - t.size_s;
    t.vol_c = vol_v - t.vol_s;
    // Recompute the complement volume directly when cancellation could bite.
    if (t.vol_c <= 1e-12 * vol_v) {
      t.vol_c = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        if (!((mask >> i) & 1U)) t.vol_c += deg[i];
    }
    for (const auto& e : edges)
      if (((mask >> e.i) ^ (mask >> e.j)) & 1U) t.crossing += e.w;
    auto v = obj.try_value(t);
    if (!v) {
      ++out.skipped;
      if (out.skipped_masks.size() < skipped_listed) out.skipped_masks.push_back(mask);
      continue;
    }
    ++out.evaluated;
    if (*v < out.best) {
      out.best = *v;
      std::erase_if(out.candidates, [&](const auto& c) {
        return !within_tolerance(c.second, out.best, tol);
      });
    }
    if (within_tolerance(*v, out.best, tol)) out.candidates.emplace_back(mask, *v);
  }
}

}  // namespace detail

/// Exact minimization over all 2^(m-1)-1 canonical partitions.
///
/// Partitions are enumerated with node 0 fixed in S. Partitions whose
/// balancing term vanishes are skipped and counted in the report.
inline CutReport min_cut_exact(const WeightedGraph& g, const CutObjective& objective,
                               const ExactOptions& opt = {}) {
  const std::size_t m = g.size();
  if (m < 2) throw InvalidArgument("graph needs at least two nodes");
  if (m > opt.cap || m > 63)
    throw InfeasibleSize("exact enumeration over " + std::to_string(m) +
                         " nodes exceeds the cap of " + std::to_string(opt.cap) +
                         "; use xist instead");
  if (!objective.is_builtin() || objective.kind() != CutKind::MCut) {
    // volumes are computed from degrees, so nothing further to check here
  }
  const std::uint64_t total = (std::uint64_t{1} << (m - 1)) - 1;
  const unsigned workers = std::max(1U, std::min<unsigned>(opt.workers, 64));
  std::vector<detail::ChunkResult> chunks(workers);
  if (workers == 1) {
    detail::enumerate_range(g, objective, 0, total, opt.tolerance, opt.skipped_listed,
                            chunks[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = total * w / workers;
      const std::uint64_t hi = total * (w + 1) / workers;
      pool.emplace_back([&, lo, hi, w] {
        detail::enumerate_range(g, objective, lo, hi, opt.tolerance,
                                opt.skipped_listed, chunks[w]);
      });
    }
    for (auto& th : pool) th.join();
  }

  CutReport rep;
  rep.kind = objective.name();
  rep.tolerance = opt.tolerance;
  for (const auto& c : chunks) {
    rep.value = std::min(rep.value, c.best);
    rep.candidates += c.evaluated;
    rep.skipped_count += c.skipped;
  }
  if (rep.candidates == 0)
    throw DegeneratePartition("every partition has a vanishing balancing term");
  for (const auto& c : chunks) {
    for (const auto& [mask, v] : c.candidates)
      if (within_tolerance(v, rep.value, opt.tolerance))
        rep.minimizers.push_back(Partition::from_mask(m, mask));
    for (auto mask : c.skipped_masks)
      if (rep.skipped.size() < opt.skipped_listed)
        rep.skipped.push_back(Partition::from_mask(m, mask));
  }
  std::sort(rep.minimizers.begin(), rep.minimizers.end());
  return rep;
}

// ---------------------------------------------------------------------------
// Multiway cuts

/// kXC_S = 1/2 * sum over blocks of XC(block, rest).
inline double multiway_cut_value(const WeightedGraph& g, const MultiPartition& parts,
                                 const CutObjective& objective) {
  if (parts.node_count() != g.size())
    throw InvalidArgument("multiway partition size does not match graph");
  if (parts.block_count() < 2) throw InvalidArgument("multiway cut needs k >= 2");
  double sum = 0.0;
  for (std::size_t b = 0; b < parts.block_count(); ++b)
    sum += cut_value(g, parts.block_partition(b), objective);
  return 0.5 * sum;
}

/// Stirling number of the second kind as a double (for size caps).
inline double stirling2(std::size_t m, std::size_t k) {
  if (k > m) return 0.0;
  std::vector<double> row(k + 1, 0.0);
  row[0] = 1.0;
  for (std::size_t n = 1; n <= m; ++n) {
    for (std::size_t j = std::min(n, k); j >= 1; --j)
      row[j] = static_cast<double>(j) * row[j] + row[j - 1];
    row[0] = 0.0;
  }
  return row[k];
}

struct MultiwayReport {
  std::string kind;
  std::size_t k = 0;
  double value = std::numeric_limits<double>::infinity();
  std::vector<MultiPartition> minimizers;
  double tolerance = 0.0;
  std::size_t candidates = 0;
  std::size_t skipped_count = 0;
};

struct MultiwayOptions {
  double cap = 2e6;  // maximal number of k-partitions, S(m, k)
  double tolerance = 1e-12;
};

/// Exact k-way minimum over all set partitions into exactly k blocks.
inline MultiwayReport multiway_min_exact(const WeightedGraph& g, std::size_t k,
                                         const CutObjective& objective,
                                         const MultiwayOptions& opt = {}) {
  const std::size_t m = g.size();
  if (k < 2) throw InvalidArgument("multiway cut needs k >= 2");
  if (k > m) throw InvalidArgument("more blocks than nodes");
  const double count = stirling2(m, k);
  if (count > opt.cap)
    throw InfeasibleSize("S(" + std::to_string(m) + "," + std::to_string(k) +
                         ") k-partitions exceed the enumeration cap");

  MultiwayReport rep;
  rep.kind = objective.name();
  rep.k = k;
  rep.tolerance = opt.tolerance;
  std::vector<std::pair<std::vector<std::size_t>, double>> cands;
  std::vector<std::size_t> labels(m, 0);
  std::vector<std::uint8_t> ind(m);

  auto evaluate = [&] {
    double sum = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      for (std::size_t i = 0; i < m; ++i) ind[i] = labels[i] == b;
      auto v = objective.try_value(cut_terms(g, ind));
      if (!v) {
        ++rep.skipped_count;
        return;
      }
      sum += *v;
    }
    const double val = 0.5 * sum;
    ++rep.candidates;
    if (val < rep.value) {
      rep.value = val;
      std::erase_if(cands, [&](const auto& c) {
        return !within_tolerance(c.second, rep.value, opt.tolerance);
      });
    }
    if (within_tolerance(val, rep.value, opt.tolerance)) cands.emplace_back(labels, val);
  };

  // Restricted growth strings with exactly k distinct labels.
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos,
                                                          std::size_t used) {
    if (pos == m) {
      if (used == k) evaluate();
      return;
    }
    if (m - pos < k - used) return;
    const std::size_t top = std::min(used + 1, k);
    for (std::size_t lab = 0; lab < top; ++lab) {
      labels[pos] = lab;
      rec(pos + 1, std::max(used, lab + 1));
    }
  };
  labels[0] = 0;
  rec(1, 1);
  if (rep.candidates == 0)
    throw DegeneratePartition("every k-partition has a vanishing balancing term");
  for (auto& [lab, v] : cands)
    if (within_tolerance(v, rep.value, opt.tolerance))
      rep.minimizers.emplace_back(MultiPartition(lab));
  std::sort(rep.minimizers.begin(), rep.minimizers.end());
  return rep;
}

}  // namespace gcut
