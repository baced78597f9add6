#pragma once

// The gcut command line tool. run() returns the process exit code:
// 0 success or accept, 1 reject, 2 usage or input error, 3 infeasible size.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gcut/gcut.hpp"
#include "gcut_io.hpp"

#ifndef GCUT_VERSION
#define GCUT_VERSION "0.0.0"
#endif

namespace gcut::cli {

using io::json;
using io::Table;

inline constexpr int kExitOk = 0;
inline constexpr int kExitReject = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  // inputs
  std::string grid;
  std::string graph_file;
  std::optional<double> eps;
  std::optional<double> lambda;
  double t = 1.0;
  std::string kind = "ncut";
  std::string counts;
  std::string points;
  std::optional<std::int64_t> n;
  std::optional<std::uint64_t> seed;
  // cut / xist / stcut
  std::string partition;
  std::size_t k = 2;
  std::size_t cap = 25;
  bool exact = false;
  bool vloc_all = false;
  bool compare = false;
  std::size_t s_node = 0, t_node = 1;
  // sampling
  std::size_t draws = 0;
  bool assume_unequal = false;
  std::size_t R = 1000;
  std::string statistic = "xc_min";
  std::size_t B = 100;
  std::string m_rule = "sqrt_n";
  std::int64_t m = 0;
  // stats
  std::string file_a, file_b, column_a, column_b;
  double alpha = 0.05;
  std::size_t quantiles = 99;
  std::string ref_grid;
  // reproduce
  std::string figure;
  std::string ns, ts, eps_list;
  // output
  std::string out;
  std::string format = "auto";
  std::size_t workers = 1;
};

struct Output {
  std::optional<Table> table;
  json doc = json::object();
  bool prefer_json = false;
  int code = kExitOk;
  std::vector<std::pair<std::string, std::string>> notes;
};

// ---------------------------------------------------------------------------
// Shared helpers

inline std::uint64_t require_seed(const Options& o, const std::string& why) {
  if (!o.seed) throw UsageError(why + " requires an explicit --seed");
  return *o.seed;
}

inline ProbabilityGrid grid_of(const Options& o) {
  if (o.grid.empty()) throw UsageError("--grid is required");
  return io::load_grid(o.grid, {o.eps, o.lambda});
}

inline CutObjective objective_of(const Options& o) {
  const auto k = parse_cut_kind(o.kind);
  if (!k) throw UsageError("unknown cut kind '" + o.kind + "' (mcut, rcut, ncut, ncut_alt, ccut)");
  return *k;
}

/// Empirical sample from --counts, or --n with --seed; nullopt for population.
inline std::optional<DiscretizedSample> sample_of(const Options& o, const ProbabilityGrid& grid) {
  if (!o.counts.empty()) {
    auto y = io::load_counts(o.counts);
    if (y.size() != grid.size()) throw InvalidArgument("counts do not match the grid size");
    return y;
  }
  if (o.n) {
    if (*o.n < 1) throw InvalidArgument("--n must be >= 1");
    auto rng = make_engine(require_seed(o, "sampling with --n"), 0);
    return sample_multinomial(grid.p(), *o.n, rng);
  }
  return std::nullopt;
}

struct GraphInput {
  WeightedGraph graph;
  std::vector<double> masses;
  std::optional<ProbabilityGrid> grid;
};

/// Graph from --graph, or from --grid with an optional sample.
inline GraphInput graph_of(const Options& o) {
  if (!o.graph_file.empty()) {
    auto g = io::graph_from_json(
        io::parse_json_text(io::read_file(o.graph_file), "'" + o.graph_file + "'"));
    std::vector<double> masses = g.has_masses() ? g.masses() : g.degrees();
    return {std::move(g), std::move(masses), std::nullopt};
  }
  auto grid = grid_of(o);
  auto y = sample_of(o, grid);
  if (y) {
    auto g = empirical_graph(*y, grid, o.t);
    return {std::move(g), y->frequencies(), grid};
  }
  auto g = population_graph(grid, o.t);
  return {std::move(g), grid.p(), grid};
}

inline ExactOptions exact_options(const Options& o) {
  ExactOptions e;
  e.cap = o.cap;
  e.workers = static_cast<unsigned>(std::max<std::size_t>(1, o.workers));
  return e;
}

inline std::vector<double> list_or(const std::string& s, std::vector<double> fallback) {
  return s.empty() ? fallback : io::parse_list(s);
}

inline std::string members_label(const Partition& p) { return p.to_string(); }

// ---------------------------------------------------------------------------
// Subcommands

inline Output cmd_discretize(const Options& o) {
  const auto grid = grid_of(o);
  DiscretizedSample y;
  if (!o.points.empty())
    y = discretize(io::load_points(o.points), grid);
  else if (auto s = sample_of(o, grid))
    y = *s;
  else
    throw UsageError("discretize needs --points FILE or --n with --seed");
  std::vector<std::string> cols = {"bin"};
  for (std::size_t a = 0; a < grid.dims(); ++a) cols.push_back("center_" + std::to_string(a));
  cols.insert(cols.end(), {"p", "count"});
  Table tab(cols);
  json bins = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> row = {std::to_string(i)};
    const auto c = grid.center(i);
    for (double v : c) row.push_back(io::fmt(v));
    row.push_back(io::fmt(grid.p()[i]));
    row.push_back(std::to_string(y.counts[i]));
    tab.add(row);
    bins.push_back({{"bin", i},
                    {"center", std::vector<double>(c.begin(), c.end())},
                    {"p", grid.p()[i]},
                    {"count", y.counts[i]}});
  }
  Output out;
  out.table = std::move(tab);
  out.doc = {{"shape", grid.shape()}, {"n", y.n}, {"bins", bins}};
  return out;
}

inline Output cmd_graph(const Options& o) {
  const auto in = graph_of(o);
  Output out;
  out.prefer_json = true;
  out.doc = io::graph_json(in.graph, in.grid ? &*in.grid : nullptr, o.t);
  Table tab({"i", "j", "w"});
  for (const auto& e : in.graph.edges())
    tab.add({std::to_string(e.i), std::to_string(e.j), io::fmt(e.w)});
  out.table = std::move(tab);
  return out;
}

inline Output cmd_cut(const Options& o) {
  const auto in = graph_of(o);
  const auto obj = objective_of(o);
  Output out;
  out.prefer_json = true;
  if (!o.partition.empty()) {
    const auto s = Partition::from_members(in.graph.size(), io::parse_nodes(o.partition));
    const auto terms = cut_terms(in.graph, s);
    const double v = obj.value(terms);
    out.doc = {{"kind", obj.name()},
               {"partition", io::partition_json(s)},
               {"value", v},
               {"crossing", terms.crossing},
               {"vol_s", terms.vol_s},
               {"vol_complement", terms.vol_c}};
    Table tab({"partition", "value"});
    tab.add({"\"" + members_label(s) + "\"", io::fmt(v)});
    out.table = std::move(tab);
    return out;
  }
  if (o.k > 2) {
    MultiwayOptions mo;
    const auto rep = multiway_min_exact(in.graph, o.k, obj, mo);
    out.doc = io::multiway_report_json(rep);
    Table tab({"labels", "value"});
    for (const auto& mp : rep.minimizers) tab.add({"\"" + mp.to_string() + "\"", io::fmt(rep.value)});
    out.table = std::move(tab);
    return out;
  }
  const auto rep = min_cut_exact(in.graph, obj, exact_options(o));
  out.doc = io::cut_report_json(rep);
  Table tab({"partition", "value"});
  for (const auto& s : rep.minimizers) tab.add({"\"" + members_label(s) + "\"", io::fmt(rep.value)});
  out.table = std::move(tab);
  return out;
}

inline Output cmd_stcut(const Options& o) {
  const auto in = graph_of(o);
  const auto r = st_mincut(in.graph, o.s_node, o.t_node);
  Output out;
  out.prefer_json = true;
  out.doc = io::st_cut_json(r);
  Table tab({"s", "t", "value", "source_side"});
  tab.add({std::to_string(r.s), std::to_string(r.t), io::fmt(r.value),
           "\"" + r.partition().to_string() + "\""});
  out.table = std::move(tab);
  return out;
}

inline Output cmd_xist(const Options& o) {
  const auto in = graph_of(o);
  const auto obj = objective_of(o);
  std::optional<std::vector<std::size_t>> vloc;
  if (o.vloc_all) {
    vloc.emplace(in.graph.size());
    for (std::size_t i = 0; i < in.graph.size(); ++i) (*vloc)[i] = i;
  }
  const auto r = xist(in.graph, in.masses, obj, vloc);
  Output out;
  out.prefer_json = true;
  out.doc = io::xist_json(r);
  if (o.compare) {
    const auto c = xist_vs_exact(in.graph, in.masses, obj, vloc, exact_options(o));
    out.doc["exact"] = io::cut_report_json(c.exact);
    out.doc["gap"] = std::isfinite(c.gap) ? json(c.gap) : json(nullptr);
    out.doc["exact_minimizer_is_st_mincut"] = c.exact_minimizer_is_st_mincut;
    out.doc["xist_found_minimizer"] = c.xist_found_minimizer;
  }
  Table tab({"s", "t", "st_value", "partition", "value"});
  for (const auto& st : r.steps)
    tab.add({std::to_string(st.s), std::to_string(st.t), io::fmt(st.st_value),
             "\"" + st.partition.to_string() + "\"", st.value ? io::fmt(*st.value) : "nan"});
  out.table = std::move(tab);
  return out;
}

inline Output cmd_limit_sample(const Options& o) {
  const auto seed = require_seed(o, "limit-sample");
  const auto grid = grid_of(o);
  const auto g = population_graph(grid, o.t);
  const auto obj = objective_of(o);
  LimitSamplerOptions lo;
  lo.assume_unequal_volumes = o.assume_unequal;
  auto sampler = make_limit_sampler(g, obj, lo, exact_options(o));
  const auto draws = sampler.sample(o.draws, seed);
  Table tab({"value"});
  for (double v : draws) tab.add({io::fmt(v)});
  Output out;
  out.table = std::move(tab);
  out.notes = {{"kind", obj.name()},
               {"mode", sampler.mode() == LimitMode::ccut_mixture ? "ccut_mixture" : "gaussian_min"},
               {"minimizers", std::to_string(sampler.partition_count())}};
  return out;
}

inline Statistic statistic_of(const Options& o, std::size_t m) {
  const auto obj = objective_of(o);
  if (o.statistic == "xc_min") return Statistic::xc_min(obj);
  if (o.statistic == "xc_fixed") {
    if (o.partition.empty()) throw UsageError("xc_fixed needs --partition");
    return Statistic::xc_fixed(obj, Partition::from_members(m, io::parse_nodes(o.partition)));
  }
  if (o.statistic == "xist") return Statistic::xist(obj);
  if (o.statistic == "vloc_count") return Statistic::vloc_count();
  if (o.statistic == "stmincut_attainer") return Statistic::stmincut_attainer(o.s_node, o.t_node);
  throw UsageError("unknown statistic '" + o.statistic +
                   "' (xc_min, xc_fixed, xist, vloc_count, stmincut_attainer)");
}

inline Table replicate_table(const std::vector<double>& values,
                             const std::vector<std::uint64_t>& seeds) {
  Table tab({"replicate", "seed", "value"});
  for (std::size_t r = 0; r < values.size(); ++r)
    tab.add({std::to_string(r), std::to_string(seeds[r]), io::fmt(values[r])});
  return tab;
}

inline Output cmd_simulate(const Options& o) {
  const auto seed = require_seed(o, "simulate");
  if (!o.n) throw UsageError("simulate needs --n");
  const auto grid = grid_of(o);
  const auto stat = statistic_of(o, grid.size());
  const auto e = mc_statistic(grid, o.t, stat, *o.n, o.R, seed, o.workers, exact_options(o));
  Output out;
  out.table = replicate_table(e.values, e.seeds);
  out.notes = {{"statistic", e.statistic}, {"n", std::to_string(e.n)}, {"R", std::to_string(e.R)}};
  return out;
}

inline Output cmd_bootstrap(const Options& o) {
  const auto seed = require_seed(o, "bootstrap");
  const auto grid = grid_of(o);
  const auto y = sample_of(o, grid);
  if (!y) throw UsageError("bootstrap needs --counts or --n");
  BootstrapConfig cfg;
  cfg.rule = parse_m_rule(o.m_rule);
  cfg.fixed_m = o.m;
  cfg.B = o.B;
  cfg.seed = stream_seed(seed, 1);
  const auto draws = bootstrap_distribution(*y, neighborhood(grid, o.t), objective_of(o), cfg,
                                            o.workers, exact_options(o));
  Output out;
  out.table = replicate_table(draws, replicate_seeds(cfg.seed, cfg.B));
  out.notes = {{"M", std::to_string(cfg.resolve_m(y->n))}, {"n", std::to_string(y->n)},
               {"m_rule", to_string(cfg.rule)}};
  return out;
}

inline Output cmd_ks(const Options& o) {
  if (o.file_a.empty() || o.file_b.empty()) throw UsageError("ks needs --a and --b");
  const auto a = io::read_column(o.file_a, o.column_a);
  const auto b = io::read_column(o.file_b, o.column_b);
  const auto r = ks_test(a, b, o.alpha);
  const double two = ks_two_sample_critical(o.alpha, a.size(), b.size());
  Output out;
  out.prefer_json = true;
  out.doc = {{"D", r.D},
             {"n_eff", r.n_eff},
             {"alpha", r.alpha},
             {"critical", r.critical},
             {"two_sample_critical", two},
             {"reject", r.reject}};
  Table tab({"D", "n_eff", "alpha", "critical", "two_sample_critical", "reject"});
  tab.add({io::fmt(r.D), std::to_string(r.n_eff), io::fmt(r.alpha), io::fmt(r.critical),
           io::fmt(two), r.reject ? "1" : "0"});
  out.table = std::move(tab);
  out.notes = {{"n_eff", "size of --a"}};
  out.code = r.reject ? kExitReject : kExitOk;
  return out;
}

inline Output cmd_qq(const Options& o) {
  if (o.file_a.empty() || o.file_b.empty()) throw UsageError("qq needs --a and --b");
  const auto a = io::read_column(o.file_a, o.column_a);
  const auto b = io::read_column(o.file_b, o.column_b);
  Table tab({"level", "sample", "reference"});
  for (const auto& p : qq_data(a, b, o.quantiles))
    tab.add({io::fmt(p.level), io::fmt(p.sample), io::fmt(p.reference)});
  Output out;
  out.table = std::move(tab);
  return out;
}

inline json cluster_json(const ClusterTestReport& r) {
  return {{"statistic", r.statistic},   {"reference_value", r.reference_value},
          {"lo", r.lo},                 {"hi", r.hi},
          {"q_lo", r.q_lo},             {"q_hi", r.q_hi},
          {"alpha", r.alpha},           {"n", r.n},
          {"degenerate_reference", r.degenerate_reference},
          {"reject", r.reject}};
}

inline Output cmd_cluster_test(const Options& o) {
  const auto seed = require_seed(o, "cluster-test");
  const auto grid = grid_of(o);
  const auto y = sample_of(o, grid);
  if (!y) throw UsageError("cluster-test needs --counts or --n");
  const auto ref_grid = o.ref_grid.empty() ? grid.with_p(uniform_grid(grid.shape()).p())
                                           : io::load_grid(o.ref_grid, {o.eps, o.lambda});
  if (ref_grid.size() != grid.size()) throw InvalidArgument("reference grid size differs");
  const auto ref = clustering_reference(ref_grid, o.t, objective_of(o), o.draws ? o.draws : 50000,
                                        stream_seed(seed, 1), exact_options(o));
  const auto r = clustering_test(*y, ref, o.alpha, exact_options(o));
  Output out;
  out.prefer_json = true;
  out.doc = cluster_json(r);
  Table tab({"statistic", "lo", "hi", "reject"});
  tab.add({io::fmt(r.statistic), io::fmt(r.lo), io::fmt(r.hi), r.reject ? "1" : "0"});
  out.table = std::move(tab);
  out.code = r.reject ? kExitReject : kExitOk;
  return out;
}

// ---------------------------------------------------------------------------
// reproduce

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

inline std::vector<double> finite_only(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v)
    if (std::isfinite(x)) out.push_back(x);
  return out;
}

inline Output reproduce_ex1(const Options& o, std::uint64_t seed) {
  const auto grid = uniform_grid({2, 2});
  const std::int64_t n = o.n.value_or(10000);
  const auto att = mc_statistic(grid, 1.0, Statistic::stmincut_attainer(0, 1), n, o.R,
                                stream_seed(seed, 0), o.workers);
  const auto vl = mc_statistic(grid, 1.0, Statistic::vloc_count(), n, o.R,
                               stream_seed(seed, 1), o.workers);
  auto freq = [](const std::vector<double>& v, double x) {
    return static_cast<double>(std::count(v.begin(), v.end(), x)) / static_cast<double>(v.size());
  };
  Table tab({"quantity", "estimate", "limit"});
  tab.add({"attainer_{0;2}", io::fmt(freq(att.values, 5.0)), io::fmt(0.25)});
  tab.add({"attainer_{0}", io::fmt(freq(att.values, 1.0)), io::fmt(0.375)});
  tab.add({"attainer_{0;2;3}", io::fmt(freq(att.values, 13.0)), io::fmt(0.375)});
  tab.add({"attainer_tie", io::fmt(freq(att.values, -1.0)), io::fmt(0.0)});
  tab.add({"vloc_count_1", io::fmt(freq(vl.values, 1.0)), io::fmt(2.0 / 3.0)});
  Output out;
  out.table = std::move(tab);
  out.notes = {{"n", std::to_string(n)}, {"R", std::to_string(o.R)}};
  return out;
}

inline Output reproduce_fig5(const Options& o, std::uint64_t seed) {
  const auto grid = bimodal3x3(o.eps.value_or(0.4), o.lambda);
  const auto g = population_graph(grid, o.t);
  const std::int64_t n = o.n.value_or(10000);
  const std::size_t draws = o.draws ? o.draws : 50000;
  Table tab({"kind", "level", "sample", "reference"});
  std::uint64_t k = 0;
  for (auto kind : {CutKind::RCut, CutKind::NCut, CutKind::CCut}) {
    const auto e = mc_statistic(grid, o.t, Statistic::xc_min(kind), n, o.R,
                                stream_seed(seed, 2 * k), o.workers);
    auto sampler = make_limit_sampler(g, kind);
    const auto ref = sampler.sample(draws, stream_seed(seed, 2 * k + 1));
    for (const auto& p : qq_data(e.values, ref, o.quantiles))
      tab.add({std::string(to_string(kind)), io::fmt(p.level), io::fmt(p.sample), io::fmt(p.reference)});
    ++k;
  }
  Output out;
  out.table = std::move(tab);
  out.notes = {{"n", std::to_string(n)}, {"R", std::to_string(o.R)}};
  return out;
}

inline Output reproduce_fig7(const Options& o, std::uint64_t seed) {
  const auto grid = bimodal3x3(o.eps.value_or(0.4), o.lambda);
  const auto ns = list_or(o.ns, {500, 2000});
  const auto ts = list_or(o.ts, {1.0});
  const std::size_t draws = o.draws ? o.draws : 50000;
  Table tab({"kind", "t", "n", "D", "critical"});
  std::uint64_t k = 0;
  for (auto kind : {CutKind::RCut, CutKind::NCut, CutKind::CCut})
    for (double t : ts) {
      const auto g = population_graph(grid, t);
      auto sampler = make_limit_sampler(g, kind);
      const auto ref = sampler.sample(draws, stream_seed(seed, k++));
      for (double nd : ns) {
        const auto n = static_cast<std::int64_t>(nd);
        const auto e = mc_statistic(grid, t, Statistic::xc_min(kind), n, o.R,
                                    stream_seed(seed, k++), o.workers);
        const auto r = ks_test(e.values, ref, o.alpha);
        tab.add({std::string(to_string(kind)), io::fmt(t), std::to_string(n), io::fmt(r.D), io::fmt(r.critical)});
      }
    }
  Output out;
  out.table = std::move(tab);
  out.notes = {{"R", std::to_string(o.R)}, {"critical", "kolmogorov quantile / sqrt(R)"}};
  return out;
}

inline Output reproduce_fig9(const Options& o, std::uint64_t seed) {
  const auto grid = bimodal3x3(o.eps.value_or(0.4), o.lambda);
  const auto adj = neighborhood(grid, o.t);
  const auto g = population_graph(grid, o.t);
  const auto ns = list_or(o.ns, {1000, 10000});
  const std::size_t draws = o.draws ? o.draws : 50000;
  auto sampler = make_limit_sampler(g, CutKind::CCut);
  const auto ref = sampler.sample(draws, stream_seed(seed, 0));
  Table tab({"m_rule", "n", "M", "median_D"});
  std::uint64_t k = 1;
  for (auto rule : {MRule::sqrt_n, MRule::equal_n})
    for (double nd : ns) {
      const auto n = static_cast<std::int64_t>(nd);
      BootstrapConfig cfg;
      cfg.rule = rule;
      cfg.B = o.B;
      const std::uint64_t base = stream_seed(seed, k++);
      const auto d = run_replicates(
          o.R, base,
          [&](std::size_t r, Engine& rng) {
            const auto y = sample_multinomial(grid.p(), n, rng);
            BootstrapConfig c = cfg;
            c.seed = stream_seed(base ^ 0xB5ULL, r);
            return ks_distance(bootstrap_distribution(y, adj, CutKind::CCut, c), ref);
          },
          o.workers);
      tab.add({to_string(rule), std::to_string(n), std::to_string(cfg.resolve_m(n)),
               io::fmt(median_of(d))});
    }
  Output out;
  out.table = std::move(tab);
  out.notes = {{"B", std::to_string(o.B)}, {"outer_reps", std::to_string(o.R)}};
  return out;
}

inline Output reproduce_fig11(const Options& o, std::uint64_t seed) {
  const auto eps = list_or(o.eps_list, {1.0, 0.8, 0.6, 0.4, 0.2});
  const std::int64_t n = o.n.value_or(10000);
  const auto obj = objective_of(o);
  const std::size_t draws = o.draws ? o.draws : 50000;
  const auto ref = clustering_reference(uniform_grid({4, 4}), o.t, obj, draws, stream_seed(seed, 0));
  Table tab({"eps", "rejection_rate"});
  std::uint64_t k = 1;
  for (double e : eps) {
    const auto grid = band4x4(e);
    const auto rej = run_replicates(
        o.R, stream_seed(seed, k++),
        [&](std::size_t, Engine& rng) {
          return clustering_test(sample_multinomial(grid.p(), n, rng), ref, o.alpha).reject ? 1.0
                                                                                            : 0.0;
        },
        o.workers);
    double rate = 0;
    for (double v : rej) rate += v;
    tab.add({io::fmt(e), io::fmt(rate / static_cast<double>(rej.size()))});
  }
  Output out;
  out.table = std::move(tab);
  out.notes = {{"n", std::to_string(n)}, {"runs", std::to_string(o.R)}, {"kind", obj.name()}};
  return out;
}

inline Output cmd_reproduce(const Options& o) {
  const auto seed = require_seed(o, "reproduce");
  if (o.figure == "ex1-probabilities") return reproduce_ex1(o, seed);
  if (o.figure == "fig5-qq") return reproduce_fig5(o, seed);
  if (o.figure == "fig7-ks") return reproduce_fig7(o, seed);
  if (o.figure == "fig9-bootstrap") return reproduce_fig9(o, seed);
  if (o.figure == "fig11-test") return reproduce_fig11(o, seed);
  throw UsageError("unknown figure '" + o.figure +
                   "' (fig5-qq, fig7-ks, fig9-bootstrap, fig11-test, ex1-probabilities)");
}

// ---------------------------------------------------------------------------
// Driver

/// Hash of the arguments that determine the output (output path and worker
/// count excluded).
inline std::string config_hash(const std::vector<std::string>& args) {
  std::string canon;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--out" || a == "-o" || a == "--workers") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0 || a.rfind("--workers=", 0) == 0) continue;
    canon += a;
    canon += '\x1f';
  }
  return io::hex64(io::fnv1a(canon));
}

inline void add_grid_options(CLI::App* c, Options& o) {
  c->add_option("--grid", o.grid, "grid: inline JSON, JSON file, example1, uniformRxC, bimodal3x3, band4x4");
  c->add_option("--eps", o.eps, "eps for bimodal3x3/band4x4 shorthands");
  c->add_option("--lambda", o.lambda, "top-row weight for bimodal3x3 (default: equal volumes)");
  c->add_option("--t", o.t, "neighborhood radius")->check(CLI::PositiveNumber);
}

inline void add_sample_options(CLI::App* c, Options& o) {
  c->add_option("--counts", o.counts, "bin counts: comma list or file");
  c->add_option("--n", o.n, "sample size for a multinomial draw");
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  o.workers = default_workers();
  CLI::App app{"Balanced graph cuts on discretized samples", "gcut"};
  app.set_version_flag("--version", std::string(GCUT_VERSION));
  app.require_subcommand(1);

  auto common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "master seed");
    c->add_option("--out,-o", o.out, "output file (default stdout)");
    c->add_option("--format", o.format, "csv, json or auto")
        ->check(CLI::IsMember({"csv", "json", "auto"}));
    c->add_option("--workers", o.workers, "worker threads (default GCUT_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
  };
  auto kind = [&](CLI::App* c) {
    c->add_option("--kind", o.kind, "mcut, rcut, ncut, ncut_alt, ccut");
  };

  auto* discretize = app.add_subcommand("discretize", "bin counts of points or of a multinomial draw");
  add_grid_options(discretize, o);
  discretize->add_option("--points", o.points, "CSV file with one point per line");
  discretize->add_option("--n", o.n, "multinomial sample size");
  common(discretize);

  auto* graph = app.add_subcommand("graph", "dump the weighted neighborhood graph");
  add_grid_options(graph, o);
  add_sample_options(graph, o);
  common(graph);

  auto* cut = app.add_subcommand("cut", "exact balanced cut by enumeration");
  add_grid_options(cut, o);
  add_sample_options(cut, o);
  kind(cut);
  cut->add_option("--graph", o.graph_file, "graph dump JSON instead of --grid");
  cut->add_flag("--exact", o.exact, "exhaustive enumeration (the only method)");
  cut->add_option("--partition", o.partition, "evaluate this side S (comma list of nodes)");
  cut->add_option("--k", o.k, "number of blocks")->check(CLI::Range(2, 64));
  cut->add_option("--cap", o.cap, "largest node count for enumeration");
  common(cut);

  auto* stcut = app.add_subcommand("stcut", "minimum st-cut between two nodes");
  add_grid_options(stcut, o);
  add_sample_options(stcut, o);
  stcut->add_option("--graph", o.graph_file, "graph dump JSON instead of --grid");
  stcut->add_option("source", o.s_node, "source node")->required();
  stcut->add_option("sink", o.t_node, "sink node")->required();
  common(stcut);

  auto* xistc = app.add_subcommand("xist", "Xist over local maxima");
  add_grid_options(xistc, o);
  add_sample_options(xistc, o);
  kind(xistc);
  xistc->add_option("--graph", o.graph_file, "graph dump JSON instead of --grid");
  xistc->add_flag("--vloc-all", o.vloc_all, "use every node instead of the local maxima");
  xistc->add_flag("--compare", o.compare, "also report the exact minimum");
  xistc->add_option("--cap", o.cap, "largest node count for enumeration");
  common(xistc);

  auto* limit = app.add_subcommand("limit-sample", "draws from the limit law of the cut statistic");
  add_grid_options(limit, o);
  kind(limit);
  limit->add_option("--draws", o.draws, "number of draws")->required();
  limit->add_flag("--assume-unequal", o.assume_unequal,
                  "CCut: treat tied volumes as unequal (Gaussian law)");
  common(limit);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo replicates of a statistic");
  add_grid_options(simulate, o);
  kind(simulate);
  simulate->add_option("--n", o.n, "sample size")->required();
  simulate->add_option("--R", o.R, "replicates")->check(CLI::PositiveNumber);
  simulate->add_option("--statistic", o.statistic,
                       "xc_min, xc_fixed, xist, vloc_count, stmincut_attainer");
  simulate->add_option("--partition", o.partition, "side S for xc_fixed");
  simulate->add_option("--s", o.s_node, "source node for stmincut_attainer");
  simulate->add_option("--sink", o.t_node, "sink node for stmincut_attainer");
  common(simulate);

  auto* boot = app.add_subcommand("bootstrap", "M-out-of-n bootstrap of the minimal cut value");
  add_grid_options(boot, o);
  add_sample_options(boot, o);
  kind(boot);
  boot->add_option("--B", o.B, "bootstrap draws")->check(CLI::PositiveNumber);
  boot->add_option("--m-rule", o.m_rule, "sqrt_n, fixed or equal_n");
  boot->add_option("--m", o.m, "M for --m-rule fixed");
  common(boot);

  auto* ks = app.add_subcommand("ks", "Kolmogorov-Smirnov distance between two samples");
  ks->add_option("--a", o.file_a, "sample CSV")->required();
  ks->add_option("--b", o.file_b, "reference CSV")->required();
  ks->add_option("--column-a", o.column_a, "column of --a (default value or last)");
  ks->add_option("--column-b", o.column_b, "column of --b (default value or last)");
  ks->add_option("--alpha", o.alpha, "level")->check(CLI::Range(0.0, 1.0));
  common(ks);

  auto* qq = app.add_subcommand("qq", "paired quantiles of two samples");
  qq->add_option("--a", o.file_a, "sample CSV")->required();
  qq->add_option("--b", o.file_b, "reference CSV")->required();
  qq->add_option("--column-a", o.column_a, "column of --a");
  qq->add_option("--column-b", o.column_b, "column of --b");
  qq->add_option("--quantiles", o.quantiles, "number of levels")->check(CLI::Range(2, 100000));
  common(qq);

  auto* cluster = app.add_subcommand("cluster-test", "asymptotic test against a uniform reference");
  add_grid_options(cluster, o);
  add_sample_options(cluster, o);
  kind(cluster);
  cluster->add_option("--alpha", o.alpha, "level")->check(CLI::Range(0.0, 1.0));
  cluster->add_option("--draws", o.draws, "reference limit draws (default 50000)");
  cluster->add_option("--ref-grid", o.ref_grid, "reference grid (default uniform, same shape)");
  common(cluster);

  auto* repro = app.add_subcommand("reproduce", "scaled-down simulation studies");
  repro->add_option("figure", o.figure,
                    "fig5-qq, fig7-ks, fig9-bootstrap, fig11-test, ex1-probabilities")
      ->required();
  repro->add_option("--n", o.n, "sample size");
  repro->add_option("--R", o.R, "replicates (runs or outer repetitions)")
      ->check(CLI::PositiveNumber);
  repro->add_option("--B", o.B, "bootstrap draws")->check(CLI::PositiveNumber);
  repro->add_option("--draws", o.draws, "limit draws");
  repro->add_option("--ns", o.ns, "comma list of sample sizes");
  repro->add_option("--ts", o.ts, "comma list of radii");
  repro->add_option("--eps", o.eps, "bimodal eps");
  repro->add_option("--lambda", o.lambda, "bimodal top-row weight");
  repro->add_option("--eps-list", o.eps_list, "comma list of band eps values");
  repro->add_option("--t", o.t, "neighborhood radius")->check(CLI::PositiveNumber);
  repro->add_option("--alpha", o.alpha, "level")->check(CLI::Range(0.0, 1.0));
  repro->add_option("--quantiles", o.quantiles, "QQ levels")->check(CLI::Range(2, 100000));
  kind(repro);
  common(repro);

  std::vector<const char*> argv = {"gcut"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Output result;
  std::string command;
  try {
    if (discretize->parsed()) command = "discretize", result = cmd_discretize(o);
    else if (graph->parsed()) command = "graph", result = cmd_graph(o);
    else if (cut->parsed()) command = "cut", result = cmd_cut(o);
    else if (stcut->parsed()) command = "stcut", result = cmd_stcut(o);
    else if (xistc->parsed()) command = "xist", result = cmd_xist(o);
    else if (limit->parsed()) command = "limit-sample", result = cmd_limit_sample(o);
    else if (simulate->parsed()) command = "simulate", result = cmd_simulate(o);
    else if (boot->parsed()) command = "bootstrap", result = cmd_bootstrap(o);
    else if (ks->parsed()) command = "ks", result = cmd_ks(o);
    else if (qq->parsed()) command = "qq", result = cmd_qq(o);
    else if (cluster->parsed()) command = "cluster-test", result = cmd_cluster_test(o);
    else if (repro->parsed()) command = "reproduce " + o.figure, result = cmd_reproduce(o);

    io::Meta meta{command, config_hash(args), o.seed, GCUT_VERSION, result.notes};
    const bool as_json = o.format == "json" || (o.format == "auto" && result.prefer_json);
    std::string text;
    if (as_json) {
      json body = result.doc;
      if (result.table && (body.empty() || !result.prefer_json)) body["rows"] = result.table->to_json();
      text = io::json_document(std::move(body), meta);
    } else {
      text = result.table->csv(meta);
    }
    if (o.out.empty())
      out << text;
    else
      io::write_atomic(o.out, text);
    return result.code;
  } catch (const InfeasibleSize& e) {
    err << "gcut: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "gcut: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace gcut::cli
