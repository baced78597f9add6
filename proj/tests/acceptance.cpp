// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gcut/gcut.hpp"

using namespace gcut;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

double fraction_equal(const std::vector<double>& v, double x) {
  return static_cast<double>(std::count(v.begin(), v.end(), x)) / static_cast<double>(v.size());
}

WeightedGraph random_graph(std::mt19937_64& rng, std::size_t m) {
  Adjacency adj(m);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 1; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    adj.connect(i, parent(rng));
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (u(rng) < 0.35) adj.connect(i, j);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(m);
  for (auto& x : w) x = e(rng) + 0.05;
  return WeightedGraph::from_masses(adj, normalize_weights(w));
}

std::uint64_t random_mask(std::mt19937_64& rng, std::size_t m) {
  std::uniform_int_distribution<std::uint64_t> d(0, (std::uint64_t{1} << (m - 1)) - 2);
  return 1 | (d(rng) << 1);
}

// 1: exact values on the uniform 4-cycle.
Outcome example1_exactness() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto g = population_graph(uniform_grid({2, 2}), 1.0);
  const auto nc = min_cut_exact(g, CutKind::NCut);
  const std::vector<Partition> expected = {Partition::from_members(4, {0, 1}),
                                           Partition::from_members(4, {0, 2})};
  const auto s12 = Partition::from_members(4, {0, 1});
  const double mc = cut_value(g, s12, CutKind::MCut);
  const double alt = min_cut_exact(g, CutKind::NCutAlt).value;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(std::abs(nc.value - 2.0) <= 1e-12, "NCut = 2");
  o.require(nc.minimizers == expected, "NCut minimizers {{0,1},{0,2}}");
  o.require(std::abs(mc - 0.125) <= 1e-12, "MCut({0,1}) = 1/8");
  o.require(std::abs(alt - 1.0) <= 1e-12 && std::abs(alt - g.vol_all() * nc.value) <= 1e-12,
            "NCutAlt = vol(V) NCut = 1");
  o.require(secs < 1.0, "runtime < 1 s");
  o.detail << "NCut=" << nc.value << " minimizers=" << nc.minimizers.size() << " MCut=" << mc
           << " NCutAlt=" << alt << " time=" << secs << "s";
  return o;
}

// 2: degenerate first-order limit on the uniform 4-cycle.
Outcome degenerate_limit() {
  Outcome o;
  const auto g = population_graph(uniform_grid({2, 2}), 1.0);
  const auto s12 = Partition::from_members(4, {0, 1});
  const double mc = covariance(g, CutKind::MCut, {s12})(0, 0);
  const auto rep = min_cut_exact(g, CutKind::NCut);
  const auto nc = covariance(g, CutKind::NCut, rep.minimizers);
  double worst_cov = 0;
  for (std::size_t a = 0; a < nc.size(); ++a)
    for (std::size_t b = 0; b < nc.size(); ++b) worst_cov = std::max(worst_cov, std::abs(nc(a, b)));
  LimitSampler sampler(g, CutKind::NCut, rep.minimizers);
  double worst = 0;
  for (double v : sampler.sample(100000, 2)) worst = std::max(worst, std::abs(v));
  o.require(std::abs(mc) <= 1e-12, "Sigma^MC = 0");
  o.require(worst_cov <= 1e-12, "NCut covariance = 0");
  o.require(worst <= 1e-10, "draws 0 to 1e-10");
  o.detail << "SigmaMC=" << mc << " max|SigmaNC|=" << worst_cov << " max|draw|=" << worst;
  return o;
}

// 3: attainment probabilities and P(|Vloc| = 1) on the uniform 4-cycle.
Outcome attainment_probabilities() {
  Outcome o;
  const auto grid = uniform_grid({2, 2});
  const auto att = mc_statistic(grid, 1.0, Statistic::stmincut_attainer(0, 1), 10000, 20000, 31);
  const auto vl = mc_statistic(grid, 1.0, Statistic::vloc_count(), 10000, 20000, 32);
  const double f13 = fraction_equal(att.values, 5.0);   // {0,2}
  const double f1 = fraction_equal(att.values, 1.0);    // {0}
  const double f2 = fraction_equal(att.values, 13.0);   // {0,2,3}
  const double v1 = fraction_equal(vl.values, 1.0);
  o.require(std::abs(f13 - 0.25) <= 0.015, "S13 -> 1/4");
  o.require(std::abs(f1 - 0.375) <= 0.015, "S1 -> 3/8");
  o.require(std::abs(f2 - 0.375) <= 0.015, "S2 -> 3/8");
  o.require(std::abs(v1 - 2.0 / 3.0) <= 0.015, "P(|Vloc|=1) -> 2/3");
  o.detail << "S13=" << f13 << " S1=" << f1 << " S2=" << f2 << " P(|Vloc|=1)=" << v1;
  return o;
}

// 4: mean number of local maxima on uniform grids.
Outcome local_maxima_counts() {
  Outcome o;
  const std::vector<std::pair<std::size_t, double>> targets = {{2, 4.0 / 3.0}, {5, 8.6}, {10, 22.5}};
  for (const auto& [l, target] : targets) {
    const auto e = mc_statistic(uniform_grid({l, l}), 1.0, Statistic::vloc_count(), 10000, 5000,
                                40 + l);
    const double m = mean_of(e.values);
    o.detail << "l=" << l << ": mean=" << m << " target=" << target << "; ";
    o.require(std::abs(m / target - 1.0) <= 0.05, "l=" + std::to_string(l) + " within 5%");
  }
  return o;
}

// 5: closed-form variances against Monte Carlo.
Outcome covariance_validation() {
  Outcome o;
  struct Case {
    CutKind kind;
    ProbabilityGrid grid;
  };
  const std::vector<Case> cases = {{CutKind::MCut, bimodal3x3(0.4)},
                                   {CutKind::RCut, bimodal3x3(0.4)},
                                   {CutKind::NCut, bimodal3x3(0.4)},
                                   {CutKind::CCut, bimodal3x3(0.4, 1.2)}};
  std::uint64_t seed = 50;
  for (const auto& c : cases) {
    const auto g = population_graph(c.grid, 1.0);
    const auto rep = min_cut_exact(g, c.kind);
    const auto& s = rep.minimizers.front();
    const double sigma2 = c.kind == CutKind::CCut ? covariance_ccut_unequal(g, {s})(0, 0)
                                                  : covariance(g, c.kind, {s})(0, 0);
    const auto e = mc_statistic(c.grid, 1.0, Statistic::xc_fixed(c.kind, s), 100000, 10000, seed++);
    const double ratio = var_of(e.values) / sigma2;
    o.require(std::abs(ratio - 1.0) <= 0.05, std::string(to_string(c.kind)) + " within 5%");
    o.detail << to_string(c.kind) << ": mc/closed=" << ratio << "; ";
  }
  return o;
}

// 6: CCut mixture versus the Gaussian law under a false unequal-volume assumption.
Outcome ccut_dichotomy() {
  Outcome o;
  const auto grid = bimodal3x3(0.4, equal_volume_lambda(0.4));
  const auto g = population_graph(grid, 1.0);
  const auto rep = min_cut_exact(g, CutKind::CCut);
  LimitSampler mixture(g, CutKind::CCut, rep.minimizers);
  LimitSamplerOptions wrong_opt;
  wrong_opt.assume_unequal_volumes = true;
  LimitSampler wrong(g, CutKind::CCut, rep.minimizers, wrong_opt);
  const auto a = mixture.sample(100000, 61);
  const auto b = wrong.sample(100000, 62);
  const double d = ks_distance(a, b);
  const double crit = ks_two_sample_critical(0.05, a.size(), b.size());
  const auto emp = mc_statistic(grid, 1.0, Statistic::xc_min(CutKind::CCut), 10000, 5000, 63);
  const double d_mix = ks_distance(emp.values, a);
  const double d_gauss = ks_distance(emp.values, b);
  o.require(mixture.mode() == LimitMode::ccut_mixture, "mixture mode at equal volumes");
  o.require(d > 3 * crit, "KS(mixture, Gaussian) > 3 x critical");
  o.require(d_mix < d_gauss, "empirical closer to mixture");
  o.detail << "KS(mix,gauss)=" << d << " 3xcrit=" << 3 * crit << " KS(emp,mix)=" << d_mix
           << " KS(emp,gauss)=" << d_gauss;
  return o;
}

// 7: KS distance to the limit law at n = 2000.
Outcome ks_convergence() {
  Outcome o;
  const auto grid = bimodal3x3(0.4);
  const auto g = population_graph(grid, 1.0);
  const double crit = kolmogorov_quantile(0.05) / std::sqrt(2000.0);
  std::uint64_t seed = 70;
  for (auto kind : {CutKind::RCut, CutKind::NCut, CutKind::CCut}) {
    auto sampler = make_limit_sampler(g, kind);
    const auto ref = sampler.sample(50000, seed++);
    std::vector<double> d;
    const std::uint64_t master = seed++;
    for (std::size_t rep = 0; rep < 100; ++rep) {
      const auto e = mc_statistic(grid, 1.0, Statistic::xc_min(kind), 2000, 2000,
                                  stream_seed(master, rep), default_workers());
      d.push_back(ks_distance(e.values, ref));
    }
    const double med = median_of(d);
    o.require(med < crit, std::string(to_string(kind)) + " median below critical");
    o.detail << to_string(kind) << ": median D=" << med << "; ";
  }
  o.detail << "critical=" << crit;
  return o;
}

// 8: st-MinCut against brute force and Xist against the exact minimum.
Outcome stmincut_oracle() {
  Outcome o;
  std::mt19937_64 rng(80);
  std::size_t pairs = 0, bad_flow = 0, bad_xist = 0, bad_attain = 0;
  const std::vector<CutKind> kinds = {CutKind::MCut, CutKind::RCut, CutKind::NCut, CutKind::CCut};
  for (int k = 0; k < 100; ++k) {
    std::uniform_int_distribution<std::size_t> size(2, 8);
    const auto g = random_graph(rng, size(rng));
    const std::size_t m = g.size();
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t t = 0; t < m; ++t) {
        if (s == t) continue;
        ++pairs;
        double brute = std::numeric_limits<double>::infinity();
        std::vector<std::uint8_t> ind(m);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
          if (!((mask >> s) & 1U) || ((mask >> t) & 1U)) continue;
          for (std::size_t i = 0; i < m; ++i) ind[i] = (mask >> i) & 1U;
          brute = std::min(brute, g.crossing_weight(ind));
        }
        if (std::abs(st_mincut(g, s, t).value - brute) > 1e-12) ++bad_flow;
      }
    for (auto kind : kinds) {
      std::vector<std::size_t> all(m);
      std::iota(all.begin(), all.end(), 0);
      const auto x = xist(g, g.masses(), kind, all);
      const auto ex = min_cut_exact(g, kind);
      if (x.partition && x.value < ex.value - 1e-12 * (1 + std::abs(ex.value))) ++bad_xist;
      for (const auto& st : x.steps)
        if (std::abs(g.crossing_weight(st.partition.indicator()) -
                     st_mincut(g, st.s, st.t).value) > 1e-12)
          ++bad_attain;
    }
  }
  o.require(bad_flow == 0, "max-flow equals brute force");
  o.require(bad_xist == 0, "Xist >= exact");
  o.require(bad_attain == 0, "Xist partitions attain their st-MinCut");
  o.detail << "pairs=" << pairs << " flow_mismatch=" << bad_flow << " xist_below_exact=" << bad_xist
           << " non_attaining=" << bad_attain;
  return o;
}

// 9: M-out-of-n bootstrap consistency for CCut.
Outcome bootstrap_consistency() {
  Outcome o;
  const auto grid = bimodal3x3(0.4);
  const auto adj = neighborhood(grid, 1.0);
  const auto g = population_graph(grid, 1.0);
  auto sampler = make_limit_sampler(g, CutKind::CCut);
  const auto ref = sampler.sample(50000, 90);
  auto median_ks = [&](std::int64_t n, MRule rule, std::uint64_t master) {
    std::vector<double> d;
    for (std::size_t rep = 0; rep < 20; ++rep) {
      auto rng = make_engine(master, rep);
      const auto y = sample_multinomial(grid.p(), n, rng);
      BootstrapConfig cfg{rule, 0, 100, stream_seed(master ^ 0x5eedULL, rep)};
      d.push_back(ks_distance(bootstrap_distribution(y, adj, CutKind::CCut, cfg), ref));
    }
    return median_of(d);
  };
  const double small = median_ks(1000, MRule::sqrt_n, 91);
  const double large = median_ks(100000, MRule::sqrt_n, 92);
  const double full = median_ks(100000, MRule::equal_n, 93);
  o.require(large < small, "sqrt(n) bootstrap improves from n=1e3 to n=1e5");
  o.require(full > large, "M=n worse than M=sqrt(n) at n=1e5");
  o.detail << "sqrt_n: n=1e3 D=" << small << ", n=1e5 D=" << large << "; M=n at n=1e5 D=" << full;
  return o;
}

// 10: level and power of the clustering test.
Outcome clustering_level_power() {
  Outcome o;
  const auto ref = clustering_reference(uniform_grid({4, 4}), 1.0, CutKind::NCut, 50000, 100);
  auto rate = [&](double eps, std::uint64_t master) {
    const auto grid = band4x4(eps);
    const auto rej = run_replicates(
        200, master,
        [&](std::size_t, Engine& rng) {
          return clustering_test(sample_multinomial(grid.p(), 10000, rng), ref, 0.05).reject ? 1.0
                                                                                            : 0.0;
        },
        default_workers());
    return mean_of(rej);
  };
  const double level = rate(1.0, 101);
  const double power = rate(0.2, 102);
  o.require(level <= 0.08, "rejection rate <= 0.08 at eps=1");
  o.require(power >= 0.95, "rejection rate >= 0.95 at eps=0.2");
  o.detail << "eps=1: " << level << " eps=0.2: " << power;
  return o;
}

// 11: structural identities on random graphs and the Gaussian root transform.
Outcome structural_identities() {
  Outcome o;
  std::mt19937_64 rng(110);
  double worst = 0;
  bool sampler_equal = true;
  for (int k = 0; k < 100; ++k) {
    std::uniform_int_distribution<std::size_t> size(3, 9);
    const auto g = random_graph(rng, size(rng));
    const std::size_t m = g.size();
    const auto s = Partition::from_mask(m, random_mask(rng, m));
    std::vector<std::uint8_t> flip(s.indicator());
    for (auto& v : flip) v = !v;
    std::vector<std::size_t> labels(m);
    for (std::size_t i = 0; i < m; ++i) labels[i] = s.contains(i) ? 0 : 1;
    const MultiPartition two(labels);
    for (auto kind : {CutKind::MCut, CutKind::RCut, CutKind::NCut, CutKind::NCutAlt, CutKind::CCut}) {
      const double v = cut_value(g, s, kind);
      // The complement is canonicalized back to s; evaluate its indicator directly.
      const auto raw = cut_terms(g, std::span<const std::uint8_t>(flip));
      const double vc = CutObjective(kind).value(raw);
      worst = std::max(worst, std::abs(v - vc) / (1 + std::abs(v)));
      worst = std::max(worst, std::abs(multiway_cut_value(g, two, kind) - v) / (1 + std::abs(v)));
    }
    const auto terms = cut_terms(g, s);
    const double nc = cut_value(g, s, CutKind::NCut);
    worst = std::max(worst, std::abs(terms.crossing - nc * terms.vol_s * terms.vol_c) /
                                (1 + terms.crossing));
    worst = std::max(worst, std::abs(cut_value(g, s, CutKind::NCutAlt) - g.vol_all() * nc) /
                                (1 + std::abs(nc)));
    const auto q = q_vector(g, s);
    double pq = 0;
    for (std::size_t i = 0; i < m; ++i) pq += g.masses()[i] * q[i];
    worst = std::max(worst, std::abs(pq - 2 * cut_value(g, s, CutKind::MCut)));
    if (k < 10) {
      LimitSampler a(g, CutKind::NCut, {s});
      MultiwayLimitSampler b(g, CutKind::NCut, {two});
      if (a.sample(200, 7) != b.sample(200, 7)) sampler_equal = false;
    }
  }
  o.require(worst <= 1e-12, "identities to 1e-12");
  o.require(sampler_equal, "k=2 multiway sampler equals two-way");

  const std::vector<double> p = {0.05, 0.15, 0.3, 0.5};
  auto eng = make_engine(111);
  const std::size_t n = 100000;
  std::vector<double> s1(16, 0), s2(16, 0);
  double row = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto z = gaussian_root_sample(p, eng);
    row = std::max(row, std::abs(std::accumulate(z.begin(), z.end(), 0.0)));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        s1[i * 4 + j] += z[i] * z[j];
        s2[i * 4 + j] += z[i] * z[i] * z[j] * z[j];
      }
  }
  double worst_se = 0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double target = (i == j ? p[i] : 0.0) - p[i] * p[j];
      const double mean = s1[i * 4 + j] / static_cast<double>(n);
      const double se =
          std::sqrt((s2[i * 4 + j] / static_cast<double>(n) - mean * mean) / static_cast<double>(n));
      worst_se = std::max(worst_se, std::abs(mean - target) / se);
    }
  o.require(row <= 1e-12, "Z row sums 0");
  o.require(worst_se <= 3.0, "Z covariance within 3 SE");
  o.detail << "max identity error=" << worst << " max|row sum|=" << row
           << " max cov deviation=" << worst_se << " SE";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"example-1 exactness", example1_exactness},
      {"degenerate limit", degenerate_limit},
      {"attainment probabilities", attainment_probabilities},
      {"local maxima counts", local_maxima_counts},
      {"covariance validation", covariance_validation},
      {"ccut dichotomy", ccut_dichotomy},
      {"ks convergence", ks_convergence},
      {"st-mincut oracle", stmincut_oracle},
      {"bootstrap consistency", bootstrap_consistency},
      {"clustering test level and power", clustering_level_power},
      {"structural identities", structural_identities},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                r.detail.str().c_str(), secs);
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
