// Walks through the library on the 3x3 bimodal density: exact balanced cuts,
// Xist, the limit law of the empirical cut value and the clustering test.

#include <cmath>
#include <cstdio>
#include <string>

#include "gcut/gcut.hpp"

using namespace gcut;

namespace {

std::string members(const Partition& s) {
  std::string out = "{";
  for (auto i : s.members()) out += (out.size() > 1 ? "," : "") + std::to_string(i);
  return out + "}";
}

}  // namespace

int main() {
  const double eps = 0.4;
  const auto grid = bimodal3x3(eps, 1.2);
  const auto g = population_graph(grid, 1.0);
  std::printf("bimodal 3x3 grid, eps=%.2f, %zu edges\n\n", eps, g.adjacency().edge_count());

  std::printf("%-8s %-12s %-22s %-12s %s\n", "kind", "XC(G)", "minimizer", "Xist", "limit sd");
  for (auto kind : {CutKind::MCut, CutKind::RCut, CutKind::NCut, CutKind::CCut}) {
    const auto exact = min_cut_exact(g, kind);
    const auto x = xist(g, g.masses(), kind);
    auto sampler = make_limit_sampler(g, kind);
    const auto draws = sampler.sample(20000, 7);
    double m = 0, s2 = 0;
    for (double v : draws) m += v;
    m /= static_cast<double>(draws.size());
    for (double v : draws) s2 += (v - m) * (v - m);
    std::printf("%-8s %-12.6f %-22s %-12.6f %.4f\n", std::string(to_string(kind)).c_str(),
                exact.value, members(exact.minimizers.front()).c_str(), x.value,
                std::sqrt(s2 / static_cast<double>(draws.size() - 1)));
  }

  // Finite-sample NCut against its limit law.
  const std::size_t n = 5000;
  const auto ens = mc_statistic(grid, 1.0, Statistic::xc_min(CutKind::NCut), n, 2000, 11);
  auto sampler = make_limit_sampler(g, CutKind::NCut);
  const auto ref = sampler.sample(20000, 12);
  const auto ks = ks_test(ens.values, ref);
  std::printf("\nsqrt(n)(NCut(G_n) - NCut(G)) at n=%zu: KS=%.4f critical=%.4f\n", n, ks.D,
              ks.critical);

  // Clustering test on one sample against the uniform reference.
  auto rng = make_engine(13);
  const auto y = sample_multinomial(grid.p(), 10000, rng);
  const auto test = clustering_test(y, grid, 1.0, CutKind::NCut, 0.05, 20000, 14);
  std::printf("clustering test: NCut(G_n)=%.4f band=[%.4f, %.4f] -> %s\n", test.statistic,
              test.lo, test.hi, test.reject ? "reject uniformity" : "accept uniformity");
  return 0;
}
