#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gcut/discretization.hpp"

using namespace gcut;

namespace {

// Independent bin lookup: scan every box and test membership directly.
std::size_t box_scan(const ProbabilityGrid& g, const std::vector<double>& pt) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unravel(i);
    bool inside = true;
    for (std::size_t a = 0; a < g.dims(); ++a) {
      const double lo = g.origin()[a] + static_cast<double>(idx[a]) * g.spacing()[a];
      const double hi = lo + g.spacing()[a];
      const bool last = idx[a] + 1 == g.shape()[a];
      inside = inside && pt[a] >= lo && (pt[a] < hi || (last && pt[a] <= hi));
    }
    if (inside) return i;
  }
  return g.size();
}

}  // namespace

TEST(Discretize, AllPointsInOneBin) {
  ProbabilityGrid g({2}, {0.5, 0.5});
  std::vector<std::vector<double>> pts(4, {0.25});
  auto y = discretize(pts, g);
  EXPECT_EQ(y.counts, (std::vector<std::int64_t>{4, 0}));
  EXPECT_EQ(y.n, 4);
}

TEST(Discretize, ToyGridMatchesBoxScan) {
  auto g = uniform_grid({3, 5});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 3.0), uy(0.0, 5.0);
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < 27; ++k) pts.push_back({ux(rng), uy(rng)});
  auto y = discretize(pts, g);
  std::vector<std::int64_t> oracle(g.size(), 0);
  for (const auto& p : pts) ++oracle[box_scan(g, p)];
  EXPECT_EQ(y.counts, oracle);
  EXPECT_EQ(y.n, 27);
}

TEST(Discretize, BoundaryPointsFollowHalfOpenBins) {
  auto g = uniform_grid({3, 3});
  std::vector<std::vector<double>> pts;
  for (double x : {0.0, 1.0, 2.0, 3.0})
    for (double y : {0.0, 1.0, 2.0, 3.0}) pts.push_back({x, y});
  auto y = discretize(pts, g);
  std::vector<std::int64_t> oracle(g.size(), 0);
  for (const auto& p : pts) {
    auto b = box_scan(g, p);
    ASSERT_LT(b, g.size());
    ++oracle[b];
  }
  EXPECT_EQ(y.counts, oracle);
  EXPECT_EQ(*g.bin_of(std::vector<double>{1.0, 0.5}), 3U);
  EXPECT_EQ(*g.bin_of(std::vector<double>{3.0, 3.0}), 8U);
}

TEST(Discretize, OutOfBoundsReportsIndex) {
  auto g = uniform_grid({2, 2});
  std::vector<std::vector<double>> pts = {{0.5, 0.5}, {1.5, 0.5}, {2.5, 0.5}};
  try {
    discretize(pts, g);
    FAIL() << "expected PointOutOfBounds";
  } catch (const PointOutOfBounds& e) {
    EXPECT_EQ(e.index(), 2U);
  }
}

TEST(Discretize, PermutationInvariant) {
  auto g = uniform_grid({4, 4});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < 200; ++k) pts.push_back({u(rng), u(rng)});
  auto a = discretize(pts, g);
  std::shuffle(pts.begin(), pts.end(), rng);
  EXPECT_EQ(a, discretize(pts, g));
}

TEST(Multinomial, DegenerateDistribution) {
  ProbabilityGrid g({2}, {1.0, 0.0});
  for (std::int64_t n : {1, 7, 1000}) {
    auto y = sample_multinomial(g, n, 5);
    EXPECT_EQ(y.counts, (std::vector<std::int64_t>{n, 0}));
  }
}

TEST(Multinomial, ZeroProbabilityBinsStayEmpty) {
  ProbabilityGrid g({4}, {0.0, 0.5, 0.0, 0.5});
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto y = sample_multinomial(g, 1000, s);
    EXPECT_EQ(y.counts[0], 0);
    EXPECT_EQ(y.counts[2], 0);
    EXPECT_EQ(y.n, 1000);
  }
}

TEST(Multinomial, UniformFrequenciesWithinBinomialBound) {
  auto g = uniform_grid({3, 3});
  const std::int64_t n = 100000;
  const double p = 1.0 / 9.0;
  const double bound = 4.0 * std::sqrt(p * (1 - p) / static_cast<double>(n));
  int good = 0;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    auto f = sample_multinomial(g, n, r).frequencies();
    bool ok = std::all_of(f.begin(), f.end(),
                          [&](double v) { return std::abs(v - p) <= bound; });
    good += ok;
  }
  EXPECT_GE(good, 990);
}

TEST(Multinomial, MeanFrequencyMatchesProbability) {
  auto g = bimodal3x3(0.4);
  const std::int64_t n = 50;
  const int reps = 10000;
  std::vector<double> sum(9, 0.0), sumsq(9, 0.0);
  for (int r = 0; r < reps; ++r) {
    auto f = sample_multinomial(g, n, static_cast<std::uint64_t>(r) + 100).frequencies();
    for (std::size_t i = 0; i < 9; ++i) {
      sum[i] += f[i];
      sumsq[i] += f[i] * f[i];
    }
  }
  for (std::size_t i = 0; i < 9; ++i) {
    const double mean = sum[i] / reps;
    const double var = (sumsq[i] - reps * mean * mean) / (reps - 1);
    EXPECT_LE(std::abs(mean - g.p()[i]), 3.0 * std::sqrt(var / reps)) << "bin " << i;
  }
}

TEST(Multinomial, SeedReproducible) {
  auto g = bimodal3x3(0.4);
  EXPECT_EQ(sample_multinomial(g, 12345, 99), sample_multinomial(g, 12345, 99));
  EXPECT_NE(sample_multinomial(g, 12345, 99), sample_multinomial(g, 12345, 100));
}

TEST(Multinomial, RejectsNonpositiveSize) {
  auto g = uniform_grid({2, 2});
  EXPECT_THROW(sample_multinomial(g, 0, 1), InvalidArgument);
}

TEST(NamedDistribution, Uniform3x3) {
  auto g = named_distribution("uniform", {.shape = {3, 3}});
  for (double v : g.p()) EXPECT_DOUBLE_EQ(v, 1.0 / 9.0);
}

TEST(NamedDistribution, BimodalEqualVolumeLambda) {
  const double lam = equal_volume_lambda(0.4);
  EXPECT_NEAR(lam, std::sqrt(1.76), 1e-15);
  EXPECT_NEAR(lam, 1.32665, 1e-5);
  auto g = named_distribution("bimodal3x3", {.eps = 0.4});
  const double total = 3 * (lam + 0.4 + 1.0);
  EXPECT_NEAR(g.p()[0], lam / total, 1e-15);
  EXPECT_NEAR(g.p()[4], 0.4 / total, 1e-15);
  EXPECT_NEAR(g.p()[8], 1.0 / total, 1e-15);
}

TEST(NamedDistribution, BimodalRowLayout) {
  auto g = bimodal3x3(0.5, 2.0);
  const double total = 3 * (2.0 + 0.5 + 1.0);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_DOUBLE_EQ(g.p()[c], 2.0 / total);
    EXPECT_DOUBLE_EQ(g.p()[3 + c], 0.5 / total);
    EXPECT_DOUBLE_EQ(g.p()[6 + c], 1.0 / total);
  }
}

TEST(NamedDistribution, Band4x4Rows) {
  auto g = band4x4(0.2);
  const double total = 8 * 1.0 + 8 * 0.2;
  for (std::size_t i = 0; i < 16; ++i) {
    const std::size_t row = i / 4;
    const double w = (row == 0 || row == 3) ? 1.0 : 0.2;
    EXPECT_DOUBLE_EQ(g.p()[i], w / total);
  }
}

TEST(NamedDistribution, CustomNormalizes) {
  auto g = named_distribution("custom", {.weights = {2.0, 1.0}});
  EXPECT_DOUBLE_EQ(g.p()[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(g.p()[1], 1.0 / 3.0);
}

TEST(NamedDistribution, Errors) {
  EXPECT_THROW(named_distribution("trimodal", {}), InvalidArgument);
  EXPECT_THROW(named_distribution("custom", {.weights = {1.0, 0.0}}), InvalidArgument);
  EXPECT_THROW(named_distribution("custom", {.weights = {1.0, -2.0}}), InvalidArgument);
}

TEST(ProbabilityGrid, Validation) {
  EXPECT_THROW(ProbabilityGrid({2}, {0.6, 0.6}), InvalidArgument);
  EXPECT_THROW(ProbabilityGrid({2}, {1.2, -0.2}), InvalidArgument);
  EXPECT_THROW(ProbabilityGrid({1}, {1.0}), InvalidArgument);
  EXPECT_THROW(ProbabilityGrid({3}, {0.5, 0.5}), InvalidArgument);
  ProbabilityGrid g({2, 3}, std::vector<double>(6, 1.0 / 6.0));
  EXPECT_EQ(g.size(), 6U);
  EXPECT_DOUBLE_EQ(g.center(5)[0], 1.5);
  EXPECT_DOUBLE_EQ(g.center(5)[1], 2.5);
}
