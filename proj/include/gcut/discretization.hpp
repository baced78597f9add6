#pragma once

// Multinomial model of a binned sample: rectangular grids of bins with a
// probability vector, point binning, and seeded multinomial draws.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gcut/error.hpp"
#include "gcut/rng.hpp"

namespace gcut {

/// Axis-aligned rectangular grid of bins carrying a probability vector.
///
/// Bins are indexed row-major: the first axis varies slowest, so on a 2-D
/// grid node `r * cols + c` is row r (row 0 on top) and column c. Bin k on
/// axis a covers [origin_a + k*spacing_a, origin_a + (k+1)*spacing_a); the
/// last bin on each axis is closed on the right.
class ProbabilityGrid {
 public:
  ProbabilityGrid(std::vector<std::size_t> shape, std::vector<double> p,
                  std::vector<double> origin = {},
                  std::vector<double> spacing = {})
      : shape_(std::move(shape)),
        origin_(std::move(origin)),
        spacing_(std::move(spacing)),
        p_(std::move(p)) {
    if (shape_.empty()) throw InvalidArgument("grid shape must be nonempty");
    std::size_t m = 1;
    for (auto s : shape_) {
      if (s == 0) throw InvalidArgument("grid axis with zero bins");
      m *= s;
    }
    if (m < 2) throw InvalidArgument("grid needs at least two bins");
    if (p_.size() != m)
      throw InvalidArgument("probability vector length " +
                            std::to_string(p_.size()) + " != bin count " +
                            std::to_string(m));
    double total = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InvalidArgument("probabilities must be finite and nonnegative");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InvalidArgument("probabilities must sum to 1");
    if (origin_.empty()) origin_.assign(shape_.size(), 0.0);
    if (spacing_.empty()) spacing_.assign(shape_.size(), 1.0);
    if (origin_.size() != shape_.size() || spacing_.size() != shape_.size())
      throw InvalidArgument("origin/spacing dimension mismatch");
    for (double h : spacing_)
      if (!(h > 0.0)) throw InvalidArgument("bin spacing must be positive");

    centers_.resize(m * dims());
    for (std::size_t i = 0; i < m; ++i) {
      auto idx = unravel(i);
      for (std::size_t a = 0; a < dims(); ++a)
        centers_[i * dims() + a] =
            origin_[a] + (static_cast<double>(idx[a]) + 0.5) * spacing_[a];
    }
  }

  std::size_t size() const noexcept { return p_.size(); }
  std::size_t dims() const noexcept { return shape_.size(); }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  const std::vector<double>& origin() const noexcept { return origin_; }
  const std::vector<double>& spacing() const noexcept { return spacing_; }
  const std::vector<double>& p() const noexcept { return p_; }

  std::span<const double> center(std::size_t i) const {
    return {centers_.data() + i * dims(), dims()};
  }

  std::vector<std::size_t> unravel(std::size_t i) const {
    std::vector<std::size_t> idx(dims());
    for (std::size_t a = dims(); a-- > 0;) {
      idx[a] = i % shape_[a];
      i /= shape_[a];
    }
    return idx;
  }

  /// Bin containing `point`, or nullopt when it lies outside the box.
  std::optional<std::size_t> bin_of(std::span<const double> point) const {
    if (point.size() != dims()) return std::nullopt;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dims(); ++a) {
      const double rel = (point[a] - origin_[a]) / spacing_[a];
      const auto n = static_cast<double>(shape_[a]);
      if (!(rel >= 0.0) || rel > n) return std::nullopt;
      auto k = static_cast<std::size_t>(std::floor(rel));
      if (k >= shape_[a]) k = shape_[a] - 1;  // closed last bin
      flat = flat * shape_[a] + k;
    }
    return flat;
  }

  ProbabilityGrid with_p(std::vector<double> p) const {
    return ProbabilityGrid(shape_, std::move(p), origin_, spacing_);
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> origin_;
  std::vector<double> spacing_;
  std::vector<double> p_;
  std::vector<double> centers_;
};

/// Bin counts Y of a sample of size n.
struct DiscretizedSample {
  std::vector<std::int64_t> counts;
  std::int64_t n = 0;

  DiscretizedSample() = default;
  explicit DiscretizedSample(std::vector<std::int64_t> y) : counts(std::move(y)) {
    for (auto c : counts) {
      if (c < 0) throw InvalidArgument("negative bin count");
      n += c;
    }
  }

  std::size_t size() const noexcept { return counts.size(); }

  std::vector<double> frequencies() const {
    std::vector<double> f(counts.size(), 0.0);
    if (n == 0) return f;
    for (std::size_t i = 0; i < counts.size(); ++i)
      f[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    return f;
  }

  friend bool operator==(const DiscretizedSample&,
                         const DiscretizedSample&) = default;
};

inline DiscretizedSample discretize(
    std::span<const std::vector<double>> points, const ProbabilityGrid& grid) {
  std::vector<std::int64_t> y(grid.size(), 0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    auto bin = grid.bin_of(points[k]);
    if (!bin)
      throw PointOutOfBounds(
          k, "point " + std::to_string(k) + " lies outside the grid box");
    ++y[*bin];
  }
  return DiscretizedSample(std::move(y));
}

/// Y ~ Mult(n, p) by sequential conditional binomials.
inline DiscretizedSample sample_multinomial(std::span<const double> p,
                                            std::int64_t n, Engine& rng) {
  if (n < 1) throw InvalidArgument("multinomial size must be >= 1");
  std::vector<std::int64_t> y(p.size(), 0);
  std::size_t last = p.size();
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0.0) {
      last = i;
      break;
    }
  if (last == p.size()) throw InvalidArgument("probability vector has no mass");
  // suffix[i] = p_i + ... + p_last, summed directly to avoid drift.
  std::vector<double> suffix(last + 2, 0.0);
  for (std::size_t i = last + 1; i-- > 0;) suffix[i] = suffix[i + 1] + p[i];
  std::int64_t remaining = n;
  for (std::size_t i = 0; i < last && remaining > 0; ++i) {
    if (p[i] <= 0.0) continue;
    const double prob = std::min(1.0, p[i] / suffix[i]);
    std::binomial_distribution<std::int64_t> bin(remaining, prob);
    y[i] = bin(rng);
    remaining -= y[i];
  }
  y[last] += remaining;
  return DiscretizedSample(std::move(y));
}

inline DiscretizedSample sample_multinomial(const ProbabilityGrid& grid,
                                            std::int64_t n,
                                            std::uint64_t seed) {
  auto rng = make_engine(seed);
  return sample_multinomial(grid.p(), n, rng);
}

// ---------------------------------------------------------------------------
// Named distributions

/// λ making the two CCut sides of the bimodal 3x3 design equal in volume.
inline double equal_volume_lambda(double eps) {
  return std::sqrt(1.0 + 1.5 * eps + eps * eps);
}

inline std::vector<double> normalize_weights(std::span<const double> w) {
  double total = 0.0;
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument("weights must be finite and positive");
    total += v;
  }
  std::vector<double> p(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) p[i] = w[i] / total;
  return p;
}

inline ProbabilityGrid uniform_grid(std::vector<std::size_t> shape) {
  std::size_t m = 1;
  for (auto s : shape) m *= s;
  std::vector<double> w(m, 1.0);
  return ProbabilityGrid(std::move(shape), normalize_weights(w));
}

/// 3x3 grid with row weights (λ, ε, 1) from top to bottom.
inline ProbabilityGrid bimodal3x3(double eps, std::optional<double> lambda = {}) {
  const double lam = lambda.value_or(equal_volume_lambda(eps));
  std::vector<double> w = {lam, lam, lam, eps, eps, eps, 1.0, 1.0, 1.0};
  return ProbabilityGrid({3, 3}, normalize_weights(w));
}

/// 4x4 grid with row weights (1, ε, ε, 1) from top to bottom.
inline ProbabilityGrid band4x4(double eps) {
  std::vector<double> w(16, 1.0);
  for (std::size_t c = 0; c < 4; ++c) w[4 + c] = w[8 + c] = eps;
  return ProbabilityGrid({4, 4}, normalize_weights(w));
}

struct DistributionParams {
  std::vector<std::size_t> shape{};
  std::optional<double> eps{};
  std::optional<double> lambda{};  // nullopt: equal-volume choice
  std::vector<double> weights{};
};

inline ProbabilityGrid named_distribution(std::string_view name,
                                          const DistributionParams& params) {
  if (name == "uniform") {
    if (params.shape.empty()) throw InvalidArgument("uniform needs a shape");
    return uniform_grid(params.shape);
  }
  if (name == "bimodal3x3") {
    if (!params.eps) throw InvalidArgument("bimodal3x3 needs eps");
    return bimodal3x3(*params.eps, params.lambda);
  }
  if (name == "band4x4") {
    if (!params.eps) throw InvalidArgument("band4x4 needs eps");
    return band4x4(*params.eps);
  }
  if (name == "custom") {
    auto shape = params.shape.empty()
                     ? std::vector<std::size_t>{params.weights.size()}
                     : params.shape;
    return ProbabilityGrid(std::move(shape), normalize_weights(params.weights));
  }
  throw InvalidArgument("unknown distribution '" + std::string(name) + "'");
}

}  // namespace gcut
