#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gcut/error.hpp"

namespace gcut {

/// Two-way split {S, V\S} of the nodes 0..m-1.
///
/// Stored canonically with node 0 in S, so S and its complement compare
/// equal. Ordering matches the integer value of the membership bitmask.
class Partition {
 public:
  Partition() = default;

  /// `indicator[i] != 0` marks node i as a member of S (either orientation).
  explicit Partition(std::vector<std::uint8_t> indicator)
      : in_(std::move(indicator)) {
    for (auto& b : in_) b = b ? 1 : 0;
    const auto k = static_cast<std::size_t>(std::count(in_.begin(), in_.end(), 1));
    if (in_.size() < 2 || k == 0 || k == in_.size())
      throw InvalidArgument("partition side must be a proper nonempty subset");
    if (!in_[0])
      for (auto& b : in_) b ^= 1;
  }

  static Partition from_members(std::size_t m,
                                std::span<const std::size_t> members) {
    std::vector<std::uint8_t> ind(m, 0);
    for (auto i : members) {
      if (i >= m) throw InvalidArgument("partition member out of range");
      ind[i] = 1;
    }
    return Partition(std::move(ind));
  }

  static Partition from_members(std::size_t m,
                                std::initializer_list<std::size_t> members) {
    return from_members(m, std::span<const std::size_t>(members.begin(), members.size()));
  }

  static Partition from_mask(std::size_t m, std::uint64_t mask) {
    std::vector<std::uint8_t> ind(m, 0);
    for (std::size_t i = 0; i < m && i < 64; ++i) ind[i] = (mask >> i) & 1U;
    return Partition(std::move(ind));
  }

  std::size_t node_count() const noexcept { return in_.size(); }
  bool contains(std::size_t i) const { return in_[i] != 0; }
  const std::vector<std::uint8_t>& indicator() const noexcept { return in_; }

  std::size_t side_size() const {
    return static_cast<std::size_t>(std::count(in_.begin(), in_.end(), 1));
  }

  std::vector<std::size_t> members() const { return collect(1); }
  std::vector<std::size_t> complement_members() const { return collect(0); }

  /// Bitmask of S; only meaningful for m <= 64.
  std::uint64_t mask() const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < in_.size() && i < 64; ++i)
      if (in_[i]) v |= std::uint64_t{1} << i;
    return v;
  }

  /// "{0,1,2}" listing the canonical side.
  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (auto i : members()) {
      if (!first) s += ',';
      s += std::to_string(i);
      first = false;
    }
    return s + "}";
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.in_ == b.in_;
  }
  friend bool operator<(const Partition& a, const Partition& b) {
    if (a.in_.size() != b.in_.size()) return a.in_.size() < b.in_.size();
    for (std::size_t i = a.in_.size(); i-- > 0;)
      if (a.in_[i] != b.in_[i]) return a.in_[i] < b.in_[i];
    return false;
  }

 private:
  std::vector<std::size_t> collect(std::uint8_t flag) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < in_.size(); ++i)
      if (in_[i] == flag) out.push_back(i);
    return out;
  }

  std::vector<std::uint8_t> in_;
};

/// k-way split of the nodes 0..m-1 given by a block label per node.
///
/// Canonical labels: blocks are numbered in order of their smallest node.
class MultiPartition {
 public:
  MultiPartition() = default;

  explicit MultiPartition(std::vector<std::size_t> labels) {
    if (labels.empty()) throw InvalidArgument("empty multiway partition");
    std::vector<std::size_t> remap;
    std::vector<std::size_t> seen;
    labels_.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto it = std::find(seen.begin(), seen.end(), labels[i]);
      if (it == seen.end()) {
        seen.push_back(labels[i]);
        labels_[i] = seen.size() - 1;
      } else {
        labels_[i] = static_cast<std::size_t>(it - seen.begin());
      }
    }
    k_ = seen.size();
  }

  /// Blocks as explicit node lists; they must be disjoint and cover 0..m-1.
  static MultiPartition from_blocks(std::size_t m,
                                    const std::vector<std::vector<std::size_t>>& blocks) {
    constexpr auto kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> labels(m, kUnset);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (blocks[b].empty()) throw InvalidArgument("empty block in multiway partition");
      for (auto i : blocks[b]) {
        if (i >= m) throw InvalidArgument("block member out of range");
        if (labels[i] != kUnset)
          throw InvalidArgument("blocks overlap at node " + std::to_string(i));
        labels[i] = b;
      }
    }
    for (std::size_t i = 0; i < m; ++i)
      if (labels[i] == kUnset)
        throw InvalidArgument("blocks do not cover node " + std::to_string(i));
    return MultiPartition(std::move(labels));
  }

  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t block_count() const noexcept { return k_; }
  const std::vector<std::size_t>& labels() const noexcept { return labels_; }

  std::vector<std::size_t> block(std::size_t b) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == b) out.push_back(i);
    return out;
  }

  /// Block b against the rest, as a two-way partition (requires k >= 2).
  Partition block_partition(std::size_t b) const {
    std::vector<std::uint8_t> ind(labels_.size(), 0);
    for (std::size_t i = 0; i < labels_.size(); ++i) ind[i] = labels_[i] == b;
    return Partition(std::move(ind));
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t b = 0; b < k_; ++b) {
      if (b) s += ',';
      s += '{';
      bool first = true;
      for (auto i : block(b)) {
        if (!first) s += ',';
        s += std::to_string(i);
        first = false;
      }
      s += '}';
    }
    return s + "]";
  }

  friend bool operator==(const MultiPartition&, const MultiPartition&) = default;
  friend bool operator<(const MultiPartition& a, const MultiPartition& b) {
    return a.labels_ < b.labels_;
  }

 private:
  std::vector<std::size_t> labels_;
  std::size_t k_ = 0;
};

}  // namespace gcut
