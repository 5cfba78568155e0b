// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dpmix {

// Cluster labels numbered in order of appearance: s[0] = 1 and every label is at
// most one more than the largest label seen before it. Labels are 1-based.
class OoaLabels {
 public:
  OoaLabels() = default;
  explicit OoaLabels(std::vector<int> labels);

  static bool is_canonical(std::span<const int> labels) noexcept;

  const std::vector<int>& values() const noexcept { return s_; }
  std::size_t size() const noexcept { return s_.size(); }
  int operator[](std::size_t i) const { return s_[i]; }
  int cluster_count() const noexcept { return k_; }

  friend bool operator==(const OoaLabels& a, const OoaLabels& b) { return a.s_ == b.s_; }
  friend auto operator<=>(const OoaLabels& a, const OoaLabels& b) { return a.s_ <=> b.s_; }

 private:
  std::vector<int> s_;
  int k_ = 0;
};

// Stick-breaking labels: r[i] is the (1-based) index of the stick observation i
// was drawn from.
class SbLabels {
 public:
  SbLabels() = default;
  explicit SbLabels(std::vector<int> labels);

  const std::vector<int>& values() const noexcept { return r_; }
  std::size_t size() const noexcept { return r_.size(); }
  int operator[](std::size_t i) const { return r_[i]; }

  friend bool operator==(const SbLabels& a, const SbLabels& b) { return a.r_ == b.r_; }
  friend auto operator<=>(const SbLabels& a, const SbLabels& b) { return a.r_ <=> b.r_; }

 private:
  std::vector<int> r_;
};

// The distinct stick indices of r in order of first occurrence. k() is the
// number of clusters.
class DistinctFirsts {
 public:
  DistinctFirsts() = default;
  explicit DistinctFirsts(std::vector<int> sticks);

  const std::vector<int>& values() const noexcept { return r_star_; }
  int k() const noexcept { return static_cast<int>(r_star_.size()); }
  int operator[](std::size_t j) const { return r_star_[j]; }

  friend bool operator==(const DistinctFirsts&, const DistinctFirsts&) = default;

 private:
  std::vector<int> r_star_;
};

// An injective sequence of positive integers. In the transcoder, entry h is the
// appearance rank of stick h + 1; as the output of a size-biased permutation it
// lists the picked indices in pick order.
class AppearanceMap {
 public:
  AppearanceMap() = default;
  explicit AppearanceMap(std::vector<int> t);

  const std::vector<int>& values() const noexcept { return t_; }
  std::size_t size() const noexcept { return t_.size(); }
  int operator[](std::size_t h) const { return t_[h]; }

  friend bool operator==(const AppearanceMap&, const AppearanceMap&) = default;

 private:
  std::vector<int> t_;
};

struct PartitionSummary {
  int k = 0;
  std::vector<int> sizes_ooa;  // cluster sizes in order of appearance
  int n = 0;
};

PartitionSummary summarize(const OoaLabels& s);

// Sizes of the clusters of r in order of first appearance.
std::vector<int> ooa_sizes(std::span<const int> labels);

OoaLabels r_to_s(const SbLabels& r);
DistinctFirsts distinct_in_order(const SbLabels& r);
SbLabels compose(const OoaLabels& s, const DistinctFirsts& r_star);
DistinctFirsts t_to_rstar(const AppearanceMap& t, int k);

// Exchangeable partition probability of one set partition with the given block
// sizes under a DP with precision alpha.
double log_eppf(std::span<const int> sizes, double alpha);
double eppf(std::span<const int> sizes, double alpha);

// Ewens sampling formula. multiplicities[i - 1] is the number of blocks of
// size i.
double log_ewens(std::span<const int> multiplicities, double alpha);
double ewens_prob(std::span<const int> multiplicities, double alpha);

// Probability that the cluster sizes, listed in order of appearance, equal
// sizes_ooa.
double log_p_ooa(std::span<const int> sizes_ooa, double alpha);
double p_ooa(std::span<const int> sizes_ooa, double alpha);

// Block-size multiplicity profile M_1..M_n of a set of block sizes.
std::vector<int> multiplicities(std::span<const int> sizes);

}  // namespace dpmix
