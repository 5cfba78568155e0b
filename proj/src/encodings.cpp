// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/encodings.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "dpmix/error.hpp"

namespace dpmix {

OoaLabels::OoaLabels(std::vector<int> labels) : s_(std::move(labels)) {
  if (!is_canonical(s_))
    fail(ErrorCategory::invalid_argument, "labels are not in order of appearance");
  k_ = s_.empty() ? 0 : *std::max_element(s_.begin(), s_.end());
}

bool OoaLabels::is_canonical(std::span<const int> labels) noexcept {
  int top = 0;
  for (int x : labels) {
    if (x < 1 || x > top + 1) return false;
    top = std::max(top, x);
  }
  return true;
}

SbLabels::SbLabels(std::vector<int> labels) : r_(std::move(labels)) {
  for (int x : r_)
    if (x < 1) fail(ErrorCategory::invalid_argument, "stick indices must be positive");
}

DistinctFirsts::DistinctFirsts(std::vector<int> sticks) : r_star_(std::move(sticks)) {
  std::vector<int> sorted = r_star_;
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty() && sorted.front() < 1)
    fail(ErrorCategory::invalid_argument, "stick indices must be positive");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorCategory::invalid_argument, "distinct stick indices repeat");
}

AppearanceMap::AppearanceMap(std::vector<int> t) : t_(std::move(t)) {
  std::vector<int> sorted = t_;
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty() && sorted.front() < 1)
    fail(ErrorCategory::invalid_argument, "appearance map entries must be positive");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorCategory::invalid_argument, "appearance map is not injective");
}

PartitionSummary summarize(const OoaLabels& s) {
  PartitionSummary out;
  out.k = s.cluster_count();
  out.n = static_cast<int>(s.size());
  out.sizes_ooa.assign(out.k, 0);
  for (int x : s.values()) ++out.sizes_ooa[x - 1];
  return out;
}

std::vector<int> ooa_sizes(std::span<const int> labels) {
  std::unordered_map<int, std::size_t> slot;
  std::vector<int> sizes;
  for (int x : labels) {
    auto [it, fresh] = slot.try_emplace(x, sizes.size());
    if (fresh) sizes.push_back(0);
    ++sizes[it->second];
  }
  return sizes;
}

OoaLabels r_to_s(const SbLabels& r) {
  if (r.size() == 0) fail(ErrorCategory::invalid_argument, "empty label vector");
  std::unordered_map<int, int> rank;
  std::vector<int> s;
  s.reserve(r.size());
  for (int x : r.values()) {
    auto [it, fresh] = rank.try_emplace(x, static_cast<int>(rank.size()) + 1);
    s.push_back(it->second);
  }
  return OoaLabels(std::move(s));
}

DistinctFirsts distinct_in_order(const SbLabels& r) {
  if (r.size() == 0) fail(ErrorCategory::invalid_argument, "empty label vector");
  std::vector<int> out;
  for (int x : r.values())
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  return DistinctFirsts(std::move(out));
}

SbLabels compose(const OoaLabels& s, const DistinctFirsts& r_star) {
  if (r_star.k() != s.cluster_count())
    fail(ErrorCategory::invalid_argument,
         "r* has " + std::to_string(r_star.k()) + " entries but s has " +
             std::to_string(s.cluster_count()) + " clusters");
  std::vector<int> r;
  r.reserve(s.size());
  for (int x : s.values()) r.push_back(r_star[x - 1]);
  return SbLabels(std::move(r));
}

DistinctFirsts t_to_rstar(const AppearanceMap& t, int k) {
  std::vector<int> r_star(k, 0);
  for (std::size_t h = 0; h < t.size(); ++h) {
    const int rank = t[h];
    if (rank <= k && r_star[rank - 1] == 0) r_star[rank - 1] = static_cast<int>(h) + 1;
  }
  for (int j = 0; j < k; ++j)
    if (r_star[j] == 0)
      fail(ErrorCategory::invalid_argument,
           "appearance rank " + std::to_string(j + 1) + " missing from t prefix");
  return DistinctFirsts(std::move(r_star));
}

namespace {

void check_sizes(std::span<const int> sizes, double alpha) {
  if (sizes.empty()) fail(ErrorCategory::invalid_argument, "empty block sizes");
  if (!(alpha > 0.0)) fail(ErrorCategory::domain, "alpha must be positive");
  for (int n : sizes)
    if (n < 1) fail(ErrorCategory::invalid_argument, "block sizes must be positive");
}

// k log(alpha) + log Gamma(alpha) - log Gamma(alpha + n)
double log_rising_part(int k, int n, double alpha) {
  return k * std::log(alpha) + std::lgamma(alpha) - std::lgamma(alpha + n);
}

}  // namespace

double log_eppf(std::span<const int> sizes, double alpha) {
  check_sizes(sizes, alpha);
  const int n = std::accumulate(sizes.begin(), sizes.end(), 0);
  double acc = log_rising_part(static_cast<int>(sizes.size()), n, alpha);
  for (int nj : sizes) acc += std::lgamma(static_cast<double>(nj));
  return acc;
}

double eppf(std::span<const int> sizes, double alpha) {
  return std::exp(log_eppf(sizes, alpha));
}

double log_ewens(std::span<const int> multiplicities, double alpha) {
  if (multiplicities.empty()) fail(ErrorCategory::invalid_argument, "empty multiplicities");
  if (!(alpha > 0.0)) fail(ErrorCategory::domain, "alpha must be positive");
  const int n = static_cast<int>(multiplicities.size());
  long total = 0;
  for (int i = 1; i <= n; ++i) {
    const int m = multiplicities[i - 1];
    if (m < 0) fail(ErrorCategory::invalid_argument, "multiplicities must be non-negative");
    total += static_cast<long>(i) * m;
  }
  if (total != n)
    fail(ErrorCategory::invalid_argument, "multiplicities do not sum to n (sum i*M_i != n)");
  double acc = std::lgamma(n + 1.0) + std::lgamma(alpha) - std::lgamma(alpha + n);
  for (int i = 1; i <= n; ++i) {
    const int m = multiplicities[i - 1];
    if (m == 0) continue;
    acc += m * std::log(alpha) - m * std::log(static_cast<double>(i)) - std::lgamma(m + 1.0);
  }
  return acc;
}

double ewens_prob(std::span<const int> multiplicities, double alpha) {
  return std::exp(log_ewens(multiplicities, alpha));
}

double log_p_ooa(std::span<const int> sizes_ooa, double alpha) {
  check_sizes(sizes_ooa, alpha);
  const int n = std::accumulate(sizes_ooa.begin(), sizes_ooa.end(), 0);
  double acc = std::lgamma(n + 1.0) + log_rising_part(static_cast<int>(sizes_ooa.size()), n, alpha);
  long tail = 0;
  for (auto it = sizes_ooa.rbegin(); it != sizes_ooa.rend(); ++it) {
    tail += *it;
    acc -= std::log(static_cast<double>(tail));
  }
  return acc;
}

double p_ooa(std::span<const int> sizes_ooa, double alpha) {
  return std::exp(log_p_ooa(sizes_ooa, alpha));
}

std::vector<int> multiplicities(std::span<const int> sizes) {
  const int n = std::accumulate(sizes.begin(), sizes.end(), 0);
  std::vector<int> m(n, 0);
  for (int x : sizes) {
    if (x < 1) fail(ErrorCategory::invalid_argument, "block sizes must be positive");
    ++m[x - 1];
  }
  return m;
}

}  // namespace dpmix
