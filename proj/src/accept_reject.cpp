// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/accept_reject.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpmix/error.hpp"
#include "dpmix/prior_samplers.hpp"

namespace dpmix {

namespace {

struct Proposal {
  SbLabels r;
  std::vector<int> sizes;  // order of appearance
};

Proposal propose(int n, double alpha, RngStream& rng) {
  Proposal p;
  p.r = stick_breaking_sample(n, alpha, rng).r;
  p.sizes = ooa_sizes(p.r.values());
  return p;
}

bool accepts(const Proposal& p, const OoaLabels& s, const std::vector<int>& s_sizes,
             const std::vector<int>& s_sorted, ArMethod method) {
  if (p.sizes.size() != s_sizes.size()) return false;
  switch (method) {
    case ArMethod::exact_pattern:
      return r_to_s(p.r) == s;
    case ArMethod::ordered_sizes:
      return p.sizes == s_sizes;
    case ArMethod::sorted_sizes: {
      std::vector<int> sorted = p.sizes;
      std::sort(sorted.begin(), sorted.end());
      return sorted == s_sorted;
    }
  }
  return false;
}

// Give cluster j of s the stick of the first unused proposal block with the same
// size, scanning proposal blocks in appearance order.
SbLabels realign(const Proposal& p, const OoaLabels& s, const std::vector<int>& s_sizes) {
  const DistinctFirsts sticks = distinct_in_order(p.r);
  std::vector<char> used(p.sizes.size(), 0);
  std::vector<int> r_star;
  r_star.reserve(s_sizes.size());
  for (int size : s_sizes) {
    std::size_t b = 0;
    while (used[b] || p.sizes[b] != size) ++b;
    used[b] = 1;
    r_star.push_back(sticks[b]);
  }
  return compose(s, DistinctFirsts(std::move(r_star)));
}

std::vector<int> sorted_copy(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

ArMethod ar_method_from_int(int id) {
  if (id < 1 || id > 3) fail(ErrorCategory::invalid_argument, "accept-reject method must be 1, 2 or 3");
  return static_cast<ArMethod>(id);
}

ArResult ar_transcode(const OoaLabels& s, double alpha, ArMethod method, RngStream& rng,
                      std::uint64_t max_attempts, const ArProgress& progress) {
  if (s.size() == 0) fail(ErrorCategory::invalid_argument, "empty label vector");
  if (!(alpha > 0.0)) fail(ErrorCategory::domain, "alpha must be positive");
  if (max_attempts < 1) fail(ErrorCategory::invalid_argument, "max_attempts must be at least 1");
  const std::vector<int> s_sizes = summarize(s).sizes_ooa;
  const std::vector<int> s_sorted = sorted_copy(s_sizes);
  const int n = static_cast<int>(s.size());
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    Proposal p = propose(n, alpha, rng);
    if (accepts(p, s, s_sizes, s_sorted, method)) return {realign(p, s, s_sizes), attempt};
    if (progress && attempt % 1'000'000 == 0) progress(attempt);
  }
  throw AttemptsExhausted(max_attempts);
}

std::uint64_t ar_count_acceptances(const OoaLabels& s, double alpha, ArMethod method,
                                   std::uint64_t proposals, RngStream& rng) {
  if (s.size() == 0) fail(ErrorCategory::invalid_argument, "empty label vector");
  if (!(alpha > 0.0)) fail(ErrorCategory::domain, "alpha must be positive");
  const std::vector<int> s_sizes = summarize(s).sizes_ooa;
  const std::vector<int> s_sorted = sorted_copy(s_sizes);
  const int n = static_cast<int>(s.size());
  std::uint64_t accepted = 0;
  for (std::uint64_t i = 0; i < proposals; ++i) {
    if (accepts(propose(n, alpha, rng), s, s_sizes, s_sorted, method)) ++accepted;
  }
  return accepted;
}

double log_ar_acceptance_rate(std::span<const int> sizes_ooa, double alpha, ArMethod method) {
  switch (method) {
    case ArMethod::exact_pattern:
      return log_eppf(sizes_ooa, alpha);
    case ArMethod::ordered_sizes:
      return log_p_ooa(sizes_ooa, alpha);
    case ArMethod::sorted_sizes: {
      // number of set partitions sharing the block-size profile, times the EPPF
      const double base = log_eppf(sizes_ooa, alpha);
      const std::vector<int> m = multiplicities(sizes_ooa);
      const int n = static_cast<int>(m.size());
      double log_count = std::lgamma(n + 1.0);
      for (int i = 1; i <= n; ++i) {
        if (m[i - 1] == 0) continue;
        log_count -= std::lgamma(m[i - 1] + 1.0) + m[i - 1] * std::lgamma(i + 1.0);
      }
      return log_count + base;
    }
  }
  fail(ErrorCategory::invalid_argument, "unknown accept-reject method");
}

double ar_acceptance_rate(std::span<const int> sizes_ooa, double alpha, ArMethod method) {
  return std::exp(log_ar_acceptance_rate(sizes_ooa, alpha, method));
}

}  // namespace dpmix
