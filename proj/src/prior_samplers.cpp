// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/prior_samplers.hpp"

#include <cmath>

#include "dpmix/error.hpp"

namespace dpmix {

namespace {

void check_n_alpha(int n, double alpha) {
  if (n < 1) fail(ErrorCategory::invalid_argument, "n must be at least 1");
  if (!(alpha > 0.0)) fail(ErrorCategory::domain, "alpha must be positive");
}

}  // namespace

OoaLabels polya_urn_sample(int n, double alpha, RngStream& rng) {
  check_n_alpha(n, alpha);
  std::vector<int> s{1};
  std::vector<int> sizes{1};
  s.reserve(n);
  for (int i = 1; i < n; ++i) {
    // i observations seated so far
    double u = rng.uniform() * (alpha + i);
    int label = 0;
    for (std::size_t l = 0; l < sizes.size(); ++l) {
      if (u < sizes[l]) {
        label = static_cast<int>(l) + 1;
        break;
      }
      u -= sizes[l];
    }
    if (label == 0) {
      sizes.push_back(0);
      label = static_cast<int>(sizes.size());
    }
    ++sizes[label - 1];
    s.push_back(label);
  }
  return OoaLabels(std::move(s));
}

StickBreakingDraw stick_breaking_sample(int n, double alpha, RngStream& rng) {
  check_n_alpha(n, alpha);
  StickBreakingDraw out;
  std::vector<int> r;
  r.reserve(n);
  for (int i = 0; i < n; ++i) r.push_back(draw_index(out.w, alpha, rng, &out.v));
  out.r = SbLabels(std::move(r));
  return out;
}

AppearanceMap size_biased_permutation(WeightState& state, int count, double alpha,
                                      RngStream& rng, BreakFractions* breaks) {
  if (count < 1) fail(ErrorCategory::invalid_argument, "count must be at least 1");
  if (!(alpha > 0.0)) fail(ErrorCategory::domain, "alpha must be positive");
  SizeBiasedSampler sampler(state, alpha, breaks);
  for (int j = 0; j < count; ++j) sampler.next(rng);
  return AppearanceMap(sampler.drawn());
}

AppearanceMap size_biased_cover(WeightState& weights, int k, double alpha, RngStream& rng,
                                BreakFractions* breaks) {
  if (k < 1) fail(ErrorCategory::invalid_argument, "k must be at least 1");
  if (static_cast<int>(weights.size()) < k)
    fail(ErrorCategory::invalid_argument, "weight prefix shorter than the number of clusters");
  SizeBiasedSampler sampler(weights, alpha, breaks);
  int covered = 0;
  while (covered < k) {
    if (sampler.next(rng) <= k) ++covered;
  }
  return AppearanceMap(sampler.drawn());
}

WeightState relabel_weights(const WeightState& weights, const AppearanceMap& picks,
                            WeightOrder order) {
  std::vector<char> picked(weights.size(), 0);
  std::vector<double> out;
  out.reserve(picks.size());
  for (int idx : picks.values()) {
    if (idx < 1 || static_cast<std::size_t>(idx) > weights.size())
      fail(ErrorCategory::invalid_argument, "pick outside the weight prefix");
    out.push_back(weights.weight(idx - 1));
    picked[idx - 1] = 1;
  }
  double residual = weights.residual();
  for (std::size_t h = 0; h < weights.size(); ++h)
    if (!picked[h]) residual += weights.weight(h);
  return WeightState(std::move(out), residual, order);
}

WeightedUrnDraw weighted_urn_sample(int n, double alpha, RngStream& rng) {
  check_n_alpha(n, alpha);
  WeightedUrnDraw out;
  std::vector<int> s{1};
  s.reserve(n);
  out.wtilde.extend(alpha, rng, &out.vtilde);
  for (int i = 1; i < n; ++i) {
    double u = rng.uniform() * out.wtilde.total();
    int label = 0;
    for (std::size_t j = 0; j < out.wtilde.size(); ++j) {
      if (u < out.wtilde.weight(j)) {
        label = static_cast<int>(j) + 1;
        break;
      }
      u -= out.wtilde.weight(j);
    }
    if (label == 0) {
      out.wtilde.extend(alpha, rng, &out.vtilde);
      label = static_cast<int>(out.wtilde.size());
    }
    s.push_back(label);
  }
  out.s = OoaLabels(std::move(s));
  const int k = out.s.cluster_count();
  // Weights for clusters that were not observed stay in the residual; the
  // size-biased step breaks them lazily.
  out.t = size_biased_cover(out.wtilde, k, alpha, rng, &out.vtilde);
  out.w = relabel_weights(out.wtilde, out.t, WeightOrder::stick);
  out.r = compose(out.s, t_to_rstar(out.t, k));
  return out;
}

double log_polya_path_probability(const OoaLabels& s, double alpha) {
  if (!(alpha > 0.0)) fail(ErrorCategory::domain, "alpha must be positive");
  std::vector<int> sizes;
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int label = s[i];
    if (i > 0) {
      const double denom = alpha + static_cast<double>(i);
      const double num = label > static_cast<int>(sizes.size()) ? alpha : sizes[label - 1];
      acc += std::log(num / denom);
    }
    if (label > static_cast<int>(sizes.size())) sizes.push_back(0);
    ++sizes[label - 1];
  }
  return acc;
}

}  // namespace dpmix
