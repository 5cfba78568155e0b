// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/transcoding.hpp"

#include "dpmix/error.hpp"
#include "dpmix/prior_samplers.hpp"

namespace dpmix {

std::pair<BreakFractions, WeightState> sample_wtilde_given_s(const PartitionSummary& summary,
                                                             double alpha, RngStream& rng) {
  if (!(alpha > 0.0)) fail(ErrorCategory::domain, "alpha must be positive");
  if (summary.k < 1 || static_cast<int>(summary.sizes_ooa.size()) != summary.k)
    fail(ErrorCategory::invalid_argument, "partition summary has no clusters");
  BreakFractions breaks;
  breaks.v.reserve(summary.k);
  long tail = summary.n;
  for (int i = 0; i < summary.k; ++i) {
    const int ni = summary.sizes_ooa[i];
    if (ni < 1) fail(ErrorCategory::invalid_argument, "cluster sizes must be positive");
    tail -= ni;
    breaks.v.push_back(rng.beta(static_cast<double>(ni), alpha + static_cast<double>(tail)));
  }
  if (tail != 0) fail(ErrorCategory::invalid_argument, "cluster sizes do not sum to n");
  WeightState wtilde = weights_from_breaks(breaks, WeightOrder::appearance);
  return {std::move(breaks), std::move(wtilde)};
}

AppearanceMap sample_t_given_wtilde(WeightState& wtilde, int k, double alpha, RngStream& rng,
                                    BreakFractions* vtilde) {
  if (!(alpha > 0.0)) fail(ErrorCategory::domain, "alpha must be positive");
  return size_biased_cover(wtilde, k, alpha, rng, vtilde);
}

TranscodeDraw transcode(const OoaLabels& s, double alpha, RngStream& rng) {
  const PartitionSummary summary = summarize(s);
  TranscodeDraw out;
  auto [vtilde, wtilde] = sample_wtilde_given_s(summary, alpha, rng);
  out.vtilde = std::move(vtilde);
  out.wtilde = std::move(wtilde);
  out.t_prefix = sample_t_given_wtilde(out.wtilde, summary.k, alpha, rng, &out.vtilde);
  out.w_prefix = relabel_weights(out.wtilde, out.t_prefix, WeightOrder::stick);
  out.r_star = t_to_rstar(out.t_prefix, summary.k);
  out.r = compose(s, out.r_star);
  return out;
}

}  // namespace dpmix
