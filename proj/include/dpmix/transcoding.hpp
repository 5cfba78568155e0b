// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <utility>

#include "dpmix/encodings.hpp"
#include "dpmix/rng.hpp"
#include "dpmix/weights.hpp"

namespace dpmix {

// One exact draw of (r, w, t, w~) given the partition s.
struct TranscodeDraw {
  SbLabels r;
  DistinctFirsts r_star;
  // t[h] is the appearance rank of stick h + 1, for sticks 1..H.
  AppearanceMap t_prefix;
  WeightState wtilde{WeightOrder::appearance};
  // w[h] = wtilde[t[h] - 1], copied.
  WeightState w_prefix{WeightOrder::stick};
  BreakFractions vtilde;
};

// Appearance-order break fractions given the cluster sizes:
// v~_i ~ Beta(n~_i, alpha + sum_{l > i} n~_l), independently. The residual of
// the returned weights is the mass of all clusters not yet observed.
std::pair<BreakFractions, WeightState> sample_wtilde_given_s(const PartitionSummary& summary,
                                                             double alpha, RngStream& rng);

// Size-biased appearance ranks of the sticks, t_1, t_2, ..., stopping at the
// first H with {1..k} contained in {t_1..t_H}. Ranks beyond the current prefix
// of w~ are broken off its residual with Beta(1, alpha) fractions, which are
// appended to `vtilde` when given.
AppearanceMap sample_t_given_wtilde(WeightState& wtilde, int k, double alpha, RngStream& rng,
                                    BreakFractions* vtilde = nullptr);

TranscodeDraw transcode(const OoaLabels& s, double alpha, RngStream& rng);

}  // namespace dpmix
