// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include "dpmix/encodings.hpp"
#include "dpmix/rng.hpp"
#include "dpmix/weights.hpp"

namespace dpmix {

// Chinese-restaurant (Polya urn) draw of n labels in order of appearance.
OoaLabels polya_urn_sample(int n, double alpha, RngStream& rng);

struct StickBreakingDraw {
  SbLabels r;
  WeightState w{WeightOrder::stick};
  BreakFractions v;
};

// Stick-breaking draw of n stick labels; the weights are broken lazily, only as
// far as the allocations require.
StickBreakingDraw stick_breaking_sample(int n, double alpha, RngStream& rng);

// First `count` picks of a size-biased permutation of the weights in `state`.
// The state is extended in place when a pick lands in the residual.
AppearanceMap size_biased_permutation(WeightState& state, int count, double alpha,
                                      RngStream& rng, BreakFractions* breaks = nullptr);

// Size-biased picks from `weights` until every index 1..k has been picked.
// Entry h of the result is the index picked h-th.
AppearanceMap size_biased_cover(WeightState& weights, int k, double alpha, RngStream& rng,
                                BreakFractions* breaks = nullptr);

// Reorder a weight sequence by a pick sequence: entry h is weights[picks[h] - 1].
// Values are copied, never recomputed. The residual is the mass of unpicked
// entries plus the source residual.
WeightState relabel_weights(const WeightState& weights, const AppearanceMap& picks,
                            WeightOrder order);

struct WeightedUrnDraw {
  OoaLabels s;
  WeightState wtilde{WeightOrder::appearance};
  BreakFractions vtilde;
  AppearanceMap t;
  WeightState w{WeightOrder::stick};
  SbLabels r;
};

// Urn sampler carrying explicit appearance-order weights: s_1 = 1 with
// w~_1 ~ Beta(1, alpha); later labels repeat cluster j with probability w~_j or
// open a new cluster with the unassigned mass, whose weight is then broken off
// the residual. The stick-order weights w and labels r follow from a size-biased
// permutation of w~.
WeightedUrnDraw weighted_urn_sample(int n, double alpha, RngStream& rng);

// Exact probability of one order-of-appearance label path under the urn.
double log_polya_path_probability(const OoaLabels& s, double alpha);

}  // namespace dpmix
