// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <vector>

#include "dpmix/encodings.hpp"
#include "dpmix/model.hpp"
#include "dpmix/rng.hpp"

namespace dpmix {

// Partition plus per-cluster statistics (clusters[j] belongs to label j + 1) and
// per-observation atoms, equal within a cluster.
struct CollapsedState {
  OoaLabels s;
  std::vector<ClusterSuffStats> clusters;
  std::vector<double> theta;
};

// All observations in one cluster, with its atom drawn from the posterior.
CollapsedState initial_collapsed_state(const Dataset& data, const ModelSpec& model,
                                       RngStream& rng);

// Collapsed Gibbs sampler for a conjugate DP mixture (Neal's algorithm 2 with
// the atoms integrated out during reassignment). Each observation is reassigned
// in turn with probability proportional to n_{-i,c} p(y_i | cluster c) for an
// occupied cluster and alpha p(y_i) for a new one. Labels are put back in order
// of appearance and atoms redrawn from their posteriors at the end of a sweep.
class CollapsedGibbs {
 public:
  CollapsedGibbs(const Dataset& data, const ModelSpec& model, const CollapsedState& init);

  void sweep(RngStream& rng);

  const CollapsedState& state() const noexcept { return state_; }
  const Dataset& data() const noexcept { return data_; }

 private:
  void canonicalize(RngStream& rng);

  Dataset data_;
  BetaBinomial family_;
  CollapsedState state_;
  // working storage during a sweep: slot per observation, stats per slot
  std::vector<int> slot_;
  std::vector<ClusterSuffStats> slots_;
  std::vector<int> free_slots_;
  std::vector<int> occupied_;
  std::vector<double> prob_;
};

CollapsedState collapsed_gibbs_sweep(const CollapsedState& state, const Dataset& data,
                                     const ModelSpec& model, RngStream& rng);

// Recompute cluster statistics from scratch for a labelling.
std::vector<ClusterSuffStats> cluster_stats(const OoaLabels& s, const Dataset& data);

}  // namespace dpmix
