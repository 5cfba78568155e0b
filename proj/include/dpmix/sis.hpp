// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <vector>

#include "dpmix/encodings.hpp"
#include "dpmix/model.hpp"
#include "dpmix/rng.hpp"

namespace dpmix {

struct WeightedDraw {
  OoaLabels s;
  std::vector<double> theta;  // per observation
  double log_weight = 0.0;
};

// Sequential importance sampler with the atoms integrated out (S2). Labels are
// drawn in data order from the one-step posterior; the importance weight is the
// product of one-step predictives p(y_i | y_1..y_{i-1}, s_1..s_{i-1}). Atoms are
// drawn from their cluster posteriors at the end.
class SisS2 {
 public:
  SisS2(const Dataset& data, const ModelSpec& model);

  WeightedDraw draw(RngStream& rng);

 private:
  Dataset data_;
  BetaBinomial family_;
  std::vector<ClusterSuffStats> clusters_;
  std::vector<double> prob_;
};

WeightedDraw sis_s2(const Dataset& data, const ModelSpec& model, RngStream& rng);

}  // namespace dpmix
