// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/sis.hpp"

#include <cmath>

#include "dpmix/error.hpp"

namespace dpmix {

SisS2::SisS2(const Dataset& data, const ModelSpec& model)
    : data_(data), family_(model, data.size()) {
  if (data_.size() == 0) fail(ErrorCategory::invalid_argument, "empty dataset");
  if (data_.trials != model.trials)
    fail(ErrorCategory::invalid_argument, "dataset and model disagree on trials");
  data_.validate();
}

WeightedDraw SisS2::draw(RngStream& rng) {
  const double alpha = family_.model().alpha;
  const std::size_t n = data_.size();
  const ClusterSuffStats empty;
  clusters_.clear();
  std::vector<int> s;
  s.reserve(n);
  double log_weight = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int yi = data_.y[i];
    prob_.clear();
    double total = 0.0;
    for (const auto& c : clusters_) {
      const double p = c.count * std::exp(family_.log_predictive(yi, c));
      prob_.push_back(p);
      total += p;
    }
    const double p_new = alpha * std::exp(family_.log_predictive(yi, empty));
    total += p_new;
    // one-step predictive: the urn weights sum to alpha + i
    log_weight += std::log(total / (alpha + static_cast<double>(i)));

    double u = rng.uniform() * total;
    std::size_t label = clusters_.size();
    for (std::size_t c = 0; c < prob_.size(); ++c) {
      if (u < prob_[c]) {
        label = c;
        break;
      }
      u -= prob_[c];
    }
    if (label == clusters_.size()) clusters_.emplace_back();
    family_.add(clusters_[label], yi);
    s.push_back(static_cast<int>(label) + 1);
  }
  WeightedDraw out;
  out.s = OoaLabels(std::move(s));
  out.log_weight = log_weight;
  std::vector<double> atoms(clusters_.size());
  for (std::size_t c = 0; c < clusters_.size(); ++c) atoms[c] = family_.draw_atom(clusters_[c], rng);
  out.theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.theta[i] = atoms[out.s[i] - 1];
  return out;
}

WeightedDraw sis_s2(const Dataset& data, const ModelSpec& model, RngStream& rng) {
  return SisS2(data, model).draw(rng);
}

}  // namespace dpmix
