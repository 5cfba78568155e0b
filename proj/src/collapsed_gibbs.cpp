// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/collapsed_gibbs.hpp"

#include <cmath>

#include "dpmix/error.hpp"

namespace dpmix {

std::vector<ClusterSuffStats> cluster_stats(const OoaLabels& s, const Dataset& data) {
  if (s.size() != data.size())
    fail(ErrorCategory::invalid_argument, "labels and observations differ in length");
  std::vector<ClusterSuffStats> out(s.cluster_count());
  for (std::size_t i = 0; i < s.size(); ++i) {
    ClusterSuffStats& st = out[s[i] - 1];
    ++st.count;
    st.success_sum += data.y[i];
    st.failure_sum += data.trials - data.y[i];
  }
  return out;
}

CollapsedState initial_collapsed_state(const Dataset& data, const ModelSpec& model,
                                       RngStream& rng) {
  if (data.size() == 0) fail(ErrorCategory::invalid_argument, "empty dataset");
  if (data.trials != model.trials)
    fail(ErrorCategory::invalid_argument, "dataset and model disagree on trials");
  data.validate();
  CollapsedState st;
  st.s = OoaLabels(std::vector<int>(data.size(), 1));
  st.clusters = cluster_stats(st.s, data);
  st.theta.assign(data.size(), sample_atom_posterior(st.clusters[0], model, rng));
  return st;
}

CollapsedGibbs::CollapsedGibbs(const Dataset& data, const ModelSpec& model,
                               const CollapsedState& init)
    : data_(data), family_(model, data.size()), state_(init) {
  if (data.trials != model.trials)
    fail(ErrorCategory::invalid_argument, "dataset and model disagree on trials");
  data_.validate();
  if (state_.s.size() != data_.size() || state_.theta.size() != data_.size())
    fail(ErrorCategory::invalid_argument, "state does not match the dataset");
  if (state_.clusters != cluster_stats(state_.s, data_))
    fail(ErrorCategory::invalid_argument, "cluster statistics do not match the labels");
}

void CollapsedGibbs::sweep(RngStream& rng) {
  const std::size_t n = data_.size();
  const double alpha = family_.model().alpha;
  slot_.assign(state_.s.values().begin(), state_.s.values().end());
  for (int& x : slot_) --x;
  slots_ = state_.clusters;
  free_slots_.clear();

  const ClusterSuffStats empty;
  for (std::size_t i = 0; i < n; ++i) {
    const int yi = data_.y[i];
    ClusterSuffStats& own = slots_[slot_[i]];
    family_.remove(own, yi);
    if (own.empty()) free_slots_.push_back(slot_[i]);

    occupied_.clear();
    prob_.clear();
    double total = 0.0;
    for (std::size_t c = 0; c < slots_.size(); ++c) {
      if (slots_[c].empty()) continue;
      const double p = slots_[c].count * std::exp(family_.log_predictive(yi, slots_[c]));
      occupied_.push_back(static_cast<int>(c));
      prob_.push_back(p);
      total += p;
    }
    const double p_new = alpha * std::exp(family_.log_predictive(yi, empty));
    total += p_new;

    double u = rng.uniform() * total;
    int chosen = -1;
    for (std::size_t j = 0; j < prob_.size(); ++j) {
      if (u < prob_[j]) {
        chosen = occupied_[j];
        break;
      }
      u -= prob_[j];
    }
    if (chosen < 0) {
      if (!free_slots_.empty()) {
        chosen = free_slots_.back();
        free_slots_.pop_back();
      } else {
        chosen = static_cast<int>(slots_.size());
        slots_.emplace_back();
      }
    }
    family_.add(slots_[chosen], yi);
    slot_[i] = chosen;
  }
  canonicalize(rng);
}

void CollapsedGibbs::canonicalize(RngStream& rng) {
  const std::size_t n = data_.size();
  std::vector<int> rank(slots_.size(), 0);
  std::vector<int> labels(n);
  int k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int& r = rank[slot_[i]];
    if (r == 0) r = ++k;
    labels[i] = r;
  }
  std::vector<ClusterSuffStats> clusters(k);
  for (std::size_t c = 0; c < slots_.size(); ++c)
    if (rank[c] != 0) clusters[rank[c] - 1] = slots_[c];
  std::vector<double> atoms(k);
  for (int j = 0; j < k; ++j) atoms[j] = family_.draw_atom(clusters[j], rng);

  state_.s = OoaLabels(std::move(labels));
  state_.clusters = std::move(clusters);
  for (std::size_t i = 0; i < n; ++i) state_.theta[i] = atoms[state_.s[i] - 1];
}

CollapsedState collapsed_gibbs_sweep(const CollapsedState& state, const Dataset& data,
                                     const ModelSpec& model, RngStream& rng) {
  CollapsedGibbs sampler(data, model, state);
  sampler.sweep(rng);
  return sampler.state();
}

}  // namespace dpmix
