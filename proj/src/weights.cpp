// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/weights.hpp"

#include <cmath>
#include <numeric>

#include "dpmix/error.hpp"

namespace dpmix {

WeightState::WeightState(std::vector<double> weights, double residual, WeightOrder order)
    : weights_(std::move(weights)), residual_(residual), order_(order) {
  for (double w : weights_)
    if (!(w > 0.0)) fail(ErrorCategory::invalid_argument, "weights must be positive");
  if (!(residual_ > 0.0)) fail(ErrorCategory::invalid_argument, "residual must be positive");
  if (std::abs(total() - 1.0) > 1e-12)
    fail(ErrorCategory::invalid_argument, "weights and residual do not sum to one");
}

void WeightState::append_break(double v) {
  if (!(residual_ > 0.0))
    fail(ErrorCategory::tail_guard, "stick residual underflowed to zero");
  if (residual_ < kTailGuardResidual) ++guarded_breaks_;
  const double w = v * residual_;
  const double rest = (1.0 - v) * residual_;
  if (!(w > 0.0) || !(rest > 0.0))
    fail(ErrorCategory::tail_guard, "stick break underflowed to zero");
  weights_.push_back(w);
  residual_ = rest;
}

double WeightState::extend(double alpha, RngStream& rng, BreakFractions* breaks) {
  const double v = rng.beta(1.0, alpha);
  append_break(v);
  if (breaks != nullptr) breaks->v.push_back(v);
  return weights_.back();
}

double WeightState::total() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0) + residual_;
}

WeightState weights_from_breaks(const BreakFractions& breaks, WeightOrder order) {
  WeightState state(order);
  for (double v : breaks.v) state.append_break(v);
  return state;
}

int draw_index(WeightState& state, double alpha, RngStream& rng, BreakFractions* breaks) {
  double u = rng.uniform() * state.total();
  for (std::size_t h = 0; h < state.size(); ++h) {
    if (u < state.weight(h)) return static_cast<int>(h) + 1;
    u -= state.weight(h);
  }
  // The point lies in the unbroken remainder: break sticks until it is covered.
  while (true) {
    if (u >= state.residual()) return static_cast<int>(state.size());  // rounding
    const double w = state.extend(alpha, rng, breaks);
    if (u < w) return static_cast<int>(state.size());
    u -= w;
  }
}

SizeBiasedSampler::SizeBiasedSampler(WeightState& state, double alpha, BreakFractions* breaks)
    : state_(state), alpha_(alpha), breaks_(breaks), used_(state.size(), 0) {}

int SizeBiasedSampler::next(RngStream& rng) {
  used_.resize(state_.size(), 0);
  double remaining = state_.residual();
  for (std::size_t h = 0; h < state_.size(); ++h)
    if (!used_[h]) remaining += state_.weight(h);

  double u = rng.uniform() * remaining;
  int pick = 0;
  int last_candidate = 0;
  for (std::size_t h = 0; h < state_.size() && pick == 0; ++h) {
    if (used_[h]) continue;
    last_candidate = static_cast<int>(h) + 1;
    if (u < state_.weight(h)) {
      pick = last_candidate;
    } else {
      u -= state_.weight(h);
    }
  }
  while (pick == 0) {
    if (u >= state_.residual() && last_candidate != 0) {
      pick = last_candidate;  // rounding
      break;
    }
    const double w = state_.extend(alpha_, rng, breaks_);
    used_.push_back(0);
    last_candidate = static_cast<int>(state_.size());
    if (u < w) {
      pick = last_candidate;
    } else {
      u -= w;
    }
  }
  used_[pick - 1] = 1;
  drawn_.push_back(pick);
  return pick;
}

}  // namespace dpmix
