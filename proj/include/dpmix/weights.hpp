// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <vector>

#include "dpmix/encodings.hpp"
#include "dpmix/rng.hpp"

namespace dpmix {

enum class WeightOrder { stick, appearance };

// Breaks below this residual are still taken but counted as guarded.
inline constexpr double kTailGuardResidual = 1e-12;

// Break fractions v_h; the h-th weight is v_h times the product of (1 - v_l)
// over l < h.
struct BreakFractions {
  std::vector<double> v;
};

// Finite prefix of an infinite weight sequence plus the mass not yet broken off.
// The prefix is extended one Beta(1, alpha) break at a time as needed.
class WeightState {
 public:
  explicit WeightState(WeightOrder order = WeightOrder::stick) : order_(order) {}
  // Validates that every weight is positive, the residual is positive and the
  // total is one within 1e-12.
  WeightState(std::vector<double> weights, double residual, WeightOrder order);

  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(std::size_t h) const { return weights_[h]; }
  std::size_t size() const noexcept { return weights_.size(); }
  double residual() const noexcept { return residual_; }
  WeightOrder order() const noexcept { return order_; }
  // Breaks that were taken from a residual below kTailGuardResidual.
  std::size_t guarded_breaks() const noexcept { return guarded_breaks_; }

  // Break a fraction v of the residual off as the next weight. Throws a
  // tail_guard error if the residual has underflowed to zero.
  void append_break(double v);

  // Draw a Beta(1, alpha) fraction and append it. Returns the new weight.
  double extend(double alpha, RngStream& rng, BreakFractions* breaks = nullptr);

  double total() const;

 private:
  std::vector<double> weights_;
  double residual_ = 1.0;
  WeightOrder order_;
  std::size_t guarded_breaks_ = 0;
};

// Weights implied by break fractions, with the unbroken remainder as residual.
WeightState weights_from_breaks(const BreakFractions& breaks, WeightOrder order);

// Inverse-CDF draw of a 1-based index with probability proportional to its
// weight; a draw that lands in the residual extends the prefix until covered.
int draw_index(WeightState& state, double alpha, RngStream& rng,
               BreakFractions* breaks = nullptr);

// Sequential size-biased sampling without replacement from a lazily extended
// weight sequence.
class SizeBiasedSampler {
 public:
  SizeBiasedSampler(WeightState& state, double alpha, BreakFractions* breaks = nullptr);

  // Next 1-based index, drawn with probability proportional to its weight among
  // indices not yet drawn.
  int next(RngStream& rng);

  const std::vector<int>& drawn() const noexcept { return drawn_; }

 private:
  WeightState& state_;
  double alpha_;
  BreakFractions* breaks_;
  std::vector<char> used_;
  std::vector<int> drawn_;
};

}  // namespace dpmix
