// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dpmix/collapsed_gibbs.hpp"
#include "dpmix/model.hpp"
#include "dpmix/rng.hpp"
#include "dpmix/sis.hpp"
#include "dpmix/transcoding.hpp"

namespace dpmix {

enum class CoreSampler { collapsed2, sis_s2 };

CoreSampler core_sampler_from_string(std::string_view name);
std::string_view to_string(CoreSampler core);

// Sub-stream ids forked off a chain's stream.
inline constexpr std::uint64_t kCoreStream = 0;
inline constexpr std::uint64_t kAugmentStream = 1;

// A partition sampler producing s | y: successive sweeps of collapsed Gibbs, or
// independent SIS replicates carrying importance weights.
class CoreChain {
 public:
  CoreChain(CoreSampler core, const Dataset& data, const ModelSpec& model, RngStream stream);

  void advance();

  CoreSampler kind() const noexcept { return kind_; }
  const OoaLabels& s() const noexcept;
  const std::vector<double>& theta() const noexcept;
  std::optional<double> log_weight() const noexcept;

 private:
  CoreSampler kind_;
  RngStream stream_;
  std::unique_ptr<CollapsedGibbs> gibbs_;
  std::unique_ptr<SisS2> sis_;
  WeightedDraw last_sis_;
};

struct AugmentedDraw {
  OoaLabels s;
  std::vector<double> theta;         // per observation, from the core
  std::optional<double> log_weight;  // SIS cores only
  TranscodeDraw trans;
  std::vector<double> m;  // atoms of sticks 1..H
};

// Stick atoms for the sticks of a transcoded draw. Occupied sticks take the
// core's theta values; the other sticks in the prefix get fresh base-measure
// draws. Without theta, occupied atoms are drawn from their conjugate
// posteriors given the cluster's data.
std::vector<double> recover_atoms(const TranscodeDraw& trans,
                                  std::optional<std::span<const double>> theta,
                                  const Dataset& data, const ModelSpec& model, RngStream& rng);

// Core sampler for s | y followed by a transcoding draw and atom recovery per
// iteration. The core and the augmentation read separate forks of the chain
// stream, so the s-trajectory equals that of CoreChain(core, ..., stream.fork(kCoreStream)).
class TranscodingSampler {
 public:
  TranscodingSampler(CoreSampler core, const Dataset& data, const ModelSpec& model,
                     const RngStream& chain_stream);

  // Advance the core by one iteration without augmenting it.
  void advance_core();
  // Augment the current core state.
  const AugmentedDraw& augment();
  // advance_core() followed by augment().
  const AugmentedDraw& next();

  const CoreChain& core() const noexcept { return core_; }
  const AugmentedDraw& current() const noexcept { return draw_; }

 private:
  Dataset data_;
  ModelSpec model_;
  CoreChain core_;
  RngStream augment_stream_;
  AugmentedDraw draw_;
};

std::vector<AugmentedDraw> run_transcoding_sampler(CoreSampler core, const Dataset& data,
                                                   const ModelSpec& model, int iterations,
                                                   const RngStream& rng);

}  // namespace dpmix
