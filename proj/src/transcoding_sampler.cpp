// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/transcoding_sampler.hpp"

#include <string>

#include "dpmix/error.hpp"

namespace dpmix {

CoreSampler core_sampler_from_string(std::string_view name) {
  if (name == "collapsed2") return CoreSampler::collapsed2;
  if (name == "sis_s2") return CoreSampler::sis_s2;
  fail(ErrorCategory::invalid_argument, "unknown core sampler '" + std::string(name) + "'");
}

std::string_view to_string(CoreSampler core) {
  return core == CoreSampler::collapsed2 ? "collapsed2" : "sis_s2";
}

CoreChain::CoreChain(CoreSampler core, const Dataset& data, const ModelSpec& model,
                     RngStream stream)
    : kind_(core), stream_(std::move(stream)) {
  if (core == CoreSampler::collapsed2) {
    CollapsedState init = initial_collapsed_state(data, model, stream_);
    gibbs_ = std::make_unique<CollapsedGibbs>(data, model, init);
  } else {
    sis_ = std::make_unique<SisS2>(data, model);
  }
}

void CoreChain::advance() {
  if (gibbs_) {
    gibbs_->sweep(stream_);
  } else {
    last_sis_ = sis_->draw(stream_);
  }
}

const OoaLabels& CoreChain::s() const noexcept {
  return gibbs_ ? gibbs_->state().s : last_sis_.s;
}

const std::vector<double>& CoreChain::theta() const noexcept {
  return gibbs_ ? gibbs_->state().theta : last_sis_.theta;
}

std::optional<double> CoreChain::log_weight() const noexcept {
  if (gibbs_) return std::nullopt;
  return last_sis_.log_weight;
}

std::vector<double> recover_atoms(const TranscodeDraw& trans,
                                  std::optional<std::span<const double>> theta,
                                  const Dataset& data, const ModelSpec& model, RngStream& rng) {
  const std::size_t n = trans.r.size();
  if (data.size() != n)
    fail(ErrorCategory::invalid_argument, "transcoded labels and observations differ in length");
  if (theta && theta->size() != n)
    fail(ErrorCategory::invalid_argument, "theta is not aligned with the observations");
  const std::size_t H = trans.t_prefix.size();
  BetaBinomial family(model);
  std::vector<double> m(H, 0.0);
  std::vector<char> occupied(H, 0);
  std::vector<ClusterSuffStats> stats(theta ? 0 : H);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = static_cast<std::size_t>(trans.r[i]) - 1;
    if (h >= H) fail(ErrorCategory::invalid_argument, "stick label beyond the transcoded prefix");
    if (theta) {
      if (occupied[h] && m[h] != (*theta)[i])
        fail(ErrorCategory::invalid_argument, "theta differs within a cluster");
      m[h] = (*theta)[i];
    } else {
      family.add(stats[h], data.y[i]);
    }
    occupied[h] = 1;
  }
  const ClusterSuffStats empty;
  for (std::size_t h = 0; h < H; ++h) {
    if (!occupied[h]) {
      m[h] = family.draw_atom(empty, rng);
    } else if (!theta) {
      m[h] = family.draw_atom(stats[h], rng);
    }
  }
  return m;
}

TranscodingSampler::TranscodingSampler(CoreSampler core, const Dataset& data,
                                       const ModelSpec& model, const RngStream& chain_stream)
    : data_(data),
      model_(model),
      core_(core, data, model, chain_stream.fork(kCoreStream)),
      augment_stream_(chain_stream.fork(kAugmentStream)) {}

void TranscodingSampler::advance_core() {
  core_.advance();
}

const AugmentedDraw& TranscodingSampler::augment() {
  draw_.s = core_.s();
  draw_.theta = core_.theta();
  draw_.log_weight = core_.log_weight();
  draw_.trans = transcode(draw_.s, model_.alpha, augment_stream_);
  draw_.m = recover_atoms(draw_.trans, std::span<const double>(draw_.theta), data_, model_,
                          augment_stream_);
  return draw_;
}

const AugmentedDraw& TranscodingSampler::next() {
  advance_core();
  return augment();
}

std::vector<AugmentedDraw> run_transcoding_sampler(CoreSampler core, const Dataset& data,
                                                   const ModelSpec& model, int iterations,
                                                   const RngStream& rng) {
  if (iterations < 1) fail(ErrorCategory::invalid_argument, "iterations must be at least 1");
  TranscodingSampler sampler(core, data, model, rng);
  std::vector<AugmentedDraw> out;
  out.reserve(iterations);
  for (int it = 0; it < iterations; ++it) out.push_back(sampler.next());
  return out;
}

}  // namespace dpmix
