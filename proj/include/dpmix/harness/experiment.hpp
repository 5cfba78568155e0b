// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpmix/diagnostics.hpp"
#include "dpmix/model.hpp"
#include "dpmix/slice_sampler.hpp"
#include "dpmix/transcoding.hpp"

namespace dpmix::harness {

enum class SamplerKind { slice, collapsed2, sis_s2 };

SamplerKind sampler_from_string(std::string_view name);
std::string_view to_string(SamplerKind kind);

struct ExperimentConfig {
  SamplerKind sampler = SamplerKind::collapsed2;
  // Wrap a collapsed2 or sis_s2 core in the transcoding sampler.
  bool transcode = false;
  long iterations = 100'000;
  double burn_in = 0.1;
  double alpha = 1.0;
  double base_a = 1.0;
  double base_b = 1.0;
  int trials = 0;  // 0 takes J from the dataset header
  std::optional<std::uint64_t> seed;
  std::uint64_t chain = 0;  // stream id
  std::string dataset;
  std::string output_dir;
  MoveSet moves;  // slice only
  long transcode_every = 1;
  std::size_t max_sticks = 10'000;
  bool record_timing = false;

  void validate() const;
  long burn_in_iterations() const;
  // "slice", "slice+m13", "collapsed2+transcoding", ...
  std::string label() const;
};

// Functional table column names, in file order.
inline constexpr std::array<std::string_view, 8> kChainColumns{
    "iter", "K", "D", "theta1", "r1", "w1", "m1", "w_r1"};

// Monitored functionals, in file order after iter.
inline constexpr std::array<std::string_view, 7> kFunctionalNames{
    "K", "D", "theta1", "r1", "w1", "m1", "w_r1"};

// One recorded iteration. Stick functionals are NaN for cores that were not
// transcoded.
struct ChainRow {
  long iter = 0;
  Functionals f;
};

struct StickRow {
  double w1 = 0.0, w2 = 0.0, wt1 = 0.0, wt2 = 0.0;
};

// w_1, w_2 and w~_1, w~_2 of a transcoded draw. A second weight outside the
// materialized prefix is broken off the remaining mass with a Beta(1, alpha)
// fraction drawn from `rng`.
StickRow stick_row(const TranscodeDraw& draw, double alpha, RngStream& rng);

struct ChainRecord {
  std::vector<ChainRow> rows;
  std::vector<double> log_weights;  // SIS cores
  std::vector<StickRow> sticks;     // transcoded cores
  std::optional<MoveCounters> moves;
  std::optional<double> wall_seconds;
  bool has_stick_functionals = false;

  std::vector<double> column(std::string_view functional) const;
};

struct FunctionalSummary {
  std::string name;
  double mean = 0.0;            // self-normalized for weighted records
  std::optional<IatEstimate> iat;  // empty for constant or unavailable series
  bool available = true;
};

struct ChainSummary {
  std::size_t rows = 0;
  std::vector<FunctionalSummary> functionals;  // kFunctionalNames order
  std::optional<double> ess;

  const FunctionalSummary& at(std::string_view name) const;
};

ChainSummary summarize_chain(const ChainRecord& record);

// Runs the configured sampler on `data`. Iterations 1..burn are discarded and
// every transcode_every-th of the rest is recorded. Component errors are
// rethrown with the iteration they occurred at.
ChainRecord run_chain(const ExperimentConfig& config, const Dataset& data);

// Loads the dataset, runs the chain and writes into config.output_dir:
//   chain.csv     iter,K,D,theta1,r1,w1,m1,w_r1 (NA where not available)
//   weights.csv   iter,log_weight (SIS cores)
//   sticks.csv    iter,w1,w2,wt1,wt2 (transcoded cores)
//   metadata.json config echo, seed, dataset fingerprint, versions, counters
//   summary.json  IAT per functional, means, ESS for SIS
ChainRecord run_experiment(const ExperimentConfig& config);

void write_chain_files(const ChainRecord& record, const ExperimentConfig& config,
                       const Dataset& data, const std::string& dir);
void write_summary(const ChainSummary& summary, const std::string& path);

// Reads chain.csv plus, when present next to it, weights.csv and sticks.csv.
ChainRecord read_chain_dir(const std::string& dir);

}  // namespace dpmix::harness
