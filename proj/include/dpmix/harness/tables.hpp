// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpmix/harness/experiment.hpp"

namespace dpmix::harness {

enum class TableMode { table1, table2, figure1 };

TableMode table_mode_from_string(std::string_view name);

struct ReproduceOptions {
  std::string output_dir;
  std::string dataset;     // table2, figure1
  std::string chains_dir;  // when set, chains are read instead of run
  std::uint64_t seed = 1;
  double alpha = 1.0;
  double base_a = 1.0;
  double base_b = 1.0;
  long iterations = 100'000;
  double burn_in = 0.1;
  // table1
  std::vector<int> s{1, 1, 1, 1, 2};
  long transcode_draws = 100'000;
  long prior_draws = 1'000'000;
  int max_h = 8;
  std::size_t top_patterns = 8;
  // figure1
  int bins = 100;
  long figure_prior_draws = 100'000;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct Table1Row {
  std::string quantity;  // "r1", "r5", "joint"
  std::string value;     // stick index or pattern "1-1-1-1-2"
  double transcoding = 0.0;
  double prior_filter = 0.0;
  double z = 0.0;
};

struct Table1Result {
  std::vector<Table1Row> rows;
  long transcode_draws = 0;
  long prior_draws = 0;
  long prior_kept = 0;
  std::map<std::vector<int>, long> transcode_counts;
  std::map<std::vector<int>, long> prior_counts;
  double wtilde1_mean = 0.0;
  double wtilde2_mean = 0.0;

  const Table1Row& find(std::string_view quantity, std::string_view value) const;
};

// Marginals of r_1 and r_n and the most frequent joint patterns of r | s, from
// exact transcoding draws and from unconditional stick-breaking draws kept when
// their order-of-appearance labels equal s.
Table1Result compute_table1(const ReproduceOptions& opts);

inline constexpr std::array<std::string_view, 7> kTable2Functionals{
    "K", "w1", "r1", "w_r1", "m1", "theta1", "D"};

struct Table2Row {
  std::string algorithm;
  std::string key;  // subdirectory name under chains_dir
  std::optional<double> ess;
  std::array<std::optional<double>, 7> iat{};  // kTable2Functionals order

  std::optional<double> iat_of(std::string_view functional) const;
};

struct Table2Entry {
  std::string algorithm;
  std::string key;
  ExperimentConfig config;
};

// The comparison grid: sis_s2 and collapsed2 cores with transcoding, and the
// slice sampler without moves and with each move alone.
std::vector<Table2Entry> table2_grid(const ReproduceOptions& opts);
std::vector<Table2Row> compute_table2(const ReproduceOptions& opts);

struct Figure1Result {
  int bins = 0;
  // w1, wt1, w2, wt2
  std::array<std::vector<double>, 4> posterior;
  std::array<std::vector<double>, 4> prior;
  std::array<std::vector<long>, 4> posterior_counts;
  std::array<std::vector<long>, 4> prior_counts;
};

std::vector<long> histogram(const std::vector<double>& draws, int bins);

// Posterior draws from a collapsed2 + transcoding chain; prior draws from the
// transcoding of Polya-urn partitions of the same size, with w and w~ taken
// from independent replicates.
Figure1Result compute_figure1(const ReproduceOptions& opts);

// Writes table1.csv, table2.csv or figure1.csv into opts.output_dir and returns
// the path.
std::string emit_tables(TableMode mode, const ReproduceOptions& opts);

}  // namespace dpmix::harness
