// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/harness/tables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include "dpmix/error.hpp"
#include "dpmix/harness/dataset_io.hpp"
#include "dpmix/prior_samplers.hpp"
#include "dpmix/transcoding.hpp"

namespace dpmix::harness {

namespace fs = std::filesystem;

namespace {

std::string pattern_name(const std::vector<int>& r) {
  std::string s;
  for (int x : r) {
    if (!s.empty()) s += '-';
    s += std::to_string(x);
  }
  return s;
}

double two_sample_z(double p1, double n1, double p2, double n2) {
  const double se = std::sqrt(p1 * (1.0 - p1) / n1 + p2 * (1.0 - p2) / n2);
  return se > 0.0 ? (p1 - p2) / se : 0.0;
}

std::string fixed(const std::optional<double>& x, const char* fmt = "%.4f") {
  if (!x || std::isnan(*x)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, *x);
  return buf;
}

std::ofstream open_table(const ReproduceOptions& opts, const std::string& name, std::string& path) {
  if (opts.output_dir.empty()) fail(ErrorCategory::invalid_argument, "no output directory given");
  std::error_code ec;
  fs::create_directories(opts.output_dir, ec);
  if (ec) fail(ErrorCategory::io, "cannot create " + opts.output_dir + ": " + ec.message());
  path = (fs::path(opts.output_dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::io, "cannot write " + path);
  return out;
}

constexpr const char* kCollapsedKey = "collapsed2_tc";

ExperimentConfig base_config(const ReproduceOptions& opts) {
  ExperimentConfig c;
  c.iterations = opts.iterations;
  c.burn_in = opts.burn_in;
  c.alpha = opts.alpha;
  c.base_a = opts.base_a;
  c.base_b = opts.base_b;
  c.seed = opts.seed;
  c.dataset = opts.dataset;
  return c;
}

}  // namespace

TableMode table_mode_from_string(std::string_view name) {
  if (name == "table1") return TableMode::table1;
  if (name == "table2") return TableMode::table2;
  if (name == "figure1") return TableMode::figure1;
  fail(ErrorCategory::invalid_argument,
       "unknown table '" + std::string(name) + "' (table1, table2, figure1)");
}

const Table1Row& Table1Result::find(std::string_view quantity, std::string_view value) const {
  for (const auto& r : rows)
    if (r.quantity == quantity && r.value == value) return r;
  fail(ErrorCategory::invalid_argument,
       "no table1 row " + std::string(quantity) + "=" + std::string(value));
}

Table1Result compute_table1(const ReproduceOptions& opts) {
  const OoaLabels s(opts.s);
  const int n = static_cast<int>(s.size());
  if (opts.transcode_draws < 1 || opts.prior_draws < 1)
    fail(ErrorCategory::invalid_argument, "table1 needs positive draw counts");
  Table1Result res;
  res.transcode_draws = opts.transcode_draws;
  res.prior_draws = opts.prior_draws;

  RngStream trng(opts.seed, 0);
  RngStream extra(opts.seed, 2);
  double wt1 = 0.0, wt2 = 0.0;
  for (long i = 0; i < opts.transcode_draws; ++i) {
    const TranscodeDraw d = transcode(s, opts.alpha, trng);
    ++res.transcode_counts[d.r.values()];
    const StickRow row = stick_row(d, opts.alpha, extra);
    wt1 += row.wt1;
    wt2 += row.wt2;
  }
  res.wtilde1_mean = wt1 / static_cast<double>(opts.transcode_draws);
  res.wtilde2_mean = wt2 / static_cast<double>(opts.transcode_draws);

  RngStream prng(opts.seed, 1);
  for (long i = 0; i < opts.prior_draws; ++i) {
    StickBreakingDraw d = stick_breaking_sample(n, opts.alpha, prng);
    if (r_to_s(d.r) == s) {
      ++res.prior_counts[d.r.values()];
      ++res.prior_kept;
    }
  }
  if (res.prior_kept == 0)
    fail(ErrorCategory::exhausted, "no prior draw reproduced s; increase prior draws");

  const double nt = static_cast<double>(res.transcode_draws);
  const double nf = static_cast<double>(res.prior_kept);
  auto marginal = [&](const std::map<std::vector<int>, long>& counts, std::size_t pos, int h,
                      double total) {
    long c = 0;
    for (const auto& [r, k] : counts)
      if (r[pos] == h) c += k;
    return static_cast<double>(c) / total;
  };
  for (std::size_t pos : {std::size_t{0}, static_cast<std::size_t>(n - 1)}) {
    const std::string q = "r" + std::to_string(pos + 1);
    for (int h = 1; h <= opts.max_h; ++h) {
      Table1Row row{q, std::to_string(h), marginal(res.transcode_counts, pos, h, nt),
                    marginal(res.prior_counts, pos, h, nf), 0.0};
      row.z = two_sample_z(row.transcoding, nt, row.prior_filter, nf);
      res.rows.push_back(row);
    }
    if (n == 1) break;
  }

  std::vector<std::pair<long, std::vector<int>>> ranked;
  for (const auto& [r, k] : res.transcode_counts) ranked.emplace_back(k, r);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i < std::min(opts.top_patterns, ranked.size()); ++i) {
    const auto& r = ranked[i].second;
    const auto it = res.prior_counts.find(r);
    Table1Row row{"joint", pattern_name(r), static_cast<double>(ranked[i].first) / nt,
                  it == res.prior_counts.end() ? 0.0 : static_cast<double>(it->second) / nf, 0.0};
    row.z = two_sample_z(row.transcoding, nt, row.prior_filter, nf);
    res.rows.push_back(row);
  }
  return res;
}

std::optional<double> Table2Row::iat_of(std::string_view functional) const {
  for (std::size_t i = 0; i < kTable2Functionals.size(); ++i)
    if (kTable2Functionals[i] == functional) return iat[i];
  fail(ErrorCategory::invalid_argument, "unknown functional '" + std::string(functional) + "'");
}

std::vector<Table2Entry> table2_grid(const ReproduceOptions& opts) {
  std::vector<Table2Entry> grid;
  auto add = [&](std::string alg, std::string key, SamplerKind kind, bool tc, MoveSet moves) {
    ExperimentConfig c = base_config(opts);
    c.sampler = kind;
    c.transcode = tc;
    c.moves = moves;
    c.chain = grid.size();
    grid.push_back({std::move(alg), std::move(key), c});
  };
  add("SIS S2+transcoding", "sis_s2_tc", SamplerKind::sis_s2, true, MoveSet::none());
  add("collapsed2+transcoding", kCollapsedKey, SamplerKind::collapsed2, true, MoveSet::none());
  add("slice, no moves", "slice_m0", SamplerKind::slice, false, MoveSet::none());
  add("slice, move 1", "slice_m1", SamplerKind::slice, false, MoveSet::only(LabelMove::swap_labels));
  add("slice, move 2", "slice_m2", SamplerKind::slice, false, MoveSet::only(LabelMove::swap_adjacent));
  add("slice, move 3", "slice_m3", SamplerKind::slice, false,
      MoveSet::only(LabelMove::swap_adjacent_refresh));
  return grid;
}

std::vector<Table2Row> compute_table2(const ReproduceOptions& opts) {
  const std::vector<Table2Entry> grid = table2_grid(opts);
  std::vector<ChainRecord> records(grid.size());
  if (!opts.chains_dir.empty()) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      records[i] = read_chain_dir((fs::path(opts.chains_dir) / grid[i].key).string());
  } else {
    const Dataset data = load_dataset(opts.dataset);
    unsigned workers = opts.workers ? opts.workers : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(grid.size()));
    std::vector<std::exception_ptr> errors(grid.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i; (i = next++) < grid.size();) {
        try {
          records[i] = run_chain(grid[i].config, data);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<Table2Row> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ChainSummary sum = summarize_chain(records[i]);
    Table2Row row;
    row.algorithm = grid[i].algorithm;
    row.key = grid[i].key;
    row.ess = sum.ess;
    for (std::size_t f = 0; f < kTable2Functionals.size(); ++f) {
      const FunctionalSummary& fs = sum.at(kTable2Functionals[f]);
      if (fs.available && fs.iat) row.iat[f] = fs.iat->tau;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<long> histogram(const std::vector<double>& draws, int bins) {
  if (bins < 1) fail(ErrorCategory::invalid_argument, "histogram needs at least one bin");
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (double x : draws) {
    if (!(x >= 0.0 && x <= 1.0)) fail(ErrorCategory::domain, "weight outside [0, 1]");
    const int b = std::min(bins - 1, static_cast<int>(x * bins));
    ++counts[static_cast<std::size_t>(b)];
  }
  return counts;
}

Figure1Result compute_figure1(const ReproduceOptions& opts) {
  const Dataset data = load_dataset(opts.dataset);
  ChainRecord rec;
  if (!opts.chains_dir.empty()) {
    const fs::path dir = fs::path(opts.chains_dir) / kCollapsedKey;
    if (!fs::exists(dir / "sticks.csv"))
      fail(ErrorCategory::missing_input, "missing chain file: " + (dir / "sticks.csv").string());
    rec = read_chain_dir(dir.string());
  } else {
    const auto grid = table2_grid(opts);
    const auto it = std::find_if(grid.begin(), grid.end(),
                                 [](const Table2Entry& e) { return e.key == kCollapsedKey; });
    rec = run_chain(it->config, data);
  }

  Figure1Result res;
  res.bins = opts.bins;
  for (const StickRow& s : rec.sticks) {
    res.posterior[0].push_back(s.w1);
    res.posterior[1].push_back(s.wt1);
    res.posterior[2].push_back(s.w2);
    res.posterior[3].push_back(s.wt2);
  }

  const int n = static_cast<int>(data.size());
  RngStream stick_rng(opts.seed, 100), tilde_rng(opts.seed, 101);
  for (long i = 0; i < opts.figure_prior_draws; ++i) {
    const StickRow a = stick_row(transcode(polya_urn_sample(n, opts.alpha, stick_rng), opts.alpha,
                                           stick_rng),
                                 opts.alpha, stick_rng);
    const StickRow b = stick_row(transcode(polya_urn_sample(n, opts.alpha, tilde_rng), opts.alpha,
                                           tilde_rng),
                                 opts.alpha, tilde_rng);
    res.prior[0].push_back(a.w1);
    res.prior[1].push_back(b.wt1);
    res.prior[2].push_back(a.w2);
    res.prior[3].push_back(b.wt2);
  }
  for (std::size_t k = 0; k < 4; ++k) {
    res.posterior_counts[k] = histogram(res.posterior[k], opts.bins);
    res.prior_counts[k] = histogram(res.prior[k], opts.bins);
  }
  return res;
}

std::string emit_tables(TableMode mode, const ReproduceOptions& opts) {
  std::string path;
  switch (mode) {
    case TableMode::table1: {
      const Table1Result res = compute_table1(opts);
      std::ofstream out = open_table(opts, "table1.csv", path);
      out << "quantity,value,transcoding,prior_filter,z\n";
      for (const auto& r : res.rows)
        out << r.quantity << ',' << r.value << ',' << fixed(r.transcoding) << ','
            << fixed(r.prior_filter) << ',' << fixed(r.z, "%.2f") << '\n';
      break;
    }
    case TableMode::table2: {
      const auto rows = compute_table2(opts);
      std::ofstream out = open_table(opts, "table2.csv", path);
      out << "algorithm,ESS";
      for (auto f : kTable2Functionals) out << ",IAT_" << f;
      out << '\n';
      for (const auto& r : rows) {
        out << r.algorithm << ',' << fixed(r.ess, "%.0f");
        for (const auto& t : r.iat) out << ',' << fixed(t, "%.2f");
        out << '\n';
      }
      break;
    }
    case TableMode::figure1: {
      const Figure1Result res = compute_figure1(opts);
      std::ofstream out = open_table(opts, "figure1.csv", path);
      out << "bin_lo,bin_hi,w1,wt1,w2,wt2,prior_w1,prior_wt1,prior_w2,prior_wt2\n";
      for (int b = 0; b < res.bins; ++b) {
        const auto i = static_cast<std::size_t>(b);
        out << fixed(static_cast<double>(b) / res.bins, "%g") << ','
            << fixed(static_cast<double>(b + 1) / res.bins, "%g");
        for (const auto& c : res.posterior_counts) out << ',' << c[i];
        for (const auto& c : res.prior_counts) out << ',' << c[i];
        out << '\n';
      }
      break;
    }
  }
  return path;
}

}  // namespace dpmix::harness
