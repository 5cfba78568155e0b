// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/harness/experiment.hpp"

#include <boost/version.hpp>
#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dpmix/error.hpp"
#include "dpmix/harness/dataset_io.hpp"
#include "dpmix/transcoding_sampler.hpp"

#ifndef DPMIX_VERSION
#define DPMIX_VERSION "0.0.0"
#endif

namespace dpmix::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
  if (std::isnan(x)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

double field(const Functionals& f, std::string_view name) {
  if (name == "K") return f.K;
  if (name == "D") return f.D;
  if (name == "theta1") return f.theta1;
  if (name == "r1") return f.r1 > 0 ? f.r1 : kNaN;
  if (name == "w1") return f.w1;
  if (name == "m1") return f.m1;
  if (name == "w_r1") return f.w_r1;
  fail(ErrorCategory::invalid_argument, "unknown functional '" + std::string(name) + "'");
}

// K, D and theta1 from a partition and per-observation atoms.
Functionals core_functionals(const OoaLabels& s, const std::vector<double>& theta,
                             const Dataset& data, const ModelSpec& model) {
  const std::size_t k = static_cast<std::size_t>(s.cluster_count());
  std::vector<int> sizes(k, 0);
  std::vector<double> atoms(k, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t j = static_cast<std::size_t>(s[i]) - 1;
    if (sizes[j]++ == 0) atoms[j] = theta[i];
  }
  Functionals f;
  f.K = static_cast<int>(k);
  f.D = deviance(data, sizes, atoms, model);
  f.theta1 = theta.at(0);
  f.r1 = 0;
  f.w1 = f.m1 = f.w_r1 = kNaN;
  return f;
}

}  // namespace

StickRow stick_row(const TranscodeDraw& draw, double alpha, RngStream& rng) {
  StickRow row;
  const WeightState& w = draw.w_prefix;
  const WeightState& wt = draw.wtilde;
  row.w1 = w.weight(0);
  // with a single stick in the prefix every observation sits on stick 1, so
  // v_2 | r is Beta(1, alpha)
  row.w2 = w.size() >= 2 ? w.weight(1) : (1.0 - row.w1) * rng.beta(1.0, alpha);
  row.wt1 = wt.weight(0);
  row.wt2 = wt.size() >= 2 ? wt.weight(1) : wt.residual() * rng.beta(1.0, alpha);
  return row;
}

namespace {

json config_json(const ExperimentConfig& c) {
  json j;
  j["sampler"] = std::string(to_string(c.sampler));
  j["transcode"] = c.transcode;
  j["iterations"] = c.iterations;
  j["burn_in"] = c.burn_in;
  j["alpha"] = c.alpha;
  j["base_a"] = c.base_a;
  j["base_b"] = c.base_b;
  j["trials"] = c.trials;
  j["seed"] = c.seed.value_or(0);
  j["chain"] = c.chain;
  j["dataset"] = c.dataset;
  j["moves"] = json::array();
  for (int m = 1; m <= 3; ++m)
    if (c.moves.enabled(static_cast<LabelMove>(m))) j["moves"].push_back(m);
  j["transcode_every"] = c.transcode_every;
  j["max_sticks"] = c.max_sticks;
  return j;
}

json iat_json(const std::optional<IatEstimate>& e) {
  if (!e) return nullptr;
  json j;
  j["tau"] = e->tau;
  j["window"] = e->window;
  j["truncated"] = e->truncated;
  return j;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorCategory::io, "cannot write " + p.string());
  return out;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out = open_out(p);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCategory::io, "write failed: " + p.string());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, const std::string& where) {
  if (cell == "NA") return kNaN;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size())
    fail(ErrorCategory::parse, where + ": malformed value '" + cell + "'");
  return v;
}

// Reads a CSV with an exact header into rows of doubles.
std::vector<std::vector<double>> read_table(const fs::path& p, const std::string& header) {
  std::ifstream in(p);
  if (!in) fail(ErrorCategory::missing_input, "missing chain file: " + p.string());
  std::string line;
  if (!std::getline(in, line) || line != header)
    fail(ErrorCategory::parse, p.string() + ": expected header '" + header + "'");
  const std::size_t width = split_csv(header).size();
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    const std::string where = p.string() + ":" + std::to_string(line_no);
    if (cells.size() != width) fail(ErrorCategory::parse, where + ": wrong number of fields");
    std::vector<double> row;
    row.reserve(width);
    for (const auto& c : cells) row.push_back(parse_cell(c, where));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string joined(const auto& names) {
  std::string s;
  for (const auto& n : names) {
    if (!s.empty()) s += ',';
    s += n;
  }
  return s;
}

}  // namespace

SamplerKind sampler_from_string(std::string_view name) {
  if (name == "slice") return SamplerKind::slice;
  if (name == "collapsed2") return SamplerKind::collapsed2;
  if (name == "sis_s2") return SamplerKind::sis_s2;
  fail(ErrorCategory::invalid_argument,
       "unknown sampler '" + std::string(name) + "' (slice, collapsed2, sis_s2)");
}

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::slice: return "slice";
    case SamplerKind::collapsed2: return "collapsed2";
    case SamplerKind::sis_s2: return "sis_s2";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (iterations < 1) fail(ErrorCategory::invalid_argument, "iterations must be at least 1");
  if (!(burn_in >= 0.0 && burn_in < 1.0))
    fail(ErrorCategory::invalid_argument, "burn-in fraction must lie in [0, 1)");
  if (!seed) fail(ErrorCategory::invalid_argument, "a seed is required");
  if (transcode_every < 1)
    fail(ErrorCategory::invalid_argument, "transcode-every must be at least 1");
  if (trials < 0) fail(ErrorCategory::invalid_argument, "trials must be non-negative");
  if (sampler == SamplerKind::slice && transcode)
    fail(ErrorCategory::invalid_argument, "the slice sampler already carries stick labels");
  if (sampler != SamplerKind::slice &&
      (moves.swap_labels || moves.swap_adjacent || moves.swap_adjacent_refresh))
    fail(ErrorCategory::invalid_argument, "label-switching moves apply to the slice sampler");
  if (max_sticks < 1) fail(ErrorCategory::invalid_argument, "max-sticks must be positive");
  ModelSpec{alpha, base_a, base_b, trials > 0 ? trials : 1}.validate();
}

long ExperimentConfig::burn_in_iterations() const {
  const long b = static_cast<long>(std::floor(burn_in * static_cast<double>(iterations)));
  return std::min(b, iterations - 1);
}

std::string ExperimentConfig::label() const {
  std::string s(to_string(sampler));
  if (transcode) s += "+transcoding";
  std::string m;
  for (int i = 1; i <= 3; ++i)
    if (moves.enabled(static_cast<LabelMove>(i))) m += std::to_string(i);
  if (!m.empty()) s += "+m" + m;
  return s;
}

std::vector<double> ChainRecord::column(std::string_view functional) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const ChainRow& r : rows) out.push_back(field(r.f, functional));
  return out;
}

const FunctionalSummary& ChainSummary::at(std::string_view name) const {
  for (const auto& f : functionals)
    if (f.name == name) return f;
  fail(ErrorCategory::invalid_argument, "unknown functional '" + std::string(name) + "'");
}

ChainSummary summarize_chain(const ChainRecord& record) {
  ChainSummary out;
  out.rows = record.rows.size();
  const bool weighted = !record.log_weights.empty();
  if (weighted && record.log_weights.size() != record.rows.size())
    fail(ErrorCategory::invalid_argument, "weights and rows differ in length");
  std::vector<double> w;
  if (weighted) {
    out.ess = ess(record.log_weights);
    double mx = -std::numeric_limits<double>::infinity();
    for (double lw : record.log_weights) mx = std::max(mx, lw);
    for (double lw : record.log_weights) w.push_back(std::exp(lw - mx));
  }
  for (std::string_view name : kFunctionalNames) {
    FunctionalSummary fs;
    fs.name = std::string(name);
    const std::vector<double> x = record.column(name);
    fs.available = !x.empty() && std::none_of(x.begin(), x.end(), [](double v) { return std::isnan(v); });
    if (!fs.available) {
      fs.mean = kNaN;
      out.functionals.push_back(std::move(fs));
      continue;
    }
    double num_sum = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double wi = weighted ? w[i] : 1.0;
      num_sum += wi * x[i];
      den += wi;
    }
    fs.mean = num_sum / den;
    const bool constant =
        std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
    if (x.size() >= 2 && !constant) fs.iat = iat(x);
    out.functionals.push_back(std::move(fs));
  }
  return out;
}

ChainRecord run_chain(const ExperimentConfig& config, const Dataset& data) {
  config.validate();
  data.validate();
  if (data.y.empty()) fail(ErrorCategory::empty_input, "dataset has no observations");
  if (config.trials > 0 && config.trials != data.trials)
    fail(ErrorCategory::invalid_argument,
         "configured trials " + std::to_string(config.trials) + " differ from the dataset's " +
             std::to_string(data.trials));
  const ModelSpec model{config.alpha, config.base_a, config.base_b, data.trials};
  const RngStream stream(*config.seed, config.chain);
  const long burn = config.burn_in_iterations();
  const auto recorded = [&](long it) {
    return it > burn && (it - burn) % config.transcode_every == 0;
  };

  ChainRecord rec;
  rec.rows.reserve(static_cast<std::size_t>((config.iterations - burn) / config.transcode_every));
  const auto start = std::chrono::steady_clock::now();
  long it = 0;
  try {
    if (config.sampler == SamplerKind::slice) {
      RngStream rng = stream.fork(kCoreStream);
      SliceSampler sampler(data, model, initial_slice_state(data, model, rng),
                           SliceOptions{config.moves, config.max_sticks});
      rec.has_stick_functionals = true;
      for (it = 1; it <= config.iterations; ++it) {
        sampler.sweep(rng);
        if (recorded(it)) rec.rows.push_back({it, extract_functionals(sampler.state(), data, model)});
      }
      rec.moves = sampler.counters();
    } else {
      const CoreSampler core =
          config.sampler == SamplerKind::sis_s2 ? CoreSampler::sis_s2 : CoreSampler::collapsed2;
      TranscodingSampler sampler(core, data, model, stream);
      RngStream extra = stream.fork(2);
      rec.has_stick_functionals = config.transcode;
      for (it = 1; it <= config.iterations; ++it) {
        sampler.advance_core();
        if (!recorded(it)) continue;
        const CoreChain& c = sampler.core();
        if (config.transcode) {
          const AugmentedDraw& a = sampler.augment();
          rec.rows.push_back({it, extract_functionals(a, data, model)});
          rec.sticks.push_back(stick_row(a.trans, model.alpha, extra));
        } else {
          rec.rows.push_back({it, core_functionals(c.s(), c.theta(), data, model)});
        }
        if (const auto lw = c.log_weight()) rec.log_weights.push_back(*lw);
      }
    }
  } catch (const Error& e) {
    throw Error(e.category(), "iteration " + std::to_string(it) + ": " + e.what());
  }
  if (config.record_timing)
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

void write_summary(const ChainSummary& summary, const std::string& path) {
  json j;
  j["rows"] = summary.rows;
  json iats = json::object(), means = json::object();
  for (const auto& f : summary.functionals) {
    iats[f.name] = f.available ? iat_json(f.iat) : json(nullptr);
    means[f.name] = f.available ? json(f.mean) : json(nullptr);
  }
  j["iat"] = iats;
  j["mean"] = means;
  if (summary.ess) {
    j["ess"] = *summary.ess;
    j["ess_fraction"] = *summary.ess / static_cast<double>(summary.rows);
  }
  write_json(path, j);
}

void write_chain_files(const ChainRecord& record, const ExperimentConfig& config,
                       const Dataset& data, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCategory::io, "cannot create output directory " + dir + ": " + ec.message());
  const fs::path base(dir);
  {
    std::ofstream out = open_out(base / "chain.csv");
    out << joined(kChainColumns) << '\n';
    for (const ChainRow& r : record.rows) {
      const Functionals& f = r.f;
      out << r.iter << ',' << f.K << ',' << num(f.D) << ',' << num(f.theta1) << ','
          << (f.r1 > 0 ? std::to_string(f.r1) : std::string("NA")) << ',' << num(f.w1) << ','
          << num(f.m1) << ',' << num(f.w_r1) << '\n';
    }
    if (!out) fail(ErrorCategory::io, "write failed: chain.csv");
  }
  if (!record.log_weights.empty()) {
    std::ofstream out = open_out(base / "weights.csv");
    out << "iter,log_weight\n";
    for (std::size_t i = 0; i < record.rows.size(); ++i)
      out << record.rows[i].iter << ',' << num(record.log_weights[i]) << '\n';
  }
  if (!record.sticks.empty()) {
    std::ofstream out = open_out(base / "sticks.csv");
    out << "iter,w1,w2,wt1,wt2\n";
    for (std::size_t i = 0; i < record.rows.size(); ++i) {
      const StickRow& s = record.sticks[i];
      out << record.rows[i].iter << ',' << num(s.w1) << ',' << num(s.w2) << ',' << num(s.wt1)
          << ',' << num(s.wt2) << '\n';
    }
  }

  json meta;
  meta["label"] = config.label();
  meta["config"] = config_json(config);
  meta["seed"] = config.seed.value_or(0);
  meta["stream"] = config.chain;
  json ds;
  ds["observations"] = data.size();
  ds["trials"] = data.trials;
  ds["fingerprint"] = hex64(dataset_fingerprint(data));
  meta["dataset"] = ds;
  meta["burn_in_iterations"] = config.burn_in_iterations();
  meta["rows"] = record.rows.size();
  meta["columns"] = json::array();
  for (auto c : kChainColumns) meta["columns"].push_back(std::string(c));
  if (record.moves) {
    json mv;
    mv["attempted"] = record.moves->attempted;
    mv["accepted"] = record.moves->accepted;
    meta["move_counters"] = mv;
  }
  json versions;
  versions["dpmix"] = DPMIX_VERSION;
  versions["boost"] = BOOST_LIB_VERSION;
  versions["compiler"] = __VERSION__;
  versions["cplusplus"] = __cplusplus;
  meta["versions"] = versions;
  if (record.wall_seconds) meta["wall_seconds"] = *record.wall_seconds;
  write_json(base / "metadata.json", meta);

  write_summary(summarize_chain(record), (base / "summary.json").string());
}

ChainRecord run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.output_dir.empty()) fail(ErrorCategory::invalid_argument, "no output directory given");
  const Dataset data = load_dataset(config.dataset);
  ChainRecord rec = run_chain(config, data);
  write_chain_files(rec, config, data, config.output_dir);
  return rec;
}

ChainRecord read_chain_dir(const std::string& dir) {
  const fs::path base(dir);
  ChainRecord rec;
  for (const auto& row : read_table(base / "chain.csv", joined(kChainColumns))) {
    ChainRow r;
    r.iter = static_cast<long>(row[0]);
    r.f.K = static_cast<int>(row[1]);
    r.f.D = row[2];
    r.f.theta1 = row[3];
    r.f.r1 = std::isnan(row[4]) ? 0 : static_cast<int>(row[4]);
    r.f.w1 = row[5];
    r.f.m1 = row[6];
    r.f.w_r1 = row[7];
    rec.rows.push_back(r);
  }
  rec.has_stick_functionals = !rec.rows.empty() && rec.rows.front().f.r1 > 0;
  auto check_iters = [&](const std::vector<std::vector<double>>& t, const char* name) {
    if (t.size() != rec.rows.size())
      fail(ErrorCategory::parse, std::string(name) + " and chain.csv differ in length");
    for (std::size_t i = 0; i < t.size(); ++i)
      if (static_cast<long>(t[i][0]) != rec.rows[i].iter)
        fail(ErrorCategory::parse, std::string(name) + " iteration mismatch at row " +
                                       std::to_string(i + 1));
  };
  if (fs::exists(base / "weights.csv")) {
    const auto t = read_table(base / "weights.csv", "iter,log_weight");
    check_iters(t, "weights.csv");
    for (const auto& row : t) rec.log_weights.push_back(row[1]);
  }
  if (fs::exists(base / "sticks.csv")) {
    const auto t = read_table(base / "sticks.csv", "iter,w1,w2,wt1,wt2");
    check_iters(t, "sticks.csv");
    for (const auto& row : t) rec.sticks.push_back({row[1], row[2], row[3], row[4]});
  }
  return rec;
}

}  // namespace dpmix::harness
