// Apache License, Version 2.0, refer to LICENSE.txt

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "dpmix/accept_reject.hpp"
#include "dpmix/diagnostics.hpp"
#include "dpmix/encodings.hpp"
#include "dpmix/error.hpp"
#include "dpmix/harness/dataset_io.hpp"
#include "dpmix/harness/experiment.hpp"
#include "dpmix/harness/tables.hpp"
#include "dpmix/prior_samplers.hpp"
#include "dpmix/transcoding.hpp"

#ifndef DPMIX_VERSION
#define DPMIX_VERSION "0.0.0"
#endif

using namespace dpmix;
using namespace dpmix::harness;

namespace {

std::string join(const std::vector<int>& v) {
  std::string s;
  for (int x : v) {
    if (!s.empty()) s += ',';
    s += std::to_string(x);
  }
  return s;
}

MoveSet parse_moves(const std::vector<int>& ids) {
  MoveSet m;
  for (int id : ids) {
    switch (label_move_from_int(id)) {
      case LabelMove::swap_labels: m.swap_labels = true; break;
      case LabelMove::swap_adjacent: m.swap_adjacent = true; break;
      case LabelMove::swap_adjacent_refresh: m.swap_adjacent_refresh = true; break;
    }
  }
  return m;
}

void print_summary(const ChainSummary& s) {
  std::printf("rows %zu\n", s.rows);
  if (s.ess) std::printf("ESS %.1f (%.4f of rows)\n", *s.ess, *s.ess / static_cast<double>(s.rows));
  std::printf("%-8s %14s %10s %8s\n", "name", "mean", "IAT", "window");
  for (const auto& f : s.functionals) {
    if (!f.available) {
      std::printf("%-8s %14s %10s %8s\n", f.name.c_str(), "NA", "NA", "-");
    } else if (!f.iat) {
      std::printf("%-8s %14.6g %10s %8s\n", f.name.c_str(), f.mean, "const", "-");
    } else {
      std::printf("%-8s %14.6g %10.3f %8zu%s\n", f.name.c_str(), f.mean, f.iat->tau,
                  f.iat->window, f.iat->truncated ? " truncated" : "");
    }
  }
}

// Prior identity battery; returns the number of failed checks.
int prior_check(std::uint64_t seed, double alpha, long draws) {
  int failed = 0;
  auto report = [&failed](const std::string& what, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", what.c_str());
    failed += !ok;
  };
  RngStream rng(seed, 0);
  const int hmax = 4;
  std::vector<long> first(hmax + 1, 0);
  for (long i = 0; i < draws; ++i) {
    const int h = stick_breaking_sample(1, alpha, rng).r[0];
    if (h <= hmax) ++first[static_cast<std::size_t>(h)];
  }
  for (int h = 1; h <= hmax; ++h) {
    const double p = std::pow(alpha, h - 1) / std::pow(alpha + 1.0, h);
    const double phat = static_cast<double>(first[static_cast<std::size_t>(h)]) / draws;
    const double sigma = std::sqrt(p * (1.0 - p) / draws);
    char buf[160];
    std::snprintf(buf, sizeof buf, "p(r1=%d) empirical %.5f expected %.5f (%.2f sigma)", h, phat, p,
                  (phat - p) / sigma);
    report(buf, std::abs(phat - p) <= 3.0 * sigma);
  }

  RngStream urn_rng(seed, 1), wurn_rng(seed, 2);
  std::map<std::vector<int>, long> urn, wurn;
  for (long i = 0; i < draws; ++i) {
    ++urn[polya_urn_sample(4, alpha, urn_rng).values()];
    ++wurn[weighted_urn_sample(4, alpha, wurn_rng).s.values()];
  }
  std::map<std::vector<int>, int> keys;
  for (const auto& [k, c] : urn) keys[k];
  for (const auto& [k, c] : wurn) keys[k];
  double tv = 0.0;
  for (const auto& [k, unused] : keys) {
    const double a = urn.count(k) ? static_cast<double>(urn[k]) / draws : 0.0;
    const double b = wurn.count(k) ? static_cast<double>(wurn[k]) / draws : 0.0;
    tv += 0.5 * std::abs(a - b);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "weighted urn vs Polya urn, n=4: TV %.5f over %zu patterns", tv,
                keys.size());
  report(buf, tv < 0.01);
  return failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet process mixture samplers with transcoding"};
  app.set_version_flag("--version", DPMIX_VERSION);
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file; settings go under [sample], [reproduce], ...");

  // transcode
  auto* tc = app.add_subcommand("transcode", "draw r | s by transcoding");
  std::vector<int> tc_s;
  double tc_alpha = 1.0;
  long tc_draws = 1;
  std::uint64_t tc_seed = 0;
  bool tc_weights = false;
  tc->add_option("--s", tc_s, "order-of-appearance labels, e.g. 1,1,2")->delimiter(',')->required();
  tc->add_option("--alpha", tc_alpha, "DP precision");
  tc->add_option("--draws", tc_draws, "number of draws")->check(CLI::PositiveNumber);
  tc->add_option("--seed", tc_seed, "random seed")->required();
  tc->add_flag("--weights", tc_weights, "also print w_1..w_H");

  // sample
  auto* smp = app.add_subcommand("sample", "run a sampler and write its chain files");
  ExperimentConfig cfg;
  std::string sampler_name = "collapsed2";
  std::vector<int> move_ids;
  std::uint64_t seed = 0;
  smp->add_option("--sampler", sampler_name, "slice, collapsed2 or sis_s2")->capture_default_str();
  smp->add_flag("--transcode", cfg.transcode, "wrap the core in the transcoding sampler");
  smp->add_option("--iterations", cfg.iterations)->capture_default_str();
  smp->add_option("--burn-in", cfg.burn_in, "fraction discarded")->capture_default_str();
  smp->add_option("--alpha", cfg.alpha)->capture_default_str();
  smp->add_option("--base-a", cfg.base_a)->capture_default_str();
  smp->add_option("--base-b", cfg.base_b)->capture_default_str();
  smp->add_option("--trials", cfg.trials, "0 reads J from the dataset")->capture_default_str();
  smp->add_option("--seed", seed)->required();
  smp->add_option("--chain", cfg.chain, "stream id")->capture_default_str();
  smp->add_option("--dataset", cfg.dataset)->required();
  smp->add_option("--output", cfg.output_dir)->required();
  smp->add_option("--moves", move_ids, "slice moves, e.g. 1,3")->delimiter(',');
  smp->add_option("--transcode-every", cfg.transcode_every)->capture_default_str();
  smp->add_option("--max-sticks", cfg.max_sticks)->capture_default_str();
  smp->add_flag("--record-timing", cfg.record_timing, "write wall time to the metadata");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "IAT and ESS from a chain directory");
  std::string diag_dir, diag_out;
  diag->add_option("chain_dir", diag_dir, "directory holding chain.csv")->required();
  diag->add_option("--output", diag_out, "write the summary as JSON");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "emit table1, table2 or figure1 data");
  ReproduceOptions ro;
  std::string rep_mode;
  rep->add_option("table", rep_mode, "table1, table2 or figure1")->required();
  rep->add_option("--output", ro.output_dir)->required();
  rep->add_option("--dataset", ro.dataset);
  rep->add_option("--chains", ro.chains_dir, "read chains from <dir>/<key>/ instead of running");
  rep->add_option("--seed", ro.seed)->required();
  rep->add_option("--alpha", ro.alpha)->capture_default_str();
  rep->add_option("--iterations", ro.iterations)->capture_default_str();
  rep->add_option("--burn-in", ro.burn_in)->capture_default_str();
  rep->add_option("--transcode-draws", ro.transcode_draws)->capture_default_str();
  rep->add_option("--prior-draws", ro.prior_draws)->capture_default_str();
  rep->add_option("--figure-prior-draws", ro.figure_prior_draws)->capture_default_str();
  rep->add_option("--workers", ro.workers, "0 uses every core")->capture_default_str();

  // oracle
  auto* orc = app.add_subcommand("oracle", "accept-reject rates and draws");
  std::vector<int> orc_sizes, orc_s;
  double orc_alpha = 1.0;
  int orc_method = 0;
  std::uint64_t orc_proposals = 0, orc_seed = 0;
  long orc_draws = 0;
  orc->add_option("--sizes", orc_sizes, "cluster sizes in order of appearance")->delimiter(',');
  orc->add_option("--s", orc_s, "labels to transcode by accept-reject")->delimiter(',');
  orc->add_option("--alpha", orc_alpha);
  orc->add_option("--method", orc_method, "1, 2 or 3 (default: all)");
  orc->add_option("--proposals", orc_proposals, "count acceptances among this many proposals");
  orc->add_option("--draws", orc_draws, "accepted draws to print (needs --s)");
  orc->add_option("--seed", orc_seed);

  // prior-check
  auto* pc = app.add_subcommand("prior-check", "prior identity battery");
  std::uint64_t pc_seed = 0;
  double pc_alpha = 1.0;
  long pc_draws = 1'000'000;
  pc->add_option("--seed", pc_seed)->required();
  pc->add_option("--alpha", pc_alpha)->capture_default_str();
  pc->add_option("--draws", pc_draws)->capture_default_str()->check(CLI::PositiveNumber);

  // simulate-data
  auto* sim = app.add_subcommand("simulate-data", "write a dataset simulated from the mixture");
  int sim_n = 320;
  ModelSpec sim_model{1.0, 1.0, 1.0, 9};
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  sim->add_option("--n", sim_n)->capture_default_str();
  sim->add_option("--trials", sim_model.trials)->capture_default_str();
  sim->add_option("--alpha", sim_model.alpha)->capture_default_str();
  sim->add_option("--base-a", sim_model.base_a)->capture_default_str();
  sim->add_option("--base-b", sim_model.base_b)->capture_default_str();
  sim->add_option("--seed", sim_seed)->required();
  sim->add_option("--output", sim_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[" << category_name(ErrorCategory::invalid_argument) << "]: " << e.what()
              << '\n';
    return exit_code(ErrorCategory::invalid_argument);
  }

  try {
    if (*tc) {
      const OoaLabels s(tc_s);
      RngStream rng(tc_seed, 0);
      for (long i = 0; i < tc_draws; ++i) {
        const TranscodeDraw d = transcode(s, tc_alpha, rng);
        std::printf("%s", join(d.r.values()).c_str());
        if (tc_weights) {
          for (double w : d.w_prefix.weights()) std::printf(" %.6f", w);
        }
        std::printf("\n");
      }
    } else if (*smp) {
      cfg.sampler = sampler_from_string(sampler_name);
      cfg.seed = seed;
      cfg.moves = parse_moves(move_ids);
      const ChainRecord rec = run_experiment(cfg);
      std::printf("%s: wrote %zu rows to %s\n", cfg.label().c_str(), rec.rows.size(),
                  cfg.output_dir.c_str());
      print_summary(summarize_chain(rec));
    } else if (*diag) {
      const ChainSummary sum = summarize_chain(read_chain_dir(diag_dir));
      print_summary(sum);
      if (!diag_out.empty()) write_summary(sum, diag_out);
    } else if (*rep) {
      const std::string path = emit_tables(table_mode_from_string(rep_mode), ro);
      std::printf("wrote %s\n", path.c_str());
    } else if (*orc) {
      if (orc_sizes.empty() && orc_s.empty())
        fail(ErrorCategory::invalid_argument, "oracle needs --sizes or --s");
      if (orc_method != 0) ar_method_from_int(orc_method);
      const std::vector<int> sizes = orc_sizes.empty() ? ooa_sizes(orc_s) : orc_sizes;
      std::printf("method,rate,one_in,empirical\n");
      for (int m = 1; m <= 3; ++m) {
        if (orc_method != 0 && m != orc_method) continue;
        const ArMethod method = ar_method_from_int(m);
        const double rate = ar_acceptance_rate(sizes, orc_alpha, method);
        std::string emp = "NA";
        if (orc_proposals > 0) {
          std::vector<int> labels = orc_s;
          if (labels.empty())
            for (std::size_t j = 0; j < sizes.size(); ++j)
              labels.insert(labels.end(), static_cast<std::size_t>(sizes[j]), static_cast<int>(j) + 1);
          RngStream rng(orc_seed, static_cast<std::uint64_t>(m));
          const auto acc = ar_count_acceptances(OoaLabels(labels), orc_alpha, method, orc_proposals, rng);
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.6g", static_cast<double>(acc) / orc_proposals);
          emp = buf;
        }
        std::printf("%d,%.6g,%.6g,%s\n", m, rate, 1.0 / rate, emp.c_str());
      }
      if (orc_draws > 0) {
        if (orc_s.empty()) fail(ErrorCategory::invalid_argument, "--draws needs --s");
        const ArMethod method = ar_method_from_int(orc_method == 0 ? 3 : orc_method);
        RngStream rng(orc_seed, 10);
        for (long i = 0; i < orc_draws; ++i) {
          const ArResult r = ar_transcode(OoaLabels(orc_s), orc_alpha, method, rng);
          std::printf("%s attempts=%llu\n", join(r.r.values()).c_str(),
                      static_cast<unsigned long long>(r.attempts));
        }
      }
    } else if (*pc) {
      return prior_check(pc_seed, pc_alpha, pc_draws) == 0 ? 0 : 1;
    } else if (*sim) {
      RngStream rng(sim_seed, 0);
      const Dataset data = simulate_dataset(sim_n, sim_model, rng);
      char note[200];
      std::snprintf(note, sizeof note,
                    "simulated by dpmtc simulate-data --n %d --trials %d --alpha %g --base-a %g "
                    "--base-b %g --seed %llu",
                    sim_n, sim_model.trials, sim_model.alpha, sim_model.base_a, sim_model.base_b,
                    static_cast<unsigned long long>(sim_seed));
      write_dataset(sim_out, data, note);
      std::printf("wrote %zu observations to %s\n", data.size(), sim_out.c_str());
    }
  } catch (const Error& e) {
    std::cerr << "error[" << category_name(e.category()) << "]: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
