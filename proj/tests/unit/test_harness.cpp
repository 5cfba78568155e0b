// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dpmix/error.hpp"
#include "dpmix/harness/dataset_io.hpp"
#include "dpmix/harness/experiment.hpp"
#include "dpmix/harness/tables.hpp"

using namespace dpmix;
using namespace dpmix::harness;
namespace fs = std::filesystem;

namespace {

ErrorCategory category_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_dataset(in);
  } catch (const Error& e) {
    return e.category();
  }
  FAIL("no error for: " << text);
  return ErrorCategory::invalid_argument;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() /
                     ("dpmix_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig toy_config(SamplerKind kind, bool tc) {
  ExperimentConfig c;
  c.sampler = kind;
  c.transcode = tc;
  c.iterations = 2000;
  c.seed = 11;
  c.dataset = std::string(DPMIX_SOURCE_DIR) + "/data/toy.txt";
  return c;
}

}  // namespace

TEST_CASE("dataset parsing") {
  std::istringstream in("trials=9\n3\n7\n0\n");
  const Dataset d = parse_dataset(in);
  CHECK(d.trials == 9);
  CHECK(d.y == std::vector<int>{3, 7, 0});

  std::istringstream commented("# header comment\n\ntrials = 2\n# mid\n 2 \r\n1\n");
  CHECK(parse_dataset(commented).y == std::vector<int>{2, 1});

  CHECK(category_of("trials=9\n10\n") == ErrorCategory::range);
  CHECK(category_of("trials=9\n-1\n") == ErrorCategory::range);
  CHECK(category_of("trials=9\n3.5\n") == ErrorCategory::parse);
  CHECK(category_of("trials=9\n3,4\n") == ErrorCategory::parse);
  CHECK(category_of("3\n4\n") == ErrorCategory::parse);
  CHECK(category_of("trials=0\n0\n") == ErrorCategory::parse);
  CHECK(category_of("") == ErrorCategory::empty_input);
  CHECK(category_of("trials=9\n") == ErrorCategory::empty_input);
  CHECK(category_of("# nothing\n\n") == ErrorCategory::empty_input);
}

TEST_CASE("dataset files") {
  const Dataset toy = load_dataset(std::string(DPMIX_SOURCE_DIR) + "/data/toy.txt");
  CHECK(toy.trials == 1);
  CHECK(toy.y == std::vector<int>{1, 1, 0});

  const Dataset tack = load_dataset(std::string(DPMIX_SOURCE_DIR) + "/data/synthetic_thumbtack.txt");
  CHECK(tack.trials == 9);
  CHECK(tack.size() == 320);

  try {
    load_dataset("/nonexistent/dpmix/data.txt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::missing_input);
  }

  const fs::path dir = scratch("io");
  fs::create_directories(dir);
  const Dataset d{5, {0, 5, 2, 2}};
  write_dataset((dir / "d.txt").string(), d, "two\nlines");
  const Dataset back = load_dataset((dir / "d.txt").string());
  CHECK(back.y == d.y);
  CHECK(back.trials == 5);
  CHECK(dataset_fingerprint(back) == dataset_fingerprint(d));
  CHECK(dataset_fingerprint(Dataset{5, {0, 5, 2}}) != dataset_fingerprint(d));
  fs::remove_all(dir);
}

TEST_CASE("simulated datasets") {
  const ModelSpec m{1.0, 1.0, 1.0, 9};
  RngStream a(3, 0), b(3, 0);
  const Dataset d = simulate_dataset(500, m, a);
  CHECK(d.size() == 500);
  CHECK(d.trials == 9);
  CHECK_NOTHROW(d.validate());
  CHECK(simulate_dataset(500, m, b).y == d.y);
  RngStream c(3, 0);
  CHECK_THROWS_AS((simulate_dataset(0, m, c)), Error);
}

TEST_CASE("config validation") {
  ExperimentConfig c = toy_config(SamplerKind::collapsed2, true);
  CHECK_NOTHROW(c.validate());
  auto rejects = [](ExperimentConfig bad) {
    try {
      bad.validate();
    } catch (const Error& e) {
      return e.category() == ErrorCategory::invalid_argument;
    }
    return false;
  };
  ExperimentConfig x = c;
  x.iterations = 0;
  CHECK(rejects(x));
  x = c;
  x.burn_in = 1.0;
  CHECK(rejects(x));
  x = c;
  x.burn_in = -0.1;
  CHECK(rejects(x));
  x = c;
  x.seed.reset();
  CHECK(rejects(x));
  x = toy_config(SamplerKind::slice, true);
  CHECK(rejects(x));
  x = toy_config(SamplerKind::collapsed2, false);
  x.moves = MoveSet::only(LabelMove::swap_labels);
  CHECK(rejects(x));
  x = c;
  x.transcode_every = 0;
  CHECK(rejects(x));

  CHECK(sampler_from_string("sis_s2") == SamplerKind::sis_s2);
  CHECK_THROWS_AS((sampler_from_string("gibbs")), Error);
  ExperimentConfig lbl = toy_config(SamplerKind::slice, false);
  lbl.moves = MoveSet::only(LabelMove::swap_adjacent_refresh);
  CHECK(lbl.label() == "slice+m3");
}

TEST_CASE("row counts and burn-in") {
  const Dataset toy{1, {1, 1, 0}};
  for (SamplerKind k : {SamplerKind::slice, SamplerKind::collapsed2, SamplerKind::sis_s2}) {
    ExperimentConfig c = toy_config(k, k != SamplerKind::slice);
    c.iterations = 1000;
    c.burn_in = 0.25;
    const ChainRecord rec = run_chain(c, toy);
    REQUIRE(rec.rows.size() == 750);
    CHECK(rec.rows.front().iter == 251);
    CHECK(rec.rows.back().iter == 1000);
    CHECK(rec.has_stick_functionals);
    CHECK(rec.log_weights.size() == (k == SamplerKind::sis_s2 ? 750u : 0u));
    CHECK(rec.moves.has_value() == (k == SamplerKind::slice));
  }
  ExperimentConfig c = toy_config(SamplerKind::collapsed2, true);
  c.iterations = 1000;
  c.burn_in = 0.0;
  c.transcode_every = 4;
  const ChainRecord thin = run_chain(c, toy);
  CHECK(thin.rows.size() == 250);
  CHECK(thin.rows.front().iter == 4);
  CHECK(thin.sticks.size() == 250);

  c.trials = 3;
  CHECK_THROWS_AS((run_chain(c, toy)), Error);
}

TEST_CASE("untranscoded cores leave stick functionals empty") {
  const Dataset toy{1, {1, 1, 0}};
  const ChainRecord rec = run_chain(toy_config(SamplerKind::collapsed2, false), toy);
  CHECK_FALSE(rec.has_stick_functionals);
  CHECK(std::isnan(rec.rows.front().f.w1));
  CHECK(rec.rows.front().f.r1 == 0);
  const ChainSummary s = summarize_chain(rec);
  CHECK(s.at("K").available);
  CHECK_FALSE(s.at("w1").available);
  CHECK_FALSE(s.ess.has_value());

  // the augmented chain shares the core trajectory
  const ChainRecord aug = run_chain(toy_config(SamplerKind::collapsed2, true), toy);
  REQUIRE(aug.rows.size() == rec.rows.size());
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    REQUIRE(aug.rows[i].f.K == rec.rows[i].f.K);
    REQUIRE(aug.rows[i].f.theta1 == rec.rows[i].f.theta1);
    REQUIRE(aug.rows[i].f.D == doctest::Approx(rec.rows[i].f.D).epsilon(1e-12));
  }
}

TEST_CASE("experiment outputs are deterministic and follow the schema") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (SamplerKind k : {SamplerKind::slice, SamplerKind::collapsed2, SamplerKind::sis_s2}) {
    ExperimentConfig c = toy_config(k, k != SamplerKind::slice);
    if (k == SamplerKind::slice) c.moves = MoveSet::only(LabelMove::swap_adjacent);
    c.output_dir = a.string();
    const ChainRecord rec = run_experiment(c);
    c.output_dir = b.string();
    run_experiment(c);
    for (const char* f : {"chain.csv", "weights.csv", "sticks.csv", "metadata.json", "summary.json"}) {
      CHECK(fs::exists(a / f) == fs::exists(b / f));
      if (fs::exists(a / f)) CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(fs::exists(a / "weights.csv") == (k == SamplerKind::sis_s2));
    CHECK(fs::exists(a / "sticks.csv") == (k != SamplerKind::slice));

    const std::string chain = slurp(a / "chain.csv");
    CHECK(chain.substr(0, chain.find('\n')) == "iter,K,D,theta1,r1,w1,m1,w_r1");
    CHECK(slurp(a / "metadata.json").find("\"seed\": 11") != std::string::npos);
    CHECK(slurp(a / "metadata.json").find("wall_seconds") == std::string::npos);

    const ChainRecord back = read_chain_dir(a.string());
    REQUIRE(back.rows.size() == rec.rows.size());
    CHECK(back.log_weights.size() == rec.log_weights.size());
    CHECK(back.sticks.size() == rec.sticks.size());
    for (std::size_t i = 0; i < rec.rows.size(); ++i) {
      REQUIRE(back.rows[i].iter == rec.rows[i].iter);
      REQUIRE(back.rows[i].f.r1 == rec.rows[i].f.r1);
      REQUIRE(back.rows[i].f.w1 == doctest::Approx(rec.rows[i].f.w1).epsilon(1e-10));
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("different seeds or streams change the chain") {
  const Dataset toy{1, {1, 1, 0}};
  ExperimentConfig c = toy_config(SamplerKind::collapsed2, true);
  const auto base = run_chain(c, toy).column("w1");
  c.chain = 1;
  CHECK(run_chain(c, toy).column("w1") != base);
  c.chain = 0;
  c.seed = 12;
  CHECK(run_chain(c, toy).column("w1") != base);
}

TEST_CASE("malformed chain files") {
  const fs::path dir = scratch("bad_chain");
  fs::create_directories(dir);
  try {
    read_chain_dir(dir.string());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::missing_input);
    CHECK(std::string(e.what()).find("chain.csv") != std::string::npos);
  }
  std::ofstream(dir / "chain.csv") << "iter,K,D\n1,2,3\n";
  CHECK_THROWS_AS((read_chain_dir(dir.string())), Error);
  std::ofstream(dir / "chain.csv") << "iter,K,D,theta1,r1,w1,m1,w_r1\n1,2,x,0.1,1,0.2,0.3,0.2\n";
  try {
    read_chain_dir(dir.string());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::parse);
  }
  fs::remove_all(dir);
}

TEST_CASE("component errors carry the iteration") {
  const Dataset spread{1, {0, 1, 0, 1, 1, 0, 0, 1}};
  ExperimentConfig c = toy_config(SamplerKind::slice, false);
  c.max_sticks = 1;
  c.alpha = 50.0;
  try {
    run_chain(c, spread);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("iteration ", 0) == 0);
  }
}

TEST_CASE("tables") {
  ReproduceOptions o;
  o.transcode_draws = 20000;
  o.prior_draws = 200000;
  const Table1Result t1 = compute_table1(o);
  CHECK(t1.rows.size() == 8 + 8 + 8);
  CHECK(t1.prior_kept > 0);
  double total = 0.0;
  for (const auto& r : t1.rows)
    if (r.quantity == "r1") total += r.transcoding;
  CHECK(total <= 1.0 + 1e-12);
  CHECK(t1.find("joint", "1-1-1-1-2").transcoding > 0.3);
  CHECK_THROWS_AS((t1.find("r9", "1")), Error);

  const std::vector<double> draws{0.0, 0.005, 0.5, 0.999, 1.0};
  const auto h = histogram(draws, 100);
  CHECK(h.size() == 100);
  CHECK(std::accumulate(h.begin(), h.end(), 0L) == 5);
  CHECK(h[0] == 2);
  CHECK(h[99] == 2);
  CHECK_THROWS_AS((histogram(std::vector<double>{1.5}, 10)), Error);

  o.dataset = std::string(DPMIX_SOURCE_DIR) + "/data/toy.txt";
  o.iterations = 3000;
  o.figure_prior_draws = 2000;
  const Figure1Result f = compute_figure1(o);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::accumulate(f.posterior_counts[k].begin(), f.posterior_counts[k].end(), 0L) == 2700);
    CHECK(std::accumulate(f.prior_counts[k].begin(), f.prior_counts[k].end(), 0L) == 2000);
  }

  o.chains_dir = scratch("no_chains").string();
  try {
    compute_table2(o);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::missing_input);
    CHECK(std::string(e.what()).find("sis_s2_tc") != std::string::npos);
  }
  CHECK_THROWS_AS((table_mode_from_string("table3")), Error);
}

TEST_CASE("table2 from written chains matches the inline run") {
  ReproduceOptions o;
  o.dataset = std::string(DPMIX_SOURCE_DIR) + "/data/toy.txt";
  o.iterations = 3000;
  o.workers = 2;
  const auto inline_rows = compute_table2(o);
  const fs::path dir = scratch("chains");
  for (const Table2Entry& e : table2_grid(o)) {
    ExperimentConfig c = e.config;
    c.output_dir = (dir / e.key).string();
    run_experiment(c);
  }
  o.chains_dir = dir.string();
  const auto read_rows = compute_table2(o);
  REQUIRE(read_rows.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(read_rows[i].algorithm == inline_rows[i].algorithm);
    CHECK(read_rows[i].ess.has_value() == (i == 0));
    const auto a = read_rows[i].iat_of("K"), b = inline_rows[i].iat_of("K");
    REQUIRE(a.has_value() == b.has_value());
    if (a) CHECK(*a == doctest::Approx(*b).epsilon(1e-9));
  }
  fs::remove_all(dir);
}
