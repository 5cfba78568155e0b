// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "dpmix/collapsed_gibbs.hpp"
#include "dpmix/diagnostics.hpp"
#include "dpmix/encodings.hpp"
#include "dpmix/sis.hpp"
#include "dpmix/slice_sampler.hpp"
#include "oracles.hpp"

using namespace dpmix;

using V = std::vector<int>;

namespace {

const Dataset kToy{1, {1, 1, 0}};
const ModelSpec kToyModel{1.0, 1.0, 1.0, 1};

std::map<V, double> toy_posterior() {
  return oracle::partition_posterior(kToy.y, 1, 1.0, 1.0, 1.0);
}

// Partition frequencies must lie within z standard errors, inflated by 2 tau
// for autocorrelated chains.
void check_frequencies(const std::vector<V>& draws, const std::map<V, double>& exact, double z = 4.0) {
  for (const auto& [s, p] : exact) {
    std::vector<double> ind(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) ind[i] = draws[i] == s ? 1.0 : 0.0;
    const double phat = std::accumulate(ind.begin(), ind.end(), 0.0) / draws.size();
    const double tau = (phat > 0.0 && phat < 1.0) ? iat(ind).tau : 0.5;
    const double se = std::sqrt(2.0 * tau * p * (1 - p) / draws.size());
    INFO("pattern size " << s.size() << " p=" << p << " phat=" << phat << " tau=" << tau);
    CHECK(std::abs(phat - p) < z * se);
  }
}

}  // namespace

TEST_CASE("toy posterior oracle") {
  const auto post = toy_posterior();
  CHECK(post.size() == 5);
  double z = 0.0;
  for (const auto& kv : post) z += kv.second;
  CHECK(z == doctest::Approx(1.0));
  // (1,1,0): grouping the two successes is favoured over grouping a success with the failure
  CHECK(post.at(V{1, 1, 2}) > post.at(V{1, 2, 1}));
}

TEST_CASE("collapsed gibbs") {
  RngStream rng(41, 0);
  SUBCASE("single observation") {
    const Dataset one{1, {1}};
    CollapsedGibbs g(one, kToyModel, initial_collapsed_state(one, kToyModel, rng));
    for (int i = 0; i < 100; ++i) {
      g.sweep(rng);
      REQUIRE(g.state().s.values() == V{1});
    }
  }
  SUBCASE("huge alpha gives singletons") {
    const Dataset d{9, {1, 4, 4, 8, 2}};
    const ModelSpec m{1e6, 1.0, 1.0, 9};
    CollapsedGibbs g(d, m, initial_collapsed_state(d, m, rng));
    long singletons = 0;
    for (int i = 0; i < 200; ++i) {
      g.sweep(rng);
      singletons += g.state().s.cluster_count() == 5;
    }
    CHECK(singletons >= 195);
  }
  SUBCASE("bookkeeping and exact posterior on the toy data") {
    CollapsedGibbs g(kToy, kToyModel, initial_collapsed_state(kToy, kToyModel, rng));
    std::vector<V> draws;
    for (int i = 0; i < 100000; ++i) {
      g.sweep(rng);
      const CollapsedState& st = g.state();
      REQUIRE(OoaLabels::is_canonical(st.s.values()));
      if (i % 1000 == 0) REQUIRE(st.clusters == cluster_stats(st.s, kToy));
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
          if (st.s[a] == st.s[b]) REQUIRE(st.theta[a] == st.theta[b]);
      draws.push_back(st.s.values());
    }
    check_frequencies(draws, toy_posterior());
  }
}

TEST_CASE("sis s2") {
  RngStream rng(42, 0);
  SUBCASE("single observation weight is the prior predictive") {
    const Dataset one{9, {4}};
    const WeightedDraw d = sis_s2(one, ModelSpec{1.0, 1.0, 1.0, 9}, rng);
    CHECK(d.log_weight == doctest::Approx(std::log(0.1)));
    CHECK(d.s.values() == V{1});
  }
  SUBCASE("mean weight estimates the marginal likelihood") {
    double exact = 0.0;
    for (const V& s : oracle::set_partitions(3)) {
      const V sizes = oracle::label_counts(s);
      double p = oracle::eppf_direct(sizes, 1.0);
      for (int j = 1; j <= static_cast<int>(sizes.size()); ++j) {
        V block;
        for (int i = 0; i < 3; ++i)
          if (s[i] == j) block.push_back(kToy.y[i]);
        p *= oracle::marginal_likelihood(block, 1, 1.0, 1.0);
      }
      exact += p;
    }
    SisS2 sis(kToy, kToyModel);
    const int N = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < N; ++i) {
      const double w = std::exp(sis.draw(rng).log_weight);
      sum += w;
      sum2 += w * w;
    }
    const double mean = sum / N;
    const double se = std::sqrt(std::max(sum2 / N - mean * mean, 0.0) / N);
    REQUIRE(se > 0.0);
    CHECK(std::abs(mean - exact) < 4.0 * se);
  }
  SUBCASE("weighted partition frequencies on the toy data") {
    SisS2 sis(kToy, kToyModel);
    const int N = 200000;
    std::map<V, double> wsum;
    std::vector<double> lw;
    std::vector<V> s;
    for (int i = 0; i < N; ++i) {
      const WeightedDraw d = sis.draw(rng);
      REQUIRE(std::isfinite(d.log_weight));
      lw.push_back(d.log_weight);
      s.push_back(d.s.values());
    }
    const double mx = *std::max_element(lw.begin(), lw.end());
    double z = 0.0;
    for (int i = 0; i < N; ++i) {
      const double w = std::exp(lw[i] - mx);
      wsum[s[i]] += w;
      z += w;
    }
    const double n_eff = ess(lw);
    for (const auto& [pattern, p] : toy_posterior()) {
      const double phat = wsum[pattern] / z;
      CHECK(std::abs(phat - p) < 4.0 * std::sqrt(p * (1 - p) / n_eff));
    }
  }
}

TEST_CASE("slice sampler joint and label moves") {
  RngStream rng(43, 0);
  const Dataset d{1, {1, 1, 0, 1, 1, 0, 1}};
  const ModelSpec m{1.0, 1.0, 1.0, 1};

  SUBCASE("swap_labels acceptance follows the weight ratio") {
    // sticks 1 and 2 with weights 0.6 and 0.3, sizes 2 and 5, equal atoms
    SliceState st;
    st.r = SbLabels(V{1, 1, 2, 2, 2, 2, 2});
    st.v = BreakFractions{{0.6, 0.75}};
    st.w = weights_from_breaks(st.v, WeightOrder::stick);
    st.m = {0.5, 0.5};
    const LabelMoveProposal p = propose_label_move(st, LabelMove::swap_labels, d, m, rng);
    REQUIRE(p.valid);
    CHECK(p.log_acceptance == doctest::Approx(3.0 * std::log(2.0)));
    CHECK(r_to_s(p.proposed.r) == r_to_s(st.r));

    st.r = SbLabels(V{1, 1, 1, 1, 1, 2, 2});
    const LabelMoveProposal q = propose_label_move(st, LabelMove::swap_labels, d, m, rng);
    CHECK(q.log_acceptance == doctest::Approx(-3.0 * std::log(2.0)));
  }
  SUBCASE("symmetric state is always accepted") {
    SliceState st;
    st.r = SbLabels(V{1, 2, 1, 2, 1, 2, 3});
    st.v = BreakFractions{{0.4, 0.4 / 0.6, 0.5}};
    st.w = weights_from_breaks(st.v, WeightOrder::stick);
    st.m = {0.3, 0.3, 0.6};
    const Dataset sym{1, {1, 1, 0, 0, 1, 1, 0}};
    // sticks 1 and 2 both hold {1,0,1}; pick until the proposal pairs them
    for (int i = 0; i < 200; ++i) {
      const LabelMoveProposal p = propose_label_move(st, LabelMove::swap_labels, sym, m, rng);
      if (distinct_in_order(p.proposed.r).values() == V{2, 1, 3}) {
        CHECK(p.log_acceptance == doctest::Approx(0.0));
        break;
      }
    }
  }
  SUBCASE("moves preserve the partition and report exact joint ratios") {
    SliceSampler sampler(d, m, initial_slice_state(d, m, rng));
    for (int i = 0; i < 50; ++i) sampler.sweep(rng);
    for (int mv = 1; mv <= 3; ++mv) {
      for (int i = 0; i < 200; ++i) {
        sampler.sweep(rng);
        const SliceState& st = sampler.state();
        const LabelMoveProposal p = propose_label_move(st, label_move_from_int(mv), d, m, rng);
        if (!p.valid) continue;
        REQUIRE(r_to_s(p.proposed.r) == r_to_s(st.r));
        if (mv == 1) {
          REQUIRE(p.log_acceptance ==
                  doctest::Approx(log_slice_joint(p.proposed, d, m) - log_slice_joint(st, d, m)));
        }
      }
    }
  }
}

TEST_CASE("slice sampler invariants") {
  RngStream rng(44, 0);
  const Dataset d{9, {0, 1, 8, 9, 9, 4, 5, 0}};
  const ModelSpec m{1.0, 1.0, 1.0, 9};
  MoveSet all{true, true, true};
  SliceSampler sampler(d, m, initial_slice_state(d, m, rng), SliceOptions{all});
  for (int i = 0; i < 2000; ++i) {
    sampler.update_breaks(rng);
    sampler.update_slices(rng);
    const SliceState& st = sampler.state();
    double covered = 0.0;
    for (double w : st.w.weights()) covered += w;
    const double umin = *std::min_element(st.u.begin(), st.u.end());
    REQUIRE(covered > 1.0 - umin);
    for (std::size_t j = 0; j < st.r.size(); ++j) {
      REQUIRE(st.u[j] > 0.0);
      REQUIRE(st.u[j] < st.w.weight(static_cast<std::size_t>(st.r[j]) - 1));
    }
    sampler.update_atoms(rng);
    sampler.update_allocations(rng);
    for (int mv = 1; mv <= 3; ++mv) sampler.apply_move(label_move_from_int(mv), rng);
    REQUIRE(sampler.state().m.size() == sampler.state().w.size());
  }
  const MoveCounters& c = sampler.counters();
  for (int k = 0; k < 3; ++k) {
    CHECK(c.attempted[k] > 0);
    CHECK(c.accepted[k] <= c.attempted[k]);
  }
}

TEST_CASE("slice sampler single observation weight") {
  RngStream rng(45, 0);
  const Dataset one{1, {1}};
  SliceSampler sampler(one, kToyModel, initial_slice_state(one, kToyModel, rng));
  const int N = 100000;
  std::vector<double> w1(N), v_occ(N);
  for (int i = 0; i < N; ++i) {
    sampler.sweep(rng);
    const SliceState& st = sampler.state();
    w1[i] = st.w.weight(0);
    v_occ[i] = st.v.v[static_cast<std::size_t>(st.r[0]) - 1];
  }
  // One observation carries no information about w, so w_1 keeps its Beta(1, alpha)
  // prior; the break of the occupied stick is Beta(2, alpha).
  const double mean_w1 = std::accumulate(w1.begin(), w1.end(), 0.0) / N;
  const double mean_v = std::accumulate(v_occ.begin(), v_occ.end(), 0.0) / N;
  CHECK(std::abs(mean_w1 - 0.5) < 4.0 * std::sqrt(2.0 * iat(w1).tau / 12.0 / N));
  CHECK(std::abs(mean_v - 2.0 / 3.0) < 4.0 * std::sqrt(2.0 * iat(v_occ).tau / 18.0 / N));
}

TEST_CASE("slice sampler matches the exact toy posterior with every move setting") {
  const auto exact = toy_posterior();
  for (int setting = 0; setting <= 3; ++setting) {
    RngStream rng(46, setting);
    MoveSet moves = setting == 0 ? MoveSet::none() : MoveSet::only(label_move_from_int(setting));
    SliceSampler sampler(kToy, kToyModel, initial_slice_state(kToy, kToyModel, rng), SliceOptions{moves});
    std::vector<V> draws;
    for (int i = 0; i < 100000; ++i) {
      sampler.sweep(rng);
      draws.push_back(r_to_s(sampler.state().r).values());
    }
    INFO("move setting " << setting);
    check_frequencies(draws, exact);
  }
}
