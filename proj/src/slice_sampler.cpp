// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/slice_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpmix/error.hpp"

namespace dpmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_beta_pdf(double x, double a, double b) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

std::vector<ClusterSuffStats> stick_stats(const SliceState& st, const Dataset& data) {
  std::vector<ClusterSuffStats> out(st.v.v.size());
  for (std::size_t i = 0; i < st.r.size(); ++i) {
    const std::size_t h = static_cast<std::size_t>(st.r[i]) - 1;
    if (h >= out.size()) fail(ErrorCategory::invalid_argument, "label beyond the stick prefix");
    ++out[h].count;
    out[h].success_sum += data.y[i];
    out[h].failure_sum += data.trials - data.y[i];
  }
  return out;
}

int max_occupied(const std::vector<ClusterSuffStats>& stats) {
  for (std::size_t h = stats.size(); h > 0; --h)
    if (!stats[h - 1].empty()) return static_cast<int>(h);
  return 0;
}

SbLabels swap_labels(const SbLabels& r, int a, int b) {
  std::vector<int> out = r.values();
  for (int& x : out) {
    if (x == a) {
      x = b;
    } else if (x == b) {
      x = a;
    }
  }
  return SbLabels(std::move(out));
}

double log_joint_from_stats(const SliceState& st, const std::vector<ClusterSuffStats>& stats,
                            const BetaBinomial& family) {
  const double alpha = family.model().alpha;
  const double log_alpha = std::log(alpha);
  double acc = 0.0;
  for (std::size_t h = 0; h < st.v.v.size(); ++h) {
    const ClusterSuffStats& s = stats[h];
    const double m = st.m[h];
    if (s.count > 0) acc += s.count * std::log(st.w.weight(h));
    if (s.success_sum > 0) acc += static_cast<double>(s.success_sum) * std::log(m);
    if (s.failure_sum > 0) acc += static_cast<double>(s.failure_sum) * std::log1p(-m);
    acc += log_alpha + (alpha - 1.0) * std::log1p(-st.v.v[h]);
    acc += family.log_prior_density(m);
  }
  return acc;
}

}  // namespace

LabelMove label_move_from_int(int id) {
  if (id < 1 || id > 3) fail(ErrorCategory::invalid_argument, "move id must be 1, 2 or 3");
  return static_cast<LabelMove>(id);
}

bool MoveSet::enabled(LabelMove mv) const noexcept {
  switch (mv) {
    case LabelMove::swap_labels: return swap_labels;
    case LabelMove::swap_adjacent: return swap_adjacent;
    case LabelMove::swap_adjacent_refresh: return swap_adjacent_refresh;
  }
  return false;
}

MoveSet MoveSet::only(LabelMove mv) {
  MoveSet m;
  m.swap_labels = mv == LabelMove::swap_labels;
  m.swap_adjacent = mv == LabelMove::swap_adjacent;
  m.swap_adjacent_refresh = mv == LabelMove::swap_adjacent_refresh;
  return m;
}

double log_slice_joint(const SliceState& state, const Dataset& data, const ModelSpec& model) {
  BetaBinomial family(model);
  return log_joint_from_stats(state, stick_stats(state, data), family);
}

LabelMoveProposal propose_label_move(const SliceState& state, LabelMove move,
                                     const Dataset& data, const ModelSpec& model,
                                     RngStream& rng) {
  BetaBinomial family(model);
  const double alpha = model.alpha;
  const std::vector<ClusterSuffStats> stats = stick_stats(state, data);
  LabelMoveProposal out;
  out.proposed = state;
  SliceState& prop = out.proposed;

  if (move == LabelMove::swap_labels) {
    std::vector<int> occupied;
    for (std::size_t h = 0; h < stats.size(); ++h)
      if (!stats[h].empty()) occupied.push_back(static_cast<int>(h) + 1);
    if (occupied.size() < 2) return out;
    const std::size_t K = occupied.size();
    const std::size_t i = std::min(K - 1, static_cast<std::size_t>(rng.uniform() * K));
    std::size_t j = std::min(K - 2, static_cast<std::size_t>(rng.uniform() * (K - 1)));
    if (j >= i) ++j;
    const int a = occupied[i];
    const int b = occupied[j];
    prop.r = swap_labels(state.r, a, b);
    std::swap(prop.m[a - 1], prop.m[b - 1]);
    std::vector<ClusterSuffStats> pstats = stats;
    std::swap(pstats[a - 1], pstats[b - 1]);
    out.valid = true;
    out.log_acceptance = log_joint_from_stats(prop, pstats, family) -
                         log_joint_from_stats(state, stats, family);
    return out;
  }

  // h is uniform on 1..M, so h + 1 may be the first stick past the occupied
  // range. Sticks past M are unoccupied and follow the prior, so one missing from
  // the prefix is drawn from it in both states before the pair is swapped.
  const int M = max_occupied(stats);
  if (M < 1) return out;
  const int h = 1 + std::min(M - 1, static_cast<int>(rng.uniform() * M));
  const std::size_t a = static_cast<std::size_t>(h) - 1;
  const std::size_t b = a + 1;
  SliceState cur = state;
  std::vector<ClusterSuffStats> cstats = stats;
  if (b >= cur.v.v.size()) {
    cur.v.v.push_back(rng.beta(1.0, alpha));
    cur.m.push_back(family.draw_atom(ClusterSuffStats{}, rng));
    cur.w = weights_from_breaks(cur.v, WeightOrder::stick);
    cstats.emplace_back();
  }
  prop = cur;
  prop.r = swap_labels(cur.r, h, h + 1);
  std::swap(prop.m[a], prop.m[b]);
  std::vector<ClusterSuffStats> pstats = cstats;
  std::swap(pstats[a], pstats[b]);

  double log_q_ratio = 0.0;
  if (move == LabelMove::swap_adjacent) {
    std::swap(prop.v.v[a], prop.v.v[b]);
  } else {
    long tail = 0;
    for (std::size_t l = b + 1; l < cstats.size(); ++l) tail += cstats[l].count;
    // proposed conditionals, under the swapped allocation
    const double fa_a = 1.0 + pstats[a].count;
    const double fa_b = alpha + static_cast<double>(pstats[b].count + tail);
    const double fb_a = 1.0 + pstats[b].count;
    const double fb_b = alpha + static_cast<double>(tail);
    prop.v.v[a] = rng.beta(fa_a, fa_b);
    prop.v.v[b] = rng.beta(fb_a, fb_b);
    // reverse conditionals, under the current allocation
    const double ra_a = 1.0 + cstats[a].count;
    const double ra_b = alpha + static_cast<double>(cstats[b].count + tail);
    const double rb_a = 1.0 + cstats[b].count;
    const double rb_b = alpha + static_cast<double>(tail);
    log_q_ratio = log_beta_pdf(cur.v.v[a], ra_a, ra_b) + log_beta_pdf(cur.v.v[b], rb_a, rb_b) -
                  log_beta_pdf(prop.v.v[a], fa_a, fa_b) - log_beta_pdf(prop.v.v[b], fb_a, fb_b);
  }
  prop.w = weights_from_breaks(prop.v, WeightOrder::stick);
  out.valid = true;

  const int M_prop = max_occupied(pstats);
  out.log_acceptance = log_joint_from_stats(prop, pstats, family) -
                       log_joint_from_stats(cur, cstats, family) + log_q_ratio +
                       std::log(static_cast<double>(M)) - std::log(static_cast<double>(M_prop));
  return out;
}

SliceSampler::SliceSampler(const Dataset& data, const ModelSpec& model, SliceState init,
                           SliceOptions options)
    : data_(data),
      model_(model),
      family_(model, data.size()),
      options_(options),
      state_(std::move(init)) {
  if (data_.trials != model_.trials)
    fail(ErrorCategory::invalid_argument, "dataset and model disagree on trials");
  data_.validate();
  if (state_.r.size() != data_.size())
    fail(ErrorCategory::invalid_argument, "state does not match the dataset");
  if (state_.m.size() != state_.v.v.size() || state_.w.size() != state_.v.v.size())
    fail(ErrorCategory::invalid_argument, "stick prefix arrays differ in length");
  r_.resize(state_.r.size());
  for (std::size_t i = 0; i < r_.size(); ++i) r_[i] = state_.r[i] - 1;
  stats_ = dpmix::stick_stats(state_, data_);
}

int SliceSampler::occupied_count() const noexcept {
  return static_cast<int>(
      std::count_if(stats_.begin(), stats_.end(), [](const auto& s) { return !s.empty(); }));
}

void SliceSampler::recount() {
  std::vector<int> labels(r_.size());
  for (std::size_t i = 0; i < r_.size(); ++i) labels[i] = r_[i] + 1;
  state_.r = SbLabels(std::move(labels));
  stats_.assign(state_.v.v.size(), ClusterSuffStats{});
  for (std::size_t i = 0; i < r_.size(); ++i) family_.add(stats_[r_[i]], data_.y[i]);
}

void SliceSampler::rebuild_weights() {
  state_.w = weights_from_breaks(state_.v, WeightOrder::stick);
}

void SliceSampler::update_breaks(RngStream& rng) {
  const int M = max_occupied(stats_);
  state_.v.v.resize(M);
  state_.m.resize(M);
  stats_.resize(M);
  long tail = 0;
  for (const auto& s : stats_) tail += s.count;
  for (int h = 0; h < M; ++h) {
    tail -= stats_[h].count;
    state_.v.v[h] = rng.beta(1.0 + stats_[h].count, model_.alpha + static_cast<double>(tail));
  }
  rebuild_weights();
}

void SliceSampler::update_slices(RngStream& rng) {
  state_.u.resize(r_.size());
  double min_u = 1.0;
  for (std::size_t i = 0; i < r_.size(); ++i) {
    state_.u[i] = rng.uniform_open() * state_.w.weight(r_[i]);
    min_u = std::min(min_u, state_.u[i]);
  }
  while (!(state_.w.residual() < min_u)) {
    if (state_.w.size() >= options_.max_sticks)
      fail(ErrorCategory::tail_guard, "slice sampler stick prefix exceeded its cap");
    state_.w.extend(model_.alpha, rng, &state_.v);
    state_.m.push_back(family_.draw_atom(ClusterSuffStats{}, rng));
    stats_.emplace_back();
  }
}

void SliceSampler::update_atoms(RngStream& rng) {
  for (std::size_t h = 0; h < state_.m.size(); ++h) state_.m[h] = family_.draw_atom(stats_[h], rng);
}

void SliceSampler::update_allocations(RngStream& rng) {
  const std::size_t L = state_.m.size();
  const int J = model_.trials;
  std::vector<double> log_m(L), log_1m(L);
  for (std::size_t h = 0; h < L; ++h) {
    log_m[h] = std::log(state_.m[h]);
    log_1m[h] = std::log1p(-state_.m[h]);
  }
  std::vector<int> cand;
  cand.reserve(L);
  for (std::size_t i = 0; i < r_.size(); ++i) {
    const int y = data_.y[i];
    cand.clear();
    logw_.clear();
    double top = kNegInf;
    for (std::size_t h = 0; h < L; ++h) {
      if (!(state_.w.weight(h) > state_.u[i])) continue;
      const double lp = (y > 0 ? y * log_m[h] : 0.0) + (y < J ? (J - y) * log_1m[h] : 0.0);
      cand.push_back(static_cast<int>(h));
      logw_.push_back(lp);
      top = std::max(top, lp);
    }
    double total = 0.0;
    for (double& lw : logw_) {
      lw = std::exp(lw - top);
      total += lw;
    }
    double u = rng.uniform() * total;
    int pick = cand.back();
    for (std::size_t c = 0; c < cand.size(); ++c) {
      if (u < logw_[c]) {
        pick = cand[c];
        break;
      }
      u -= logw_[c];
    }
    r_[i] = pick;
  }
  recount();
}

bool SliceSampler::apply_move(LabelMove move, RngStream& rng) {
  const std::size_t idx = static_cast<std::size_t>(move) - 1;
  ++counters_.attempted[idx];
  LabelMoveProposal prop = propose_label_move(state_, move, data_, model_, rng);
  if (!prop.valid) return false;
  const double log_u = std::log(rng.uniform_open());
  if (!(log_u < prop.log_acceptance)) return false;
  state_ = std::move(prop.proposed);
  for (std::size_t i = 0; i < r_.size(); ++i) r_[i] = state_.r[i] - 1;
  stats_ = dpmix::stick_stats(state_, data_);
  ++counters_.accepted[idx];
  return true;
}

void SliceSampler::sweep(RngStream& rng) {
  update_breaks(rng);
  update_slices(rng);
  update_atoms(rng);
  update_allocations(rng);
  for (LabelMove mv : {LabelMove::swap_labels, LabelMove::swap_adjacent,
                       LabelMove::swap_adjacent_refresh}) {
    if (options_.moves.enabled(mv)) apply_move(mv, rng);
  }
}

SliceState initial_slice_state(const Dataset& data, const ModelSpec& model, RngStream& rng) {
  if (data.size() == 0) fail(ErrorCategory::invalid_argument, "empty dataset");
  if (data.trials != model.trials)
    fail(ErrorCategory::invalid_argument, "dataset and model disagree on trials");
  data.validate();
  model.validate();
  SliceState st;
  st.r = SbLabels(std::vector<int>(data.size(), 1));
  st.v.v.push_back(rng.beta(1.0 + static_cast<double>(data.size()), model.alpha));
  st.w = weights_from_breaks(st.v, WeightOrder::stick);
  st.m.push_back(sample_atom_posterior(suff_stats(data.y, data.trials), model, rng));
  return st;
}

SliceState slice_sweep(const SliceState& state, const Dataset& data, const ModelSpec& model,
                       MoveSet moves, RngStream& rng) {
  SliceOptions opts;
  opts.moves = moves;
  SliceSampler sampler(data, model, state, opts);
  sampler.sweep(rng);
  return sampler.state();
}

SliceState metropolis_label_move(const SliceState& state, LabelMove move, const Dataset& data,
                                 const ModelSpec& model, RngStream& rng) {
  SliceSampler sampler(data, model, state);
  sampler.apply_move(move, rng);
  return sampler.state();
}

}  // namespace dpmix
